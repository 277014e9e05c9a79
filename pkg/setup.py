"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: ``innotree._kernels``
falls back to the pure-Python implementations when the compiled module is
missing. Build in place with ``python setup.py build_ext --inplace`` or let
pip do it during installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "innotree._kernels._speedups",
                sources=["src/innotree/_kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
        },
    )

setup(ext_modules=ext_modules)
