"""Module entry point: ``python -m innotree``."""

import sys

from .cli import main

sys.exit(main())
