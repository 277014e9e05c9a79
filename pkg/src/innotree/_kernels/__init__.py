"""Bitmask kernels with a compiled fast path and a pure-Python fallback.

The compiled extension is optional: when it failed to build, when inputs
exceed its 64-bit words, or when the INNOTREE_PURE_PYTHON environment
variable is set to a non-empty value other than "0", calls route to the
pure-Python implementations. Both backends produce identical outputs.
"""

from __future__ import annotations

import os
from typing import Iterator, Sequence

from . import purepy
from .purepy import CONN_AND, CONN_LEAF, CONN_OR

_FORCE_PURE = os.environ.get("INNOTREE_PURE_PYTHON", "") not in ("", "0")

_compiled = None
if not _FORCE_PURE:
    try:
        from . import _speedups as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure-python"

# Masks handled by the compiled extension must fit one machine word.
MAX_COMPILED_BITS = 64


def iter_admissible_masks(connectors: Sequence[int],
                          children: Sequence[Sequence[int]],
                          n: int) -> Iterator[int]:
    """Stream admissible selection masks in ascending integer order."""
    if _compiled is not None and n <= MAX_COMPILED_BITS:
        return _compiled.iter_admissible_masks(list(connectors),
                                               [list(c) for c in children], n)
    return purepy.iter_admissible_masks(connectors, children, n)


def closure_fixpoint(antecedent_masks: Sequence[int],
                     consequent_masks: Sequence[int],
                     seed_mask: int,
                     num_symbols: int,
                     want_trace: bool = False,
                     ) -> tuple[int, tuple[tuple[int, int], ...] | None]:
    """Forward-chain rules over fact bitmasks to their least fixpoint."""
    if _compiled is not None and num_symbols <= MAX_COMPILED_BITS:
        return _compiled.closure_fixpoint(list(antecedent_masks),
                                          list(consequent_masks),
                                          seed_mask, num_symbols, want_trace)
    return purepy.closure_fixpoint(antecedent_masks, consequent_masks,
                                   seed_mask, num_symbols, want_trace)
