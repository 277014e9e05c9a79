"""Pure-Python implementations of the two bitmask kernels.

These are the reference implementations; a compiled twin with identical
observable behavior may shadow them when the optional extension module is
built.

Node selections are encoded as integer bitmasks over preorder positions:
position ``p`` (0 = root) owns bit ``1 << p``. Under this layout, ascending
integer order on masks enumerates selections child-order-first: all
selections using only the first child of a node come before any selection
that brings in a later child.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

CONN_LEAF = 0
CONN_AND = 1
CONN_OR = 2

BACKEND_NAME = "pure-python"


def iter_admissible_masks(connectors: Sequence[int],
                          children: Sequence[Sequence[int]],
                          n: int) -> Iterator[int]:
    """Yield every admissible selection mask in ascending integer order.

    ``connectors[p]`` codes the combinator at preorder position ``p``
    (CONN_LEAF, CONN_AND, or CONN_OR) and ``children[p]`` lists its child
    positions. A mask is admissible when the root is selected, every
    selected AND node includes all of its children, every selected OR node
    includes at least one child — inclusive choice, so any non-empty
    subset — and no node is selected without its parent. Nodes without
    children are terminal regardless of connector code.
    """

    def options(pos: int) -> Iterator[int]:
        # Every admissible mask of the subtree rooted at pos, each
        # including pos's own bit, ascending.
        own = 1 << pos
        kids = children[pos]
        if not kids:
            yield own
            return
        if connectors[pos] == CONN_AND:
            yield from _combine([_present(k) for k in kids], own)
        else:
            stream = _combine([_maybe(k) for k in kids], own)
            next(stream)  # drop the no-child combination: OR needs >= 1
            yield from stream

    def _present(pos: int) -> Callable[[], Iterator[int]]:
        return lambda: options(pos)

    def _maybe(pos: int) -> Callable[[], Iterator[int]]:
        def stream() -> Iterator[int]:
            yield 0
            yield from options(pos)
        return stream

    def _combine(factories: list[Callable[[], Iterator[int]]],
                 base: int) -> Iterator[int]:
        # Cartesian combination without materializing child streams. A
        # later sibling sits at higher preorder positions and therefore
        # owns more significant bits, so it must vary slowest: iterate the
        # last factory outermost to keep the combined stream ascending.
        if not factories:
            yield base
            return
        init, last = factories[:-1], factories[-1]
        for last_mask in last():
            yield from _combine(init, base | last_mask)

    return options(0)


def closure_fixpoint(antecedent_masks: Sequence[int],
                     consequent_masks: Sequence[int],
                     seed_mask: int,
                     num_symbols: int,
                     want_trace: bool = False,
                     ) -> tuple[int, tuple[tuple[int, int], ...] | None]:
    """Least fixpoint of monotone rules over a fact bitmask.

    Rules are scanned in declaration order. A rule whose antecedent bits
    are all present fires exactly once, immediately adding its consequent
    bits, so later rules in the same pass already see them. Passes repeat
    until a full scan derives nothing new. Returns ``(derived, trace)``;
    the trace is a tuple of ``(rule_index, fact_index)`` pairs recording
    which rule first derived which fact, or ``None`` unless requested.
    ``num_symbols`` is accepted for interface parity and not needed here.
    """
    derived = seed_mask
    fired = 0
    trace: list[tuple[int, int]] | None = [] if want_trace else None
    rule_count = len(antecedent_masks)
    changed = True
    while changed:
        changed = False
        for ri in range(rule_count):
            if fired >> ri & 1:
                continue
            ant = antecedent_masks[ri]
            if derived & ant != ant:
                continue
            fired |= 1 << ri
            new = consequent_masks[ri] & ~derived
            if not new:
                continue
            derived |= new
            changed = True
            if trace is not None:
                bits = new
                while bits:
                    low = bits & -bits
                    trace.append((ri, low.bit_length() - 1))
                    bits ^= low
    return derived, tuple(trace) if trace is not None else None
