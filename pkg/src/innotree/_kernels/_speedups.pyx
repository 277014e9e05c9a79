# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the two bitmask kernels.

Observable behavior matches the pure-Python reference exactly: the same
masks in the same ascending order, the same closure and trace. The
enumerator replaces the reference's nested generators with an explicit
odometer over per-node option streams — advancing a node tries its first
child (least significant bits) first and carries into later children —
which needs no Python objects per step. Selections are limited to 64
positions and fact spaces to 64 symbols; the dispatcher enforces both.
"""

from libc.stdlib cimport calloc, free, malloc

ctypedef unsigned long long u64

cdef int CONN_AND = 1
cdef int CONN_OR = 2

BACKEND_NAME = "compiled"


cdef class _MaskEnumerator:
    """Iterator over admissible selection masks, ascending.

    Per node: ``cur`` holds the subtree's current option mask (own bit plus
    chosen descendants) and ``present`` says whether an OR parent currently
    includes it. Advancing is a mixed-radix carry: the first child varies
    fastest, and an OR child's stream is its option stream prefixed by
    "absent".
    """

    cdef int n
    cdef int conn[64]
    cdef int child_start[65]
    cdef int* child_list
    cdef u64 cur[64]
    cdef unsigned char present[64]
    cdef bint started
    cdef bint exhausted

    def __cinit__(self, connectors, children, int n):
        cdef int p, total, i
        if n < 0 or n > 64:
            raise ValueError("at most 64 positions are supported")
        self.n = n
        self.started = False
        self.exhausted = False
        total = 0
        for p in range(n):
            total += len(children[p])
        self.child_list = <int*> malloc((total if total > 0 else 1)
                                        * sizeof(int))
        if self.child_list == NULL:
            raise MemoryError()
        total = 0
        for p in range(n):
            self.conn[p] = connectors[p]
            self.child_start[p] = total
            for i in range(len(children[p])):
                self.child_list[total] = children[p][i]
                total += 1
        self.child_start[n] = total

    def __dealloc__(self):
        if self.child_list != NULL:
            free(self.child_list)

    cdef void _recompute(self, int p):
        cdef u64 mask = (<u64> 1) << p
        cdef int i, c
        for i in range(self.child_start[p], self.child_start[p + 1]):
            c = self.child_list[i]
            if self.present[c]:
                mask |= self.cur[c]
        self.cur[p] = mask

    cdef void _reset(self, int p):
        # First option of the subtree at p. AND: every child at its first
        # option. OR: all children absent, then one advance, which brings
        # in the first child — the all-absent combination is never valid.
        cdef int i, c
        cdef int start = self.child_start[p]
        cdef int stop = self.child_start[p + 1]
        if start == stop:
            self.cur[p] = (<u64> 1) << p
            return
        if self.conn[p] == CONN_AND:
            for i in range(start, stop):
                c = self.child_list[i]
                self.present[c] = 1
                self._reset(c)
            self._recompute(p)
        else:
            for i in range(start, stop):
                self.present[self.child_list[i]] = 0
            self._advance(p)

    cdef bint _advance(self, int p):
        # Next option of the subtree at p; False when the stream wraps
        # around (the caller then resets or drops the subtree).
        cdef int i, c
        cdef int start = self.child_start[p]
        cdef int stop = self.child_start[p + 1]
        if start == stop:
            return False
        if self.conn[p] == CONN_AND:
            for i in range(start, stop):
                c = self.child_list[i]
                if self._advance(c):
                    self._recompute(p)
                    return True
                self._reset(c)
            return False
        for i in range(start, stop):
            c = self.child_list[i]
            if self.present[c]:
                if self._advance(c):
                    self._recompute(p)
                    return True
                self.present[c] = 0
            else:
                self.present[c] = 1
                self._reset(c)
                self._recompute(p)
                return True
        return False

    def __iter__(self):
        return self

    def __next__(self):
        if self.exhausted:
            raise StopIteration
        if not self.started:
            self.started = True
            if self.n == 0:
                self.exhausted = True
                raise StopIteration
            self._reset(0)
            return self.cur[0]
        if self._advance(0):
            return self.cur[0]
        self.exhausted = True
        raise StopIteration


def iter_admissible_masks(connectors, children, n):
    """Every admissible selection mask in ascending integer order."""
    return _MaskEnumerator(connectors, children, n)


def closure_fixpoint(antecedent_masks, consequent_masks, seed_mask,
                     num_symbols, want_trace=False):
    """Least fixpoint of monotone rules over a 64-bit fact mask.

    Same contract as the reference: rules scan in declaration order, fire
    at most once with immediate visibility, and passes repeat until
    nothing changes. Returns ``(derived, trace)`` with the trace a tuple
    of ``(rule_index, fact_index)`` pairs, or ``None`` unless requested.
    """
    cdef int rule_count = len(antecedent_masks)
    cdef u64 derived = <u64> seed_mask
    cdef u64 ant, new, bits
    cdef int ri, k
    cdef bint changed = True
    cdef u64* ants = <u64*> malloc((rule_count if rule_count > 0 else 1)
                                   * sizeof(u64))
    cdef u64* cons = <u64*> malloc((rule_count if rule_count > 0 else 1)
                                   * sizeof(u64))
    cdef unsigned char* fired = <unsigned char*> calloc(
        rule_count if rule_count > 0 else 1, 1)
    if ants == NULL or cons == NULL or fired == NULL:
        free(ants)
        free(cons)
        free(fired)
        raise MemoryError()
    trace = [] if want_trace else None
    try:
        for ri in range(rule_count):
            ants[ri] = <u64> antecedent_masks[ri]
            cons[ri] = <u64> consequent_masks[ri]
        while changed:
            changed = False
            for ri in range(rule_count):
                if fired[ri]:
                    continue
                ant = ants[ri]
                if derived & ant != ant:
                    continue
                fired[ri] = 1
                new = cons[ri] & ~derived
                if new == 0:
                    continue
                derived |= new
                changed = True
                if trace is not None:
                    bits = new
                    k = 0
                    while bits:
                        if bits & 1:
                            trace.append((ri, k))
                        bits >>= 1
                        k += 1
    finally:
        free(ants)
        free(cons)
        free(fired)
    return derived, tuple(trace) if trace is not None else None
