"""Compare the compiled kernels against the pure-Python fallback.

Runs both backends on identical inputs — enumeration over random AND/OR
structures and closure over random rule systems — checks that their outputs
agree, and prints timings with the speedup factor.

Usage: python3 benchmarks/bench_kernels.py [--trees N] [--rules N]
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from innotree._kernels import purepy
from innotree._kernels.purepy import CONN_AND, CONN_LEAF, CONN_OR

try:
    from innotree._kernels import _speedups as compiled
except ImportError:
    compiled = None


def random_structure(rng: random.Random, size: int):
    """Preorder connector codes and child-position lists for one tree."""
    connectors = [CONN_LEAF] * size
    children: list[list[int]] = [[] for _ in range(size)]
    counter = iter(range(size))

    def build(budget: int) -> int:
        position = next(counter)
        remaining = budget - 1
        while remaining > 0:
            take = rng.randint(1, remaining)
            children[position].append(build(take))
            remaining -= take
        if children[position]:
            connectors[position] = rng.choice([CONN_AND, CONN_OR])
        return position

    build(size)
    return connectors, children


def random_rule_system(rng: random.Random, num_symbols: int,
                       num_rules: int):
    antecedents, consequents = [], []
    for _ in range(num_rules):
        bits = rng.sample(range(num_symbols),
                          rng.randint(1, min(3, num_symbols)))
        mask = 0
        for bit in bits:
            mask |= 1 << bit
        target = rng.randrange(num_symbols)
        if mask >> target & 1:
            target = (target + 1) % num_symbols
        antecedents.append(mask)
        consequents.append(1 << target)
    seed = 0
    for bit in rng.sample(range(num_symbols), num_symbols // 4 + 1):
        seed |= 1 << bit
    return antecedents, consequents, seed


def timed(fn, repeats: int = 3) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_enumeration(num_trees: int) -> None:
    rng = random.Random(14)
    cases = [random_structure(rng, rng.randint(16, 22))
             for _ in range(num_trees)]

    def run(backend):
        totals = []
        for connectors, children in cases:
            totals.append(sum(1 for _ in backend.iter_admissible_masks(
                connectors, children, len(connectors))))
        return totals

    pure_time, pure_counts = timed(lambda: run(purepy))
    line = (f"enumeration  {num_trees:4d} trees  "
            f"pure {pure_time * 1000:9.1f} ms")
    if compiled is not None:
        fast_time, fast_counts = timed(lambda: run(compiled))
        assert fast_counts == pure_counts, "backends disagree"
        line += (f"  compiled {fast_time * 1000:9.1f} ms  "
                 f"speedup {pure_time / fast_time:6.1f}x")
    print(line)
    print(f"             configurations per tree: "
          f"median {statistics.median(pure_counts):.0f}, "
          f"max {max(pure_counts)}")


def bench_closure(num_systems: int) -> None:
    rng = random.Random(15)
    cases = [random_rule_system(rng, rng.randint(24, 60),
                                rng.randint(100, 400))
             for _ in range(num_systems)]

    def run(backend):
        out = []
        for antecedents, consequents, seed in cases:
            facts, _ = backend.closure_fixpoint(
                antecedents, consequents, seed, 64, False)
            out.append(facts)
        return out

    pure_time, pure_facts = timed(lambda: run(purepy))
    line = (f"closure      {num_systems:4d} systems  "
            f"pure {pure_time * 1000:7.1f} ms")
    if compiled is not None:
        fast_time, fast_facts = timed(lambda: run(compiled))
        assert fast_facts == pure_facts, "backends disagree"
        line += (f"  compiled {fast_time * 1000:9.1f} ms  "
                 f"speedup {pure_time / fast_time:6.1f}x")
    print(line)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trees", type=int, default=60,
                        help="number of random structures to enumerate")
    parser.add_argument("--rules", type=int, default=400,
                        help="number of random rule systems to close")
    args = parser.parse_args()

    if compiled is None:
        print("compiled backend unavailable; timing the fallback only",
              file=sys.stderr)
    bench_enumeration(args.trees)
    bench_closure(args.rules)
    return 0


if __name__ == "__main__":
    sys.exit(main())
