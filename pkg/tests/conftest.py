"""Shared fixtures, random-structure builders, and independent oracles.

The oracles here deliberately avoid the package's own hot paths: closures
are recomputed by naive iterate-until-stable scanning, enumeration by
filtering every subset of node ids, and aggregation by explicit sums — so
agreement with the engine is evidence, not circularity.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from innotree.model import (
    AND,
    NONE,
    OR,
    Attribute,
    CharacteristicSchema,
    CharacteristicTable,
    DecisionHierarchy,
    HierarchyNode,
)
from innotree.star import DualStarSchema, DimensionHierarchy, FactRow, FactTable
from innotree.variants import admissible

EXAMPLE_DIR = Path(__file__).resolve().parent.parent / "data" / "example"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture()
def example_dir() -> Path:
    return EXAMPLE_DIR


# --- hierarchy builders -------------------------------------------------------


def build_hierarchy(tree, schemas=()) -> DecisionHierarchy:
    """Build a hierarchy from nested tuples.

    A node is ``(node_id, connector, [children])`` or, for leaves, either
    ``node_id`` or ``(node_id, values_dict)`` carrying characteristics in
    the ``options`` group.
    """
    nodes: dict[str, HierarchyNode] = {}

    def add(spec) -> str:
        if isinstance(spec, str):
            nodes[spec] = HierarchyNode(id=spec, label=spec, kind="alternative",
                                        connector=NONE)
            return spec
        if len(spec) == 2 and isinstance(spec[1], dict):
            node_id, values = spec
            nodes[node_id] = HierarchyNode(
                id=node_id, label=node_id, kind="alternative", connector=NONE,
                group_id="options",
                characteristics=CharacteristicTable(node_id, dict(values)))
            return node_id
        node_id, connector, children = spec
        child_ids = tuple(add(c) for c in children)
        nodes[node_id] = HierarchyNode(id=node_id, label=node_id, kind="goal",
                                       connector=connector,
                                       children=child_ids)
        return node_id

    root_id = add(tree)
    ordered = {nid: nodes[nid] for nid in _preorder_ids(nodes, root_id)}
    return DecisionHierarchy(root_id=root_id, nodes=ordered,
                             schemas={s.group_id: s for s in schemas})


def _preorder_ids(nodes, root_id):
    out, stack = [], [root_id]
    while stack:
        nid = stack.pop()
        out.append(nid)
        stack.extend(reversed(nodes[nid].children))
    return out


def cost_schema() -> CharacteristicSchema:
    return CharacteristicSchema("options", (
        Attribute("cost", "numeric", aggregation="sum"),
    ))


def random_hierarchy(rng: random.Random, max_nodes: int = 12,
                     with_costs: bool = False) -> DecisionHierarchy:
    """A random AND/OR tree with at most ``max_nodes`` nodes.

    Node ids are ``n0`` (root), ``n1``, ... in preorder. With
    ``with_costs`` every leaf carries an integer ``cost`` characteristic
    in the ``options`` group.
    """
    total = rng.randint(1, max_nodes)
    counter = itertools.count()
    nodes: dict[str, HierarchyNode] = {}

    def build(budget: int) -> str:
        node_id = f"n{next(counter)}"
        remaining = budget - 1
        children: list[str] = []
        while remaining > 0:
            take = rng.randint(1, remaining)
            children.append(build(take))
            remaining -= take
        if not children:
            if with_costs:
                nodes[node_id] = HierarchyNode(
                    id=node_id, label=node_id, kind="alternative",
                    connector=NONE, group_id="options",
                    characteristics=CharacteristicTable(
                        node_id, {"cost": float(rng.randint(1, 20))}))
            else:
                nodes[node_id] = HierarchyNode(
                    id=node_id, label=node_id, kind="alternative",
                    connector=NONE)
        else:
            nodes[node_id] = HierarchyNode(
                id=node_id, label=node_id, kind="goal",
                connector=rng.choice([AND, OR]), children=tuple(children))
        return node_id

    root_id = build(total)
    ordered = {nid: nodes[nid] for nid in _preorder_ids(nodes, root_id)}
    schemas = {"options": cost_schema()} if with_costs else {}
    return DecisionHierarchy(root_id=root_id, nodes=ordered, schemas=schemas)


def brute_force_selections(h: DecisionHierarchy) -> set[frozenset[str]]:
    """Every admissible selection, by filtering all 2^n id subsets."""
    ids = list(h.nodes)
    found: set[frozenset[str]] = set()
    for mask in range(1 << len(ids)):
        subset = frozenset(ids[i] for i in range(len(ids)) if mask >> i & 1)
        if admissible(h, subset):
            found.add(subset)
    return found


# --- rule oracle --------------------------------------------------------------


def naive_closure(rules: list[tuple[list[str], str]],
                  seed: set[str]) -> set[str]:
    """Iterate-to-stable fixpoint with none of the engine's machinery."""
    facts = set(seed)
    while True:
        added = False
        for antecedents, consequent in rules:
            if consequent not in facts and all(a in facts
                                               for a in antecedents):
                facts.add(consequent)
                added = True
        if not added:
            return facts


# --- star builders ------------------------------------------------------------


def random_star(rng: random.Random, max_rows: int = 50,
                integral: bool = True) -> DualStarSchema:
    """A random dual-star schema over ≤ ``max_rows`` leaf-grained rows.

    Both dimensions have three levels; member names are globally unique
    per (dimension, level) so member grouping and path grouping coincide.
    """
    leaf_count = rng.randint(1, max_rows)
    leaves = [f"leaf{i}" for i in range(leaf_count)]

    def membership(prefix: str) -> dict[str, tuple[str, str, str]]:
        top_count = rng.randint(1, 3)
        mid_count = rng.randint(1, 4)
        return {
            leaf: (f"{prefix}-top{rng.randrange(top_count)}",
                   f"{prefix}-mid{rng.randrange(mid_count)}",
                   leaf)
            for leaf in leaves
        }

    def value() -> float:
        if integral:
            return float(rng.randint(-50, 100))
        return rng.uniform(-10.0, 10.0)

    rows = tuple(FactRow(leaf, {"amount": value(), "gain": value()})
                 for leaf in leaves)
    dims = {
        "goals": DimensionHierarchy(
            "goals", ("g-top", "g-mid", "option"), membership("g")),
        "decisions": DimensionHierarchy(
            "decisions", ("d-top", "d-mid", "option"), membership("d")),
    }
    return DualStarSchema(dims=dims,
                          facts={"numbers": FactTable("numbers", rows)},
                          main="numbers")
