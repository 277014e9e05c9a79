"""Decision-tree induction over labeled categorical data, and its export
as forward-chaining rules.

The induction algorithm is classic top-down entropy minimization: at every
node it picks the attribute whose split maximizes information gain (base-2
entropy), breaking ties in favor of the attribute declared earliest, and
recurses per attribute value. Growth stops when a node is label-pure, when
no attributes remain, when a depth budget is hit, or when fewer rows remain
than a minimum — the node then becomes a majority leaf. A branch that
receives no rows becomes a leaf labeled with its parent's majority.

A finished tree converts to a rule base with exactly one rule per leaf:
the antecedents are the ``attr=value`` facts along the path from the root,
and the consequent is ``label=<label>``. A tree that is just a root leaf
has no path facts, so its single rule fires from the universal seed fact
``true`` — callers inject that fact before chaining.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Union

from .errors import DatasetFormatError, MiningError
from .rules import Rule, RuleBase, forward_chain

TRUE_FACT = "true"
LABEL_PREFIX = "label="


@dataclass(frozen=True)
class LabeledDataset:
    """Categorical rows with a label: attribute domains plus value tuples."""

    attributes: tuple[tuple[str, tuple[str, ...]], ...]
    rows: tuple[tuple[tuple[str, ...], str], ...]
    label_name: str = "label"

    def attribute_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.attributes)

    def domain(self, name: str) -> tuple[str, ...]:
        for attr_name, domain in self.attributes:
            if attr_name == name:
                return domain
        raise MiningError(f"dataset has no attribute {name!r}")

    def row_facts(self, values: tuple[str, ...]) -> tuple[str, ...]:
        """One ``attr=value`` fact per attribute, in declaration order."""
        if len(values) != len(self.attributes):
            raise MiningError(
                f"row has {len(values)} values but the dataset declares "
                f"{len(self.attributes)} attributes")
        return tuple(f"{name}={value}"
                     for (name, _), value in zip(self.attributes, values))


@dataclass(frozen=True)
class TreeLeaf:
    """Terminal node: a predicted label plus the label counts behind it."""

    label: str
    support: Mapping[str, int]


@dataclass(frozen=True)
class TreeSplit:
    """Inner node: one branch per value of the split attribute."""

    attribute: str
    branches: Mapping[str, "DecisionTree"]


DecisionTree = Union[TreeLeaf, TreeSplit]


def _majority(counts: Mapping[str, int]) -> str:
    return min(counts, key=lambda label: (-counts[label], label))


def entropy(labels: Iterable[str]) -> float:
    """Base-2 entropy of a label sequence; 0.0 for empty or pure input."""
    counts: dict[str, int] = {}
    total = 0
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
        total += 1
    if total == 0:
        return 0.0
    result = 0.0
    for count in counts.values():
        p = count / total
        result -= p * math.log2(p)
    return result


def information_gain(dataset: LabeledDataset, attribute: str) -> float:
    """Entropy reduction from splitting the full dataset on one attribute."""
    names = dataset.attribute_names()
    if attribute not in names:
        raise MiningError(f"dataset has no attribute {attribute!r}")
    return _gain(dataset.rows, names.index(attribute))


def _gain(rows: tuple[tuple[tuple[str, ...], str], ...],
          attr_index: int) -> float:
    base = entropy(label for _, label in rows)
    partitions: dict[str, list[str]] = {}
    for values, label in rows:
        partitions.setdefault(values[attr_index], []).append(label)
    total = len(rows)
    remainder = sum(len(part) / total * entropy(part)
                    for part in partitions.values())
    return base - remainder


def induce(dataset: LabeledDataset, *, max_depth: int | None = None,
           min_rows: int = 1) -> DecisionTree:
    """Grow a decision tree over the whole dataset.

    ``max_depth`` caps the number of splits along any path (0 forces a
    single majority leaf); nodes holding fewer than ``min_rows`` rows are
    not split either. Majority ties resolve to the lexicographically
    smallest label.
    """
    if not dataset.rows:
        raise MiningError("cannot induce a tree from an empty dataset")
    if max_depth is not None and max_depth < 0:
        raise MiningError("max_depth must be non-negative")
    if min_rows < 1:
        raise MiningError("min_rows must be at least 1")
    names = dataset.attribute_names()
    domains = dict(dataset.attributes)

    def grow(rows: tuple[tuple[tuple[str, ...], str], ...],
             remaining: tuple[str, ...], depth: int,
             parent_majority: str | None) -> DecisionTree:
        if not rows:
            assert parent_majority is not None
            return TreeLeaf(label=parent_majority, support={})
        counts: dict[str, int] = {}
        for _, label in rows:
            counts[label] = counts.get(label, 0) + 1
        majority = _majority(counts)
        if (len(counts) == 1 or not remaining
                or (max_depth is not None and depth >= max_depth)
                or len(rows) < min_rows):
            return TreeLeaf(label=majority, support=counts)
        best = max(remaining,
                   key=lambda name: (_gain(rows, names.index(name)),
                                     -remaining.index(name)))
        attr_index = names.index(best)
        rest = tuple(name for name in remaining if name != best)
        branches: dict[str, DecisionTree] = {}
        for value in domains[best]:
            subset = tuple(row for row in rows
                           if row[0][attr_index] == value)
            branches[value] = grow(subset, rest, depth + 1, majority)
        return TreeSplit(attribute=best, branches=branches)

    return grow(dataset.rows, names, 0, None)


def subtree_majority(tree: DecisionTree) -> str:
    """The majority label over all training rows under a node.

    Aggregates the support counts of every descendant leaf; ties resolve
    to the lexicographically smallest label. A leaf without support (one
    created for an empty branch) answers with its own label.
    """
    totals: dict[str, int] = {}

    def collect(node: DecisionTree) -> None:
        if isinstance(node, TreeLeaf):
            for label, count in node.support.items():
                totals[label] = totals.get(label, 0) + count
        else:
            for value in sorted(node.branches):
                collect(node.branches[value])

    collect(tree)
    if not totals:
        if isinstance(tree, TreeLeaf):
            return tree.label
        raise MiningError("subtree carries no training support")
    return _majority(totals)


def classify(tree: DecisionTree, assignment: Mapping[str, str]) -> str:
    """Predict a label for one attribute assignment.

    Follows split branches by attribute value; a value the training data
    never produced at that split falls back to the majority label of the
    subtree rooted there.
    """
    node = tree
    while isinstance(node, TreeSplit):
        if node.attribute not in assignment:
            raise MiningError(
                f"assignment is missing attribute {node.attribute!r}")
        value = assignment[node.attribute]
        branch = node.branches.get(value)
        if branch is None:
            return subtree_majority(node)
        node = branch
    return node.label


def tree_to_rules(tree: DecisionTree) -> RuleBase:
    """One rule per leaf, in left-to-right (sorted branch value) order.

    Rule ``leaf-<k>`` carries the path's ``attr=value`` facts as
    antecedents and ``label=<label>`` as consequent. The degenerate tree —
    a bare root leaf — yields a single rule whose antecedent is the
    universal seed fact ``true``.
    """
    rules: list[Rule] = []

    def walk(node: DecisionTree, path: tuple[str, ...]) -> None:
        if isinstance(node, TreeLeaf):
            antecedents = path if path else (TRUE_FACT,)
            rules.append(Rule(id=f"leaf-{len(rules) + 1}",
                              antecedents=antecedents,
                              consequent=f"{LABEL_PREFIX}{node.label}"))
        else:
            for value in sorted(node.branches):
                walk(node.branches[value],
                     path + (f"{node.attribute}={value}",))

    walk(tree, ())
    return RuleBase(rules=tuple(rules))


def rules_classify(rulebase: RuleBase, facts: Iterable[str]) -> str:
    """Predict a label by chaining leaf rules over a row's facts.

    Seeds the closure with the row facts plus the universal ``true`` fact,
    then reads the derived ``label=...`` fact. Exactly one label must come
    out; none means the facts match no leaf path, several mean the rule
    base was not produced from a single tree.
    """
    seed = (TRUE_FACT, *facts)
    result = forward_chain(rulebase, seed, want_trace=False)
    labels = sorted(fact[len(LABEL_PREFIX):] for fact in result.derived
                    if fact.startswith(LABEL_PREFIX))
    if not labels:
        raise MiningError("no label was derived for the given facts")
    if len(labels) > 1:
        raise MiningError(
            "multiple labels were derived: " + ", ".join(labels))
    return labels[0]


# --- dataset file format ------------------------------------------------------

def parse_dataset(text: str, *, source: str | None = None) -> LabeledDataset:
    """Parse a labeled dataset from CSV text.

    The first row is the header; its last column names the label and the
    others name the attributes. Every value is categorical; attribute
    domains are the sorted distinct values seen in the data.
    """
    def fail(message: str) -> None:
        raise DatasetFormatError(message, source=source)

    records = list(csv.reader(io.StringIO(text)))
    if not records:
        fail("dataset is empty")
    header = records[0]
    if len(header) < 2:
        fail("header needs at least one attribute column and the label "
             "column")
    for index, name in enumerate(header):
        if not name.strip():
            fail(f"header column {index + 1} has no name")
    if len(set(header)) != len(header):
        dupes = sorted({name for name in header if header.count(name) > 1})
        fail("duplicate column name(s): " + ", ".join(dupes))
    attr_names = tuple(header[:-1])
    rows: list[tuple[tuple[str, ...], str]] = []
    for number, record in enumerate(records[1:], start=2):
        if not record:
            continue
        if len(record) != len(header):
            fail(f"row {number} has {len(record)} fields, expected "
                 f"{len(header)}")
        for name, field in zip(header, record):
            if field == "":
                fail(f"row {number} has an empty value in column {name!r}")
        rows.append((tuple(record[:-1]), record[-1]))
    domains: dict[str, set[str]] = {name: set() for name in attr_names}
    for values, _ in rows:
        for name, value in zip(attr_names, values):
            domains[name].add(value)
    attributes = tuple((name, tuple(sorted(domains[name])))
                       for name in attr_names)
    return LabeledDataset(attributes=attributes, rows=tuple(rows),
                          label_name=header[-1])


def load_dataset(path: str | Path) -> LabeledDataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetFormatError(f"cannot read file: {exc}",
                                 source=str(path)) from exc
    return parse_dataset(text, source=str(path))
