"""Enumeration, filtering, scoring, and ranking of design variants.

A configuration is an admissible selection of hierarchy nodes: the root is
selected, every selected AND node includes all of its children, every
selected OR node includes at least one child — inclusive choice, so any
non-empty subset — and nothing is selected without its parent.

Enumeration streams candidates in a fixed deterministic order (selections
using only earlier children of a node come before those bringing in later
children), filters them in three stages — fact closure (deriving the veto
fact drops the candidate), attribute aggregation, constraint bounds over the
aggregates — and is always bounded by an explicit limit, flagging truncation
when more passing variants exist beyond it. A bound on an attribute that no
selected node carries is vacuously satisfied.

Scoring folds each numeric attribute over the selected nodes that carry it,
using the attribute's declared aggregation, and combines the folds into a
weighted total. Ranking sorts by total in either direction, breaking ties by
the sorted member-id list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from . import _kernels
from .errors import (
    EnumerationError,
    ScoringError,
    SeriesParamRequiredError,
    UnknownNodeError,
)
from .model import (
    AND,
    NUMERIC,
    OR,
    WEIGHT_ATTRIBUTE,
    ConstraintSet,
    DecisionHierarchy,
    Series,
    compare,
    validate_hierarchy,
)
from .rules import (
    Binding,
    RuleBase,
    evaluate_binding,
    forward_chain,
    selection_fact,
)

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
DIRECTIONS = (MAXIMIZE, MINIMIZE)

# Node statuses reported for a hypothetical (not necessarily admissible)
# selection, e.g. while a user toggles nodes in an editor.
SELECTED_OK = "selected-ok"
SELECTED_INCOMPLETE = "selected-incomplete"
SELECTED_ORPHAN = "selected-orphan"
REQUIRED = "required"
CANDIDATE = "candidate"
INACTIVE = "inactive"


@dataclass(frozen=True)
class Configuration:
    """One admissible selection and the facts the rules derive from it."""

    selected: frozenset[str]
    derived: frozenset[str]

    def sorted_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.selected))


@dataclass(frozen=True)
class Score:
    """Aggregated numeric attributes of a selection, plus a weighted total.

    ``total`` is always recomputable as the weighted sum of
    ``per_attribute`` values over the weight vector that produced it.
    """

    per_attribute: Mapping[str, float]
    total: float


@dataclass(frozen=True)
class EnumerationResult:
    """Passing configurations in enumeration order, plus truncation flag."""

    configurations: tuple[Configuration, ...]
    truncated: bool


def _encode(h: DecisionHierarchy) -> tuple[list[int], list[list[int]], list[str]]:
    order = h.preorder()
    position = {node_id: i for i, node_id in enumerate(order)}
    connectors: list[int] = []
    children: list[list[int]] = []
    for node_id in order:
        node = h.nodes[node_id]
        if node.is_leaf:
            connectors.append(_kernels.CONN_LEAF)
        elif node.connector == AND:
            connectors.append(_kernels.CONN_AND)
        else:
            connectors.append(_kernels.CONN_OR)
        children.append([position[c] for c in node.children])
    return connectors, children, order


def _require_valid(h: DecisionHierarchy) -> None:
    violations = validate_hierarchy(h)
    if violations:
        preview = "; ".join(v.render() for v in violations[:3])
        more = len(violations) - 3
        if more > 0:
            preview += f"; and {more} more"
        raise EnumerationError(
            f"hierarchy fails structural validation: {preview}")


def admissible(h: DecisionHierarchy, selection: Iterable[str]) -> bool:
    """Whether a selection satisfies every structural admissibility rule.

    True iff the root is selected, every selected AND node includes all of
    its children, every selected OR node includes at least one child, and
    no node is selected whose parent is unselected.
    """
    chosen = set(selection)
    h.require_ids(chosen)
    if h.root_id not in chosen:
        return False
    parents = h.parents()
    for node_id in chosen:
        parent = parents.get(node_id)
        if parent is not None and parent not in chosen:
            return False
        node = h.nodes[node_id]
        if node.is_leaf:
            continue
        picked = sum(1 for c in node.children if c in chosen)
        if node.connector == AND and picked != len(node.children):
            return False
        if node.connector == OR and picked == 0:
            return False
    return True


def iter_admissible_selections(h: DecisionHierarchy) -> Iterator[tuple[str, ...]]:
    """Stream every admissible selection (preorder member tuples)."""
    _require_valid(h)
    connectors, children, order = _encode(h)
    n = len(order)
    for mask in _kernels.iter_admissible_masks(connectors, children, n):
        yield tuple(order[p] for p in range(n) if mask >> p & 1)


def count_admissible(h: DecisionHierarchy) -> int:
    """How many admissible configurations the structure admits.

    Closed form by subtree folding: a terminal node admits one selection;
    an AND node the product of its children's counts; an OR node the
    product of (child count + 1) over its children, minus the empty
    choice.
    """
    _require_valid(h)
    counts: dict[str, int] = {}
    for node_id in reversed(h.preorder()):
        node = h.nodes[node_id]
        if node.is_leaf:
            counts[node_id] = 1
        elif node.connector == AND:
            total = 1
            for child in node.children:
                total *= counts[child]
            counts[node_id] = total
        else:
            total = 1
            for child in node.children:
                total *= counts[child] + 1
            counts[node_id] = total - 1
    return counts[h.root_id]


def selection_status(h: DecisionHierarchy,
                     selected: Iterable[str]) -> dict[str, str]:
    """Per-node status of a hypothetical selection.

    Selected nodes report whether they are structurally satisfied
    (selected-ok), missing required children (selected-incomplete), or cut
    off from a selected parent (selected-orphan). Unselected nodes report
    whether a selected parent demands them (required, under AND), offers
    them (candidate, under OR), or ignores them (inactive). An unselected
    root is always required.
    """
    chosen = set(selected)
    h.require_ids(chosen)
    parents = h.parents()
    statuses: dict[str, str] = {}
    for node_id, node in h.nodes.items():
        parent = parents.get(node_id)
        if node_id in chosen:
            if parent is not None and parent not in chosen:
                statuses[node_id] = SELECTED_ORPHAN
            elif node.is_leaf:
                statuses[node_id] = SELECTED_OK
            else:
                picked = sum(1 for c in node.children if c in chosen)
                if node.connector == AND and picked != len(node.children):
                    statuses[node_id] = SELECTED_INCOMPLETE
                elif node.connector == OR and picked == 0:
                    statuses[node_id] = SELECTED_INCOMPLETE
                else:
                    statuses[node_id] = SELECTED_OK
        else:
            if node_id == h.root_id:
                statuses[node_id] = REQUIRED
            elif parent is not None and parent in chosen:
                parent_node = h.nodes[parent]
                statuses[node_id] = (REQUIRED if parent_node.connector == AND
                                     else CANDIDATE)
            else:
                statuses[node_id] = INACTIVE
    return statuses


# --- aggregation ------------------------------------------------------------

def _aggregation_ops(h: DecisionHierarchy) -> dict[str, str]:
    """Aggregation operator per numeric attribute, across all schemas.

    Two schemas declaring the same attribute name must agree on the
    operator; disagreement makes every aggregate of that attribute
    ambiguous, so it is rejected outright.
    """
    ops: dict[str, str] = {}
    for schema in h.schemas.values():
        for attr in schema.attributes:
            if attr.value_kind != NUMERIC or attr.aggregation is None:
                continue
            known = ops.get(attr.name)
            if known is not None and known != attr.aggregation:
                raise ScoringError(
                    f"attribute {attr.name!r} is declared with conflicting "
                    f"aggregations {known!r} and {attr.aggregation!r}")
            ops[attr.name] = attr.aggregation
    return ops


def _numeric_value(value: object, param: float | None,
                   node_id: str, attr: str) -> float | None:
    if isinstance(value, Series):
        if param is None:
            raise SeriesParamRequiredError(
                f"characteristic {attr!r} of node {node_id!r} is a series; "
                "an evaluation parameter is required")
        return value.value_at(param)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return float(value)


def _fold(op: str, contributions: list[tuple[float, float | None]]) -> float:
    values = [v for v, _ in contributions]
    if op == "sum":
        return sum(values)
    if op == "min":
        return min(values)
    if op == "max":
        return max(values)
    if op == "weighted_mean":
        weights = [w for _, w in contributions]
        if all(w is not None for w in weights):
            total = sum(weights)  # type: ignore[arg-type]
            if total > 0:
                return sum(v * w for v, w in contributions) / total
        return sum(values) / len(values)
    raise ScoringError(f"unknown aggregation operator {op!r}")


def aggregate_attributes(h: DecisionHierarchy, selected: Iterable[str],
                         param: float | None = None) -> dict[str, float]:
    """Fold every numeric attribute over the selected nodes that carry it.

    The folding operator comes from the attribute's schema declaration:
    sum, min, max, or weighted_mean. A weighted mean weighs each value by
    the carrying node's ``weight`` attribute when every contributor has
    one and the weights sum to a positive total; otherwise it degrades to
    the arithmetic mean. Attributes carried by no selected node are absent
    from the result. Series values are evaluated at ``param``.
    """
    chosen = set(selected)
    h.require_ids(chosen)
    ops = _aggregation_ops(h)
    contributions: dict[str, list[tuple[float, float | None]]] = {}
    for node_id, node in h.nodes.items():
        if node_id not in chosen or node.characteristics is None:
            continue
        table = node.characteristics.values
        weight = None
        if WEIGHT_ATTRIBUTE in table:
            weight = _numeric_value(table[WEIGHT_ATTRIBUTE], param,
                                    node_id, WEIGHT_ATTRIBUTE)
        for attr, raw in table.items():
            if attr not in ops:
                continue
            value = _numeric_value(raw, param, node_id, attr)
            if value is None:
                continue
            contributions.setdefault(attr, []).append((value, weight))
    return {attr: _fold(ops[attr], contributions[attr])
            for attr in sorted(contributions)}


def satisfies_constraints(aggregates: Mapping[str, float],
                          constraints: ConstraintSet) -> bool:
    """Check every bound; bounds on absent aggregates hold vacuously."""
    for _, bound in constraints.iter_bounds():
        value = aggregates.get(bound.attribute)
        if value is None:
            continue
        if not compare(value, bound.comparator, bound.threshold):
            return False
    return True


def failed_bounds(aggregates: Mapping[str, float],
                  constraints: ConstraintSet,
                  ) -> list[tuple[str, str, str, float, float]]:
    """Each violated bound as (origin, attribute, comparator, threshold,
    actual value)."""
    out = []
    for origin, bound in constraints.iter_bounds():
        value = aggregates.get(bound.attribute)
        if value is not None and not compare(value, bound.comparator,
                                             bound.threshold):
            out.append((origin, bound.attribute, bound.comparator,
                        bound.threshold, value))
    return out


# --- enumeration ------------------------------------------------------------

def enumerate_configurations(h: DecisionHierarchy,
                             rulebase: RuleBase | None = None,
                             constraints: ConstraintSet | None = None,
                             bindings: Sequence[Binding] = (),
                             limit: int = 0,
                             *,
                             param: float | None = None) -> EnumerationResult:
    """Admissible, non-vetoed, constraint-satisfying configurations.

    Exactly the admissible selections whose fact closure lacks the veto
    fact and whose aggregates satisfy every constraint bound, in
    deterministic enumeration order, up to ``limit``. Once the limit is
    reached the scan continues only far enough to learn whether one more
    passing configuration exists, which sets the truncated flag.
    """
    if limit < 1:
        raise EnumerationError(f"limit must be at least 1, got {limit}")
    _require_valid(h)
    connectors, children, order = _encode(h)
    n = len(order)
    rulebase = rulebase or RuleBase()
    constraints = constraints or ConstraintSet()
    check_bounds = not constraints.is_empty()

    # Bindings compare node data that does not vary per candidate, so each
    # comparison is evaluated once; per candidate only the node-selected
    # test remains.
    position = {node_id: i for i, node_id in enumerate(order)}
    live_bindings: list[tuple[int, str]] = []
    for binding in bindings:
        if binding.node_id not in position:
            raise UnknownNodeError((binding.node_id,))
        if evaluate_binding(binding, h, param):
            live_bindings.append((position[binding.node_id], binding.fact))

    # Numeric contributions per node, resolved once.
    ops = _aggregation_ops(h)
    node_contribs: list[list[tuple[str, float, float | None]]] = []
    for node_id in order:
        node = h.nodes[node_id]
        rows: list[tuple[str, float, float | None]] = []
        if node.characteristics is not None:
            table = node.characteristics.values
            weight = None
            if WEIGHT_ATTRIBUTE in table:
                weight = _numeric_value(table[WEIGHT_ATTRIBUTE], param,
                                        node_id, WEIGHT_ATTRIBUTE)
            for attr, raw in table.items():
                if attr not in ops:
                    continue
                value = _numeric_value(raw, param, node_id, attr)
                if value is not None:
                    rows.append((attr, value, weight))
        node_contribs.append(rows)

    configurations: list[Configuration] = []
    truncated = False
    for mask in _kernels.iter_admissible_masks(connectors, children, n):
        positions = [p for p in range(n) if mask >> p & 1]
        members = tuple(order[p] for p in positions)

        seed = [selection_fact(m) for m in members]
        seed.extend(fact for pos, fact in live_bindings if mask >> pos & 1)
        result = forward_chain(rulebase, seed, want_trace=False)
        if result.vetoed:
            continue

        if check_bounds:
            contributions: dict[str, list[tuple[float, float | None]]] = {}
            for p in positions:
                for attr, value, weight in node_contribs[p]:
                    contributions.setdefault(attr, []).append((value, weight))
            aggregates = {attr: _fold(ops[attr], contributions[attr])
                          for attr in contributions}
            if not satisfies_constraints(aggregates, constraints):
                continue

        if len(configurations) == limit:
            truncated = True
            break
        configurations.append(Configuration(selected=frozenset(members),
                                            derived=result.derived))
    return EnumerationResult(configurations=tuple(configurations),
                             truncated=truncated)


# --- scoring ----------------------------------------------------------------

def score(h: DecisionHierarchy, selected: Iterable[str],
          weights: Mapping[str, float],
          param: float | None = None) -> Score:
    """Aggregate a selection's numeric attributes and weigh them.

    Every aggregated numeric attribute appears in ``per_attribute``
    whether weighted or not; the total is the weighted sum, where an
    attribute carried by no selected node contributes zero. Weights may
    only reference attributes some schema declares as numeric.
    """
    numeric_attrs = {a.name for s in h.schemas.values() for a in s.attributes
                     if a.value_kind == NUMERIC}
    bad = sorted(set(weights) - numeric_attrs)
    if bad:
        raise ScoringError(
            "weights reference non-numeric or undeclared attribute(s): "
            + ", ".join(bad))
    per_attribute = aggregate_attributes(h, selected, param)
    total = sum(w * per_attribute.get(attr, 0.0)
                for attr, w in weights.items())
    return Score(per_attribute=per_attribute, total=total)


def rank(configurations: Sequence[Configuration],
         scores: Sequence[Score],
         direction: str = MAXIMIZE) -> tuple[tuple[Configuration, Score], ...]:
    """Pair configurations with their scores, ordered best-first.

    A stable sort by total — descending for maximize, ascending for
    minimize — with ties broken lexicographically by the sorted member-id
    list. The result is a permutation of the zipped inputs.
    """
    if direction not in DIRECTIONS:
        raise ScoringError(
            f"direction must be one of {', '.join(DIRECTIONS)}, "
            f"got {direction!r}")
    if len(configurations) != len(scores):
        raise ScoringError(
            f"got {len(configurations)} configurations but "
            f"{len(scores)} scores")
    pairs = list(zip(configurations, scores))
    sign = -1.0 if direction == MAXIMIZE else 1.0
    pairs.sort(key=lambda cs: (sign * cs[1].total, cs[0].sorted_ids()))
    return tuple(pairs)
