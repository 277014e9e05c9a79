"""AND/OR decision hierarchy with typed node characteristics and constraints.

The hierarchy decomposes a project into goals, criteria, and alternatives down
to leaves that represent the finest grain of the project. Every non-leaf node
combines its children through a connector: AND requires all children in a
selection, OR admits any non-empty subset (inclusive, so "this one, the other,
or both"). An admissible selection of nodes is one design variant of the
project.

Nodes that are comparable with one another share a homogeneity group: every
member of a group carries exactly the attribute set declared by the group's
characteristic schema, with matching value kinds. Numeric characteristics are
either scalars or sampled series; series are read by piecewise-linear
interpolation between bracketing samples and never extrapolated.

Constraints bound aggregated values of a whole selection. Two conventional
bounds get first-class fields: ``payback_limit`` caps the aggregated
``payback`` attribute and ``expenditure_ceiling`` caps the aggregated ``cost``
attribute. Arbitrary further bounds name an attribute, a comparator, and a
threshold.

Structural validation never raises; it returns :class:`Violation` records
sorted by (node id, rule name) so identical inputs always produce identical
reports.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Union

from .errors import (
    CharacteristicMissingError,
    ModelFormatError,
    SeriesParamRequiredError,
    SeriesRangeError,
    UnknownGroupError,
    UnknownNodeError,
)
from .jsonutil import FieldReader, expect_string_list, load_json_file, load_json_text
from .validation import Violation, sorted_report

if TYPE_CHECKING:
    from .rules import Binding

AND = "and"
OR = "or"
NONE = "none"
CONNECTORS = (AND, OR, NONE)

KINDS = ("goal", "criterion", "alternative", "leaf")

NUMERIC = "numeric"
CATEGORICAL = "categorical"
BOOLEAN = "boolean"
VALUE_KINDS = (NUMERIC, CATEGORICAL, BOOLEAN)

AGGREGATIONS = ("sum", "min", "max", "weighted_mean")

COMPARATORS = ("<=", ">=", "<", ">", "=")

# Conventional attribute names: the payback limit constrains the aggregated
# "payback" attribute, the expenditure ceiling the aggregated "cost"
# attribute, and weighted_mean aggregation weighs values by the "weight"
# attribute of the contributing nodes.
PAYBACK_ATTRIBUTE = "payback"
EXPENDITURE_ATTRIBUTE = "cost"
WEIGHT_ATTRIBUTE = "weight"


def compare(value: float, comparator: str, threshold: float) -> bool:
    if comparator == "<=":
        return value <= threshold
    if comparator == ">=":
        return value >= threshold
    if comparator == "<":
        return value < threshold
    if comparator == ">":
        return value > threshold
    if comparator == "=":
        return value == threshold
    raise ValueError(f"unknown comparator {comparator!r}")


@dataclass(frozen=True)
class Series:
    """A sampled numeric curve, read by piecewise-linear interpolation.

    Points are (parameter, value) pairs sorted by strictly increasing
    parameter. Reads are exact at sample points and linear between
    consecutive samples; parameters outside the sampled range raise
    :class:`SeriesRangeError` rather than extrapolating.
    """

    points: tuple[tuple[float, float], ...]

    def value_at(self, param: float) -> float:
        params = [p for p, _ in self.points]
        if not params:
            raise SeriesRangeError("series has no sample points")
        if param < params[0] or param > params[-1]:
            raise SeriesRangeError(
                f"parameter {param!r} outside sampled range "
                f"[{params[0]!r}, {params[-1]!r}]"
            )
        i = bisect.bisect_left(params, param)
        if i < len(params) and params[i] == param:
            return self.points[i][1]
        p0, v0 = self.points[i - 1]
        p1, v1 = self.points[i]
        return v0 + (v1 - v0) * (param - p0) / (p1 - p0)


Scalar = Union[float, str, bool]
CharacteristicValue = Union[Scalar, Series]


@dataclass(frozen=True)
class CharacteristicTable:
    """Attribute values carried by one node: scalars or sampled series."""

    node_id: str
    values: dict[str, CharacteristicValue]


@dataclass(frozen=True)
class Attribute:
    """One attribute declared by a characteristic schema.

    ``aggregation`` states how values fold over a selection and applies to
    numeric attributes only; ``unit`` is a display label, never converted.
    """

    name: str
    value_kind: str
    aggregation: str | None = None
    unit: str | None = None


@dataclass(frozen=True)
class CharacteristicSchema:
    """The attribute set shared by every node of one homogeneity group."""

    group_id: str
    attributes: tuple[Attribute, ...]

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(
                f"schema {self.group_id!r}: duplicate attribute name(s): "
                + ", ".join(dupes)
            )

    def attribute(self, name: str) -> Attribute | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Bound:
    """One constraint on an aggregated attribute of a selection."""

    attribute: str
    comparator: str
    threshold: float


@dataclass(frozen=True)
class ConstraintSet:
    """Bounds applied to the aggregated values of a whole configuration."""

    payback_limit: float | None = None
    expenditure_ceiling: float | None = None
    bounds: tuple[Bound, ...] = ()

    def iter_bounds(self) -> Iterator[tuple[str, Bound]]:
        """All bounds in normalized form, tagged with their origin."""
        if self.payback_limit is not None:
            yield "payback_limit", Bound(PAYBACK_ATTRIBUTE, "<=", self.payback_limit)
        if self.expenditure_ceiling is not None:
            yield "expenditure_ceiling", Bound(
                EXPENDITURE_ATTRIBUTE, "<=", self.expenditure_ceiling
            )
        for bound in self.bounds:
            yield "bound", bound

    def is_empty(self) -> bool:
        return (
            self.payback_limit is None
            and self.expenditure_ceiling is None
            and not self.bounds
        )


@dataclass(frozen=True)
class HierarchyNode:
    """One node of the decision hierarchy.

    ``kind`` is advisory display metadata; structural rules key off
    ``connector`` and ``children`` alone. Child order is significant: it
    seeds the deterministic enumeration order of variants.
    """

    id: str
    label: str
    kind: str
    connector: str
    children: tuple[str, ...] = ()
    group_id: str | None = None
    characteristics: CharacteristicTable | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class DecisionHierarchy:
    """The whole AND/OR tree plus the schemas of its homogeneity groups.

    Values are immutable after construction and safe to share across
    threads. ``nodes`` preserves insertion order, which matches file order
    for loaded models.
    """

    root_id: str
    nodes: dict[str, HierarchyNode]
    schemas: dict[str, CharacteristicSchema] = field(default_factory=dict)

    def node(self, node_id: str) -> HierarchyNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError((node_id,)) from None

    def require_ids(self, ids: Iterable[str]) -> None:
        """Raise :class:`UnknownNodeError` listing every unresolved id."""
        offenders = sorted(i for i in set(ids) if i not in self.nodes)
        if offenders:
            raise UnknownNodeError(tuple(offenders))

    def parents(self) -> dict[str, str]:
        """Child id to parent id, first parent wins on (invalid) duplicates."""
        out: dict[str, str] = {}
        for node in self.nodes.values():
            for child in node.children:
                out.setdefault(child, node.id)
        return out

    def preorder(self) -> list[str]:
        """Node ids in depth-first preorder, honoring child order.

        Requires a structurally valid tree; revisiting a node (a cycle)
        raises :class:`UnknownNodeError` for unresolved children and
        ``ValueError`` for cycles.
        """
        order: list[str] = []
        seen: set[str] = set()
        stack = [self.root_id]
        while stack:
            node_id = stack.pop()
            if node_id in seen:
                raise ValueError(f"hierarchy is not a tree: {node_id!r} revisited")
            seen.add(node_id)
            order.append(node_id)
            node = self.node(node_id)
            stack.extend(reversed(node.children))
        return order

    def leaf_ids(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.is_leaf]

    def group_members(self, group_id: str) -> list[HierarchyNode]:
        return [n for n in self.nodes.values() if n.group_id == group_id]

    def group_ids(self) -> list[str]:
        groups = set(self.schemas)
        groups.update(n.group_id for n in self.nodes.values() if n.group_id)
        return sorted(groups)

    def lookup(self, node_id: str, attr: str, param: float | None = None) -> Scalar:
        """Read one characteristic value of one node.

        Scalars are returned directly. Series require ``param`` and are
        evaluated by piecewise-linear interpolation; parameters outside the
        sampled range raise :class:`SeriesRangeError`.
        """
        node = self.node(node_id)
        table = node.characteristics
        if table is None or attr not in table.values:
            raise CharacteristicMissingError(
                f"node {node_id!r} carries no characteristic {attr!r}"
            )
        value = table.values[attr]
        if isinstance(value, Series):
            if param is None:
                raise SeriesParamRequiredError(
                    f"characteristic {attr!r} of node {node_id!r} is a series; "
                    "an evaluation parameter is required"
                )
            return value.value_at(param)
        return value


def lookup_characteristic(h: DecisionHierarchy, node_id: str, attr: str,
                          param: float | None = None) -> Scalar:
    return h.lookup(node_id, attr, param)


# --- structural validation -------------------------------------------------

def value_kind_of(value: CharacteristicValue) -> str:
    if isinstance(value, Series):
        return NUMERIC
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMERIC
    return CATEGORICAL


def _check_node_shape(node: HierarchyNode, out: list[Violation]) -> None:
    if node.connector not in CONNECTORS:
        out.append(Violation(node.id, "connector",
                             f"unknown connector {node.connector!r}"))
        return
    if node.is_leaf and node.connector != NONE:
        out.append(Violation(
            node.id, "connector",
            f"node has no children but connector is {node.connector}"))
    if not node.is_leaf and node.connector == NONE:
        out.append(Violation(
            node.id, "connector",
            "node has children but no AND/OR connector"))
    if node.kind not in KINDS:
        out.append(Violation(node.id, "kind", f"unknown kind {node.kind!r}"))
    elif node.kind == "leaf" and not node.is_leaf:
        out.append(Violation(node.id, "kind",
                             "kind is 'leaf' but node has children"))


def _check_series_shapes(node: HierarchyNode, out: list[Violation]) -> None:
    if node.characteristics is None:
        return
    for name in sorted(node.characteristics.values):
        value = node.characteristics.values[name]
        if not isinstance(value, Series):
            continue
        if len(value.points) < 2:
            out.append(Violation(
                node.id, "series",
                f"attribute {name!r}: series needs at least 2 points"))
        params = [p for p, _ in value.points]
        if any(b <= a for a, b in zip(params, params[1:])):
            out.append(Violation(
                node.id, "series",
                f"attribute {name!r}: series parameters must strictly increase"))


def _cycle_members(h: DecisionHierarchy) -> list[set[str]]:
    """Strongly connected components of size > 1, plus self-loops."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    components: list[set[str]] = []

    for start in h.nodes:
        if start in index:
            continue
        work: list[tuple[str, int]] = [(start, 0)]
        while work:
            node_id, child_pos = work[-1]
            if child_pos == 0:
                index[node_id] = lowlink[node_id] = counter
                counter += 1
                stack.append(node_id)
                on_stack.add(node_id)
            children = [c for c in h.nodes[node_id].children if c in h.nodes]
            if child_pos < len(children):
                work[-1] = (node_id, child_pos + 1)
                child = children[child_pos]
                if child not in index:
                    work.append((child, 0))
                elif child in on_stack:
                    lowlink[node_id] = min(lowlink[node_id], index[child])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    lowlink[parent] = min(lowlink[parent], lowlink[node_id])
                if lowlink[node_id] == index[node_id]:
                    component: set[str] = set()
                    while True:
                        member = stack.pop()
                        on_stack.discard(member)
                        component.add(member)
                        if member == node_id:
                            break
                    self_loop = (len(component) == 1 and
                                 node_id in h.nodes[node_id].children)
                    if len(component) > 1 or self_loop:
                        components.append(component)
    return components


def _group_violations(h: DecisionHierarchy, group_id: str) -> list[Violation]:
    schema = h.schemas.get(group_id)
    out: list[Violation] = []
    for node in h.group_members(group_id):
        carried = node.characteristics.values if node.characteristics else {}
        if schema is None:
            if carried:
                out.append(Violation(
                    node.id, "homogeneity",
                    f"group {group_id!r} has no schema but node carries "
                    "characteristics"))
            continue
        declared = {a.name: a for a in schema.attributes}
        for name in sorted(set(declared) - set(carried)):
            out.append(Violation(
                node.id, "homogeneity",
                f"attribute {name!r} declared by group {group_id!r} is missing"))
        for name in sorted(set(carried) - set(declared)):
            out.append(Violation(
                node.id, "homogeneity",
                f"attribute {name!r} is undeclared in group {group_id!r}"))
        for name in sorted(set(carried) & set(declared)):
            found = value_kind_of(carried[name])
            if found != declared[name].value_kind:
                out.append(Violation(
                    node.id, "homogeneity",
                    f"attribute {name!r} expected {declared[name].value_kind}, "
                    f"got {found}"))
    return out


def homogeneity_check(h: DecisionHierarchy, group_id: str) -> list[Violation]:
    """Violations of the shared-attribute rule for one homogeneity group.

    Empty iff every member node carries exactly the schema's attribute set
    with matching value kinds (a member without a characteristics table
    is missing every declared attribute).
    """
    known = group_id in h.schemas or any(
        n.group_id == group_id for n in h.nodes.values())
    if not known:
        raise UnknownGroupError(f"unknown homogeneity group {group_id!r}")
    return sorted_report(_group_violations(h, group_id))


def validate_hierarchy(h: DecisionHierarchy) -> list[Violation]:
    """Every violated structural invariant of the hierarchy, as data.

    Checks: the root resolves and is parentless, child references resolve,
    the child graph is an acyclic tree reachable from the root, connectors
    match children (leaf iff no children iff connector NONE), kind metadata
    is consistent, series are well-formed, and every homogeneity group
    validates against its schema. Deterministic: sorted by node id, then
    rule name.
    """
    out: list[Violation] = []
    root_exists = h.root_id in h.nodes
    if not root_exists:
        out.append(Violation(h.root_id, "root-missing",
                             f"root id {h.root_id!r} has no node"))

    parent_lists: dict[str, list[str]] = {}
    for node in h.nodes.values():
        _check_node_shape(node, out)
        _check_series_shapes(node, out)
        if node.characteristics is not None and node.characteristics.values:
            if node.group_id is None:
                out.append(Violation(
                    node.id, "group-schema-missing",
                    "node carries characteristics but belongs to no group"))
            elif node.group_id not in h.schemas:
                out.append(Violation(
                    node.id, "group-schema-missing",
                    f"group {node.group_id!r} has no schema"))
        for child in node.children:
            if child not in h.nodes:
                out.append(Violation(
                    node.id, "child-unresolved",
                    f"child {child!r} does not resolve"))
            else:
                parent_lists.setdefault(child, []).append(node.id)

    for child_id in sorted(parent_lists):
        parents = parent_lists[child_id]
        if len(parents) > 1:
            out.append(Violation(
                child_id, "multi-parent",
                "node has parents " + ", ".join(sorted(parents))))
    if root_exists and h.root_id in parent_lists:
        out.append(Violation(
            h.root_id, "root-parented",
            "root is listed as a child of " +
            ", ".join(sorted(parent_lists[h.root_id]))))

    for component in _cycle_members(h):
        names = ", ".join(sorted(component))
        for member in sorted(component):
            out.append(Violation(member, "cycle",
                                 f"node participates in cycle {{{names}}}"))

    if root_exists:
        reachable: set[str] = set()
        stack = [h.root_id]
        while stack:
            node_id = stack.pop()
            if node_id in reachable:
                continue
            reachable.add(node_id)
            stack.extend(c for c in h.nodes[node_id].children if c in h.nodes)
        for node_id in sorted(set(h.nodes) - reachable):
            out.append(Violation(node_id, "unreachable",
                                 "node is not reachable from the root"))

    for group_id in h.group_ids():
        out.extend(_group_violations(h, group_id))

    return sorted_report(out)


def validate_constraints(cs: ConstraintSet, h: DecisionHierarchy) -> list[Violation]:
    """Each explicit bound must name a numeric attribute of some schema."""
    numeric: set[str] = set()
    for schema in h.schemas.values():
        numeric.update(a.name for a in schema.attributes if a.value_kind == NUMERIC)
    out: list[Violation] = []
    for bound in cs.bounds:
        if bound.attribute not in numeric:
            out.append(Violation(
                bound.attribute, "constraint-attr",
                f"bound attribute {bound.attribute!r} is not a numeric "
                "attribute of any schema"))
    return sorted_report(out)


# --- model file ------------------------------------------------------------

@dataclass(frozen=True)
class ModelDocument:
    """Everything the model file carries: tree, constraints, fact bindings."""

    hierarchy: DecisionHierarchy
    constraints: ConstraintSet
    bindings: tuple["Binding", ...]


def _parse_value(raw: object, context: str, source: str | None) -> CharacteristicValue:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        return raw
    if isinstance(raw, dict):
        reader = FieldReader(raw, context, error_cls=ModelFormatError, source=source)
        points = reader.require("series", "list")
        reader.finish()
        parsed: list[tuple[float, float]] = []
        for pair in points:
            ok = (isinstance(pair, list) and len(pair) == 2 and
                  all(isinstance(x, (int, float)) and not isinstance(x, bool)
                      for x in pair))
            if not ok:
                raise ModelFormatError(
                    f"{context}: series points must be [parameter, value] "
                    "number pairs", source=source)
            parsed.append((float(pair[0]), float(pair[1])))
        return Series(tuple(parsed))
    raise ModelFormatError(
        f"{context}: value must be a number, string, boolean, or series object",
        source=source)


def _parse_attribute(raw: object, context: str, source: str | None) -> Attribute:
    reader = FieldReader(raw, context, error_cls=ModelFormatError, source=source)
    name = reader.require("name", "string")
    value_kind = reader.require("value_kind", "string")
    aggregation = reader.optional("aggregation", "string")
    unit = reader.optional("unit", "string")
    reader.finish()
    if value_kind not in VALUE_KINDS:
        reader.fail(f"value_kind must be one of {', '.join(VALUE_KINDS)}")
    if value_kind == NUMERIC:
        if aggregation is None:
            reader.fail(f"numeric attribute {name!r} needs an aggregation")
        if aggregation not in AGGREGATIONS:
            reader.fail(
                f"aggregation must be one of {', '.join(AGGREGATIONS)}")
    else:
        if aggregation is not None:
            reader.fail(
                f"attribute {name!r} is {value_kind}; aggregation applies "
                "to numeric attributes only")
        if unit is not None:
            reader.fail(f"attribute {name!r} is {value_kind}; unit applies "
                        "to numeric attributes only")
    return Attribute(name=name, value_kind=value_kind,
                     aggregation=aggregation, unit=unit)


def _parse_constraints(raw: object, source: str | None) -> ConstraintSet:
    reader = FieldReader(raw, "constraints", error_cls=ModelFormatError,
                         source=source)
    payback = reader.optional("payback_limit", "number")
    ceiling = reader.optional("expenditure_ceiling", "number")
    raw_bounds = reader.optional("bounds", "list", default=[])
    reader.finish()
    bounds: list[Bound] = []
    for i, raw_bound in enumerate(raw_bounds):
        bound_reader = FieldReader(raw_bound, f"constraints.bounds[{i}]",
                                   error_cls=ModelFormatError, source=source)
        attribute = bound_reader.require("attribute", "string")
        comparator = bound_reader.require("comparator", "string")
        threshold = bound_reader.require("threshold", "number")
        bound_reader.finish()
        if comparator not in COMPARATORS:
            bound_reader.fail(
                f"comparator must be one of {', '.join(COMPARATORS)}")
        bounds.append(Bound(attribute, comparator, float(threshold)))
    return ConstraintSet(
        payback_limit=None if payback is None else float(payback),
        expenditure_ceiling=None if ceiling is None else float(ceiling),
        bounds=tuple(bounds),
    )


def parse_model(text: str, *, source: str | None = None) -> ModelDocument:
    """Parse one model document; unknown keys are rejected at every level."""
    from .rules import parse_bindings

    raw = load_json_text(text, error_cls=ModelFormatError, source=source)
    top = FieldReader(raw, "model", error_cls=ModelFormatError, source=source)
    raw_hierarchy = top.require("hierarchy", "object")
    raw_schemas = top.require("schemas", "list")
    raw_tables = top.require("tables", "list")
    raw_constraints = top.require("constraints", "object")
    raw_bindings = top.optional("bindings", "list", default=[])
    top.finish()

    hierarchy_reader = FieldReader(raw_hierarchy, "hierarchy",
                                   error_cls=ModelFormatError, source=source)
    root_id = hierarchy_reader.require("root_id", "string")
    raw_nodes = hierarchy_reader.require("nodes", "list")
    hierarchy_reader.finish()

    nodes: dict[str, HierarchyNode] = {}
    for i, raw_node in enumerate(raw_nodes):
        reader = FieldReader(raw_node, f"hierarchy.nodes[{i}]",
                             error_cls=ModelFormatError, source=source)
        node_id = reader.require("id", "string")
        label = reader.require("label", "string")
        kind = reader.require("kind", "string")
        connector = reader.require("connector", "string")
        children = reader.optional("children", "list", default=[])
        group_id = reader.optional("group_id", "string")
        reader.finish()
        expect_string_list(children, f"hierarchy.nodes[{i}].children",
                           error_cls=ModelFormatError, source=source)
        if kind not in KINDS:
            reader.fail(f"kind must be one of {', '.join(KINDS)}")
        if connector not in CONNECTORS:
            reader.fail(f"connector must be one of {', '.join(CONNECTORS)}")
        if node_id in nodes:
            reader.fail(f"duplicate node id {node_id!r}")
        nodes[node_id] = HierarchyNode(
            id=node_id, label=label, kind=kind, connector=connector,
            children=tuple(children), group_id=group_id)

    schemas: dict[str, CharacteristicSchema] = {}
    for i, raw_schema in enumerate(raw_schemas):
        reader = FieldReader(raw_schema, f"schemas[{i}]",
                             error_cls=ModelFormatError, source=source)
        group_id = reader.require("group_id", "string")
        raw_attributes = reader.require("attributes", "list")
        reader.finish()
        attributes = tuple(
            _parse_attribute(a, f"schemas[{i}].attributes[{j}]", source)
            for j, a in enumerate(raw_attributes))
        if group_id in schemas:
            reader.fail(f"duplicate schema for group {group_id!r}")
        try:
            schemas[group_id] = CharacteristicSchema(group_id, attributes)
        except ValueError as exc:
            raise ModelFormatError(str(exc), source=source) from exc

    for i, raw_table in enumerate(raw_tables):
        reader = FieldReader(raw_table, f"tables[{i}]",
                             error_cls=ModelFormatError, source=source)
        node_id = reader.require("node_id", "string")
        raw_values = reader.require("values", "object")
        reader.finish()
        if node_id not in nodes:
            reader.fail(f"table references unknown node {node_id!r}")
        if nodes[node_id].characteristics is not None:
            reader.fail(f"duplicate characteristics table for node {node_id!r}")
        values = {
            name: _parse_value(v, f"tables[{i}].values[{name!r}]", source)
            for name, v in raw_values.items()
        }
        nodes[node_id] = replace(
            nodes[node_id],
            characteristics=CharacteristicTable(node_id, values))

    hierarchy = DecisionHierarchy(root_id=root_id, nodes=nodes, schemas=schemas)
    constraints = _parse_constraints(raw_constraints, source)
    bindings = parse_bindings(raw_bindings, source=source)
    return ModelDocument(hierarchy=hierarchy, constraints=constraints,
                         bindings=bindings)


def load_model(path: str | Path) -> ModelDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read file: {exc}",
                               source=str(path)) from exc
    return parse_model(text, source=str(path))


def _value_to_dict(value: CharacteristicValue) -> object:
    if isinstance(value, Series):
        return {"series": [[p, v] for p, v in value.points]}
    return value


def model_to_dict(document: ModelDocument) -> dict:
    """The document as plain JSON data; round-trips through parse_model."""
    hierarchy = document.hierarchy
    nodes = []
    tables = []
    for node in hierarchy.nodes.values():
        entry: dict[str, object] = {
            "id": node.id, "label": node.label, "kind": node.kind,
            "connector": node.connector,
        }
        if node.children:
            entry["children"] = list(node.children)
        if node.group_id is not None:
            entry["group_id"] = node.group_id
        nodes.append(entry)
        if node.characteristics is not None:
            tables.append({
                "node_id": node.id,
                "values": {name: _value_to_dict(value)
                           for name, value
                           in sorted(node.characteristics.values.items())},
            })
    schemas = []
    for schema in hierarchy.schemas.values():
        attributes = []
        for attribute in schema.attributes:
            raw: dict[str, object] = {"name": attribute.name,
                                      "value_kind": attribute.value_kind}
            if attribute.aggregation is not None:
                raw["aggregation"] = attribute.aggregation
            if attribute.unit is not None:
                raw["unit"] = attribute.unit
            attributes.append(raw)
        schemas.append({"group_id": schema.group_id,
                        "attributes": attributes})
    constraints: dict[str, object] = {}
    if document.constraints.payback_limit is not None:
        constraints["payback_limit"] = document.constraints.payback_limit
    if document.constraints.expenditure_ceiling is not None:
        constraints["expenditure_ceiling"] = (
            document.constraints.expenditure_ceiling)
    if document.constraints.bounds:
        constraints["bounds"] = [
            {"attribute": b.attribute, "comparator": b.comparator,
             "threshold": b.threshold}
            for b in document.constraints.bounds
        ]
    result: dict[str, object] = {
        "hierarchy": {"root_id": hierarchy.root_id, "nodes": nodes},
        "schemas": schemas,
        "tables": tables,
        "constraints": constraints,
    }
    if document.bindings:
        result["bindings"] = [
            {"fact": b.fact, "node_id": b.node_id, "attribute": b.attribute,
             "comparator": b.comparator, "threshold": b.threshold}
            for b in document.bindings
        ]
    return result
