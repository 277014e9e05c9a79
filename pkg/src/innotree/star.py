"""Dual-star analytical storage over one shared leaf grain.

Two dimension hierarchies — the goal view and the decision view of the same
project — classify the identical set of leaf ids, each through its own fixed
ladder of levels from coarsest to finest. The finest level of every
dimension is the leaf id itself, which is what ties the two stars together.

Fact tables record numeric measures per leaf, one row per leaf. One table is
designated the main table; a dedicated operator re-designates it without
touching any data. Rollup folds measures upward to any level of either
dimension, grouping rows by their member at that level and ordering groups
lexicographically by member name. Supported folds are sum, min, max, and
mean, where mean divides the group sum by the number of contributing rows
(never a mean of means, so regrouping cannot change it).

Schemas are immutable values: loading, storing, and re-designating the main
table all produce fresh objects, so concurrent readers of one schema are
safe.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    ReportQueryError,
    SchemaFormatError,
    StarIntegrityError,
    UnknownTableError,
)
from .jsonutil import FieldReader, expect_string_list, load_json_text
from .validation import Violation, sorted_report

GOALS_DIMENSION = "goals"
DECISIONS_DIMENSION = "decisions"
DIMENSION_IDS = (GOALS_DIMENSION, DECISIONS_DIMENSION)

MEASURE_OPS = ("sum", "min", "max", "mean")


@dataclass(frozen=True)
class DimensionHierarchy:
    """One classification hierarchy: fixed levels, one path per leaf."""

    id: str
    levels: tuple[str, ...]
    membership: dict[str, tuple[str, ...]]

    def level_index(self, level: str) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise ReportQueryError(
                f"dimension {self.id!r} has no level {level!r}; "
                f"levels: {', '.join(self.levels)}") from None

    def member_path(self, leaf_id: str) -> tuple[str, ...]:
        try:
            return self.membership[leaf_id]
        except KeyError:
            raise ReportQueryError(
                f"leaf {leaf_id!r} is not classified by dimension "
                f"{self.id!r}") from None

    def member_at(self, leaf_id: str, level: str) -> str:
        return self.member_path(leaf_id)[self.level_index(level)]


@dataclass(frozen=True)
class FactRow:
    """Measures recorded for one leaf."""

    leaf_id: str
    measures: Mapping[str, float]


@dataclass(frozen=True)
class FactTable:
    """Numeric measures at leaf grain; measure names consistent per table."""

    name: str
    rows: tuple[FactRow, ...]

    def measure_names(self) -> tuple[str, ...]:
        if not self.rows:
            return ()
        return tuple(sorted(self.rows[0].measures))


@dataclass(frozen=True)
class DualStarSchema:
    """Two dimensions sharing a leaf grain, plus fact tables over it."""

    dims: dict[str, DimensionHierarchy]
    facts: dict[str, FactTable]
    main: str

    def dimension(self, dim_id: str) -> DimensionHierarchy:
        try:
            return self.dims[dim_id]
        except KeyError:
            raise ReportQueryError(
                f"unknown dimension {dim_id!r}; dimensions: "
                f"{', '.join(self.dims)}") from None

    def table(self, name: str | None = None) -> FactTable:
        key = self.main if name is None else name
        try:
            return self.facts[key]
        except KeyError:
            raise UnknownTableError(key, tuple(self.facts)) from None

    def shared_leaves(self) -> frozenset[str]:
        for dim in self.dims.values():
            return frozenset(dim.membership)
        return frozenset()


@dataclass(frozen=True)
class GroupAggregate:
    """One rollup group: its member name, folded values, and row count."""

    member: str
    values: dict[str, float]
    count: int


# --- integrity ---------------------------------------------------------------

def integrity_problems(schema: DualStarSchema) -> list[str]:
    """Every violated structural rule of the schema, as messages."""
    problems: list[str] = []
    if sorted(schema.dims) != sorted(DIMENSION_IDS):
        problems.append(
            "schema needs exactly the dimensions "
            f"{' and '.join(DIMENSION_IDS)}, has: "
            + (", ".join(sorted(schema.dims)) or "(none)"))
    leaf_sets: dict[str, frozenset[str]] = {}
    for dim_id, dim in schema.dims.items():
        if dim_id != dim.id:
            problems.append(
                f"dimension keyed {dim_id!r} names itself {dim.id!r}")
        if not dim.levels:
            problems.append(f"dimension {dim_id!r} has no levels")
        if len(set(dim.levels)) != len(dim.levels):
            problems.append(f"dimension {dim_id!r} repeats a level name")
        for leaf_id in sorted(dim.membership):
            path = dim.membership[leaf_id]
            if len(path) != len(dim.levels):
                problems.append(
                    f"dimension {dim_id!r}: path of leaf {leaf_id!r} has "
                    f"{len(path)} member(s) for {len(dim.levels)} level(s)")
            elif path and path[-1] != leaf_id:
                problems.append(
                    f"dimension {dim_id!r}: path of leaf {leaf_id!r} ends "
                    f"in {path[-1]!r}, not the leaf itself")
        leaf_sets[dim_id] = frozenset(dim.membership)
    if len(set(leaf_sets.values())) > 1:
        names = sorted(leaf_sets)
        for a, b in zip(names, names[1:]):
            for leaf in sorted(leaf_sets[a] - leaf_sets[b]):
                problems.append(
                    f"leaf {leaf!r} is classified by {a!r} but not {b!r}")
            for leaf in sorted(leaf_sets[b] - leaf_sets[a]):
                problems.append(
                    f"leaf {leaf!r} is classified by {b!r} but not {a!r}")
    shared = schema.shared_leaves()
    for name, table in schema.facts.items():
        if name != table.name:
            problems.append(f"table keyed {name!r} names itself {table.name!r}")
        measure_set: set[str] | None = None
        seen: set[str] = set()
        for row in table.rows:
            if row.leaf_id in seen:
                problems.append(
                    f"table {name!r} has duplicate rows for leaf "
                    f"{row.leaf_id!r}")
            seen.add(row.leaf_id)
            if row.leaf_id not in shared:
                problems.append(
                    f"table {name!r} records unclassified leaf "
                    f"{row.leaf_id!r}")
            if measure_set is None:
                measure_set = set(row.measures)
            elif set(row.measures) != measure_set:
                problems.append(
                    f"table {name!r}, leaf {row.leaf_id!r}: measure names "
                    "differ from earlier rows")
    if schema.main not in schema.facts:
        problems.append(
            f"main table {schema.main!r} does not exist; available: "
            + (", ".join(sorted(schema.facts)) or "(none)"))
    return problems


def ensure_integrity(schema: DualStarSchema) -> None:
    problems = integrity_problems(schema)
    if problems:
        raise StarIntegrityError(problems)


def alignment_problems(schema: DualStarSchema,
                       hierarchy_leaves: Sequence[str] | frozenset[str],
                       ) -> list[Violation]:
    """Mismatches between the schema's grain and a hierarchy's leaf set."""
    expected = set(hierarchy_leaves)
    actual = set(schema.shared_leaves())
    out = [Violation(leaf, "star-missing-leaf",
                     "hierarchy leaf is not classified by the dimensions")
           for leaf in sorted(expected - actual)]
    out.extend(Violation(leaf, "star-unknown-leaf",
                         "classified leaf does not exist in the hierarchy")
               for leaf in sorted(actual - expected))
    return sorted_report(out)


# --- operators ---------------------------------------------------------------

def select_main_fact_table(schema: DualStarSchema,
                           name: str) -> DualStarSchema:
    """A copy of the schema with the named table designated as main.

    All dimension and fact data is shared untouched; the original schema
    is not modified.
    """
    if name not in schema.facts:
        raise UnknownTableError(name, tuple(schema.facts))
    return replace(schema, main=name)


def _fold_measure(op: str, values: Sequence[float]) -> float:
    if op == "sum":
        return sum(values)
    if op == "min":
        return min(values)
    if op == "max":
        return max(values)
    if op == "mean":
        return sum(values) / len(values)
    raise ReportQueryError(
        f"unknown measure fold {op!r}; supported: {', '.join(MEASURE_OPS)}")


def rollup(schema: DualStarSchema,
           dimension: str,
           level: str,
           ops: Mapping[str, str],
           table: str | None = None) -> tuple[GroupAggregate, ...]:
    """Fold measures up one dimension to the given level.

    ``ops`` maps each wanted measure to its fold (sum, min, max, or mean).
    Rows are grouped by their leaf's member at the level; groups come back
    ordered lexicographically by member name.
    """
    t = schema.table(table)
    dim = schema.dimension(dimension)
    idx = dim.level_index(level)
    available = t.measure_names()
    for measure, op in ops.items():
        if measure not in available:
            raise ReportQueryError(
                f"table {t.name!r} has no measure {measure!r}; measures: "
                + (", ".join(available) or "(none)"))
        if op not in MEASURE_OPS:
            raise ReportQueryError(
                f"unknown measure fold {op!r}; supported: "
                + ", ".join(MEASURE_OPS))
    groups: dict[str, list[FactRow]] = {}
    for row in t.rows:
        member = dim.member_path(row.leaf_id)[idx]
        groups.setdefault(member, []).append(row)
    out: list[GroupAggregate] = []
    for member in sorted(groups):
        rows = groups[member]
        values = {
            measure: _fold_measure(op, [r.measures[measure] for r in rows])
            for measure, op in sorted(ops.items())
        }
        out.append(GroupAggregate(member=member, values=values,
                                  count=len(rows)))
    return tuple(out)


# --- file formats -----------------------------------------------------------

def _parse_dimension(raw: object, context: str,
                     source: str | None) -> DimensionHierarchy:
    reader = FieldReader(raw, context, error_cls=SchemaFormatError,
                         source=source)
    dim_id = reader.require("id", "string")
    levels = reader.require("levels", "list")
    raw_membership = reader.require("membership", "object")
    reader.finish()
    expect_string_list(levels, f"{context}.levels",
                       error_cls=SchemaFormatError, source=source)
    membership: dict[str, tuple[str, ...]] = {}
    for leaf, raw_path in raw_membership.items():
        path = expect_string_list(
            raw_path, f"{context}.membership[{leaf!r}]",
            error_cls=SchemaFormatError, source=source)
        membership[leaf] = tuple(path)
    return DimensionHierarchy(id=dim_id, levels=tuple(levels),
                              membership=membership)


def _parse_table(name: str, raw: object, context: str,
                 source: str | None) -> FactTable:
    reader = FieldReader(raw, context, error_cls=SchemaFormatError,
                         source=source)
    raw_rows = reader.require("rows", "list")
    reader.finish()
    rows: list[FactRow] = []
    for i, raw_row in enumerate(raw_rows):
        row_reader = FieldReader(raw_row, f"{context}.rows[{i}]",
                                 error_cls=SchemaFormatError, source=source)
        leaf = row_reader.require("leaf_id", "string")
        raw_measures = row_reader.require("measures", "object")
        row_reader.finish()
        measures: dict[str, float] = {}
        for key, value in raw_measures.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                row_reader.fail(f"measure {key!r} must be a number")
            measures[key] = float(value)
        rows.append(FactRow(leaf_id=leaf, measures=measures))
    return FactTable(name=name, rows=tuple(rows))


def parse_schema(text: str, *, source: str | None = None) -> DualStarSchema:
    """Parse and integrity-check a dual-star manifest.

    The manifest carries "dims" (a list of the two dimension
    hierarchies), "facts" (an association of table name to fact table),
    and "main" (the designated main table).
    """
    raw = load_json_text(text, error_cls=SchemaFormatError, source=source)
    top = FieldReader(raw, "star manifest", error_cls=SchemaFormatError,
                      source=source)
    raw_dims = top.require("dims", "list")
    raw_facts = top.require("facts", "object")
    main = top.require("main", "string")
    top.finish()
    dims: dict[str, DimensionHierarchy] = {}
    for i, raw_dim in enumerate(raw_dims):
        dim = _parse_dimension(raw_dim, f"dims[{i}]", source)
        if dim.id in dims:
            raise SchemaFormatError(
                f"dims[{i}]: duplicate dimension {dim.id!r}", source=source)
        dims[dim.id] = dim
    facts: dict[str, FactTable] = {}
    for name, raw_table in raw_facts.items():
        facts[name] = _parse_table(name, raw_table, f"facts[{name!r}]",
                                   source)
    schema = DualStarSchema(dims=dims, facts=facts, main=main)
    ensure_integrity(schema)
    return schema


def load_schema(path: str | Path) -> DualStarSchema:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaFormatError(f"cannot read file: {exc}",
                                source=str(path)) from exc
    return parse_schema(text, source=str(path))


def schema_to_dict(schema: DualStarSchema) -> dict:
    """Plain-data manifest form of the schema (round-trips via parse)."""
    return {
        "dims": [
            {
                "id": dim.id,
                "levels": list(dim.levels),
                "membership": {leaf: list(dim.membership[leaf])
                               for leaf in sorted(dim.membership)},
            }
            for dim in schema.dims.values()
        ],
        "facts": {
            table.name: {
                "rows": [
                    {"leaf_id": row.leaf_id,
                     "measures": {k: row.measures[k]
                                  for k in sorted(row.measures)}}
                    for row in table.rows
                ],
            }
            for table in schema.facts.values()
        },
        "main": schema.main,
    }


def store_schema(schema: DualStarSchema, path: str | Path) -> None:
    """Write the manifest; loading it back yields an equal schema."""
    import json

    path = Path(path)
    payload = json.dumps(schema_to_dict(schema), indent=2,
                         ensure_ascii=False) + "\n"
    path.write_text(payload, encoding="utf-8")


def fact_table_csv(schema: DualStarSchema, table: str | None = None) -> str:
    """One fact table as CSV: leaf_id column, then measures sorted by name.

    Row order follows the table; line ending is LF; decimal separator is
    a dot. The text parses back to an equal table.
    """
    import csv

    t = schema.table(table)
    measures = t.measure_names()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["leaf_id", *measures])
    for row in t.rows:
        writer.writerow([row.leaf_id,
                         *(_format_number(row.measures[m]) for m in measures)])
    return buffer.getvalue()


def parse_fact_table_csv(name: str, text: str, *,
                         source: str | None = None) -> FactTable:
    """Parse a fact table from its CSV form (leaf_id column + measures)."""
    import csv

    rows_reader = csv.reader(io.StringIO(text))
    try:
        header = next(rows_reader)
    except StopIteration:
        raise SchemaFormatError("fact table CSV has no header",
                                source=source) from None
    if not header or header[0] != "leaf_id":
        raise SchemaFormatError(
            "fact table CSV must start with a 'leaf_id' column",
            source=source)
    measures = header[1:]
    if len(set(measures)) != len(measures):
        raise SchemaFormatError("fact table CSV repeats a measure column",
                                source=source)
    rows: list[FactRow] = []
    for i, record in enumerate(rows_reader):
        if not record:
            continue
        if len(record) != len(header):
            raise SchemaFormatError(
                f"row {i + 1}: expected {len(header)} fields, "
                f"got {len(record)}", source=source)
        values: dict[str, float] = {}
        for measure, cell in zip(measures, record[1:]):
            try:
                values[measure] = float(cell)
            except ValueError:
                raise SchemaFormatError(
                    f"row {i + 1}: measure {measure!r} value {cell!r} "
                    "is not a number", source=source) from None
        rows.append(FactRow(leaf_id=record[0], measures=values))
    return FactTable(name=name, rows=tuple(rows))


def _format_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)
