"""Static XML reports and dynamic pivot queries over the dual-star store.

Static reports are precompiled rollup queries rendered to self-contained,
canonical XML: UTF-8, LF line endings, two-space indentation, attributes
sorted by name, one <row> element per rollup group in rollup (member) order.
Rendering is a pure function of (definition, schema), so repeated renders
are byte-identical.

Dynamic reports are pivot patterns: a measure cross-tabulated over one
dimension level on the rows axis and another on the columns axis, emitted as
CSV — the first row lists the sorted column members after a corner cell
holding the row level's name, the first column lists the sorted row members,
and each cell folds the measure over the rows matching both members, with
empty cells left as empty fields.

A report configuration is limited by design rules: at most 10 static
reports, at most 15 dynamic patterns, and at most 5 dynamic patterns per
fact table (cube). Breaches are reported as validation violations, not
errors, alongside every dangling reference.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import (
    DegeneratePivotError,
    InnotreeError,
    ReportFormatError,
    ReportQueryError,
    UnknownReportError,
)
from .jsonutil import FieldReader, expect_string_list, load_json_text
from .star import MEASURE_OPS, DualStarSchema, _fold_measure, rollup
from .validation import Violation, sorted_report

MAX_STATIC_REPORTS = 10
MAX_DYNAMIC_REPORTS = 15
MAX_DYNAMICS_PER_CUBE = 5

_NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9._-]*$")
_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass(frozen=True)
class RollupQuery:
    """The rollup behind a static report: one fold over many measures."""

    dimension: str
    level: str
    measures: tuple[str, ...]
    agg: str
    table: str | None = None


@dataclass(frozen=True)
class StaticReportDef:
    """One precompiled report: a rollup plus its XML framing."""

    id: str
    title: str
    query: RollupQuery
    xml_root: str


@dataclass(frozen=True)
class PivotAxis:
    """One pivot axis: a dimension and the level to slice it at."""

    dimension: str
    level: str


@dataclass(frozen=True)
class PivotFilter:
    """Keeps only rows whose member at the given level matches."""

    dimension: str
    level: str
    member: str


@dataclass(frozen=True)
class DynamicQueryDef:
    """One pivot pattern over a fact table (cube)."""

    id: str
    cube: str
    rows: PivotAxis
    columns: PivotAxis
    measure: str
    agg: str
    filter: PivotFilter | None = None


@dataclass(frozen=True)
class ReportConfig:
    """The full report catalog: static definitions and dynamic patterns."""

    statics: tuple[StaticReportDef, ...] = ()
    dynamics: tuple[DynamicQueryDef, ...] = ()

    def static(self, report_id: str) -> StaticReportDef:
        for d in self.statics:
            if d.id == report_id:
                return d
        raise UnknownReportError(report_id, tuple(d.id for d in self.statics))

    def dynamic(self, report_id: str) -> DynamicQueryDef:
        for d in self.dynamics:
            if d.id == report_id:
                return d
        raise UnknownReportError(report_id, tuple(d.id for d in self.dynamics))


# --- validation ---------------------------------------------------------------

def _check_measure(table: str | None, measure: str, schema: DualStarSchema,
                   report_id: str, out: list[Violation]) -> None:
    key = schema.main if table is None else table
    fact_table = schema.facts.get(key)
    if fact_table is None:
        out.append(Violation(report_id, "unknown-table",
                             f"fact table {key!r} does not exist"))
    elif measure not in fact_table.measure_names():
        out.append(Violation(report_id, "unknown-measure",
                             f"table {key!r} has no measure {measure!r}"))


def _check_axis(dimension: str, level: str, schema: DualStarSchema,
                report_id: str, out: list[Violation]) -> None:
    dim = schema.dims.get(dimension)
    if dim is None:
        out.append(Violation(report_id, "unknown-dimension",
                             f"dimension {dimension!r} does not exist"))
    elif level not in dim.levels:
        out.append(Violation(
            report_id, "unknown-level",
            f"dimension {dimension!r} has no level {level!r}"))


def validate_report_config(cfg: ReportConfig,
                           schema: DualStarSchema) -> list[Violation]:
    """Every limit breach and dangling reference in the catalog, as data.

    Checks the three design limits (10 statics, 15 dynamics, 5 dynamics
    per cube), id uniqueness, and that every dimension, level, table, and
    measure a definition names actually exists in the schema. Empty result
    means the catalog is valid.
    """
    out: list[Violation] = []
    if len(cfg.statics) > MAX_STATIC_REPORTS:
        out.append(Violation(
            "statics", "limit",
            f"{len(cfg.statics)} static reports exceed the limit of "
            f"{MAX_STATIC_REPORTS}"))
    if len(cfg.dynamics) > MAX_DYNAMIC_REPORTS:
        out.append(Violation(
            "dynamics", "limit",
            f"{len(cfg.dynamics)} dynamic patterns exceed the limit of "
            f"{MAX_DYNAMIC_REPORTS}"))
    per_cube: dict[str, int] = {}
    for d in cfg.dynamics:
        per_cube[d.cube] = per_cube.get(d.cube, 0) + 1
    for cube in sorted(per_cube):
        if per_cube[cube] > MAX_DYNAMICS_PER_CUBE:
            out.append(Violation(
                cube, "cube-limit",
                f"{per_cube[cube]} dynamic patterns on cube {cube!r} "
                f"exceed the limit of {MAX_DYNAMICS_PER_CUBE} per cube"))

    seen_ids: set[str] = set()
    for report_id in [s.id for s in cfg.statics] + [d.id for d in cfg.dynamics]:
        if report_id in seen_ids:
            out.append(Violation(report_id, "duplicate-id",
                                 "report id is used more than once"))
        seen_ids.add(report_id)

    for s in cfg.statics:
        _check_axis(s.query.dimension, s.query.level, schema, s.id, out)
        for measure in s.query.measures:
            _check_measure(s.query.table, measure, schema, s.id, out)
            if measure == "member" or not _NAME_PATTERN.match(measure):
                out.append(Violation(
                    s.id, "measure-name",
                    f"measure {measure!r} cannot be rendered as an XML "
                    "attribute of <row>"))
        if len(set(s.query.measures)) != len(s.query.measures):
            out.append(Violation(
                s.id, "duplicate-measure",
                "a measure is listed more than once"))
    for d in cfg.dynamics:
        if d.cube not in schema.facts:
            out.append(Violation(d.id, "unknown-table",
                                 f"fact table {d.cube!r} does not exist"))
        else:
            _check_measure(d.cube, d.measure, schema, d.id, out)
        _check_axis(d.rows.dimension, d.rows.level, schema, d.id, out)
        _check_axis(d.columns.dimension, d.columns.level, schema, d.id, out)
        if (d.rows.dimension, d.rows.level) == (d.columns.dimension,
                                                d.columns.level):
            out.append(Violation(
                d.id, "degenerate-pivot",
                "rows and columns slice the same dimension at the same "
                "level"))
        if d.filter is not None:
            _check_axis(d.filter.dimension, d.filter.level, schema, d.id, out)
    return sorted_report(out)


# --- static rendering ---------------------------------------------------------

def _escape_attr(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _format_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def _attrs(pairs: dict[str, str]) -> str:
    return " ".join(f'{name}="{_escape_attr(pairs[name])}"'
                    for name in sorted(pairs))


def render_static(definition: StaticReportDef,
                  schema: DualStarSchema) -> bytes:
    """One static report as canonical XML bytes.

    The root element is the definition's ``xml_root``, carrying the id and
    title; each rollup group becomes a self-closing <row> element whose
    attributes are the group member plus one attribute per measure, all
    sorted by attribute name. Identical inputs render identical bytes.
    """
    query = definition.query
    try:
        groups = rollup(schema, query.dimension, query.level,
                        {m: query.agg for m in query.measures},
                        table=query.table)
    except InnotreeError as exc:
        raise ReportQueryError(
            f"static report {definition.id!r}: {exc}") from exc
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    root_attrs = _attrs({"id": definition.id, "title": definition.title})
    lines.append(f"<{definition.xml_root} {root_attrs}>")
    for group in groups:
        pairs = {"member": group.member}
        for measure in query.measures:
            pairs[measure] = _format_number(group.values[measure])
        lines.append(f"  <row {_attrs(pairs)}/>")
    lines.append(f"</{definition.xml_root}>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# --- dynamic rendering ---------------------------------------------------------

def run_dynamic(definition: DynamicQueryDef,
                schema: DualStarSchema) -> bytes:
    """One pivot pattern as CSV bytes.

    Grid cell (r, c) folds the measure over the fact rows whose leaf maps
    to row member r and column member c; cells with no contributing rows
    stay empty. The header row holds the row level's name in the corner,
    then the sorted column members; body rows start with the sorted row
    members. Quoting follows common CSV rules; line endings are LF.
    """
    if (definition.rows.dimension, definition.rows.level) == (
            definition.columns.dimension, definition.columns.level):
        raise DegeneratePivotError(
            f"dynamic report {definition.id!r}: rows and columns slice "
            "the same dimension at the same level")
    try:
        table = schema.table(definition.cube)
        row_dim = schema.dimension(definition.rows.dimension)
        col_dim = schema.dimension(definition.columns.dimension)
        row_idx = row_dim.level_index(definition.rows.level)
        col_idx = col_dim.level_index(definition.columns.level)
        if definition.measure not in table.measure_names():
            raise ReportQueryError(
                f"table {table.name!r} has no measure "
                f"{definition.measure!r}")
        if definition.agg not in MEASURE_OPS:
            raise ReportQueryError(
                f"unknown measure fold {definition.agg!r}")
        rows = list(table.rows)
        if definition.filter is not None:
            filter_dim = schema.dimension(definition.filter.dimension)
            filter_idx = filter_dim.level_index(definition.filter.level)
            rows = [r for r in rows
                    if filter_dim.member_path(r.leaf_id)[filter_idx]
                    == definition.filter.member]
        cells: dict[tuple[str, str], list[float]] = {}
        for row in rows:
            r = row_dim.member_path(row.leaf_id)[row_idx]
            c = col_dim.member_path(row.leaf_id)[col_idx]
            cells.setdefault((r, c), []).append(
                row.measures[definition.measure])
    except InnotreeError as exc:
        if isinstance(exc, DegeneratePivotError):
            raise
        raise ReportQueryError(
            f"dynamic report {definition.id!r}: {exc}") from exc

    row_members = sorted({r for r, _ in cells})
    col_members = sorted({c for _, c in cells})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([definition.rows.level, *col_members])
    for r in row_members:
        line: list[str] = [r]
        for c in col_members:
            values = cells.get((r, c))
            line.append("" if values is None
                        else _format_number(_fold_measure(definition.agg,
                                                          values)))
        writer.writerow(line)
    return buffer.getvalue().encode("utf-8")


# --- file format ------------------------------------------------------------

def _parse_static(raw: object, context: str,
                  source: str | None) -> StaticReportDef:
    reader = FieldReader(raw, context, error_cls=ReportFormatError,
                         source=source)
    report_id = reader.require("id", "string")
    title = reader.require("title", "string")
    xml_root = reader.require("xml_root", "string")
    raw_query = reader.require("query", "object")
    reader.finish()
    if not _ID_PATTERN.match(report_id):
        reader.fail(f"id {report_id!r} must be alphanumeric with . _ -")
    if not _NAME_PATTERN.match(xml_root):
        reader.fail(f"xml_root {xml_root!r} is not a usable element name")
    query_reader = FieldReader(raw_query, f"{context}.query",
                               error_cls=ReportFormatError, source=source)
    dimension = query_reader.require("dimension", "string")
    level = query_reader.require("level", "string")
    measures = query_reader.require("measures", "list")
    agg = query_reader.require("agg", "string")
    table = query_reader.optional("table", "string")
    query_reader.finish()
    expect_string_list(measures, f"{context}.query.measures",
                       error_cls=ReportFormatError, source=source)
    if not measures:
        query_reader.fail("at least one measure is required")
    if agg not in MEASURE_OPS:
        query_reader.fail(f"agg must be one of {', '.join(MEASURE_OPS)}")
    return StaticReportDef(
        id=report_id, title=title, xml_root=xml_root,
        query=RollupQuery(dimension=dimension, level=level,
                          measures=tuple(measures), agg=agg, table=table))


def _parse_axis(raw: object, context: str, source: str | None) -> PivotAxis:
    reader = FieldReader(raw, context, error_cls=ReportFormatError,
                         source=source)
    dimension = reader.require("dimension", "string")
    level = reader.require("level", "string")
    reader.finish()
    return PivotAxis(dimension=dimension, level=level)


def _parse_dynamic(raw: object, context: str,
                   source: str | None) -> DynamicQueryDef:
    reader = FieldReader(raw, context, error_cls=ReportFormatError,
                         source=source)
    report_id = reader.require("id", "string")
    cube = reader.require("cube", "string")
    raw_rows = reader.require("rows", "object")
    raw_columns = reader.require("columns", "object")
    measure = reader.require("measure", "string")
    agg = reader.require("agg", "string")
    raw_filter = reader.optional("filter", "object")
    reader.finish()
    if not _ID_PATTERN.match(report_id):
        reader.fail(f"id {report_id!r} must be alphanumeric with . _ -")
    if agg not in MEASURE_OPS:
        reader.fail(f"agg must be one of {', '.join(MEASURE_OPS)}")
    pivot_filter = None
    if raw_filter is not None:
        filter_reader = FieldReader(raw_filter, f"{context}.filter",
                                    error_cls=ReportFormatError,
                                    source=source)
        f_dimension = filter_reader.require("dimension", "string")
        f_level = filter_reader.require("level", "string")
        f_member = filter_reader.require("member", "string")
        filter_reader.finish()
        pivot_filter = PivotFilter(dimension=f_dimension, level=f_level,
                                   member=f_member)
    return DynamicQueryDef(
        id=report_id, cube=cube,
        rows=_parse_axis(raw_rows, f"{context}.rows", source),
        columns=_parse_axis(raw_columns, f"{context}.columns", source),
        measure=measure, agg=agg, filter=pivot_filter)


def parse_report_config(text: str, *,
                        source: str | None = None) -> ReportConfig:
    """Parse a report catalog: ``{"statics": [...], "dynamics": [...]}``."""
    raw = load_json_text(text, error_cls=ReportFormatError, source=source)
    top = FieldReader(raw, "report config", error_cls=ReportFormatError,
                      source=source)
    raw_statics = top.optional("statics", "list", default=[])
    raw_dynamics = top.optional("dynamics", "list", default=[])
    top.finish()
    statics = tuple(_parse_static(raw_static, f"statics[{i}]", source)
                    for i, raw_static in enumerate(raw_statics))
    dynamics = tuple(_parse_dynamic(raw_dynamic, f"dynamics[{i}]", source)
                     for i, raw_dynamic in enumerate(raw_dynamics))
    return ReportConfig(statics=statics, dynamics=dynamics)


def load_report_config(path: str | Path) -> ReportConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ReportFormatError(f"cannot read file: {exc}",
                                source=str(path)) from exc
    return parse_report_config(text, source=str(path))
