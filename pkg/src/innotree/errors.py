"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class InnotreeError(Exception):
    """Base class for every error raised by this package."""


class FormatError(InnotreeError):
    """A data file is malformed: bad JSON, wrong types, or unknown keys."""

    def __init__(self, message: str, *, source: str | None = None,
                 line: int | None = None, column: int | None = None) -> None:
        self.source = source
        self.line = line
        self.column = column
        location = ""
        if source is not None:
            location = f"{source}: "
        if line is not None:
            location += f"line {line}, column {column}: "
        super().__init__(location + message)


class ModelFormatError(FormatError):
    """The model file does not conform to the documented format."""


class RulesFormatError(FormatError):
    """The rules file does not conform to the documented format."""


class SchemaFormatError(FormatError):
    """The analytical schema file does not conform to the documented format."""


class ReportFormatError(FormatError):
    """The report configuration file does not conform to the documented format."""


class ConfigFormatError(FormatError):
    """The engine configuration file does not conform to the documented format."""


class DatasetFormatError(FormatError):
    """A mining dataset file does not conform to the documented format."""


class UnknownNodeError(InnotreeError):
    """One or more node ids do not resolve against the hierarchy."""

    def __init__(self, offenders: tuple[str, ...]) -> None:
        self.offenders = offenders
        super().__init__("unknown node id(s): " + ", ".join(offenders))


class UnknownGroupError(InnotreeError):
    """A homogeneity group id does not exist in the hierarchy."""


class CharacteristicMissingError(InnotreeError):
    """A node does not carry the requested characteristic attribute."""


class SeriesParamRequiredError(InnotreeError):
    """A series-valued characteristic was read without an evaluation parameter."""


class SeriesRangeError(InnotreeError):
    """The evaluation parameter lies outside the sampled range of a series."""


class BindingError(InnotreeError):
    """A fact binding references data it cannot evaluate."""


class NotDerivedError(InnotreeError):
    """The requested fact is neither a seed nor derivable from the trace."""


class ScoringError(InnotreeError):
    """A configuration cannot be scored as requested."""


class EnumerationError(InnotreeError):
    """Variant enumeration was invoked on invalid inputs."""


class StarIntegrityError(InnotreeError):
    """A dual-star schema violates its structural integrity rules."""

    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownTableError(InnotreeError):
    """A fact table name does not exist in the schema."""

    def __init__(self, name: str, available: tuple[str, ...]) -> None:
        self.name = name
        self.available = available
        super().__init__(
            f"unknown fact table {name!r}; available: {', '.join(available) or '(none)'}"
        )


class ReportQueryError(InnotreeError):
    """A report query references dimensions, levels, or measures that do not exist."""


class DegeneratePivotError(ReportQueryError):
    """A pivot query places the same dimension level on both axes."""


class UnknownReportError(InnotreeError):
    """A report id is not present in the report configuration."""

    def __init__(self, report_id: str, known: tuple[str, ...]) -> None:
        self.report_id = report_id
        self.known = known
        super().__init__(
            f"unknown report {report_id!r}; known ids: {', '.join(known) or '(none)'}"
        )


class MiningError(InnotreeError):
    """Decision-tree induction or classification was invoked on invalid inputs."""


class SnapshotError(InnotreeError):
    """An engine snapshot could not be assembled from its source files."""
