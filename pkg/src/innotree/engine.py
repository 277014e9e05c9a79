"""Snapshot lifecycle and the evaluation entry points behind the service.

All engine state lives in one immutable :class:`EngineSnapshot` — model,
rule base, star schema, report catalog, and scoring settings — tagged with a
version number. Request handling reads exactly one snapshot reference, so a
concurrent reload can never mix old and new data within a response: readers
see either the previous bundle or the next one. Reload builds the fresh
snapshot completely (and may fail, leaving the old one in place) before a
single reference assignment publishes it with the version bumped by one.

Evaluation itself is stateless: every function here takes the snapshot (or
its parts) as an argument and returns plain data.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigFormatError
from .model import (
    ConstraintSet,
    DecisionHierarchy,
    ModelDocument,
    load_model,
    model_to_dict,
    validate_constraints,
    validate_hierarchy,
)
from .reports import ReportConfig, load_report_config, validate_report_config
from .rules import (
    Binding,
    RuleBase,
    forward_chain,
    ground_facts,
    load_rulebase,
    validate_bindings,
    validate_rules_against_model,
)
from .star import (
    DualStarSchema,
    alignment_problems,
    integrity_problems,
    load_schema,
)
from .validation import Violation, sorted_report
from .variants import (
    DIRECTIONS,
    MAXIMIZE,
    Configuration,
    EnumerationResult,
    Score,
    admissible,
    aggregate_attributes,
    enumerate_configurations,
    failed_bounds,
    rank,
    score,
    selection_status,
)

DATA_DIR_ENV = "INNOTREE_DATA"


@dataclass(frozen=True)
class ScoringSettings:
    """How configurations are scored and ranked when nothing else is given."""

    weights: Mapping[str, float] = field(default_factory=dict)
    direction: str = MAXIMIZE
    param: float | None = None


@dataclass(frozen=True)
class EngineConfig:
    """Resolved locations of the four data files plus scoring settings."""

    model_path: Path
    rules_path: Path
    schema_path: Path
    reports_path: Path
    scoring: ScoringSettings = ScoringSettings()


def load_config(path: str | Path) -> EngineConfig:
    """Read an engine config file.

    The file is JSON with the keys ``model``, ``rules``, ``schema``, and
    ``reports`` naming the data files, plus an optional ``scoring`` object
    (``weights``, ``direction``, ``param``). Relative paths resolve against
    the directory named by the ``INNOTREE_DATA`` environment variable when
    set, otherwise against the config file's own directory.
    """
    from .jsonutil import FieldReader, load_json_text

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFormatError(f"cannot read file: {exc}",
                                source=str(path)) from exc
    raw = load_json_text(text, error_cls=ConfigFormatError, source=str(path))
    reader = FieldReader(raw, "engine config", error_cls=ConfigFormatError,
                         source=str(path))
    model_name = reader.require("model", "string")
    rules_name = reader.require("rules", "string")
    schema_name = reader.require("schema", "string")
    reports_name = reader.require("reports", "string")
    raw_scoring = reader.optional("scoring", "object")
    reader.finish()

    scoring = ScoringSettings()
    if raw_scoring is not None:
        scoring_reader = FieldReader(raw_scoring, "engine config.scoring",
                                     error_cls=ConfigFormatError,
                                     source=str(path))
        raw_weights = scoring_reader.optional("weights", "object", default={})
        direction = scoring_reader.optional("direction", "string",
                                            default=MAXIMIZE)
        param = scoring_reader.optional("param", "number")
        scoring_reader.finish()
        weights: dict[str, float] = {}
        for name in sorted(raw_weights):
            value = raw_weights[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                scoring_reader.fail(f"weight {name!r} must be a number")
            weights[name] = float(value)
        if direction not in DIRECTIONS:
            scoring_reader.fail(
                f"direction must be one of {', '.join(DIRECTIONS)}")
        scoring = ScoringSettings(
            weights=weights, direction=direction,
            param=None if param is None else float(param))

    base = Path(os.environ.get(DATA_DIR_ENV) or path.parent)
    return EngineConfig(
        model_path=base / model_name,
        rules_path=base / rules_name,
        schema_path=base / schema_name,
        reports_path=base / reports_name,
        scoring=scoring,
    )


@dataclass(frozen=True)
class EngineSnapshot:
    """One immutable, internally consistent bundle of all engine data."""

    version: int
    document: ModelDocument
    rulebase: RuleBase
    schema: DualStarSchema
    reports: ReportConfig
    scoring: ScoringSettings

    @property
    def hierarchy(self) -> DecisionHierarchy:
        return self.document.hierarchy

    @property
    def constraints(self) -> ConstraintSet:
        return self.document.constraints

    @property
    def bindings(self) -> tuple[Binding, ...]:
        return self.document.bindings


def load_snapshot(config: EngineConfig, version: int) -> EngineSnapshot:
    """Load every data file the config names into one snapshot."""
    return EngineSnapshot(
        version=version,
        document=load_model(config.model_path),
        rulebase=load_rulebase(config.rules_path),
        schema=load_schema(config.schema_path),
        reports=load_report_config(config.reports_path),
        scoring=config.scoring,
    )


class Engine:
    """Owns the current snapshot and swaps it atomically on reload."""

    def __init__(self, config_path: str | Path):
        self._config_path = Path(config_path)
        self._lock = threading.Lock()
        config = load_config(self._config_path)
        self._snapshot = load_snapshot(config, version=1)

    def snapshot(self) -> EngineSnapshot:
        """The current snapshot; hold the returned reference per request."""
        return self._snapshot

    def reload(self) -> EngineSnapshot:
        """Re-read config and data; publish a new snapshot or change nothing.

        The new bundle is fully constructed before the single reference
        assignment that makes it visible, so concurrent readers always see
        a complete snapshot, and any load error leaves the old one active.
        """
        with self._lock:
            config = load_config(self._config_path)
            fresh = load_snapshot(config, version=self._snapshot.version + 1)
            self._snapshot = fresh
            return fresh


def validate_snapshot(snapshot: EngineSnapshot) -> list[Violation]:
    """Every violation across the whole bundle, as one sorted report.

    Collects structural model findings, constraint and binding findings,
    rules whose selection facts name unknown nodes, star-store integrity
    and model alignment problems, and report-catalog findings.
    """
    h = snapshot.hierarchy
    out: list[Violation] = []
    out.extend(validate_hierarchy(h))
    out.extend(validate_constraints(snapshot.constraints, h))
    out.extend(validate_bindings(snapshot.bindings, h))
    out.extend(validate_rules_against_model(snapshot.rulebase, h))
    for problem in integrity_problems(snapshot.schema):
        out.append(Violation("star", "integrity", problem))
    out.extend(alignment_problems(snapshot.schema, h.leaf_ids()))
    out.extend(validate_report_config(snapshot.reports, snapshot.schema))
    return sorted_report(out)


@dataclass(frozen=True)
class WhatIfRequest:
    """A hypothetical selection to evaluate, with an optional series
    parameter overriding the configured one."""

    selection: tuple[str, ...]
    param: float | None = None


@dataclass(frozen=True)
class WhatIfResponse:
    """Everything the engine can say about one hypothetical selection."""

    admissible: bool
    vetoed: bool
    violated: tuple[str, ...]
    facts: tuple[str, ...]
    aggregates: Mapping[str, float]
    score: Score
    statuses: Mapping[str, str]

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "vetoed": self.vetoed,
            "violated": list(self.violated),
            "facts": list(self.facts),
            "aggregates": dict(self.aggregates),
            "score": {
                "total": self.score.total,
                "per_attribute": dict(self.score.per_attribute),
            },
            "statuses": dict(self.statuses),
        }


def _format_quantity(value: float) -> str:
    return f"{value:g}"


def whatif(snapshot: EngineSnapshot,
           request: WhatIfRequest) -> WhatIfResponse:
    """Evaluate one hypothetical selection against the snapshot.

    Reports structural admissibility, the fact closure (with the veto flag
    split out), each failed constraint bound in readable form, aggregated
    numeric attributes, the configured score, and a per-node status map.
    Unknown selection ids raise, naming every offender.
    """
    h = snapshot.hierarchy
    selection = tuple(dict.fromkeys(request.selection))
    h.require_ids(selection)
    param = request.param if request.param is not None \
        else snapshot.scoring.param

    seed = ground_facts(h, selection, snapshot.bindings, param)
    closure = forward_chain(snapshot.rulebase, seed, want_trace=False)
    aggregates = aggregate_attributes(h, selection, param)
    violated = tuple(
        f"{origin}: {attribute} = {_format_quantity(actual)}, "
        f"required {comparator} {_format_quantity(threshold)}"
        for origin, attribute, comparator, threshold, actual
        in failed_bounds(aggregates, snapshot.constraints))
    return WhatIfResponse(
        admissible=admissible(h, selection),
        vetoed=closure.vetoed,
        violated=violated,
        facts=tuple(sorted(closure.facts)),
        aggregates=aggregates,
        score=score(h, selection, snapshot.scoring.weights, param),
        statuses=selection_status(h, selection),
    )


def ranked_variants(snapshot: EngineSnapshot, limit: int,
                    ) -> tuple[EnumerationResult,
                               tuple[tuple[Configuration, Score], ...]]:
    """Enumerate passing configurations and rank them by configured score."""
    result = enumerate_configurations(
        snapshot.hierarchy, snapshot.rulebase, snapshot.constraints,
        snapshot.bindings, limit, param=snapshot.scoring.param)
    scores = [score(snapshot.hierarchy, c.selected,
                    snapshot.scoring.weights, snapshot.scoring.param)
              for c in result.configurations]
    ranked = rank(result.configurations, scores,
                  snapshot.scoring.direction)
    return result, ranked


def variants_payload(snapshot: EngineSnapshot, limit: int) -> dict:
    """The variants listing as plain JSON data, ranked best-first."""
    result, ranked = ranked_variants(snapshot, limit)
    return {
        "count": len(result.configurations),
        "truncated": result.truncated,
        "variants": [
            {
                "selected": list(config.sorted_ids()),
                "derived": sorted(config.derived),
                "score": {
                    "total": config_score.total,
                    "per_attribute": dict(config_score.per_attribute),
                },
            }
            for config, config_score in ranked
        ],
    }


def reports_payload(snapshot: EngineSnapshot) -> dict:
    """The report catalog as plain JSON data, for download menus."""
    return {
        "statics": [{"id": s.id, "title": s.title}
                    for s in snapshot.reports.statics],
        "pivots": [{"id": d.id, "cube": d.cube}
                   for d in snapshot.reports.dynamics],
    }


def trace_payload(snapshot: EngineSnapshot,
                  seed_facts: Iterable[str]) -> dict:
    """Chain the rules over seed facts and report every firing, in order."""
    closure = forward_chain(snapshot.rulebase, seed_facts, want_trace=True)
    steps = []
    for rule_id, fact in closure.trace:
        rule = snapshot.rulebase.rule(rule_id)
        steps.append({"fact": fact, "rule": rule_id,
                      "supports": list(rule.antecedents)})
    return {
        "facts": sorted(closure.facts),
        "seed": sorted(closure.seed),
        "vetoed": closure.vetoed,
        "steps": steps,
    }


def model_payload(snapshot: EngineSnapshot) -> dict:
    """The model document as JSON data, for clients that draw the tree."""
    return model_to_dict(snapshot.document)
