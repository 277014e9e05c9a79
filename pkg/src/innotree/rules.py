"""Monotone production rules: forward chaining, traces, and fact bindings.

A rule reads "if every antecedent fact holds, then the consequent fact
holds". Facts are plain text symbols compared by exact equality. Chaining
scans the rules in declaration order and repeats full passes until a pass
derives nothing new; a rule fires at most once and a fact is derived at most
once, by the first rule that produces it. Facts added earlier in a pass are
visible to later rules of the same pass. The result is the least fixpoint:
the smallest superset of the seed closed under all rules. Declaration order
shapes only the derivation trace, never the closure itself.

Facts never retract and antecedents are positive conjunctions, so chaining
always terminates after at most one firing per distinct consequent.

The fact ``infeasible`` is reserved by convention: configuration filtering
treats deriving it as a veto.

Bindings bridge the decision hierarchy into the fact space: grounding a
selection emits ``selected:<node-id>`` for every selected node, plus each
binding's fact whose comparison holds on its (selected) node's
characteristic value.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import _kernels
from .errors import (
    BindingError,
    CharacteristicMissingError,
    ModelFormatError,
    NotDerivedError,
    RulesFormatError,
)
from .jsonutil import FieldReader, expect_string_list, load_json_text
from .model import (
    BOOLEAN,
    CATEGORICAL,
    COMPARATORS,
    NUMERIC,
    DecisionHierarchy,
    Scalar,
    compare,
    value_kind_of,
)
from .validation import Violation, sorted_report

VETO_FACT = "infeasible"

SELECTION_PREFIX = "selected:"


def selection_fact(node_id: str) -> str:
    """The fact asserting that a hierarchy node is part of the selection."""
    return SELECTION_PREFIX + node_id


def selection_node(fact: str) -> str | None:
    """The node id a selection fact refers to, None for ordinary facts."""
    if fact.startswith(SELECTION_PREFIX):
        return fact[len(SELECTION_PREFIX):]
    return None


@dataclass(frozen=True)
class Rule:
    """One production: all antecedents present derives the consequent."""

    id: str
    antecedents: tuple[str, ...]
    consequent: str


@dataclass(frozen=True)
class RuleBase:
    """An ordered collection of rules; order shapes traces, not closures."""

    rules: tuple[Rule, ...] = ()

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def facts_mentioned(self) -> list[str]:
        """Every fact named by any rule, in first-appearance order."""
        seen: dict[str, None] = {}
        for r in self.rules:
            for f in r.antecedents:
                seen.setdefault(f)
            seen.setdefault(r.consequent)
        return list(seen)


@dataclass(frozen=True)
class ClosureResult:
    """All facts holding after chaining, plus how each one was derived."""

    facts: frozenset[str]
    seed: frozenset[str]
    trace: tuple[tuple[str, str], ...]

    @property
    def derived(self) -> frozenset[str]:
        """Facts produced by rules, i.e. everything beyond the seed."""
        return self.facts - self.seed

    @property
    def vetoed(self) -> bool:
        return VETO_FACT in self.facts

    def deriving_rule(self, fact: str) -> str | None:
        """Id of the rule that first derived the fact, None for seeds."""
        for rule_id, derived_fact in self.trace:
            if derived_fact == fact:
                return rule_id
        return None


def forward_chain(rulebase: RuleBase, seed_facts: Iterable[str] = (),
                  *, want_trace: bool = True) -> ClosureResult:
    """Close the seed facts under all rules; least fixpoint plus trace.

    The trace lists ``(rule_id, fact)`` pairs in derivation order; facts
    already in the seed are never re-derived and never appear in it.
    """
    seed = dict.fromkeys(seed_facts)

    symbols: dict[str, int] = {}

    def sym(fact: str) -> int:
        index = symbols.get(fact)
        if index is None:
            index = len(symbols)
            symbols[fact] = index
        return index

    antecedent_masks: list[int] = []
    consequent_masks: list[int] = []
    for rule in rulebase.rules:
        ant = 0
        for fact in rule.antecedents:
            ant |= 1 << sym(fact)
        antecedent_masks.append(ant)
        consequent_masks.append(1 << sym(rule.consequent))
    seed_mask = 0
    for fact in seed:
        seed_mask |= 1 << sym(fact)

    derived_mask, raw_trace = _kernels.closure_fixpoint(
        antecedent_masks, consequent_masks, seed_mask, len(symbols),
        want_trace)

    names = list(symbols)
    facts = frozenset(
        names[i] for i in range(len(names)) if derived_mask >> i & 1)
    trace: tuple[tuple[str, str], ...] = ()
    if raw_trace is not None:
        trace = tuple((rulebase.rules[ri].id, names[si])
                      for ri, si in raw_trace)
    return ClosureResult(facts=facts, seed=frozenset(seed), trace=trace)


@dataclass(frozen=True)
class Derivation:
    """One step of an explanation: how a single fact came to hold.

    ``rule_id`` is None for seed facts; otherwise ``supports`` explains
    each antecedent of the deriving rule.
    """

    fact: str
    rule_id: str | None
    supports: tuple["Derivation", ...] = ()

    def to_dict(self) -> dict:
        return {
            "fact": self.fact,
            "rule": self.rule_id,
            "supports": [s.to_dict() for s in self.supports],
        }


def explain(rulebase: RuleBase, result: ClosureResult, fact: str) -> Derivation:
    """The derivation tree that grounds one fact in seed facts.

    Every internal node cites the rule that first derived its fact; leaves
    are seed facts. Raises :class:`NotDerivedError` when the fact does not
    hold in the closure.
    """
    if fact not in result.facts:
        raise NotDerivedError(
            f"fact {fact!r} does not hold in this closure")
    first_rule: dict[str, str] = {}
    for rule_id, derived_fact in result.trace:
        first_rule.setdefault(derived_fact, rule_id)

    memo: dict[str, Derivation] = {}

    def build(f: str) -> Derivation:
        known = memo.get(f)
        if known is not None:
            return known
        rule_id = first_rule.get(f)
        if rule_id is None or f in result.seed:
            node = Derivation(fact=f, rule_id=None)
        else:
            rule = rulebase.rule(rule_id)
            node = Derivation(
                fact=f, rule_id=rule_id,
                supports=tuple(build(a) for a in rule.antecedents))
        memo[f] = node
        return node

    return build(fact)


# --- fact bindings ----------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    """Seeds a fact when a selected node's characteristic passes a test.

    The comparison reads the node's attribute (series values are evaluated
    at the grounding parameter) and checks it against ``threshold`` with
    ``comparator``; non-numeric attributes admit ``=`` only.
    """

    fact: str
    node_id: str
    attribute: str
    comparator: str
    threshold: Scalar


def _binding_kind(value: Scalar) -> str:
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMERIC
    return CATEGORICAL


def evaluate_binding(binding: Binding, hierarchy: DecisionHierarchy,
                     param: float | None = None) -> bool:
    """Whether the binding's comparison holds for its node right now."""
    try:
        actual = hierarchy.lookup(binding.node_id, binding.attribute, param)
    except CharacteristicMissingError as exc:
        raise BindingError(
            f"binding for fact {binding.fact!r}: {exc}") from exc
    actual_kind = _binding_kind(actual)
    expected_kind = _binding_kind(binding.threshold)
    if actual_kind != expected_kind:
        raise BindingError(
            f"binding for fact {binding.fact!r}: attribute "
            f"{binding.attribute!r} of node {binding.node_id!r} is "
            f"{actual_kind}, compared against a {expected_kind} threshold")
    if actual_kind == NUMERIC:
        return compare(float(actual), binding.comparator,
                       float(binding.threshold))
    if binding.comparator != "=":
        raise BindingError(
            f"binding for fact {binding.fact!r}: {actual_kind} attribute "
            f"{binding.attribute!r} admits '=' only, "
            f"got {binding.comparator!r}")
    return actual == binding.threshold


def ground_facts(hierarchy: DecisionHierarchy, selection: Iterable[str],
                 bindings: Sequence[Binding] = (),
                 param: float | None = None) -> list[str]:
    """Facts a selection asserts: membership facts plus passing bindings.

    Emits ``selected:<id>`` for every selected node (hierarchy order),
    then the facts of bindings whose node is selected and whose comparison
    holds. Bindings on unselected nodes are skipped entirely. Duplicates
    are dropped; order is deterministic.
    """
    selected_set = set(selection)
    hierarchy.require_ids(selected_set)
    out: dict[str, None] = {}
    for node_id in hierarchy.nodes:
        if node_id in selected_set:
            out.setdefault(selection_fact(node_id))
    for binding in bindings:
        if binding.node_id not in selected_set:
            continue
        if evaluate_binding(binding, hierarchy, param):
            out.setdefault(binding.fact)
    return list(out)


def validate_bindings(bindings: Sequence[Binding],
                      hierarchy: DecisionHierarchy) -> list[Violation]:
    """Structural problems of bindings against the hierarchy, as data."""
    out: list[Violation] = []
    for binding in bindings:
        if binding.node_id not in hierarchy.nodes:
            out.append(Violation(
                binding.fact, "binding-node",
                f"binding references unknown node {binding.node_id!r}"))
            continue
        node = hierarchy.nodes[binding.node_id]
        table = node.characteristics
        if table is None or binding.attribute not in table.values:
            out.append(Violation(
                binding.fact, "binding-attribute",
                f"node {binding.node_id!r} carries no characteristic "
                f"{binding.attribute!r}"))
            continue
        attr_kind = value_kind_of(table.values[binding.attribute])
        threshold_kind = _binding_kind(binding.threshold)
        if attr_kind != threshold_kind:
            out.append(Violation(
                binding.fact, "binding-threshold",
                f"attribute {binding.attribute!r} of node "
                f"{binding.node_id!r} is {attr_kind}, the binding compares "
                f"a {threshold_kind} threshold"))
        if attr_kind != NUMERIC and binding.comparator != "=":
            out.append(Violation(
                binding.fact, "binding-comparator",
                f"{attr_kind} attribute {binding.attribute!r} admits '=' "
                f"only, got {binding.comparator!r}"))
    return sorted_report(out)


def validate_rules_against_model(rulebase: RuleBase,
                                 hierarchy: DecisionHierarchy) -> list[Violation]:
    """Selection facts inside rules must name real hierarchy nodes."""
    out: list[Violation] = []
    for rule in rulebase.rules:
        for fact in (*rule.antecedents, rule.consequent):
            node_id = selection_node(fact)
            if node_id is not None and node_id not in hierarchy.nodes:
                out.append(Violation(
                    rule.id, "unknown-node",
                    f"fact {fact!r} names unknown node {node_id!r}"))
    return sorted_report(out)


# --- file format ------------------------------------------------------------

def parse_bindings(raw_list: object, *,
                   source: str | None = None) -> tuple[Binding, ...]:
    """Parse the bindings array of a model document."""
    if not isinstance(raw_list, list):
        raise ModelFormatError("bindings must be a list", source=source)
    out: list[Binding] = []
    for i, raw in enumerate(raw_list):
        reader = FieldReader(raw, f"bindings[{i}]",
                             error_cls=ModelFormatError, source=source)
        fact = reader.require("fact", "string")
        node_id = reader.require("node_id", "string")
        attribute = reader.require("attribute", "string")
        comparator = reader.require("comparator", "string")
        threshold = reader.require("threshold")
        reader.finish()
        if not fact:
            reader.fail("field 'fact' must be a non-empty symbol")
        if comparator not in COMPARATORS:
            reader.fail(f"comparator must be one of {', '.join(COMPARATORS)}")
        if isinstance(threshold, (bool, str)):
            parsed: Scalar = threshold
        elif isinstance(threshold, (int, float)):
            parsed = float(threshold)
        else:
            reader.fail("field 'threshold' must be a number, string, "
                        "or boolean")
        out.append(Binding(fact=fact, node_id=node_id, attribute=attribute,
                           comparator=comparator, threshold=parsed))
    return tuple(out)


def parse_rulebase(text: str, *, source: str | None = None) -> RuleBase:
    """Parse a rules document: a JSON list of ``{id, if, then}`` objects.

    ``if`` is the non-empty antecedent conjunction, ``then`` the single
    consequent symbol; a rule may not list its consequent among its
    antecedents, and rule ids must be unique.
    """
    raw = load_json_text(text, error_cls=RulesFormatError, source=source)
    if not isinstance(raw, list):
        raise RulesFormatError("rules document must be a JSON list",
                               source=source)
    rules: list[Rule] = []
    seen_ids: set[str] = set()
    for i, raw_rule in enumerate(raw):
        reader = FieldReader(raw_rule, f"rules[{i}]",
                             error_cls=RulesFormatError, source=source)
        rule_id = reader.require("id", "string")
        antecedents = reader.require("if", "list")
        consequent = reader.require("then", "string")
        reader.finish()
        expect_string_list(antecedents, f"rules[{i}].if",
                           error_cls=RulesFormatError, source=source)
        if rule_id in seen_ids:
            reader.fail(f"duplicate rule id {rule_id!r}")
        seen_ids.add(rule_id)
        if not antecedents:
            reader.fail(f"rule {rule_id!r} needs at least one antecedent")
        if not all(antecedents) or not consequent:
            reader.fail(f"rule {rule_id!r}: facts must be non-empty symbols")
        if consequent in antecedents:
            reader.fail(f"rule {rule_id!r} lists its consequent "
                        f"{consequent!r} among its antecedents")
        rules.append(Rule(id=rule_id, antecedents=tuple(antecedents),
                          consequent=consequent))
    return RuleBase(rules=tuple(rules))


def load_rulebase(path: str | Path) -> RuleBase:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RulesFormatError(f"cannot read file: {exc}",
                               source=str(path)) from exc
    return parse_rulebase(text, source=str(path))
