"""Enumeration against the brute-force oracle, aggregation, and ranking."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    brute_force_selections,
    build_hierarchy,
    cost_schema,
    random_hierarchy,
)
from innotree.errors import (
    EnumerationError,
    ScoringError,
    SeriesParamRequiredError,
)
from innotree.model import (
    AND,
    OR,
    Attribute,
    Bound,
    CharacteristicSchema,
    ConstraintSet,
    Series,
)
from innotree.rules import Binding, Rule, RuleBase, selection_fact
from innotree.variants import (
    MAXIMIZE,
    MINIMIZE,
    Configuration,
    Score,
    admissible,
    aggregate_attributes,
    count_admissible,
    enumerate_configurations,
    iter_admissible_selections,
    rank,
    satisfies_constraints,
    score,
    selection_status,
)


def _selections(h, limit=10_000):
    result = enumerate_configurations(h, limit=limit)
    assert not result.truncated
    return [c.selected for c in result.configurations]


class TestAdmissible:
    def test_or_accepts_any_nonempty_child_subset(self):
        h = build_hierarchy(("root", OR, ["a", "b"]))
        assert admissible(h, {"root", "a"})
        assert admissible(h, {"root", "b"})
        assert admissible(h, {"root", "a", "b"})
        assert not admissible(h, {"root"})
        assert not admissible(h, {"a"})
        assert not admissible(h, set())

    def test_and_requires_every_child(self):
        h = build_hierarchy(("root", AND, ["a", "b"]))
        assert admissible(h, {"root", "a", "b"})
        assert not admissible(h, {"root", "a"})

    def test_orphan_rejected(self):
        h = build_hierarchy(("root", OR, [("mid", OR, ["leaf"]), "other"]))
        assert not admissible(h, {"root", "other", "leaf"})


class TestEnumerationOrder:
    def test_two_leaf_or_matches_stated_order(self):
        h = build_hierarchy(("root", OR, ["a", "b"]))
        assert _selections(h) == [
            frozenset({"root", "a"}),
            frozenset({"root", "b"}),
            frozenset({"root", "a", "b"}),
        ]

    def test_iter_yields_preorder_member_tuples(self):
        h = build_hierarchy(("root", OR, ["a", "b"]))
        assert list(iter_admissible_selections(h)) == [
            ("root", "a"), ("root", "b"), ("root", "a", "b")]

    def test_enumeration_is_deterministic(self):
        rng = random.Random(11)
        for _ in range(20):
            h = random_hierarchy(rng, max_nodes=9)
            assert list(iter_admissible_selections(h)) == \
                list(iter_admissible_selections(h))

    def test_invalid_hierarchy_refused(self):
        from innotree.model import DecisionHierarchy, HierarchyNode
        h = DecisionHierarchy(
            root_id="a",
            nodes={"a": HierarchyNode(id="a", label="a", kind="goal",
                                      connector=AND, children=("ghost",))},
            schemas={})
        with pytest.raises(EnumerationError, match="validation"):
            list(iter_admissible_selections(h))


class TestCountLaw:
    @pytest.mark.parametrize("k", range(1, 11))
    def test_flat_or_counts_all_nonempty_subsets(self, k):
        h = build_hierarchy(("root", OR, [f"leaf{i}" for i in range(k)]))
        assert count_admissible(h) == 2 ** k - 1
        assert len(_selections(h, limit=2 ** k)) == 2 ** k - 1

    def test_count_matches_enumeration_on_random_trees(self):
        rng = random.Random(5)
        for _ in range(50):
            h = random_hierarchy(rng, max_nodes=10)
            assert count_admissible(h) == len(_selections(h))


class TestEnumerationOracle:
    def test_matches_brute_force_on_random_hierarchies(self):
        rng = random.Random(2024)
        for _ in range(60):
            h = random_hierarchy(rng, max_nodes=11)
            expected = brute_force_selections(h)
            got = set(_selections(h))
            assert got == expected

    def test_veto_rule_filters_configurations(self):
        h = build_hierarchy(("root", OR, ["a", "b"]))
        rulebase = RuleBase((
            Rule("no-combo", (selection_fact("a"), selection_fact("b")),
                 "infeasible"),
        ))
        got = [c.selected for c in
               enumerate_configurations(h, rulebase, limit=10).configurations]
        assert got == [frozenset({"root", "a"}), frozenset({"root", "b"})]

    def test_constraint_filters_configurations(self):
        h = build_hierarchy(
            ("root", OR, [("a", {"cost": 5.0}), ("b", {"cost": 9.0})]),
            schemas=[cost_schema()])
        constraints = ConstraintSet(expenditure_ceiling=10.0)
        got = [c.selected for c in
               enumerate_configurations(
                   h, constraints=constraints, limit=10).configurations]
        assert got == [frozenset({"root", "a"}), frozenset({"root", "b"})]

    def test_binding_fact_feeds_veto_rule(self):
        h = build_hierarchy(
            ("root", OR, [("a", {"cost": 5.0}), ("b", {"cost": 9.0})]),
            schemas=[cost_schema()])
        rulebase = RuleBase((Rule("kill", ("pricey",), "infeasible"),))
        bindings = (Binding("pricey", "b", "cost", ">", 8.0),)
        got = [c.selected for c in
               enumerate_configurations(h, rulebase, bindings=bindings,
                                        limit=10).configurations]
        assert got == [frozenset({"root", "a"})]

    def test_derived_facts_attached(self):
        h = build_hierarchy(("root", AND, ["a"]))
        rulebase = RuleBase((Rule("tag", (selection_fact("a"),), "done"),))
        (config,) = enumerate_configurations(h, rulebase,
                                             limit=5).configurations
        assert config.derived == {"done"}

    def test_truncation_flag(self):
        h = build_hierarchy(("root", OR, ["a", "b", "c"]))
        result = enumerate_configurations(h, limit=3)
        assert len(result.configurations) == 3
        assert result.truncated
        full = enumerate_configurations(h, limit=7)
        assert not full.truncated
        assert not enumerate_configurations(h, limit=99).truncated

    def test_limit_must_be_positive(self):
        h = build_hierarchy(("root", OR, ["a"]))
        with pytest.raises(EnumerationError, match="limit"):
            enumerate_configurations(h, limit=0)


class TestSelectionStatus:
    def test_status_kinds(self):
        h = build_hierarchy(
            ("root", AND, [("dev", OR, ["a", "b"]), ("mkt", AND, ["c"])]))
        statuses = selection_status(h, {"root", "dev", "a"})
        assert statuses["root"] == "selected-incomplete"  # mkt missing
        assert statuses["dev"] == "selected-ok"
        assert statuses["a"] == "selected-ok"
        assert statuses["b"] == "candidate"
        assert statuses["mkt"] == "required"
        assert statuses["c"] == "inactive"

    def test_orphan_and_unselected_root(self):
        h = build_hierarchy(("root", OR, [("mid", OR, ["leaf"]), "other"]))
        statuses = selection_status(h, {"leaf"})
        assert statuses["leaf"] == "selected-orphan"
        assert statuses["root"] == "required"


class TestAggregation:
    def test_sum_min_max(self):
        schema = CharacteristicSchema("options", (
            Attribute("cost", "numeric", aggregation="sum"),
            Attribute("risk", "numeric", aggregation="max"),
            Attribute("margin", "numeric", aggregation="min"),
        ))
        h = build_hierarchy(
            ("root", AND, [("a", {"cost": 2.0, "risk": 3.0, "margin": 5.0}),
                           ("b", {"cost": 4.0, "risk": 7.0, "margin": 1.0})]),
            schemas=[schema])
        aggregates = aggregate_attributes(h, {"root", "a", "b"})
        assert aggregates == {"cost": 6.0, "risk": 7.0, "margin": 1.0}

    def test_weighted_mean_uses_weight_attribute(self):
        schema = CharacteristicSchema("options", (
            Attribute("grade", "numeric", aggregation="weighted_mean"),
            Attribute("weight", "numeric", aggregation="sum"),
        ))
        h = build_hierarchy(
            ("root", AND, [("a", {"grade": 10.0, "weight": 1.0}),
                           ("b", {"grade": 20.0, "weight": 3.0})]),
            schemas=[schema])
        aggregates = aggregate_attributes(h, {"root", "a", "b"})
        assert aggregates["grade"] == pytest.approx(17.5)

    def test_weighted_mean_degrades_to_arithmetic_mean(self):
        schema = CharacteristicSchema("options", (
            Attribute("grade", "numeric", aggregation="weighted_mean"),
        ))
        h = build_hierarchy(
            ("root", AND, [("a", {"grade": 10.0}), ("b", {"grade": 20.0})]),
            schemas=[schema])
        assert aggregate_attributes(h, {"root", "a", "b"})["grade"] == 15.0

    def test_series_needs_param(self):
        schema = cost_schema()
        h = build_hierarchy(
            ("root", AND, [("a", {"cost": Series(((0.0, 0.0),
                                                  (10.0, 100.0)))})]),
            schemas=[schema])
        assert aggregate_attributes(h, {"root", "a"}, param=5)["cost"] == 50.0
        with pytest.raises(SeriesParamRequiredError):
            aggregate_attributes(h, {"root", "a"})

    def test_absent_attribute_bound_is_vacuous(self):
        constraints = ConstraintSet(bounds=(Bound("未知", "<=", 1.0),))
        assert satisfies_constraints({}, constraints)

    def test_conventional_limits_check_their_attributes(self):
        constraints = ConstraintSet(payback_limit=24.0,
                                    expenditure_ceiling=40.0)
        assert satisfies_constraints({"payback": 24.0, "cost": 40.0},
                                     constraints)
        assert not satisfies_constraints({"payback": 25.0}, constraints)
        assert not satisfies_constraints({"cost": 41.0}, constraints)


class TestScoring:
    def _hierarchy(self):
        return build_hierarchy(
            ("root", OR, [("a", {"cost": 5.0}), ("b", {"cost": 9.0})]),
            schemas=[cost_schema()])

    def test_score_totals_weighted_aggregates(self):
        result = score(self._hierarchy(), {"root", "a", "b"},
                       {"cost": -0.5})
        assert result.per_attribute == {"cost": 14.0}
        assert result.total == -7.0

    def test_weight_on_missing_aggregate_contributes_zero(self):
        h = build_hierarchy(("root", OR, ["a"]))
        result = score(h, {"root", "a"}, {})
        assert result.total == 0.0

    def test_weight_on_undeclared_attribute_rejected(self):
        with pytest.raises(ScoringError, match="mystery"):
            score(self._hierarchy(), {"root", "a"}, {"mystery": 1.0})

    def test_rank_orders_best_first(self):
        configs = [Configuration(frozenset({"x"}), frozenset()),
                   Configuration(frozenset({"y"}), frozenset())]
        scores = [Score({}, 1.0), Score({}, 2.0)]
        ranked = rank(configs, scores, MAXIMIZE)
        assert [pair[1].total for pair in ranked] == [2.0, 1.0]
        ranked = rank(configs, scores, MINIMIZE)
        assert [pair[1].total for pair in ranked] == [1.0, 2.0]

    def test_rank_breaks_ties_by_sorted_ids(self):
        configs = [Configuration(frozenset({"zz"}), frozenset()),
                   Configuration(frozenset({"aa"}), frozenset())]
        scores = [Score({}, 1.0), Score({}, 1.0)]
        ranked = rank(configs, scores, MAXIMIZE)
        assert [pair[0].sorted_ids() for pair in ranked] == [("aa",), ("zz",)]

    def test_rank_rejects_bad_direction_and_mismatch(self):
        with pytest.raises(ScoringError, match="direction"):
            rank([], [], "sideways")
        with pytest.raises(ScoringError, match="scores"):
            rank([Configuration(frozenset(), frozenset())], [])

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=8),
           st.randoms())
    @settings(max_examples=60, deadline=None)
    def test_rank_is_permutation_invariant(self, totals, rng):
        configs = [Configuration(frozenset({f"n{i}"}), frozenset())
                   for i in range(len(totals))]
        scores = [Score({}, t) for t in totals]
        baseline = rank(configs, scores, MAXIMIZE)
        order = list(range(len(totals)))
        rng.shuffle(order)
        shuffled = rank([configs[i] for i in order],
                        [scores[i] for i in order], MAXIMIZE)
        assert shuffled == baseline
