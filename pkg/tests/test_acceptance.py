"""Release gate: every headline guarantee checked end to end.

Each test prints one ``[PASS]``/``[FAIL]`` line (collected into the
"acceptance criteria" section of the terminal summary) so a single run
shows the status of every guarantee at a glance. Oracles are deliberately
naive re-computations, independent of the engine's hot paths.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
import shutil
import threading
import time
import urllib.request

import pytest

from conftest import (
    ACCEPTANCE_LINES,
    EXAMPLE_DIR,
    GOLDEN_DIR,
    brute_force_selections,
    build_hierarchy,
    naive_closure,
    random_hierarchy,
    random_star,
)
from innotree.cli import main as cli_main
from innotree.engine import DATA_DIR_ENV, Engine
from innotree.errors import SeriesRangeError
from innotree.mining import (
    LabeledDataset,
    classify,
    induce,
    information_gain,
    rules_classify,
    tree_to_rules,
)
from innotree.model import OR, ConstraintSet, Series
from innotree.reports import (
    DynamicQueryDef,
    PivotAxis,
    ReportConfig,
    RollupQuery,
    StaticReportDef,
    load_report_config,
    render_static,
    run_dynamic,
    validate_report_config,
)
from innotree.rules import Rule, RuleBase, forward_chain, selection_fact
from innotree.server import create_server
from innotree.star import load_schema, rollup
from innotree.variants import count_admissible, enumerate_configurations


def _criterion(name):
    """Record one pass/fail summary line for an acceptance criterion."""
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_LINES.append(f"[FAIL] {name}")
                raise
            ACCEPTANCE_LINES.append(f"[PASS] {name}")
            return result
        return wrapper
    return decorate


# --- 1. enumeration matches brute force --------------------------------------

def _random_veto_rules(rng, ids):
    """Up to three veto rules, sometimes chained through a middle fact."""
    rules = []
    for k in range(rng.randint(0, 3)):
        antecedents = tuple(selection_fact(i)
                            for i in rng.sample(ids,
                                                rng.randint(1, min(2,
                                                                   len(ids)))))
        if rng.random() < 0.3:
            rules.append(Rule(f"mid{k}", antecedents, f"step{k}"))
            rules.append(Rule(f"veto{k}", (f"step{k}",), "infeasible"))
        else:
            rules.append(Rule(f"veto{k}", antecedents, "infeasible"))
    return RuleBase(tuple(rules))


def _oracle_survivors(h, rulebase, ceiling):
    """Filter every subset by structure, naive closure, and direct sums."""
    plain_rules = [(list(r.antecedents), r.consequent)
                   for r in rulebase.rules]
    survivors = set()
    for selection in brute_force_selections(h):
        seed = {selection_fact(i) for i in selection}
        if "infeasible" in naive_closure(plain_rules, seed):
            continue
        cost = sum(node.characteristics.values["cost"]
                   for node in (h.nodes[i] for i in selection)
                   if node.characteristics is not None)
        if ceiling is not None and cost > ceiling:
            continue
        survivors.add(selection)
    return survivors


@_criterion("enumeration-oracle")
def test_enumeration_matches_brute_force_filtering():
    rng = random.Random(424242)
    for _ in range(200):
        h = random_hierarchy(rng, max_nodes=12, with_costs=True)
        ids = list(h.nodes)
        rulebase = _random_veto_rules(rng, ids)
        ceiling = float(rng.randint(5, 60)) if rng.random() < 0.5 else None
        constraints = ConstraintSet(expenditure_ceiling=ceiling) \
            if ceiling is not None else None
        result = enumerate_configurations(h, rulebase, constraints,
                                          limit=5000)
        assert not result.truncated
        got = {c.selected for c in result.configurations}
        assert got == _oracle_survivors(h, rulebase, ceiling)


# --- 2. count law -------------------------------------------------------------

@_criterion("morphological-count-law")
def test_single_or_level_counts_every_nonempty_subset():
    for k in range(1, 11):
        h = build_hierarchy(("root", OR, [f"leaf{i}" for i in range(k)]))
        expected = 2 ** k - 1
        assert count_admissible(h) == expected
        result = enumerate_configurations(h, limit=expected + 1)
        assert len(result.configurations) == expected
        assert not result.truncated


# --- 3. closure matches the naive fixpoint ------------------------------------

@_criterion("rule-closure-oracle")
def test_forward_chaining_matches_naive_fixpoint():
    rng = random.Random(31337)
    for _ in range(500):
        symbols = [f"s{i}" for i in range(rng.randint(2, 12))]
        rules = []
        for k in range(rng.randint(0, 15)):
            antecedents = tuple(rng.sample(symbols,
                                           rng.randint(1,
                                                       min(3, len(symbols)))))
            candidates = [s for s in symbols if s not in antecedents]
            if not candidates:
                continue
            rules.append(Rule(f"r{k}", antecedents, rng.choice(candidates)))
        rulebase = RuleBase(tuple(rules))
        seed = set(rng.sample(symbols, rng.randint(0, len(symbols))))
        expected = naive_closure([(list(r.antecedents), r.consequent)
                                  for r in rules], seed)
        assert set(forward_chain(rulebase, seed).facts) == expected

    # A conjunction of four facts yields the fifth.
    rulebase = RuleBase((Rule("combine", ("a1", "a2", "a3", "a4"), "a5"),))
    result = forward_chain(rulebase, ("a1", "a2", "a3", "a4"))
    assert "a5" in result.facts
    assert result.derived == frozenset({"a5"})


# --- 4. star conservation ------------------------------------------------------

@_criterion("star-conservation")
def test_rollups_conserve_totals_across_both_dimensions():
    rng = random.Random(9090)
    for _ in range(30):
        schema = random_star(rng, max_rows=50, integral=True)
        rows = schema.table().rows
        for measure in ("amount", "gain"):
            direct = sum(r.measures[measure] for r in rows)
            for dim_id in ("goals", "decisions"):
                for level in schema.dimension(dim_id).levels:
                    groups = rollup(schema, dim_id, level, {measure: "sum"})
                    assert sum(g.values[measure] for g in groups) == direct
                    assert sum(g.count for g in groups) == len(rows)
    for _ in range(10):
        schema = random_star(rng, max_rows=50, integral=False)
        rows = schema.table().rows
        direct = sum(r.measures["amount"] for r in rows)
        for dim_id in ("goals", "decisions"):
            groups = rollup(schema, dim_id,
                            schema.dimension(dim_id).levels[1],
                            {"amount": "sum"})
            assert sum(g.values["amount"] for g in groups) == \
                pytest.approx(direct, rel=1e-9, abs=1e-9)


# --- 5. pivot marginals ---------------------------------------------------------

@_criterion("pivot-marginals")
def test_pivot_row_and_column_sums_match_one_dimensional_rollups():
    rng = random.Random(6060)
    for index in range(20):
        integral = index % 2 == 0
        schema = random_star(rng, max_rows=40, integral=integral)
        grid = DynamicQueryDef("grid", "numbers",
                               PivotAxis("decisions", "d-mid"),
                               PivotAxis("goals", "g-mid"),
                               "amount", "sum")
        lines = run_dynamic(grid, schema).decode("utf-8").splitlines()
        columns = lines[0].split(",")[1:]
        row_sums: dict[str, float] = {}
        col_sums = dict.fromkeys(columns, 0.0)
        for line in lines[1:]:
            cells = line.split(",")
            row_sums[cells[0]] = 0.0
            for name, cell in zip(columns, cells[1:]):
                if cell:
                    row_sums[cells[0]] += float(cell)
                    col_sums[name] += float(cell)
        row_groups = rollup(schema, "decisions", "d-mid", {"amount": "sum"})
        col_groups = rollup(schema, "goals", "g-mid", {"amount": "sum"})
        assert set(row_sums) == {g.member for g in row_groups}
        assert set(columns) == {g.member for g in col_groups}
        for g in row_groups:
            if integral:
                assert row_sums[g.member] == g.values["amount"]
            else:
                assert row_sums[g.member] == pytest.approx(
                    g.values["amount"], rel=1e-9, abs=1e-9)
        for g in col_groups:
            if integral:
                assert col_sums[g.member] == g.values["amount"]
            else:
                assert col_sums[g.member] == pytest.approx(
                    g.values["amount"], rel=1e-9, abs=1e-9)


# --- 6. report limits -----------------------------------------------------------

@_criterion("report-limits")
def test_report_limits_accept_at_and_reject_above():
    import dataclasses

    schema = load_schema(EXAMPLE_DIR / "star.json")
    plan = schema.facts["plan"]
    facts = dict(schema.facts)
    for name in ("t3", "t4"):
        facts[name] = dataclasses.replace(plan, name=name)
    schema = dataclasses.replace(schema, facts=facts)

    def static(i):
        return StaticReportDef(
            id=f"s{i}", title="t", xml_root="report",
            query=RollupQuery("decisions", "area", ("cost",), "sum"))

    def dynamic(i, cube):
        return DynamicQueryDef(
            id=f"d{i}", cube=cube,
            rows=PivotAxis("decisions", "area"),
            columns=PivotAxis("goals", "objective"),
            measure="cost", agg="sum")

    # Statics: 10 pass, 11 fail naming the limit.
    assert validate_report_config(
        ReportConfig(tuple(static(i) for i in range(10)), ()), schema) == []
    findings = validate_report_config(
        ReportConfig(tuple(static(i) for i in range(11)), ()), schema)
    assert len(findings) == 1 and "limit of 10" in findings[0].message

    # Dynamics: 15 across four cubes pass, 16 fail naming the limit.
    cubes = ["plan", "actuals", "t3", "t4"]
    assert validate_report_config(
        ReportConfig((), tuple(dynamic(i, cubes[i % 4])
                               for i in range(15))), schema) == []
    findings = validate_report_config(
        ReportConfig((), tuple(dynamic(i, cubes[i % 4])
                               for i in range(16))), schema)
    assert len(findings) == 1 and "limit of 15" in findings[0].message

    # Per cube: 5 pass, 6 fail naming the cube and its limit.
    assert validate_report_config(
        ReportConfig((), tuple(dynamic(i, "plan")
                               for i in range(5))), schema) == []
    findings = validate_report_config(
        ReportConfig((), tuple(dynamic(i, "plan")
                               for i in range(6))), schema)
    assert len(findings) == 1
    assert "limit of 5 per cube" in findings[0].message
    assert findings[0].subject == "plan"


# --- 7. static report determinism -----------------------------------------------

def _fetch(url):
    with urllib.request.urlopen(url, timeout=10) as response:
        return response.status, dict(response.headers), response.read()


@_criterion("static-report-determinism")
def test_static_reports_render_identical_bytes_everywhere(tmp_path,
                                                          monkeypatch,
                                                          capsys):
    monkeypatch.delenv(DATA_DIR_ENV, raising=False)
    schema = load_schema(EXAMPLE_DIR / "star.json")
    reports = load_report_config(EXAMPLE_DIR / "reports.json")

    engine = Engine(EXAMPLE_DIR / "innotree.json")
    server = create_server(engine, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    try:
        for report_id in ("cost-by-area", "goal-rollup", "actual-peaks"):
            definition = reports.static(report_id)
            golden = (GOLDEN_DIR / f"{report_id}.xml").read_bytes()

            first = render_static(definition, schema)
            second = render_static(definition, schema)
            assert first == second == golden

            assert cli_main(["--config",
                             str(EXAMPLE_DIR / "innotree.json"),
                             "report", "--static", report_id,
                             "--out", str(tmp_path)]) == 0
            capsys.readouterr()
            assert (tmp_path / f"{report_id}.xml").read_bytes() == golden

            status, _, body = _fetch(
                f"http://{host}:{port}/api/reports/static/{report_id}")
            assert status == 200 and body == golden
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


# --- 8. tree induction ----------------------------------------------------------

@_criterion("id3-checks")
def test_tree_induction_guarantees():
    # A perfectly informative single attribute gains exactly one bit.
    two_rows = LabeledDataset(
        attributes=(("answer", ("no", "yes")),),
        rows=((("no",), "reject"), (("yes",), "accept")))
    assert information_gain(two_rows, "answer") == 1.0

    # Consistent training data is always reproduced exactly, and the
    # extracted rules replay the tree, row for row.
    rng = random.Random(2718)
    for _ in range(120):
        n_attrs = rng.randint(1, 4)
        domains = [tuple(f"v{i}{j}" for j in range(rng.randint(2, 3)))
                   for i in range(n_attrs)]
        attributes = tuple((f"attr{i}", domain)
                           for i, domain in enumerate(domains))
        space = list(itertools.product(*domains))
        labeling = {values: rng.choice(("go", "hold", "defer"))
                    for values in space}
        count = rng.randint(1, 64)
        rows = tuple((values, labeling[values])
                     for values in (rng.choice(space)
                                    for _ in range(count)))
        dataset = LabeledDataset(attributes=attributes, rows=rows)

        tree = induce(dataset)
        rulebase = tree_to_rules(tree)
        names = dataset.attribute_names()
        for values, label in dataset.rows:
            assert classify(tree, dict(zip(names, values))) == label
            assert rules_classify(rulebase,
                                  dataset.row_facts(values)) == label


# --- 9. interpolation -----------------------------------------------------------

@_criterion("interpolation")
def test_series_interpolation_contract():
    series = Series(((0.0, 0.0), (10.0, 100.0)))
    assert series.value_at(5.0) == 50.0
    assert series.value_at(0.0) == 0.0
    assert series.value_at(10.0) == 100.0

    jagged = Series(((1.0, 2.0), (3.0, -4.0), (7.0, 8.0)))
    for x, y in jagged.points:
        assert jagged.value_at(x) == y
    assert jagged.value_at(2.0) == pytest.approx(-1.0)

    for outside in (-0.1, 10.1):
        with pytest.raises(SeriesRangeError):
            series.value_at(outside)


# --- 10. service statelessness ---------------------------------------------------

_READ_PATHS = (
    "/api/health",
    "/api/model",
    "/api/variants?limit=10",
    "/api/reports/static/cost-by-area",
    "/api/reports/pivot/cost-grid",
)


def _baseline(base):
    return {path: _fetch(base + path) for path in _READ_PATHS}


@_criterion("service-statelessness")
def test_reads_are_stable_and_reload_is_atomic(tmp_path, monkeypatch):
    for name in ("model", "rules", "star", "reports", "innotree"):
        shutil.copy(EXAMPLE_DIR / f"{name}.json", tmp_path)
    monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
    engine = Engine(tmp_path / "innotree.json")
    server = create_server(engine, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    base = f"http://{host}:{port}"
    try:
        before = _baseline(base)
        for path, (status, headers, body) in before.items():
            assert status == 200
            assert headers["X-Snapshot-Version"] == "1"
            # Re-reads are byte-identical while no reload happens.
            assert _fetch(base + path)[2] == body

        # Stage new data; serving must not change until the reload.
        model = json.loads((tmp_path / "model.json").read_text())
        for table in model["tables"]:
            if table["node_id"] == "in-house-dev":
                table["values"]["cost"] = 25.0
        (tmp_path / "model.json").write_text(json.dumps(model))
        star = json.loads((tmp_path / "star.json").read_text())
        star["facts"]["plan"]["rows"][0]["measures"]["cost"] = 25.0
        (tmp_path / "star.json").write_text(json.dumps(star))
        for path, (_, _, body) in before.items():
            assert _fetch(base + path)[2] == body

        records: list[list[tuple[str, str, bytes]]] = [
            [] for _ in range(16)]

        def reader(worker: int) -> None:
            for i in range(25):
                path = _READ_PATHS[(worker + i) % len(_READ_PATHS)]
                status, headers, body = _fetch(base + path)
                assert status == 200
                records[worker].append(
                    (path, headers["X-Snapshot-Version"], body))

        threads = [threading.Thread(target=reader, args=(w,))
                   for w in range(16)]
        for t in threads:
            t.start()
        time.sleep(0.05)
        with urllib.request.urlopen(
                urllib.request.Request(base + "/api/reload", data=b"{}",
                                       method="POST"),
                timeout=10) as response:
            assert json.loads(response.read())["version"] == 2
        for t in threads:
            t.join(timeout=30)
            assert not t.is_alive()

        after = _baseline(base)
        for path, (status, headers, _) in after.items():
            assert status == 200
            assert headers["X-Snapshot-Version"] == "2"

        # Every concurrent response is internally consistent: its body is
        # exactly the serving of the version its header names.
        seen_versions = set()
        for worker_records in records:
            for path, version, body in worker_records:
                seen_versions.add(version)
                if version == "1":
                    assert body == before[path][2]
                elif version == "2":
                    assert body == after[path][2]
                else:
                    pytest.fail(f"unexpected snapshot version {version}")
        assert "1" in seen_versions  # readers really straddled the reload
        assert "2" in seen_versions

        # The staged data actually took effect (25 + 10 across the area).
        assert b'cost="35"' in after["/api/reports/static/cost-by-area"][2]
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
