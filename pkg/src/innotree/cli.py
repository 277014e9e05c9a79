"""Command-line front end: validate, enumerate, score, report, mine, serve.

Conventions shared by every subcommand: requested data goes to stdout (or
into files under ``--out``), diagnostics go to stderr, and the exit code is
0 for success, 1 for validation findings and domain errors, and 2 for usage
errors. The engine config is found via ``--config``, falling back to
``innotree.json`` inside the directory named by the ``INNOTREE_DATA``
environment variable, then in the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .engine import (
    DATA_DIR_ENV,
    Engine,
    EngineSnapshot,
    WhatIfRequest,
    load_config,
    load_snapshot,
    validate_snapshot,
    variants_payload,
    whatif,
)
from .errors import InnotreeError
from .mining import induce, load_dataset, tree_to_rules
from .reports import render_static, run_dynamic
from .server import create_server


def _default_config() -> str:
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        return str(Path(data_dir) / "innotree.json")
    return "innotree.json"


def _snapshot(args: argparse.Namespace) -> EngineSnapshot:
    return load_snapshot(load_config(args.config), version=1)


def _emit_bytes(data: bytes, args: argparse.Namespace,
                filename: str) -> None:
    if args.out:
        directory = Path(args.out)
        directory.mkdir(parents=True, exist_ok=True)
        target = directory / filename
        target.write_bytes(data)
        print(f"wrote {target}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _emit_json(payload: object, args: argparse.Namespace,
               filename: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    _emit_bytes(text.encode("utf-8"), args, filename)


def _cmd_validate(args: argparse.Namespace) -> int:
    violations = validate_snapshot(_snapshot(args))
    for violation in violations:
        print(violation.render())
    if violations:
        print(f"{len(violations)} violation(s) found", file=sys.stderr)
        return 1
    print("ok: no violations", file=sys.stderr)
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    if args.limit < 1:
        print("error: --limit must be at least 1", file=sys.stderr)
        return 2
    payload = variants_payload(_snapshot(args), args.limit)
    _emit_json(payload, args, "variants.json")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    selection = tuple(part for part in args.selection.split(",") if part)
    response = whatif(_snapshot(args), WhatIfRequest(selection=selection))
    _emit_json(response.to_dict(), args, "score.json")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    snapshot = _snapshot(args)
    if args.static:
        definition = snapshot.reports.static(args.static)
        _emit_bytes(render_static(definition, snapshot.schema), args,
                    f"{args.static}.xml")
    else:
        definition = snapshot.reports.dynamic(args.pivot)
        _emit_bytes(run_dynamic(definition, snapshot.schema), args,
                    f"{args.pivot}.csv")
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    tree = induce(dataset)
    rulebase = tree_to_rules(tree)
    payload = [{"id": rule.id, "if": list(rule.antecedents),
                "then": rule.consequent} for rule in rulebase.rules]
    print(f"{len(payload)} rule(s) mined from {len(dataset.rows)} row(s)",
          file=sys.stderr)
    _emit_json(payload, args, "mined-rules.json")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    engine = Engine(args.config)
    server = create_server(engine, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("stopped", file=sys.stderr)
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="innotree",
        description="Decision-support engine for innovation-project "
                    "variant analysis")
    parser.add_argument("--config", default=_default_config(),
                        help="engine config file (default: innotree.json, "
                             f"looked up under ${DATA_DIR_ENV} when set)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate",
                       help="check model, rules, store, and reports; "
                            "print violations")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("enumerate",
                       help="list passing configurations, ranked")
    p.add_argument("--limit", type=int, required=True,
                   help="maximum number of configurations to return")
    p.add_argument("--out", help="directory to write variants.json into")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("score", help="evaluate one selection")
    p.add_argument("--selection", required=True,
                   help="comma-separated node ids")
    p.add_argument("--out", help="directory to write score.json into")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("report", help="render a report")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--static", metavar="ID",
                       help="render a static XML report")
    group.add_argument("--pivot", metavar="ID",
                       help="run a dynamic pivot query as CSV")
    p.add_argument("--out", help="directory to write the report file into")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("mine",
                       help="induce a decision tree from labeled CSV data "
                            "and print it as rules")
    p.add_argument("--data", required=True, help="labeled dataset CSV file")
    p.add_argument("--out", help="directory to write mined-rules.json into")
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InnotreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
