"""Command line interface.

Subcommands: validate, analyze, catalog, serve. Exit codes: 0 success,
1 analysis found no attack path, 2 graph failed to load or validate,
3 usage error (bad flags or a request the graph cannot satisfy).
Diagnostics go to stderr; data goes to stdout or --output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .assets import CatalogError, catalog_from_env, catalog_to_json
from .graphio import GraphSemanticsError, GraphSyntaxError, decode_graph, validate_graph
from .model import ValidationReport
from .planner import AnalysisError, AnalysisRequest, plan_attacks
from .render import (
    NO_PATH_SENTINEL,
    render_dot,
    render_report,
    render_text,
    report_to_json,
)

EXIT_OK = 0
EXIT_NO_PATH = 1
EXIT_INVALID_GRAPH = 2
EXIT_USAGE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for graph
    # validation, so route usage problems through our own exception.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="attackpath", description="Attack-path planning workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="check a graph file")
    validate.add_argument("--graph", required=True, help="graph JSON file")
    validate.add_argument("--format", choices=("text", "json"), default="text")
    validate.add_argument("--output", help="write output here instead of stdout")

    analyze = sub.add_parser("analyze", help="plan attacks on a graph")
    analyze.add_argument("--graph", required=True)
    analyze.add_argument("--attacker", required=True)
    analyze.add_argument("--target", required=True)
    analyze.add_argument("--asset", default=None, help="target asset id (annotation)")
    analyze.add_argument("--k", type=int, default=3)
    analyze.add_argument("--max-cost", type=int, default=25)
    analyze.add_argument("--max-steps", type=int, default=12)
    analyze.add_argument("--trigger-depth", type=int, default=4)
    analyze.add_argument("--format", choices=("text", "json", "dot"), default="text")
    analyze.add_argument("--output", help="write output here instead of stdout")

    catalog = sub.add_parser("catalog", help="print the active asset catalog")
    catalog.add_argument("--output", help="write output here instead of stdout")

    serve = sub.add_parser("serve", help="run the local analysis service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8787)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_text(report: ValidationReport) -> str:
    if report.ok:
        return "OK\n"
    return "".join(f"{v.code} {v.subject}: {v.message}\n" for v in report.violations)


def _report_json(report: ValidationReport) -> str:
    doc = {
        "violations": [
            {"code": v.code, "subject": v.subject, "message": v.message}
            for v in report.violations
        ]
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _load_graph(path: str, catalog) -> tuple:
    """Returns (graph, report). Syntax failures raise GraphSyntaxError."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphSyntaxError(f"cannot read {path!r}: {exc}") from exc
    graph = decode_graph(text)
    return graph, validate_graph(graph, catalog=catalog)


def _cmd_validate(args: argparse.Namespace) -> int:
    catalog = catalog_from_env()
    graph, report = _load_graph(args.graph, catalog)
    del graph
    text = _report_json(report) if args.format == "json" else _report_text(report)
    _emit(text, args.output)
    return EXIT_OK if report.ok else EXIT_INVALID_GRAPH


def _cmd_analyze(args: argparse.Namespace) -> int:
    catalog = catalog_from_env()
    graph, report = _load_graph(args.graph, catalog)
    if not report.ok:
        raise GraphSemanticsError(report)
    request = AnalysisRequest(
        attacker=args.attacker,
        target=args.target,
        target_asset=args.asset,
        k=args.k,
        max_cost=args.max_cost,
        max_steps=args.max_steps,
        trigger_depth=args.trigger_depth,
    )
    plans = plan_attacks(graph, request)
    if args.format == "json":
        _emit(report_to_json(render_report(graph, request, plans)), args.output)
    elif args.format == "dot":
        best = plans[0] if plans else None
        _emit(render_dot(graph, best), args.output)
    else:
        if plans:
            blocks = [
                f"plan {p.rank} (cost {p.total_cost}, {len(p.steps)} steps)\n{render_text(p)}"
                for p in plans
            ]
            _emit("\n\n".join(blocks) + "\n", args.output)
        else:
            _emit(NO_PATH_SENTINEL + "\n", args.output)
    return EXIT_OK if plans else EXIT_NO_PATH


def _cmd_catalog(args: argparse.Namespace) -> int:
    _emit(catalog_to_json(catalog_from_env()), args.output)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def run(argv: list[str]) -> int:
    """Run one CLI invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "catalog":
            return _cmd_catalog(args)
        return _cmd_serve(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AnalysisError as exc:
        print(f"request error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphSyntaxError, GraphSemanticsError, CatalogError) as exc:
        print(f"graph error: {exc}", file=sys.stderr)
        return EXIT_INVALID_GRAPH


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
