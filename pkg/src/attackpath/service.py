"""Local analysis service: stateless JSON over HTTP under /api/v1.

Status mapping: 400 for bodies that do not decode (bad JSON, unknown
keys, unknown kinds, wrong types), 422 with a machine-readable report
for graphs or requests that decode but are invalid, 413 for bodies or
graphs over the configured size limits. Analysis bounds are clamped to
server-side ceilings so a hostile graph cannot pin the service. CORS
admits loopback origins only; bind to loopback unless overridden.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .assets import CatalogError, catalog_from_env
from .graphio import GraphSyntaxError, decode_graph
from .model import ThreatGraph, ValidationReport, validate_graph
from .planner import AnalysisError, AnalysisRequest, plan_attacks
from .render import render_report

DEFAULT_PORT = 8787

_REQUEST_KEYS = {"attacker", "target", "target_asset", "k", "max_cost", "max_steps", "trigger_depth"}

LOOPBACK_ORIGIN_REGEX = r"^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$"


@dataclass(frozen=True)
class ServiceLimits:
    max_body_bytes: int = 1_000_000
    max_nodes: int = 500
    max_edges: int = 2_000
    max_cost_ceiling: int = 200
    max_steps_ceiling: int = 64
    trigger_depth_ceiling: int = 16
    k_ceiling: int = 32


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def _validation_response(report: ValidationReport) -> dict:
    return {
        "violations": [
            {"code": v.code, "subject": v.subject, "message": v.message}
            for v in report.violations
        ]
    }


async def _read_body(request: Request, limits: ServiceLimits) -> bytes | JSONResponse:
    body = await request.body()
    if len(body) > limits.max_body_bytes:
        return _error(413, f"body exceeds {limits.max_body_bytes} bytes")
    return body


def _decode_request(raw: object, limits: ServiceLimits) -> AnalysisRequest:
    if not isinstance(raw, dict):
        raise GraphSyntaxError("request must be an object", "$.request")
    unknown = sorted(set(raw) - _REQUEST_KEYS)
    if unknown:
        raise GraphSyntaxError(f"unknown keys {unknown}", "$.request")
    for key in ("attacker", "target"):
        if key not in raw or not isinstance(raw[key], str):
            raise GraphSyntaxError(f"{key} must be a string", f"$.request.{key}")
    asset = raw.get("target_asset")
    if asset is not None and not isinstance(asset, str):
        raise GraphSyntaxError("target_asset must be a string or null", "$.request.target_asset")
    numbers = {}
    defaults = AnalysisRequest(attacker="", target="")
    for key in ("k", "max_cost", "max_steps", "trigger_depth"):
        value = raw.get(key, getattr(defaults, key))
        if not isinstance(value, int) or isinstance(value, bool):
            raise GraphSyntaxError(f"{key} must be an integer", f"$.request.{key}")
        numbers[key] = value
    return AnalysisRequest(
        attacker=raw["attacker"],
        target=raw["target"],
        target_asset=asset,
        k=min(numbers["k"], limits.k_ceiling),
        max_cost=min(numbers["max_cost"], limits.max_cost_ceiling),
        max_steps=min(numbers["max_steps"], limits.max_steps_ceiling),
        trigger_depth=min(numbers["trigger_depth"], limits.trigger_depth_ceiling),
    )


def _graph_too_large(graph: ThreatGraph, limits: ServiceLimits) -> bool:
    return len(graph.nodes) > limits.max_nodes or len(graph.edges) > limits.max_edges


def create_app(limits: ServiceLimits | None = None) -> FastAPI:
    limits = limits or ServiceLimits()
    app = FastAPI(title="attackpath", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=LOOPBACK_ORIGIN_REGEX,
        allow_methods=["GET", "POST"],
        allow_headers=["content-type"],
    )

    @app.post("/api/v1/validate")
    async def validate(request: Request):
        body = await _read_body(request, limits)
        if isinstance(body, JSONResponse):
            return body
        try:
            graph = decode_graph(body)
        except GraphSyntaxError as exc:
            return _error(400, str(exc))
        if _graph_too_large(graph, limits):
            return _error(413, "graph exceeds configured size limits")
        try:
            catalog = catalog_from_env()
        except CatalogError as exc:
            return _error(500, str(exc))
        return JSONResponse(_validation_response(validate_graph(graph, catalog=catalog)))

    @app.post("/api/v1/analyze")
    async def analyze(request: Request):
        body = await _read_body(request, limits)
        if isinstance(body, JSONResponse):
            return body
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, f"not valid JSON: {exc.msg}")
        if not isinstance(doc, dict) or set(doc) != {"graph", "request"}:
            return _error(400, "body must be an object with exactly graph and request")
        try:
            graph = decode_graph(json.dumps(doc["graph"]))
            analysis = _decode_request(doc["request"], limits)
        except GraphSyntaxError as exc:
            return _error(400, str(exc))
        if _graph_too_large(graph, limits):
            return _error(413, "graph exceeds configured size limits")
        try:
            catalog = catalog_from_env()
        except CatalogError as exc:
            return _error(500, str(exc))
        report = validate_graph(graph, catalog=catalog)
        if not report.ok:
            return JSONResponse(_validation_response(report), status_code=422)
        try:
            plans = plan_attacks(graph, analysis)
        except AnalysisError as exc:
            return JSONResponse(
                {"violations": [{"code": exc.code, "subject": "", "message": str(exc)}]},
                status_code=422,
            )
        return JSONResponse(render_report(graph, analysis, plans))

    @app.get("/api/v1/catalog")
    async def catalog_endpoint():
        try:
            catalog = catalog_from_env()
        except CatalogError as exc:
            return _error(500, str(exc))
        return JSONResponse(
            [
                {
                    "id": c.id,
                    "name": c.name,
                    "udhr_articles": list(c.udhr_articles),
                    "severity_rank": c.severity_rank,
                    "example_scenario": c.example_scenario,
                    "example_attack": c.example_attack,
                }
                for c in sorted(catalog, key=lambda c: c.severity_rank)
            ]
        )

    return app
