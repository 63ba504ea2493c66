"""Graph file format: versioned JSON, strict on unknown keys.

Two failure layers. A shape problem (bad JSON, unknown key, wrong type,
unknown kind string) raises GraphSyntaxError with a location. A graph
that decodes but breaks a structural invariant raises GraphSemanticsError
wrapping the full ValidationReport.

Serialization is canonical: stable key order, entries sorted by id, and
parse(serialize(g)) == g.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    Edge,
    EdgeKind,
    Node,
    NodeKind,
    ThreatGraph,
    ValidationReport,
    Watch,
    validate_graph,
)

FORMAT_VERSION = 1

_TOP_KEYS = {"version", "metadata", "nodes", "edges", "watches"}
_NODE_KEYS = {"id", "kind", "label", "assets", "attacker_capable"}
_EDGE_KEYS = {"id", "from", "to", "kind", "cost"}
_WATCH_KEYS = {"actor", "datasource"}


class GraphSyntaxError(ValueError):
    """The document is not a well-formed graph file."""

    def __init__(self, message: str, location: str = "") -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class GraphSemanticsError(ValueError):
    """The document decoded but the graph violates invariants."""

    def __init__(self, report: ValidationReport) -> None:
        self.report = report
        summary = "; ".join(f"{v.code}({v.subject})" for v in report.violations)
        super().__init__(f"invalid graph: {summary}")


def _expect(value: Any, type_: type, where: str, what: str) -> Any:
    if type_ is int and isinstance(value, bool):
        raise GraphSyntaxError(f"{what} must be an integer", where)
    if not isinstance(value, type_):
        raise GraphSyntaxError(f"{what} must be {type_.__name__}", where)
    return value


def _check_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise GraphSyntaxError(f"unknown keys {unknown}", where)
    missing = sorted(required - set(obj))
    if missing:
        raise GraphSyntaxError(f"missing keys {missing}", where)


def _decode_node(raw: Any, where: str) -> Node:
    obj = _expect(raw, dict, where, "node")
    _check_keys(obj, _NODE_KEYS, {"id", "kind"}, where)
    node_id = _expect(obj["id"], str, where, "id")
    kind_raw = _expect(obj["kind"], str, f"{where}.kind", "kind")
    try:
        kind = NodeKind(kind_raw)
    except ValueError:
        raise GraphSyntaxError(f"unknown node kind {kind_raw!r}", f"{where}.kind") from None
    label = _expect(obj.get("label", node_id), str, f"{where}.label", "label")
    assets_raw = _expect(obj.get("assets", []), list, f"{where}.assets", "assets")
    assets = []
    for i, asset in enumerate(assets_raw):
        assets.append(_expect(asset, str, f"{where}.assets[{i}]", "asset id"))
    capable = _expect(
        obj.get("attacker_capable", False), bool, f"{where}.attacker_capable", "attacker_capable"
    )
    return Node(id=node_id, kind=kind, label=label, assets=frozenset(assets), attacker_capable=capable)


def _decode_edge(raw: Any, where: str) -> Edge:
    obj = _expect(raw, dict, where, "edge")
    _check_keys(obj, _EDGE_KEYS, {"id", "from", "to", "kind"}, where)
    edge_id = _expect(obj["id"], str, where, "id")
    src = _expect(obj["from"], str, f"{where}.from", "from")
    dst = _expect(obj["to"], str, f"{where}.to", "to")
    kind_raw = _expect(obj["kind"], str, f"{where}.kind", "kind")
    try:
        kind = EdgeKind(kind_raw)
    except ValueError:
        raise GraphSyntaxError(f"unknown edge kind {kind_raw!r}", f"{where}.kind") from None
    cost = _expect(obj.get("cost", 1), int, f"{where}.cost", "cost")
    return Edge(id=edge_id, src=src, dst=dst, kind=kind, cost=cost)


def decode_graph(text: str | bytes) -> ThreatGraph:
    """Decode a graph document, checking shape only (no invariant checks)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSyntaxError(
            f"not valid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}"
        ) from exc
    obj = _expect(doc, dict, "$", "document")
    _check_keys(obj, _TOP_KEYS, {"version", "nodes", "edges"}, "$")
    version = _expect(obj["version"], int, "$.version", "version")
    if version != FORMAT_VERSION:
        raise GraphSyntaxError(f"unsupported version {version}", "$.version")
    metadata_raw = _expect(obj.get("metadata", {}), dict, "$.metadata", "metadata")
    metadata: dict[str, str] = {}
    for key, value in metadata_raw.items():
        metadata[str(key)] = _expect(value, str, f"$.metadata.{key}", "metadata value")
    nodes = [
        _decode_node(raw, f"$.nodes[{i}]")
        for i, raw in enumerate(_expect(obj["nodes"], list, "$.nodes", "nodes"))
    ]
    edges = [
        _decode_edge(raw, f"$.edges[{i}]")
        for i, raw in enumerate(_expect(obj["edges"], list, "$.edges", "edges"))
    ]
    watches = []
    for i, raw in enumerate(_expect(obj.get("watches", []), list, "$.watches", "watches")):
        where = f"$.watches[{i}]"
        watch_obj = _expect(raw, dict, where, "watch")
        _check_keys(watch_obj, _WATCH_KEYS, _WATCH_KEYS, where)
        watches.append(
            Watch(
                actor=_expect(watch_obj["actor"], str, f"{where}.actor", "actor"),
                datasource=_expect(
                    watch_obj["datasource"], str, f"{where}.datasource", "datasource"
                ),
            )
        )
    return ThreatGraph(
        nodes=tuple(nodes), edges=tuple(edges), watches=tuple(watches), metadata=metadata
    )


def parse_graph(text: str | bytes, catalog=None) -> ThreatGraph:
    """Decode and validate. Raises GraphSyntaxError or GraphSemanticsError."""
    graph = decode_graph(text)
    report = validate_graph(graph, catalog=catalog)
    if not report.ok:
        raise GraphSemanticsError(report)
    return graph


def graph_to_document(graph: ThreatGraph) -> dict:
    """The canonical plain-dict form of a graph (entries sorted by id)."""
    return {
        "version": FORMAT_VERSION,
        "metadata": {k: graph.metadata[k] for k in sorted(graph.metadata)},
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "label": n.label,
                "assets": sorted(n.assets),
                "attacker_capable": n.attacker_capable,
            }
            for n in graph.nodes
        ],
        "edges": [
            {"id": e.id, "from": e.src, "to": e.dst, "kind": e.kind.value, "cost": e.cost}
            for e in graph.edges
        ],
        "watches": [{"actor": w.actor, "datasource": w.datasource} for w in graph.watches],
    }


def serialize_graph(graph: ThreatGraph) -> str:
    """Canonical serialization; deterministic byte-for-byte."""
    return json.dumps(graph_to_document(graph), indent=2, ensure_ascii=False) + "\n"


def load_graph_file(path: str, catalog=None) -> ThreatGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), catalog=catalog)
