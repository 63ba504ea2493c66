"""Plan rendering: analyst text, Graphviz DOT, versioned JSON reports.

All three renderings are deterministic functions of their inputs. The
JSON report is the machine contract consumed by the workbench; it embeds
the flat action numbering verbatim and a digest of the canonical graph
serialization so a report can be matched to the exact graph it analyzed.
"""

from __future__ import annotations

import hashlib
import json

import jsonschema

from .graphio import serialize_graph
from .model import NodeKind, ThreatGraph
from .plan import AttackPath, NumberedAction, number_actions
from .planner import AnalysisRequest
from .triggers import TriggerChain

REPORT_SCHEMA_ID = "attackpath.report/v1"

NO_PATH_SENTINEL = "no attack path found"


def render_text(path: AttackPath) -> str:
    """One line per numbered action plus a cost-breakdown footer."""
    lines = [
        f"{a.seq}. {a.src} -{a.kind.value}-> {a.dst} ({a.role} cost {a.cost})"
        for a in number_actions(path)
    ]
    push = sum(s.cost.push_poison for s in path.steps)
    activation = sum(s.cost.activation_trigger for s in path.steps)
    consumption = sum(s.cost.consumption_trigger for s in path.steps)
    lines.append(
        f"total cost {path.total_cost} = push {push} + activation {activation}"
        f" + consumption {consumption}"
    )
    return "\n".join(lines)


def _dot_quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(graph: ThreatGraph, path: AttackPath | None = None) -> str:
    """Graphviz DOT of the whole graph; plan edges get sequence numbers.

    Actors are boxes, datasources cylinders. Edges on the plan are
    highlighted and annotated with every sequence number that uses them.
    Watches render as dotted arrows. Raises ValueError when the plan
    references edges the graph does not have.
    """
    sequence: dict[str, list[int]] = {}
    if path is not None:
        for action in number_actions(path):
            if not any(e.id == action.edge for e in graph.edges):
                raise ValueError(f"plan references edge {action.edge!r} not in graph")
            sequence.setdefault(action.edge, []).append(action.seq)
    out = ["digraph attackpath {", "  rankdir=LR;"]
    for node in graph.nodes:
        shape = "box" if node.kind is NodeKind.ACTOR else "cylinder"
        attrs = [f"shape={shape}", f"label={_dot_quote(node.label)}"]
        if node.attacker_capable:
            attrs.append("peripheries=2")
        out.append(f"  {_dot_quote(node.id)} [{', '.join(attrs)}];")
    for edge in graph.edges:
        label = f"{edge.kind.value} ({edge.cost})"
        attrs = []
        if edge.id in sequence:
            numbers = ",".join(str(n) for n in sequence[edge.id])
            label = f"[{numbers}] {label}"
            attrs.append("color=red")
            attrs.append("penwidth=2")
        attrs.insert(0, f"label={_dot_quote(label)}")
        out.append(f"  {_dot_quote(edge.src)} -> {_dot_quote(edge.dst)} [{', '.join(attrs)}];")
    for watch in graph.watches:
        out.append(
            f"  {_dot_quote(watch.actor)} -> {_dot_quote(watch.datasource)}"
            ' [style=dotted, label="watch"];'
        )
    out.append("}")
    return "\n".join(out) + "\n"


def graph_digest(graph: ThreatGraph) -> str:
    return "sha256:" + hashlib.sha256(serialize_graph(graph).encode("utf-8")).hexdigest()


def _chain_doc(chain: TriggerChain | None) -> dict | None:
    if chain is None:
        return None
    doc = {
        "kind": chain.kind.value,
        "total_cost": chain.total_cost,
        "steps": [
            {"edge": s.edge, "from": s.src, "to": s.dst, "action": s.action.value}
            for s in chain.steps
        ],
        "compelled": None,
    }
    if chain.compelled is not None:
        c = chain.compelled
        doc["compelled"] = {"edge": c.edge, "from": c.src, "to": c.dst, "action": c.action.value}
    return doc


def _action_doc(action: NumberedAction) -> dict:
    return {
        "seq": action.seq,
        "edge": action.edge,
        "kind": action.kind.value,
        "from": action.src,
        "to": action.dst,
        "role": action.role,
        "step_index": action.step_index,
        "occurrence": action.occurrence,
        "cost": action.cost,
    }


def render_report(graph: ThreatGraph, request: AnalysisRequest, plans: list[AttackPath]) -> dict:
    """The versioned report document (validates against REPORT_SCHEMA)."""
    return {
        "schema": REPORT_SCHEMA_ID,
        "graph_digest": graph_digest(graph),
        "request": {
            "attacker": request.attacker,
            "target": request.target,
            "target_asset": request.target_asset,
            "k": request.k,
            "max_cost": request.max_cost,
            "max_steps": request.max_steps,
            "trigger_depth": request.trigger_depth,
        },
        "plan_count": len(plans),
        "plans": [
            {
                "rank": plan.rank,
                "total_cost": plan.total_cost,
                "attacker": plan.attacker,
                "target": plan.target,
                "target_asset": plan.target_asset,
                "steps": [
                    {
                        "push": {
                            "edge": step.push.edge,
                            "kind": step.push.kind.value,
                            "from": step.push.src,
                            "to": step.push.dst,
                        },
                        "activation": _chain_doc(step.activation),
                        "consumption": _chain_doc(step.consumption),
                        "cost": {
                            "push_poison": step.cost.push_poison,
                            "activation_trigger": step.cost.activation_trigger,
                            "consumption_trigger": step.cost.consumption_trigger,
                            "total": step.cost.total,
                        },
                        "narrative": step.narrative,
                    }
                    for step in plan.steps
                ],
                "actions": [_action_doc(a) for a in number_actions(plan)],
            }
            for plan in plans
        ],
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


_chain_schema = {
    "type": ["object", "null"],
    "properties": {
        "kind": {"enum": ["activation", "consumption", "automatic_watch", "already_active"]},
        "total_cost": {"type": "integer", "minimum": 0},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "edge": {"type": "string"},
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "action": {"enum": ["read", "write", "communicate", "respond"]},
                },
                "required": ["edge", "from", "to", "action"],
                "additionalProperties": False,
            },
        },
        "compelled": {
            "type": ["object", "null"],
            "properties": {
                "edge": {"type": "string"},
                "from": {"type": "string"},
                "to": {"type": "string"},
                "action": {"enum": ["communicate"]},
            },
            "required": ["edge", "from", "to", "action"],
            "additionalProperties": False,
        },
    },
    "required": ["kind", "total_cost", "steps", "compelled"],
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": REPORT_SCHEMA_ID,
    "type": "object",
    "properties": {
        "schema": {"const": REPORT_SCHEMA_ID},
        "graph_digest": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "request": {
            "type": "object",
            "properties": {
                "attacker": {"type": "string"},
                "target": {"type": "string"},
                "target_asset": {"type": ["string", "null"]},
                "k": {"type": "integer", "minimum": 1},
                "max_cost": {"type": "integer", "minimum": 0},
                "max_steps": {"type": "integer", "minimum": 0},
                "trigger_depth": {"type": "integer", "minimum": 0},
            },
            "required": ["attacker", "target", "target_asset", "k", "max_cost", "max_steps", "trigger_depth"],
            "additionalProperties": False,
        },
        "plan_count": {"type": "integer", "minimum": 0},
        "plans": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "rank": {"type": "integer", "minimum": 1},
                    "total_cost": {"type": "integer", "minimum": 1},
                    "attacker": {"type": "string"},
                    "target": {"type": "string"},
                    "target_asset": {"type": ["string", "null"]},
                    "steps": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "properties": {
                                "push": {
                                    "type": "object",
                                    "properties": {
                                        "edge": {"type": "string"},
                                        "kind": {"enum": ["write", "communicate", "respond"]},
                                        "from": {"type": "string"},
                                        "to": {"type": "string"},
                                    },
                                    "required": ["edge", "kind", "from", "to"],
                                    "additionalProperties": False,
                                },
                                "activation": _chain_schema,
                                "consumption": _chain_schema,
                                "cost": {
                                    "type": "object",
                                    "properties": {
                                        "push_poison": {"type": "integer", "minimum": 1},
                                        "activation_trigger": {"type": "integer", "minimum": 0},
                                        "consumption_trigger": {"type": "integer", "minimum": 0},
                                        "total": {"type": "integer", "minimum": 1},
                                    },
                                    "required": [
                                        "push_poison",
                                        "activation_trigger",
                                        "consumption_trigger",
                                        "total",
                                    ],
                                    "additionalProperties": False,
                                },
                                "narrative": {"type": "string"},
                            },
                            "required": ["push", "activation", "consumption", "cost", "narrative"],
                            "additionalProperties": False,
                        },
                    },
                    "actions": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "properties": {
                                "seq": {"type": "integer", "minimum": 1},
                                "edge": {"type": "string"},
                                "kind": {"enum": ["read", "write", "communicate", "respond"]},
                                "from": {"type": "string"},
                                "to": {"type": "string"},
                                "role": {"enum": ["activation", "push", "consumption"]},
                                "step_index": {"type": "integer", "minimum": 0},
                                "occurrence": {"type": "integer", "minimum": 0},
                                "cost": {"type": "integer", "minimum": 0},
                            },
                            "required": [
                                "seq",
                                "edge",
                                "kind",
                                "from",
                                "to",
                                "role",
                                "step_index",
                                "occurrence",
                                "cost",
                            ],
                            "additionalProperties": False,
                        },
                    },
                },
                "required": ["rank", "total_cost", "attacker", "target", "target_asset", "steps", "actions"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema", "graph_digest", "request", "plan_count", "plans"],
    "additionalProperties": False,
}


def validate_report(report: dict) -> None:
    """Raise jsonschema.ValidationError when the report breaks the schema."""
    jsonschema.validate(report, REPORT_SCHEMA)
