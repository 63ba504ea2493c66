"""Attack-path planning for multi-agent LLM deployments.

Model a deployment as a threat graph of actors and datasources, then
enumerate lowest-cost prompt-injection attack plans from an
attacker-capable entry point to a target actor. Plans are sequences of
three-phase steps (activation trigger, poison push, consumption
trigger) whose cost counts every message the attacker must cause.
"""

from .assets import (
    CATALOG_ENV_VAR,
    AssetCategory,
    CatalogError,
    builtin_catalog,
    catalog_from_env,
    catalog_to_json,
    load_catalog,
    lookup,
)
from .graphio import (
    FORMAT_VERSION,
    GraphSemanticsError,
    GraphSyntaxError,
    decode_graph,
    graph_to_document,
    load_graph_file,
    parse_graph,
    serialize_graph,
)
from .model import (
    Edge,
    EdgeKind,
    Node,
    NodeKind,
    PUSH_KINDS,
    ThreatGraph,
    ValidationReport,
    Violation,
    Watch,
    validate_graph,
)
from .oracle import MAX_ORACLE_EDGES, MAX_ORACLE_NODES, OracleSizeError, oracle_enumerate
from .plan import (
    AttackPath,
    AttackStep,
    CostBreakdown,
    NumberedAction,
    PushAction,
    build_cost,
    flat_edge_sequence,
    number_actions,
    plan_sort_key,
    structure_signature,
)
from .planner import (
    AnalysisError,
    AnalysisRequest,
    SearchResult,
    SearchState,
    SearchStats,
    expand_state,
    initial_channels,
    plan_attacks,
    precompute_heuristic,
    search,
    validate_request,
)
from .render import (
    NO_PATH_SENTINEL,
    REPORT_SCHEMA,
    REPORT_SCHEMA_ID,
    graph_digest,
    render_dot,
    render_report,
    render_text,
    report_to_json,
    validate_report,
)
from .triggers import (
    Channel,
    TriggerChain,
    TriggerKind,
    TriggerStep,
    has_watch,
    resolve_activation,
    resolve_consumption,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "AnalysisRequest",
    "AssetCategory",
    "AttackPath",
    "AttackStep",
    "CATALOG_ENV_VAR",
    "CatalogError",
    "Channel",
    "CostBreakdown",
    "Edge",
    "EdgeKind",
    "FORMAT_VERSION",
    "GraphSemanticsError",
    "GraphSyntaxError",
    "MAX_ORACLE_EDGES",
    "MAX_ORACLE_NODES",
    "NO_PATH_SENTINEL",
    "Node",
    "NodeKind",
    "NumberedAction",
    "OracleSizeError",
    "PUSH_KINDS",
    "PushAction",
    "REPORT_SCHEMA",
    "REPORT_SCHEMA_ID",
    "SearchResult",
    "SearchState",
    "SearchStats",
    "ThreatGraph",
    "TriggerChain",
    "TriggerKind",
    "TriggerStep",
    "ValidationReport",
    "Violation",
    "Watch",
    "builtin_catalog",
    "build_cost",
    "catalog_from_env",
    "catalog_to_json",
    "decode_graph",
    "expand_state",
    "flat_edge_sequence",
    "graph_digest",
    "graph_to_document",
    "has_watch",
    "initial_channels",
    "load_catalog",
    "load_graph_file",
    "lookup",
    "number_actions",
    "oracle_enumerate",
    "parse_graph",
    "plan_attacks",
    "plan_sort_key",
    "precompute_heuristic",
    "render_dot",
    "render_report",
    "render_text",
    "report_to_json",
    "resolve_activation",
    "resolve_consumption",
    "search",
    "serialize_graph",
    "structure_signature",
    "validate_graph",
    "validate_report",
    "validate_request",
]
