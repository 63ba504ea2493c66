"""Exhaustive plan enumeration for cross-checking the planner.

The oracle applies exactly the expansion semantics of the planner but
with no heuristic and no pruning beyond the request bounds: a complete
depth-first walk of the bounded search tree. Exponential by nature, so
it refuses graphs beyond a small size guard. Every goal state reached
is a plan; plans are ranked with the same documented order the planner
uses, making "the planner's k plans are a prefix of the oracle's list"
a meaningful check.
"""

from __future__ import annotations

from .model import ThreatGraph
from .plan import AttackPath, plan_sort_key
from .planner import (
    AnalysisRequest,
    SearchState,
    _expand,
    _TriggerCache,
    initial_channels,
    reaches_goal,
    validate_request,
)

MAX_ORACLE_NODES = 8
MAX_ORACLE_EDGES = 16


class OracleSizeError(ValueError):
    """Graph too large for exhaustive enumeration."""


def oracle_enumerate(graph: ThreatGraph, request: AnalysisRequest) -> list[AttackPath]:
    """Every plan within the request bounds, in documented rank order."""
    if len(graph.nodes) > MAX_ORACLE_NODES or len(graph.edges) > MAX_ORACLE_EDGES:
        raise OracleSizeError(
            f"oracle guard: at most {MAX_ORACLE_NODES} nodes and "
            f"{MAX_ORACLE_EDGES} edges (got {len(graph.nodes)}/{len(graph.edges)})"
        )
    validate_request(graph, request)
    cache = _TriggerCache(graph, request)
    start = SearchState(request.attacker, initial_channels(graph), (), 0)
    goals: list[SearchState] = []
    stack = [start]
    while stack:
        state = stack.pop()
        if reaches_goal(state, request.target):
            goals.append(state)
            # Plans may continue through a goal (revisits, persistence).
        for _, nstate in _expand(graph, state, request, cache):
            stack.append(nstate)
    paths = [
        AttackPath(
            steps=state.steps,
            total_cost=state.g_cost,
            attacker=request.attacker,
            target=request.target,
            target_asset=request.target_asset,
        )
        for state in goals
    ]
    paths.sort(key=plan_sort_key)
    return [
        AttackPath(
            steps=p.steps,
            total_cost=p.total_cost,
            attacker=p.attacker,
            target=p.target,
            target_asset=p.target_asset,
            rank=rank,
        )
        for rank, p in enumerate(paths, start=1)
    ]
