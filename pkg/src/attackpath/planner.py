"""Attack-path planner: best-first search over poison movements.

The search state is the actor currently holding live poison (the
frontier) plus the set of open conversation channels. Each expansion
pushes poison along one edge and resolves the triggers that push needs:
a respond edge needs its channel activated; a write needs some reader
compelled to consume. Step costs therefore vary, so the main search is
A* with a precomputed relaxed-graph heuristic, while trigger resolution
stays a unit-cost sub-search (triggers.py).

Delivery rule: a plan is complete when the target consumes
attacker-originated poison through a trusted sink, meaning it reads the
poison from a datasource (watch or compelled read) or receives it as the
reply inside a conversation it initiated (respond). A bare communicate
into the target moves influence but is the start of an attack, not a
compromise on its own.

K-best plans come from continuing the best-first expansion past the
first goal; cycles make the walk space infinite, so arrivals at a
(frontier, channels) key stop being expanded once k earlier arrivals
dominate them on both budgets (cost and step count). A dominated
arrival's every completion is also available, cheaper, to each of its
k dominators, so the cap never hides a top-k plan; goal states are
collected before the cap is applied so plans that end on a revisited
key still surface.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field

from .model import EdgeKind, NodeId, NodeKind, ThreatGraph
from .plan import AttackPath, AttackStep, PushAction, build_cost
from .triggers import (
    Channel,
    TriggerChain,
    TriggerKind,
    resolve_activation,
    resolve_consumption,
)

INITIAL_CHANNELS_KEY = "initial_channels"


class AnalysisError(ValueError):
    """The request cannot be run against this graph."""

    def __init__(self, code: str, message: str) -> None:
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class AnalysisRequest:
    attacker: NodeId
    target: NodeId
    target_asset: str | None = None
    k: int = 3
    max_cost: int = 25
    max_steps: int = 12
    trigger_depth: int = 4


@dataclass(frozen=True)
class SearchState:
    frontier: NodeId
    channels: frozenset[Channel]
    steps: tuple[AttackStep, ...]
    g_cost: int


@dataclass
class SearchStats:
    """Counters from one search run.

    arrivals maps each visited (frontier, channels) key to the number
    of arrivals retained for expansion there; retention is bounded by
    k + max_steps (each retained arrival past the k-th must be strictly
    shorter than a previous one), which is what keeps cyclic graphs
    from expanding forever inside the cost bound.
    """

    expanded: int = 0
    generated: int = 0
    pruned_by_key: int = 0
    arrivals: dict = field(default_factory=dict)

    @property
    def max_arrivals_per_key(self) -> int:
        return max((len(v) for v in self.arrivals.values()), default=0)


@dataclass(frozen=True)
class SearchResult:
    plans: tuple[AttackPath, ...]
    stats: SearchStats


def initial_channels(graph: ThreatGraph) -> frozenset[Channel]:
    """Pre-existing sessions declared in graph metadata, if any.

    Metadata values are strings, so the channel list is JSON-encoded:
    ``"initial_channels": "[[\\"a\\", \\"b\\"]]"`` marks a as having an
    open conversation with b.
    """
    raw = graph.metadata.get(INITIAL_CHANNELS_KEY)
    if raw is None:
        return frozenset()
    try:
        pairs = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise AnalysisError(
            "BAD_METADATA", f"metadata {INITIAL_CHANNELS_KEY} is not valid JSON: {exc}"
        ) from exc
    if not isinstance(pairs, list):
        raise AnalysisError("BAD_METADATA", f"metadata {INITIAL_CHANNELS_KEY} must be a list of pairs")
    channels: set[Channel] = set()
    for pair in pairs:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(p, str) for p in pair)
        ):
            raise AnalysisError(
                "BAD_METADATA", f"metadata {INITIAL_CHANNELS_KEY} entries must be [initiator, responder]"
            )
        initiator, responder = pair
        for node_id in pair:
            if not graph.has_node(node_id) or graph.node(node_id).kind is not NodeKind.ACTOR:
                raise AnalysisError(
                    "BAD_METADATA",
                    f"metadata {INITIAL_CHANNELS_KEY} references non-actor {node_id!r}",
                )
        channels.add((initiator, responder))
    return frozenset(channels)


def validate_request(graph: ThreatGraph, request: AnalysisRequest) -> None:
    """Raise AnalysisError when the request cannot run against the graph."""
    for role, node_id in (("attacker", request.attacker), ("target", request.target)):
        if not graph.has_node(node_id):
            raise AnalysisError("UNKNOWN_NODE", f"{role} {node_id!r} is not in the graph")
        if graph.node(node_id).kind is not NodeKind.ACTOR:
            raise AnalysisError("NOT_AN_ACTOR", f"{role} {node_id!r} is not an actor")
    if request.attacker == request.target:
        raise AnalysisError("ATTACKER_IS_TARGET", "attacker and target must differ")
    if not graph.node(request.attacker).attacker_capable:
        raise AnalysisError(
            "NOT_ATTACKER_CAPABLE", f"attacker {request.attacker!r} is not marked attacker_capable"
        )
    if request.target_asset is not None:
        if request.target_asset not in graph.node(request.target).assets:
            raise AnalysisError(
                "TARGET_ASSET_MISSING",
                f"target {request.target!r} does not carry asset {request.target_asset!r}",
            )
    if request.k < 1:
        raise AnalysisError("BAD_BOUNDS", "k must be at least 1")
    if request.max_cost < 0 or request.max_steps < 0 or request.trigger_depth < 0:
        raise AnalysisError("BAD_BOUNDS", "bounds must be non-negative")


def precompute_heuristic(graph: ThreatGraph, target: NodeId) -> dict[NodeId, float]:
    """Admissible remaining-cost estimate per node, as a relaxed graph.

    The relaxation keeps base costs but drops every trigger obligation:
    responds need no channel and writes chain to any reader of the
    datasource at no consumption cost. h is the shortest directed
    distance to the target under those optimistic rules (Dijkstra on the
    transposed relaxed graph); unreachable nodes get math.inf.
    """
    if not graph.has_node(target):
        raise KeyError(f"unknown node id {target!r}")
    # Transposed adjacency: incoming[v] lists (u, w) for relaxed edges u -> v.
    incoming: dict[NodeId, list[tuple[NodeId, int]]] = {n.id: [] for n in graph.nodes}
    for edge in graph.edges:
        if edge.src not in incoming or edge.dst not in incoming:
            continue
        if edge.kind is EdgeKind.READ:
            # Poison flows datasource -> reader for free once written.
            incoming[edge.src].append((edge.dst, 0))
        else:
            incoming[edge.dst].append((edge.src, edge.cost))
    dist: dict[NodeId, float] = {n.id: math.inf for n in graph.nodes}
    dist[target] = 0
    heap: list[tuple[int, NodeId]] = [(0, target)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist[node]:
            continue
        for pred, weight in incoming[node]:
            nd = d + weight
            if nd < dist[pred]:
                dist[pred] = nd
                heapq.heappush(heap, (nd, pred))
    return dist


def _narrative(push: PushAction, activation: TriggerChain | None, consumption: TriggerChain | None) -> str:
    if push.kind is EdgeKind.COMMUNICATE:
        return f"{push.src} communicates poisoned content to {push.dst}"
    if push.kind is EdgeKind.RESPOND:
        assert activation is not None
        if activation.kind is TriggerKind.ALREADY_ACTIVE:
            return f"{push.src} responds to {push.dst} over the already-active channel"
        return (
            f"{push.src} responds to {push.dst} after an activation chain of cost "
            f"{activation.total_cost} opens the channel"
        )
    assert consumption is not None
    reader = consumption.steps[-1].src
    if consumption.kind is TriggerKind.AUTOMATIC_WATCH:
        return f"{push.src} writes poison to {push.dst}; {reader} consumes it via watch"
    return (
        f"{push.src} writes poison to {push.dst}; a consumption chain of cost "
        f"{consumption.total_cost} makes {reader} read it"
    )


class _TriggerCache:
    """Memoizes trigger resolutions for one search run."""

    def __init__(self, graph: ThreatGraph, request: AnalysisRequest) -> None:
        self.graph = graph
        self.request = request
        self._consumption: dict[tuple, TriggerChain | None] = {}
        self._activation: dict[tuple, TriggerChain | None] = {}

    def consumption(self, push_edge: str, reader: NodeId, datasource: NodeId) -> TriggerChain | None:
        key = (push_edge, reader)
        if key not in self._consumption:
            self._consumption[key] = resolve_consumption(
                self.graph,
                self.request.attacker,
                reader,
                datasource,
                self.request.trigger_depth,
                banned_edges=frozenset((push_edge,)),
            )
        return self._consumption[key]

    def activation(self, respond_edge: str, channels: frozenset[Channel]) -> TriggerChain | None:
        key = (respond_edge, channels)
        if key not in self._activation:
            self._activation[key] = resolve_activation(
                self.graph,
                self.request.attacker,
                respond_edge,
                channels,
                self.request.trigger_depth,
                banned_edges=frozenset((respond_edge,)),
            )
        return self._activation[key]


def _expand(
    graph: ThreatGraph,
    state: SearchState,
    request: AnalysisRequest,
    cache: _TriggerCache,
) -> list[tuple[AttackStep, SearchState]]:
    """Successors of a state: every legal push with its triggers resolved.

    Communicates open (src, dst); an activation chain's compelled
    communicate opens its channel for the rest of the plan. Channels
    opened inside consumption chains are not tracked. Successors past
    max_cost or max_steps, and pushes whose triggers are unreachable,
    are dropped.
    """
    if len(state.steps) + 1 > request.max_steps:
        return []
    successors: list[tuple[AttackStep, SearchState]] = []

    def add(
        push: PushAction,
        activation: TriggerChain | None,
        consumption: TriggerChain | None,
        frontier: NodeId,
        channels: frozenset[Channel],
    ) -> None:
        cost = build_cost(graph.edge(push.edge).cost, activation, consumption)
        g = state.g_cost + cost.total
        if g > request.max_cost:
            return
        step = AttackStep(push, activation, consumption, cost, _narrative(push, activation, consumption))
        successors.append(
            (step, SearchState(frontier, channels, state.steps + (step,), g))
        )

    for edge in graph.outgoing_edges(state.frontier):
        if edge.kind is EdgeKind.COMMUNICATE:
            push = PushAction(edge.id, edge.kind, edge.src, edge.dst)
            add(push, None, None, edge.dst, state.channels | {(edge.src, edge.dst)})
        elif edge.kind is EdgeKind.RESPOND:
            activation = cache.activation(edge.id, state.channels)
            if activation is None:
                continue
            push = PushAction(edge.id, edge.kind, edge.src, edge.dst)
            channels = state.channels
            if activation.compelled is not None:
                channels = channels | {(activation.compelled.src, activation.compelled.dst)}
            add(push, activation, None, edge.dst, channels)
        elif edge.kind is EdgeKind.WRITE:
            for reader in graph.readers_of(edge.dst):
                consumption = cache.consumption(edge.id, reader, edge.dst)
                if consumption is None:
                    continue
                push = PushAction(edge.id, edge.kind, edge.src, edge.dst)
                add(push, None, consumption, reader, state.channels)
    return successors


def expand_state(
    graph: ThreatGraph, state: SearchState, request: AnalysisRequest
) -> list[tuple[AttackStep, SearchState]]:
    """Public one-shot expansion (fresh trigger cache)."""
    return _expand(graph, state, request, _TriggerCache(graph, request))


def reaches_goal(state: SearchState, target: NodeId) -> bool:
    """Delivery rule: poison at the target via a trusted sink.

    True when the frontier is the target and the last step was a write
    (the target consumed the poison from a datasource) or a respond (the
    target received it inside a conversation it initiated).
    """
    if state.frontier != target or not state.steps:
        return False
    return state.steps[-1].push.kind in (EdgeKind.WRITE, EdgeKind.RESPOND)


def _priority(state: SearchState, h: float) -> tuple:
    flat = tuple(
        action.edge
        for step in state.steps
        for action in _step_actions(step)
    )
    sig = tuple(
        (
            step.push.edge,
            step.activation.kind.value if step.activation else "",
            step.consumption.kind.value if step.consumption else "",
        )
        for step in state.steps
    )
    return (state.g_cost + h, len(state.steps), flat, sig)


def _step_actions(step: AttackStep):
    if step.activation is not None:
        yield from step.activation.actions()
    yield step.push
    if step.consumption is not None:
        yield from step.consumption.actions()


def _build_path(state: SearchState, request: AnalysisRequest, rank: int) -> AttackPath:
    return AttackPath(
        steps=state.steps,
        total_cost=state.g_cost,
        attacker=request.attacker,
        target=request.target,
        target_asset=request.target_asset,
        rank=rank,
    )


def search(graph: ThreatGraph, request: AnalysisRequest) -> SearchResult:
    """A* K-best search. Returns ranked plans plus search statistics."""
    validate_request(graph, request)
    channels0 = initial_channels(graph)
    h = precompute_heuristic(graph, request.target)
    stats = SearchStats()
    start = SearchState(request.attacker, channels0, (), 0)
    if h[request.attacker] == math.inf or request.max_cost < 1 or request.max_steps < 1:
        return SearchResult((), stats)
    cache = _TriggerCache(graph, request)
    counter = itertools.count()
    heap: list[tuple[tuple, int, SearchState]] = [
        (_priority(start, h[request.attacker]), next(counter), start)
    ]
    goals: list[SearchState] = []
    goal_costs: list[int] = []
    while heap:
        priority, _, state = heapq.heappop(heap)
        if len(goals) >= request.k:
            kth = sorted(goal_costs)[request.k - 1]
            if priority[0] > kth:
                break
        if reaches_goal(state, request.target):
            goals.append(state)
            goal_costs.append(state.g_cost)
        # Expansion cap: k dominators (cost and length both <=) mean every
        # completion of this arrival already exists k times over, cheaper.
        key = (state.frontier, state.channels)
        retained = stats.arrivals.setdefault(key, [])
        arrival = (state.g_cost, len(state.steps))
        dominators = sum(1 for g0, l0 in retained if g0 <= arrival[0] and l0 <= arrival[1])
        if dominators >= request.k:
            stats.pruned_by_key += 1
            continue
        retained.append(arrival)
        stats.expanded += 1
        for _, nstate in _expand(graph, state, request, cache):
            hn = h[nstate.frontier]
            if nstate.g_cost + hn > request.max_cost:
                continue  # admissible h: no in-bound completion exists
            stats.generated += 1
            heapq.heappush(heap, (_priority(nstate, hn), next(counter), nstate))
    ordered = sorted(goals, key=lambda s: _priority(s, 0))
    plans = tuple(
        _build_path(state, request, rank)
        for rank, state in enumerate(ordered[: request.k], start=1)
    )
    return SearchResult(plans, stats)


def plan_attacks(graph: ThreatGraph, request: AnalysisRequest) -> list[AttackPath]:
    """The k cheapest attack plans, ranked. See search() for the engine."""
    return list(search(graph, request).plans)
