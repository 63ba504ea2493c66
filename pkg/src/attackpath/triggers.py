"""Trigger sub-search: the attack within the attack.

A poison payload parked in a datasource or gated behind an inactive
conversation does nothing by itself. A trigger chain is the minimal
sequence of unit-cost influence hops, starting at the attacker, that
compels some actor to perform the missing action:

* consumption: compel the consumer to read the poisoned datasource;
* activation: compel the responder's counterpart to open the channel
  (communicate) so a respond edge becomes usable.

Influence propagates over the same primitives as poison: a communicate
hop, a respond hop when that channel is already active, or a write into
a datasource watched by the next actor (the write plus the implied
watch-read count as two unit steps). Every hop costs 1 regardless of
the edge's base cost; base costs belong to the main planner.

Cost accounting, fixed by the worked examples: a consumption chain's
final read is itself a costed step (a watch makes it the only step).
An activation chain's compelled communicate is the chain's outcome,
recorded and rendered but not charged; the chain pays for delivering
influence to the actor who then opens the channel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet

from .model import EdgeId, EdgeKind, NodeId, NodeKind, ThreatGraph

Channel = tuple[NodeId, NodeId]  # (initiator, responder)


class TriggerKind(str, Enum):
    ACTIVATION = "activation"
    CONSUMPTION = "consumption"
    AUTOMATIC_WATCH = "automatic_watch"
    ALREADY_ACTIVE = "already_active"


@dataclass(frozen=True)
class TriggerStep:
    """One unit-cost action in a chain: the edge and who acts on whom."""

    edge: EdgeId
    src: NodeId
    dst: NodeId
    action: EdgeKind


@dataclass(frozen=True)
class TriggerChain:
    kind: TriggerKind
    steps: tuple[TriggerStep, ...]
    total_cost: int
    # Activation only: the communicate the chain compels, opening the
    # channel (src, dst) = (initiator, responder counterpart).
    compelled: TriggerStep | None = None

    def actions(self) -> tuple[TriggerStep, ...]:
        """All atomic actions for rendering/numbering, compelled one last."""
        if self.compelled is None:
            return self.steps
        return self.steps + (self.compelled,)


def has_watch(graph: ThreatGraph, actor: NodeId, datasource: NodeId) -> bool:
    """True when the actor watches the datasource. Errors on bad ids/kinds."""
    if graph.node(actor).kind is not NodeKind.ACTOR:
        raise ValueError(f"{actor!r} is not an actor")
    if graph.node(datasource).kind is not NodeKind.DATASOURCE:
        raise ValueError(f"{datasource!r} is not a datasource")
    return graph.watch_pair(actor, datasource)


def _lex_min_read_edge(
    graph: ThreatGraph, actor: NodeId, datasource: NodeId, banned: FrozenSet[EdgeId]
) -> EdgeId | None:
    for edge in graph.read_edges(actor, datasource):
        if edge.id not in banned:
            return edge.id
    return None


def _influence_path(
    graph: ThreatGraph,
    start: NodeId,
    goal: NodeId,
    max_len: int,
    banned: FrozenSet[EdgeId],
    channel_state: FrozenSet[Channel],
) -> tuple[TriggerStep, ...] | None:
    """Cheapest influence path start -> goal actor, lex-min edge ids on ties.

    Uniform-cost search ordered by (length, edge-id sequence); the watch
    hop advances two steps at once so plain FIFO levels do not suffice.
    """
    if start == goal:
        return ()
    if max_len <= 0:
        return None
    heap: list[tuple[int, tuple[EdgeId, ...], int, NodeId, tuple[TriggerStep, ...]]] = [
        (0, (), 0, start, ())
    ]
    counter = 1
    done: set[NodeId] = set()
    while heap:
        length, _seq, _, actor, steps = heapq.heappop(heap)
        if actor == goal:
            return steps
        if actor in done:
            continue
        done.add(actor)
        if length >= max_len:
            continue
        for edge in graph.outgoing_edges(actor):
            if edge.id in banned:
                continue
            if edge.kind is EdgeKind.COMMUNICATE:
                hop = (TriggerStep(edge.id, actor, edge.dst, EdgeKind.COMMUNICATE),)
            elif edge.kind is EdgeKind.RESPOND:
                # Usable only when already active; chains never open channels
                # recursively.
                if (edge.dst, actor) not in channel_state:
                    continue
                hop = (TriggerStep(edge.id, actor, edge.dst, EdgeKind.RESPOND),)
            elif edge.kind is EdgeKind.WRITE:
                # A dormant nudge: write into a watched datasource; each
                # watcher picks it up via its implied read (two unit steps).
                for watcher in graph.watchers_of(edge.dst):
                    read_id = _lex_min_read_edge(graph, watcher, edge.dst, banned)
                    if read_id is None:
                        continue
                    pair = (
                        TriggerStep(edge.id, actor, edge.dst, EdgeKind.WRITE),
                        TriggerStep(read_id, watcher, edge.dst, EdgeKind.READ),
                    )
                    if length + 2 <= max_len and watcher not in done:
                        new_steps = steps + pair
                        heapq.heappush(
                            heap,
                            (
                                length + 2,
                                tuple(s.edge for s in new_steps),
                                counter,
                                watcher,
                                new_steps,
                            ),
                        )
                        counter += 1
                continue
            else:
                continue
            target = hop[-1].dst
            if length + 1 <= max_len and target not in done:
                new_steps = steps + hop
                heapq.heappush(
                    heap,
                    (
                        length + 1,
                        tuple(s.edge for s in new_steps),
                        counter,
                        target,
                        new_steps,
                    ),
                )
                counter += 1
    return None


def resolve_consumption(
    graph: ThreatGraph,
    attacker: NodeId,
    consumer: NodeId,
    datasource: NodeId,
    depth_budget: int,
    banned_edges: FrozenSet[EdgeId] = frozenset(),
    channel_state: FrozenSet[Channel] = frozenset(),
) -> TriggerChain | None:
    """How the consumer comes to read the poisoned datasource, or None.

    A watch makes consumption automatic: the single implied read, cost 1,
    regardless of the depth budget. Otherwise the shortest chain from the
    attacker ends with the compelled read and costs one per step. The
    channel state defaults to empty: respond hops inside consumption
    chains are only usable when the caller supplies active channels.
    """
    if graph.node(consumer).kind is not NodeKind.ACTOR:
        raise ValueError(f"consumer {consumer!r} is not an actor")
    if graph.node(datasource).kind is not NodeKind.DATASOURCE:
        raise ValueError(f"datasource {datasource!r} is not a datasource")
    graph.node(attacker)
    if not graph.read_edges(consumer, datasource):
        raise ValueError(f"consumer {consumer!r} has no read edge to {datasource!r}")
    banned = frozenset(banned_edges)
    read_id = _lex_min_read_edge(graph, consumer, datasource, banned)
    if read_id is None:
        return None
    final = TriggerStep(read_id, consumer, datasource, EdgeKind.READ)
    if graph.watch_pair(consumer, datasource):
        return TriggerChain(TriggerKind.AUTOMATIC_WATCH, (final,), 1)
    path = _influence_path(
        graph, attacker, consumer, depth_budget - 1, banned, frozenset(channel_state)
    )
    if path is None:
        return None
    steps = path + (final,)
    return TriggerChain(TriggerKind.CONSUMPTION, steps, len(steps))


def resolve_activation(
    graph: ThreatGraph,
    attacker: NodeId,
    respond_edge: EdgeId,
    channel_state: FrozenSet[Channel],
    depth_budget: int,
    banned_edges: FrozenSet[EdgeId] = frozenset(),
) -> TriggerChain | None:
    """How the channel behind a respond edge comes to be open, or None.

    For a respond edge X -> Y (X replies to Y), the channel (Y, X) must be
    active. Already active costs 0. Otherwise the chain delivers influence
    to Y, compelling Y to execute one of its communicate edges to X; the
    compelled communicate is the outcome, not a charged step.
    """
    edge = graph.edge(respond_edge)
    if edge.kind is not EdgeKind.RESPOND:
        raise ValueError(f"edge {respond_edge!r} is not a respond edge")
    graph.node(attacker)
    responder, counterpart = edge.src, edge.dst
    if (counterpart, responder) in channel_state:
        return TriggerChain(TriggerKind.ALREADY_ACTIVE, (), 0)
    banned = frozenset(banned_edges)
    opener: EdgeId | None = None
    for candidate in graph.outgoing_edges(counterpart, (EdgeKind.COMMUNICATE,)):
        if candidate.dst == responder and candidate.id not in banned:
            opener = candidate.id
            break
    if opener is None:
        return None
    path = _influence_path(
        graph, attacker, counterpart, depth_budget, banned, frozenset(channel_state)
    )
    if path is None:
        return None
    compelled = TriggerStep(opener, counterpart, responder, EdgeKind.COMMUNICATE)
    return TriggerChain(TriggerKind.ACTIVATION, path, len(path), compelled=compelled)
