"""Threat graph model: actors, datasources, interaction edges, watches.

A graph is an immutable value. Nodes are either actors (agents, services,
humans) or datasources (memory stores, RAG indexes, shared files). Edges
are directed capabilities: an actor can read or write a datasource, and
can communicate with (initiate) or respond to (reply within an existing
conversation) another actor. A watch marks an actor that automatically
consumes new content appearing in a datasource.

Validation is exhaustive: ``validate_graph`` reports every violation it
can find rather than stopping at the first, and an invalid graph is data
to report on, not an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

NodeId = str
EdgeId = str


class NodeKind(str, Enum):
    ACTOR = "actor"
    DATASOURCE = "datasource"


class EdgeKind(str, Enum):
    READ = "read"
    WRITE = "write"
    COMMUNICATE = "communicate"
    RESPOND = "respond"


# Edge kinds that can carry poison out of an actor (pushes). Read is the
# consumption primitive and never appears as a push.
PUSH_KINDS = (EdgeKind.WRITE, EdgeKind.COMMUNICATE, EdgeKind.RESPOND)


@dataclass(frozen=True)
class Node:
    id: NodeId
    kind: NodeKind
    label: str = ""
    assets: frozenset[str] = frozenset()
    attacker_capable: bool = False

    def __post_init__(self) -> None:
        if not self.label:
            object.__setattr__(self, "label", self.id)
        object.__setattr__(self, "assets", frozenset(self.assets))


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    src: NodeId
    dst: NodeId
    kind: EdgeKind
    cost: int = 1


@dataclass(frozen=True)
class Watch:
    actor: NodeId
    datasource: NodeId


# Validation codes. Machine-readable; subjects identify the offending id.
DUPLICATE_ID = "DUPLICATE_ID"
UNKNOWN_NODE = "UNKNOWN_NODE"
EDGE_ENDPOINT_KIND = "EDGE_ENDPOINT_KIND"
EDGE_SELF_LOOP = "EDGE_SELF_LOOP"
EDGE_COST = "EDGE_COST"
ASSETS_ON_DATASOURCE = "ASSETS_ON_DATASOURCE"
UNKNOWN_ASSET = "UNKNOWN_ASSET"
WATCH_ENDPOINT_KIND = "WATCH_ENDPOINT_KIND"
WATCH_WITHOUT_READ = "WATCH_WITHOUT_READ"
DUPLICATE_WATCH = "DUPLICATE_WATCH"


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


@dataclass(frozen=True)
class ThreatGraph:
    """Immutable threat graph. Construction canonicalizes ordering by id."""

    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    watches: tuple[Watch, ...] = ()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        object.__setattr__(
            self, "watches", tuple(sorted(self.watches, key=lambda w: (w.actor, w.datasource)))
        )
        object.__setattr__(self, "metadata", dict(self.metadata))
        # Lookup caches. First occurrence wins so invalid graphs (duplicate
        # ids) can still be walked by the validator.
        node_by_id: dict[NodeId, Node] = {}
        for node in self.nodes:
            node_by_id.setdefault(node.id, node)
        edge_by_id: dict[EdgeId, Edge] = {}
        outgoing: dict[NodeId, list[Edge]] = {node_id: [] for node_id in node_by_id}
        readers: dict[NodeId, set[NodeId]] = {}
        for edge in self.edges:
            edge_by_id.setdefault(edge.id, edge)
            if edge.src in outgoing:
                outgoing[edge.src].append(edge)
            if edge.kind is EdgeKind.READ:
                readers.setdefault(edge.dst, set()).add(edge.src)
        object.__setattr__(self, "_node_by_id", node_by_id)
        object.__setattr__(self, "_edge_by_id", edge_by_id)
        object.__setattr__(self, "_outgoing", {k: tuple(v) for k, v in outgoing.items()})
        object.__setattr__(self, "_readers", {k: tuple(sorted(v)) for k, v in readers.items()})
        object.__setattr__(self, "_watch_pairs", frozenset((w.actor, w.datasource) for w in self.watches))

    def has_node(self, node_id: NodeId) -> bool:
        return node_id in self._node_by_id  # type: ignore[attr-defined]

    def node(self, node_id: NodeId) -> Node:
        try:
            return self._node_by_id[node_id]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def edge(self, edge_id: EdgeId) -> Edge:
        try:
            return self._edge_by_id[edge_id]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown edge id {edge_id!r}") from None

    def outgoing_edges(
        self, node_id: NodeId, kinds: Iterable[EdgeKind] | None = None
    ) -> tuple[Edge, ...]:
        """Edges leaving a node, ordered by edge id, optionally kind-filtered."""
        if node_id not in self._node_by_id:  # type: ignore[attr-defined]
            raise KeyError(f"unknown node id {node_id!r}")
        edges = self._outgoing.get(node_id, ())  # type: ignore[attr-defined]
        if kinds is None:
            return edges
        wanted = frozenset(kinds)
        return tuple(e for e in edges if e.kind in wanted)

    def readers_of(self, datasource_id: NodeId) -> tuple[NodeId, ...]:
        """Ids of nodes holding a read edge on the datasource, sorted."""
        return self._readers.get(datasource_id, ())  # type: ignore[attr-defined]

    def read_edges(self, actor_id: NodeId, datasource_id: NodeId) -> tuple[Edge, ...]:
        """Read edges actor -> datasource, ordered by edge id."""
        return tuple(
            e
            for e in self._outgoing.get(actor_id, ())  # type: ignore[attr-defined]
            if e.kind is EdgeKind.READ and e.dst == datasource_id
        )

    def watch_pair(self, actor_id: NodeId, datasource_id: NodeId) -> bool:
        return (actor_id, datasource_id) in self._watch_pairs  # type: ignore[attr-defined]

    def watchers_of(self, datasource_id: NodeId) -> tuple[NodeId, ...]:
        return tuple(sorted(w.actor for w in self.watches if w.datasource == datasource_id))


def _endpoint_rule(kind: EdgeKind) -> tuple[NodeKind, NodeKind]:
    if kind in (EdgeKind.READ, EdgeKind.WRITE):
        return (NodeKind.ACTOR, NodeKind.DATASOURCE)
    return (NodeKind.ACTOR, NodeKind.ACTOR)


def validate_graph(graph: ThreatGraph, catalog=None) -> ValidationReport:
    """Check every structural invariant; return all violations found.

    Checks: unique ids per kind, endpoint existence and kind rules,
    communicate/respond self-loops, positive costs, assets restricted to
    actors and resolvable against the catalog, watches well-formed and
    backed by a read edge, watches unique per (actor, datasource).
    """
    from .assets import builtin_catalog

    categories = builtin_catalog() if catalog is None else catalog
    known_assets = {c.id for c in categories}
    found: list[Violation] = []

    seen_nodes: set[NodeId] = set()
    for node in graph.nodes:
        if node.id in seen_nodes:
            found.append(Violation(DUPLICATE_ID, node.id, f"node id {node.id!r} is not unique"))
        seen_nodes.add(node.id)
        if node.kind is NodeKind.DATASOURCE and node.assets:
            found.append(
                Violation(
                    ASSETS_ON_DATASOURCE,
                    node.id,
                    f"datasource {node.id!r} carries assets; only actors may",
                )
            )
        for asset_id in sorted(node.assets):
            if asset_id not in known_assets:
                found.append(
                    Violation(
                        UNKNOWN_ASSET,
                        node.id,
                        f"node {node.id!r} references unknown asset {asset_id!r}",
                    )
                )

    seen_edges: set[EdgeId] = set()
    for edge in graph.edges:
        if edge.id in seen_edges:
            found.append(Violation(DUPLICATE_ID, edge.id, f"edge id {edge.id!r} is not unique"))
        seen_edges.add(edge.id)
        if not isinstance(edge.cost, int) or isinstance(edge.cost, bool) or edge.cost < 1:
            found.append(
                Violation(EDGE_COST, edge.id, f"edge {edge.id!r} cost must be a positive int")
            )
        endpoints_known = True
        for endpoint in (edge.src, edge.dst):
            if endpoint not in seen_nodes and not graph.has_node(endpoint):
                found.append(
                    Violation(
                        UNKNOWN_NODE,
                        edge.id,
                        f"edge {edge.id!r} references unknown node {endpoint!r}",
                    )
                )
                endpoints_known = False
        if not endpoints_known:
            continue
        src_kind, dst_kind = _endpoint_rule(edge.kind)
        if graph.node(edge.src).kind is not src_kind or graph.node(edge.dst).kind is not dst_kind:
            found.append(
                Violation(
                    EDGE_ENDPOINT_KIND,
                    edge.id,
                    f"{edge.kind.value} edge {edge.id!r} must run "
                    f"{src_kind.value} -> {dst_kind.value}",
                )
            )
        if edge.kind in (EdgeKind.COMMUNICATE, EdgeKind.RESPOND) and edge.src == edge.dst:
            found.append(
                Violation(
                    EDGE_SELF_LOOP,
                    edge.id,
                    f"{edge.kind.value} edge {edge.id!r} may not loop onto {edge.src!r}",
                )
            )

    seen_watches: set[tuple[NodeId, NodeId]] = set()
    for watch in graph.watches:
        subject = f"{watch.actor}->{watch.datasource}"
        pair = (watch.actor, watch.datasource)
        if pair in seen_watches:
            found.append(Violation(DUPLICATE_WATCH, subject, f"watch {subject} is not unique"))
        seen_watches.add(pair)
        endpoints_ok = True
        for endpoint, wanted in ((watch.actor, NodeKind.ACTOR), (watch.datasource, NodeKind.DATASOURCE)):
            if not graph.has_node(endpoint):
                found.append(
                    Violation(
                        UNKNOWN_NODE, subject, f"watch references unknown node {endpoint!r}"
                    )
                )
                endpoints_ok = False
            elif graph.node(endpoint).kind is not wanted:
                found.append(
                    Violation(
                        WATCH_ENDPOINT_KIND,
                        subject,
                        f"watch {subject} must run actor -> datasource",
                    )
                )
                endpoints_ok = False
        if endpoints_ok and not graph.read_edges(watch.actor, watch.datasource):
            found.append(
                Violation(
                    WATCH_WITHOUT_READ,
                    subject,
                    f"watch {subject} has no backing read edge",
                )
            )

    return ValidationReport(tuple(found))
