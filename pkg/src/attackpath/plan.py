"""Attack plans: ordered steps, cost breakdowns, flat action numbering.

A step has three phases: an optional activation trigger (open the channel
a respond needs), the push action itself (write, communicate or respond),
and an optional consumption trigger (get the written poison read). The
step cost is the sum: push base cost + activation cost + consumption cost.

Analysts read plans as one flat numbered sequence of atomic actions, in
execution order: activation-chain actions, then the push, then
consumption-chain actions, for each step in turn.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import EdgeId, EdgeKind, NodeId
from .triggers import TriggerChain, TriggerKind


@dataclass(frozen=True)
class CostBreakdown:
    push_poison: int
    activation_trigger: int
    consumption_trigger: int
    total: int


@dataclass(frozen=True)
class PushAction:
    edge: EdgeId
    kind: EdgeKind
    src: NodeId
    dst: NodeId


@dataclass(frozen=True)
class AttackStep:
    push: PushAction
    activation: TriggerChain | None
    consumption: TriggerChain | None
    cost: CostBreakdown
    narrative: str

    def __post_init__(self) -> None:
        if self.activation is not None and self.push.kind is not EdgeKind.RESPOND:
            raise ValueError("activation chains belong to respond pushes only")
        if self.consumption is not None and self.push.kind is not EdgeKind.WRITE:
            raise ValueError("consumption chains belong to write pushes only")


@dataclass(frozen=True)
class AttackPath:
    steps: tuple[AttackStep, ...]
    total_cost: int
    attacker: NodeId
    target: NodeId
    target_asset: str | None = None
    rank: int = 1


def build_cost(base: int, activation: TriggerChain | None, consumption: TriggerChain | None) -> CostBreakdown:
    a = activation.total_cost if activation is not None else 0
    c = consumption.total_cost if consumption is not None else 0
    return CostBreakdown(base, a, c, base + a + c)


@dataclass(frozen=True)
class NumberedAction:
    """One atomic action with its 1-based sequence number.

    occurrence counts prior uses of the same edge in the plan, so the
    pair (edge, occurrence) maps one-to-one onto a number. cost is the
    action's contribution to its step: base cost for pushes, 1 for
    trigger-chain steps, 0 for an activation chain's compelled
    communicate (the chain's outcome, not a charged hop).
    """

    seq: int
    edge: EdgeId
    kind: EdgeKind
    src: NodeId
    dst: NodeId
    role: str  # "activation" | "push" | "consumption"
    step_index: int
    occurrence: int
    cost: int


def number_actions(path: AttackPath) -> list[NumberedAction]:
    """Flat 1..A numbering over every atomic action, in execution order."""
    numbered: list[NumberedAction] = []
    uses: dict[EdgeId, int] = {}

    def emit(
        edge: EdgeId, kind: EdgeKind, src: NodeId, dst: NodeId, role: str, step_index: int, cost: int
    ) -> None:
        occurrence = uses.get(edge, 0)
        uses[edge] = occurrence + 1
        numbered.append(
            NumberedAction(
                len(numbered) + 1, edge, kind, src, dst, role, step_index, occurrence, cost
            )
        )

    for index, step in enumerate(path.steps):
        if step.activation is not None:
            for action in step.activation.steps:
                emit(action.edge, action.action, action.src, action.dst, "activation", index, 1)
            if step.activation.compelled is not None:
                compelled = step.activation.compelled
                emit(compelled.edge, compelled.action, compelled.src, compelled.dst, "activation", index, 0)
        emit(
            step.push.edge,
            step.push.kind,
            step.push.src,
            step.push.dst,
            "push",
            index,
            step.cost.push_poison,
        )
        if step.consumption is not None:
            for action in step.consumption.actions():
                emit(action.edge, action.action, action.src, action.dst, "consumption", index, 1)
    return numbered


def flat_edge_sequence(path: AttackPath) -> tuple[EdgeId, ...]:
    """Edge ids of every atomic action in numbering order (tie-break key)."""
    return tuple(a.edge for a in number_actions(path))


def structure_signature(path: AttackPath) -> tuple:
    """Disambiguates plans sharing a flat edge sequence (step bracketing)."""
    sig = []
    for step in path.steps:
        a = step.activation.kind.value if step.activation is not None else ""
        c = step.consumption.kind.value if step.consumption is not None else ""
        sig.append((step.push.edge, a, c))
    return tuple(sig)


def plan_sort_key(path: AttackPath) -> tuple:
    """Documented plan order: cost, then fewer steps, then lexicographic
    flat edge-id sequence, then structure."""
    return (path.total_cost, len(path.steps), flat_edge_sequence(path), structure_signature(path))
