"""Message and node-state vocabulary shared by all protocols.

Protocols are written sans-io: handlers look at a node and an incoming
message and return *intents* (:class:`Send`, :class:`SetTimer`,
:class:`Delivered`). The engine owns time, energy accounting and the
event log.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, List, Optional, Set, Tuple, Union

from .energy import EnergyModel, rx_cost, tx_cost
from .topology import INFINITY, Position

BROADCAST = -1
MULTICAST = -2


class MsgKind(str, enum.Enum):
    ADV = "ADV"
    ACK = "ACK"
    DATA = "DATA"


class EngineError(RuntimeError):
    """An engine invariant was violated (e.g. charging a dead node)."""


@dataclass(frozen=True, order=True)
class MetaData:
    """Names one sensed event: the originating node and its sequence number."""
    origin: int
    event_seq: int


@dataclass(frozen=True)
class Message:
    kind: MsgKind
    meta: Optional[MetaData]
    payload_bits: int
    src: int
    dst: int = BROADCAST
    # sender's gradient value (ADV, ACK) and residual energy (ACK)
    gradient: float = INFINITY
    energy: Optional[float] = None
    # receiver list when dst is MULTICAST
    targets: Tuple[int, ...] = ()

    @property
    def is_broadcast(self) -> bool:
        return self.dst == BROADCAST


@dataclass
class NodeState:
    id: int
    position: Position
    residual_energy: float
    gradient_value: float = INFINITY
    seen: Set[MetaData] = field(default_factory=set)
    alive: bool = True
    is_sink: bool = False
    death_time: Optional[float] = None


def make_sink(node_id: int, position: Position) -> NodeState:
    return NodeState(node_id, position, math.inf, gradient_value=0, is_sink=True)


def _drain(node: NodeState, cost: float, now: float) -> float:
    if not node.alive:
        raise EngineError(f"node {node.id} is dead and cannot be charged")
    if node.is_sink or cost == 0:
        return 0.0
    if cost >= node.residual_energy:
        spent = node.residual_energy
        node.residual_energy = 0.0
        node.alive = False
        node.death_time = now
        return spent
    node.residual_energy -= cost
    return cost


def charge_send(node: NodeState, message: Message, distance: float,
                model: EnergyModel, now: float = 0.0) -> float:
    """Charge a transmission; returns the joules actually removed.

    The result is less than the nominal cost only when the battery runs
    out, in which case the node is marked dead at ``now``.
    """
    return _drain(node, tx_cost(model, message.payload_bits, distance), now)


def charge_receive(node: NodeState, message: Message, model: EnergyModel,
                   now: float = 0.0) -> float:
    """Charge a reception. The sink is mains powered and never charged."""
    return _drain(node, rx_cost(model, message.payload_bits), now)


def mark_seen(node: NodeState, meta: MetaData) -> NodeState:
    node.seen.add(meta)
    return node


def has_seen(node: NodeState, meta: MetaData) -> bool:
    return meta in node.seen


@dataclass(frozen=True)
class Send:
    message: Message
    delay: float = 0.0


@dataclass(frozen=True)
class SetTimer:
    delay: float
    key: Hashable


@dataclass(frozen=True)
class Delivered:
    meta: MetaData


Intent = Union[Send, SetTimer, Delivered]


class ProtocolBehavior:
    """Handler interface every protocol implements.

    Handlers must be deterministic in (node state, message, time, the
    protocol's own seeded randomness).
    """

    name = "abstract"

    def __init__(self, topology, params):
        self.topology = topology
        self.params = params

    def initialize(self, nodes, now: float) -> List[Message]:
        """Return the broadcasts performed during network set-up, if any."""
        return []

    def on_event_sensed(self, node: NodeState, meta: MetaData, now: float) -> List[Intent]:
        raise NotImplementedError

    def on_receive(self, node: NodeState, message: Message, now: float) -> List[Intent]:
        raise NotImplementedError

    def on_timer(self, node: NodeState, key: Any, now: float) -> List[Intent]:
        return []


@dataclass(frozen=True)
class ProtocolParams:
    data_bits: int = 2000
    control_bits: int = 64
    ack_wait_s: float = 0.05
    max_retries: int = 2
    threshold: float = 0.05
    jitter_s: float = 0.001
    seed: int = 0

    @property
    def data_message_bits(self) -> int:
        # DATA carries the payload plus a meta-data header
        return self.data_bits + self.control_bits
