"""DRUG: hop-gradient initialization plus negotiated unicast forwarding.

Set-up floods a hop count outward from the sink. Afterwards a node holding
data broadcasts an ADV with its gradient value; neighbors that are closer
to the sink and still above the participation threshold answer with an
ACK; after ``ack_wait_s`` the holder unicasts DATA to the best responder,
which repeats the cycle until the sink is reached.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (Delivered, Message, MetaData, MsgKind, NodeState,
                   ProtocolBehavior, Send, SetTimer, has_seen, mark_seen)
from .topology import INFINITY, Topology


def initialize_gradient(topology: Topology, sink: int,
                        participants: Optional[Iterable[int]] = None,
                        broadcasts: Optional[list] = None) -> Dict[int, float]:
    """Assign every node its hop distance to ``sink`` by queue-driven ADV flooding.

    Each dequeued node broadcasts its value; a neighbor adopts ``V[X] + 1``
    when that improves on its own value and is then queued.
    Nodes outside ``participants`` (e.g. dead ones) neither send nor receive.
    The sender of every broadcast is appended to ``broadcasts`` if given.
    """
    if sink not in topology.positions:
        raise KeyError(f"unknown sink id {sink}")
    members = set(topology.positions) if participants is None else set(participants)
    members.add(sink)
    value = {i: INFINITY for i in topology.positions}
    value[sink] = 0
    queue = deque([sink])
    while queue:
        x = queue.popleft()
        if broadcasts is not None:
            broadcasts.append(x)
        vx = value[x]
        for y in sorted(topology.adjacency[x]):
            if y not in members:
                continue
            if value[y] > vx + 1:
                value[y] = vx + 1
                queue.append(y)
    return value


def should_ack(own_v: float, adv_v: float, own_energy: float, threshold: float) -> bool:
    return own_v < adv_v and own_energy >= threshold


def select_next_hop(acks: Sequence[Tuple[int, float, float]]) -> Optional[int]:
    """Pick among ``(node, gradient, residual_energy)`` responders.

    Lowest gradient first, then most residual energy, then lowest id.
    Returns None when nobody answered.
    """
    if not acks:
        return None
    best = min(acks, key=lambda a: (a[1], -a[2], a[0]))
    return best[0]


@dataclass
class Attempt:
    acks: List[Tuple[int, float, float]] = field(default_factory=list)
    retries: int = 0
    round: int = 0


class DrugProtocol(ProtocolBehavior):
    name = "drug"

    def __init__(self, topology, params):
        super().__init__(topology, params)
        self.pending: Dict[int, Dict[MetaData, Attempt]] = {}
        self.dropped: List[Tuple[float, int, MetaData]] = []

    def initialize(self, nodes, now):
        senders = []
        alive = [i for i, n in nodes.items() if n.alive]
        values = initialize_gradient(self.topology, self.topology.sink, alive, senders)
        for i, n in nodes.items():
            n.gradient_value = values[i]
        return [Message(MsgKind.ADV, None, self.params.control_bits, x,
                        gradient=values[x]) for x in senders]

    def _advertise(self, node: NodeState, meta: MetaData, attempt: Attempt):
        adv = Message(MsgKind.ADV, meta, self.params.control_bits, node.id,
                      gradient=node.gradient_value)
        return [Send(adv), SetTimer(self.params.ack_wait_s, (meta, attempt.round))]

    def _start(self, node: NodeState, meta: MetaData):
        table = self.pending.setdefault(node.id, {})
        if meta in table:
            return []
        attempt = table[meta] = Attempt()
        return self._advertise(node, meta, attempt)

    def on_event_sensed(self, node, meta, now):
        if not node.alive or has_seen(node, meta):
            return []
        mark_seen(node, meta)
        return self._start(node, meta)

    def on_receive(self, node, message, now):
        kind = message.kind
        if kind is MsgKind.ADV:
            if message.meta is None:
                return []
            if (should_ack(node.gradient_value, message.gradient,
                           node.residual_energy, self.params.threshold)
                    and not has_seen(node, message.meta)):
                ack = Message(MsgKind.ACK, message.meta, self.params.control_bits,
                              node.id, message.src, gradient=node.gradient_value,
                              energy=node.residual_energy)
                return [Send(ack)]
            return []
        if kind is MsgKind.ACK:
            attempt = self.pending.get(node.id, {}).get(message.meta)
            if attempt is not None and message.gradient < node.gradient_value:
                attempt.acks.append((message.src, message.gradient, message.energy))
            return []
        # DATA
        meta = message.meta
        if has_seen(node, meta):
            return []
        mark_seen(node, meta)
        if node.is_sink:
            return [Delivered(meta)]
        return self._start(node, meta)

    def on_timer(self, node, key, now):
        meta, round_ = key
        table = self.pending.get(node.id, {})
        attempt = table.get(meta)
        if attempt is None or attempt.round != round_:
            return []
        nxt = select_next_hop(attempt.acks)
        if nxt is not None:
            del table[meta]
            data = Message(MsgKind.DATA, meta, self.params.data_message_bits,
                           node.id, nxt, gradient=node.gradient_value)
            return [Send(data)]
        if attempt.retries < self.params.max_retries:
            attempt.retries += 1
            attempt.round += 1
            attempt.acks.clear()
            return self._advertise(node, meta, attempt)
        del table[meta]
        self.dropped.append((now, node.id, meta))
        return []
