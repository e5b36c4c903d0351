"""Reference protocols: blind flooding and SPIN-style negotiation.

Both are sink-agnostic dissemination schemes; the sink takes part like any
other node (it is just never charged for energy) and records a delivery
the first time it obtains an event's data.
"""

from __future__ import annotations

import random
from typing import Dict, List, Set

from .core import (MULTICAST, Delivered, Message, MetaData, MsgKind, ProtocolBehavior,
                   Send, SetTimer, has_seen, mark_seen)


class _Jittered(ProtocolBehavior):
    """Relays wait a small random delay before retransmitting.

    Each node draws from its own generator, seeded from the run seed and the
    node id, so the event order is reproducible.
    """

    def __init__(self, topology, params):
        super().__init__(topology, params)
        self._rngs: Dict[int, random.Random] = {}

    def jitter(self, node_id: int) -> float:
        rng = self._rngs.get(node_id)
        if rng is None:
            rng = self._rngs[node_id] = random.Random(f"jitter-{self.params.seed}-{node_id}")
        return rng.uniform(0.0, self.params.jitter_s)


class FloodingProtocol(_Jittered):
    name = "flooding"

    def _data(self, node, meta):
        return Message(MsgKind.DATA, meta, self.params.data_message_bits, node.id)

    def on_event_sensed(self, node, meta, now):
        if not node.alive or has_seen(node, meta):
            return []
        mark_seen(node, meta)
        return [Send(self._data(node, meta))]

    def on_receive(self, node, message, now):
        if message.kind is not MsgKind.DATA or has_seen(node, message.meta):
            return []
        mark_seen(node, message.meta)
        out = [Delivered(message.meta)] if node.is_sink else []
        out.append(Send(self._data(node, message.meta), self.jitter(node.id)))
        return out


class SpinProtocol(_Jittered):
    """Three-step negotiation: broadcast ADV, unicast request (ACK kind), DATA.

    With ``multicast=True`` (the default) a holder collects requests for
    ``ack_wait_s`` and answers them with a single DATA addressed to every
    requester. With ``multicast=False`` each request gets its own unicast
    DATA, the point-to-point variant.
    """

    name = "spin"

    def __init__(self, topology, params, multicast: bool = True):
        super().__init__(topology, params)
        self.multicast = multicast
        self.requested: Dict[int, Set[MetaData]] = {}
        self.waiting: Dict[int, Dict[MetaData, List[int]]] = {}

    def _adv(self, node, meta):
        return Message(MsgKind.ADV, meta, self.params.control_bits, node.id)

    def _data(self, node, meta, requesters):
        bits = self.params.data_message_bits
        if len(requesters) == 1:
            return Message(MsgKind.DATA, meta, bits, node.id, requesters[0])
        return Message(MsgKind.DATA, meta, bits, node.id, MULTICAST, targets=tuple(requesters))

    def on_event_sensed(self, node, meta, now):
        if not node.alive or has_seen(node, meta):
            return []
        mark_seen(node, meta)
        return [Send(self._adv(node, meta))]

    def on_receive(self, node, message, now):
        meta = message.meta
        if message.kind is MsgKind.ADV:
            asked = self.requested.setdefault(node.id, set())
            if has_seen(node, meta) or meta in asked:
                return []
            asked.add(meta)
            req = Message(MsgKind.ACK, meta, self.params.control_bits, node.id, message.src)
            return [Send(req)]
        if message.kind is MsgKind.ACK:
            if not has_seen(node, meta):
                return []
            if not self.multicast:
                return [Send(self._data(node, meta, [message.src]))]
            table = self.waiting.setdefault(node.id, {})
            if meta in table:
                table[meta].append(message.src)
                return []
            table[meta] = [message.src]
            return [SetTimer(self.params.ack_wait_s, meta)]
        if has_seen(node, meta):
            return []
        mark_seen(node, meta)
        out = [Delivered(meta)] if node.is_sink else []
        out.append(Send(self._adv(node, meta), self.jitter(node.id)))
        return out

    def on_timer(self, node, key, now):
        requesters = self.waiting.get(node.id, {}).pop(key, None)
        if not requesters:
            return []
        return [Send(self._data(node, key, requesters))]
