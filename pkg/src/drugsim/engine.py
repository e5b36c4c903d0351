"""Deterministic discrete-event engine.

Events are ordered by ``(time, seq)`` where ``seq`` is a counter assigned
when the event is scheduled, so simultaneous events run in scheduling
order. Energy is charged when a message is transmitted: the sender pays
the transmit cost (at ``radio_range`` for broadcasts, at the actual
distance for unicasts) and every receiver alive at that instant pays the
receive cost. Receivers process the message ``per_hop_latency_s`` later,
provided they are still alive.
"""

from __future__ import annotations

import bisect
import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .baselines import FloodingProtocol, SpinProtocol
from .config import RunConfig
from .core import (BROADCAST, MULTICAST, Delivered, EngineError, Message, MetaData, NodeState,
                   Send, SetTimer, charge_receive, charge_send, make_sink)
from .drug import DrugProtocol
from .topology import Topology, build_network

PROTOCOL_CLASSES = {
    "drug": DrugProtocol,
    "spin": SpinProtocol,
    "flooding": FloodingProtocol,
}

SENSE = "SENSE"
DELIVER_MSG = "DELIVER_MSG"
TIMER = "TIMER"
SNAPSHOT = "SNAPSHOT"
TRAFFIC = "TRAFFIC"


@dataclass
class LogRecord:
    time_s: float
    kind: str
    src: int
    dst: object  # node id, -1 for broadcast, "a;b;c" for multicast
    meta_origin: int
    meta_seq: int
    bits: int
    tx_cost_J: float
    rx_cost_total_J: float
    message: Message = field(repr=False, compare=False)
    receivers: Tuple[int, ...] = field(default=(), repr=False, compare=False)

    CSV_FIELDS = ("time_s", "kind", "src", "dst", "meta_origin", "meta_seq",
                  "bits", "tx_cost_J", "rx_cost_total_J")

    def row(self):
        return [getattr(self, f) for f in self.CSV_FIELDS]


@dataclass
class Snapshot:
    time_s: float
    residual_j: float
    generated: int
    delivered: int
    dead: int
    log_len: int


@dataclass
class MetricsSeries:
    protocol: str
    seed: int
    node_count: int
    initial_energy: float
    snapshots: List[Snapshot] = field(default_factory=list)
    deaths: List[Tuple[float, int]] = field(default_factory=list)
    generated: List[Tuple[float, MetaData]] = field(default_factory=list)
    delivered: Dict[MetaData, float] = field(default_factory=dict)


@dataclass
class RunResult:
    config: RunConfig
    topology: Topology
    metrics: MetricsSeries
    log: List[LogRecord]
    nodes: Dict[int, NodeState]
    gradient: Dict[int, float]
    protocol: object


class Simulator:
    """One run of one protocol over one topology.

    ``senses`` replaces the random traffic generator with an explicit list
    of ``(time, node_id)`` sensing events.
    """

    def __init__(self, config: RunConfig, topology: Optional[Topology] = None,
                 senses: Optional[Iterable[Tuple[float, int]]] = None):
        self.config = config
        if topology is None:
            topology = build_network(config.node_count, config.area_w_m, config.area_h_m,
                                     config.radio_range_m, config.seed, config.sink)
        if topology.sink is None:
            raise EngineError("topology has no sink")
        self.topology = topology
        self.model = config.energy_model
        self.sink = topology.sink
        self.nodes: Dict[int, NodeState] = {}
        for i in topology.node_ids:
            pos = topology.positions[i]
            if i == self.sink:
                self.nodes[i] = make_sink(i, pos)
            else:
                self.nodes[i] = NodeState(i, pos, self.model.initial_energy)
        self.sensors = [i for i in topology.node_ids if i != self.sink]
        self.alive_sensors = len(self.sensors)
        self.protocol = PROTOCOL_CLASSES[config.protocol](topology, config.protocol_params)
        self.metrics = MetricsSeries(config.protocol, config.seed, len(self.sensors),
                                     self.model.initial_energy)
        self.log: List[LogRecord] = []
        self.now = 0.0
        self._queue: list = []
        self._seq = itertools.count()
        self._event_seq: Dict[int, int] = {}
        self._senses = None if senses is None else sorted(senses)
        self._traffic_rng = random.Random(f"traffic-{config.seed}")
        self._traffic_k = 0
        self._snapshot_k = 0
        self.gradient: Dict[int, float] = {}

    # -- engine primitives -------------------------------------------------

    def schedule(self, time: float, kind: str, payload=None) -> None:
        if time < self.now:
            raise EngineError(f"cannot schedule {kind} at {time} before now={self.now}")
        heapq.heappush(self._queue, (time, next(self._seq), kind, payload))

    def next(self):
        """Pop the next event, or None when the queue is empty."""
        if not self._queue:
            return None
        return heapq.heappop(self._queue)

    # -- energy and transmission ---------------------------------------------

    def _note_death(self, node: NodeState) -> None:
        if not node.is_sink:
            self.alive_sensors -= 1
            self.metrics.deaths.append((self.now, node.id))

    def transmit(self, sender_id: int, msg: Message, deliver: bool = True) -> None:
        node = self.nodes[sender_id]
        if not node.alive:
            return
        topo = self.topology
        if msg.dst == BROADCAST:
            distance = topo.radio_range
            receivers = tuple(j for j in sorted(topo.adjacency[sender_id]) if self.nodes[j].alive)
        elif msg.dst == MULTICAST:
            # one transmission, amplified to reach the farthest addressee
            for j in msg.targets:
                if j not in topo.adjacency[sender_id]:
                    raise EngineError(f"{sender_id} cannot reach {j} directly")
            distance = max(topo.distance(sender_id, j) for j in msg.targets)
            receivers = tuple(j for j in msg.targets if self.nodes[j].alive)
        else:
            if msg.dst not in topo.adjacency[sender_id]:
                raise EngineError(f"{sender_id} cannot reach {msg.dst} directly")
            distance = topo.distance(sender_id, msg.dst)
            receivers = (msg.dst,) if self.nodes[msg.dst].alive else ()
        now = self.now
        tx = charge_send(node, msg, distance, self.model, now)
        if not node.alive:
            self._note_death(node)
        rx_total = 0.0
        for j in receivers:
            rnode = self.nodes[j]
            rx_total += charge_receive(rnode, msg, self.model, now)
            if not rnode.alive:
                self._note_death(rnode)
        meta = msg.meta
        dst = ";".join(map(str, msg.targets)) if msg.dst == MULTICAST else msg.dst
        self.log.append(LogRecord(
            now, msg.kind.value, sender_id, dst,
            -1 if meta is None else meta.origin,
            -1 if meta is None else meta.event_seq,
            msg.payload_bits, tx, rx_total, msg, receivers))
        if deliver and receivers:
            self.schedule(now + self.config.per_hop_latency_s, DELIVER_MSG, (msg, receivers))

    def apply(self, node_id: int, intents) -> None:
        for intent in intents:
            if isinstance(intent, Send):
                if intent.delay > 0:
                    self.schedule(self.now + intent.delay, TIMER, ("send", node_id, intent.message))
                else:
                    self.transmit(node_id, intent.message)
            elif isinstance(intent, SetTimer):
                self.schedule(self.now + intent.delay, TIMER, ("proto", node_id, intent.key))
            elif isinstance(intent, Delivered):
                self.metrics.delivered.setdefault(intent.meta, self.now)
            else:
                raise EngineError(f"unknown intent {intent!r}")

    # -- event handlers --------------------------------------------------------

    def _initialize(self) -> None:
        for msg in self.protocol.initialize(self.nodes, self.now):
            self.transmit(msg.src, msg, deliver=False)
        self.gradient = {i: n.gradient_value for i, n in self.nodes.items()}

    def _snapshot(self) -> None:
        residual = math.fsum(self.nodes[i].residual_energy for i in self.sensors)
        m = self.metrics
        m.snapshots.append(Snapshot(self.now, residual, len(m.generated), len(m.delivered),
                                    len(m.deaths), len(self.log)))

    def _sense(self, node_id: int) -> None:
        seq = self._event_seq.get(node_id, 0)
        self._event_seq[node_id] = seq + 1
        meta = MetaData(node_id, seq)
        self.metrics.generated.append((self.now, meta))
        node = self.nodes[node_id]
        if node.alive:
            self.apply(node_id, self.protocol.on_event_sensed(node, meta, self.now))

    def _traffic_time(self, k: int) -> float:
        return k / self.config.event_rate_hz

    def dispatch(self, kind: str, payload) -> None:
        if kind == DELIVER_MSG:
            msg, receivers = payload
            for j in receivers:
                node = self.nodes[j]
                if node.alive:
                    self.apply(j, self.protocol.on_receive(node, msg, self.now))
        elif kind == TIMER:
            what = payload[0]
            if what == "send":
                self.transmit(payload[1], payload[2])
            elif what == "proto":
                node = self.nodes[payload[1]]
                if node.alive:
                    self.apply(node.id, self.protocol.on_timer(node, payload[2], self.now))
            elif what == "reinit":
                self._initialize()
                self.schedule(self.now + self.config.reinit_period_s, TIMER, ("reinit",))
        elif kind == SENSE:
            self._sense(payload)
        elif kind == TRAFFIC:
            origin = self.sensors[self._traffic_rng.randrange(len(self.sensors))]
            self._sense(origin)
            self._traffic_k += 1
            t = self._traffic_time(self._traffic_k + 1)
            if t <= self.config.duration_s:
                self.schedule(t, TRAFFIC)
        elif kind == SNAPSHOT:
            self._snapshot()
            self._schedule_snapshot()
        else:
            raise EngineError(f"unknown event kind {kind}")

    def _schedule_snapshot(self) -> None:
        self._snapshot_k += 1
        t = self._snapshot_k * self.config.snapshot_s
        if t <= self.config.duration_s:
            self.schedule(t, SNAPSHOT)

    def run(self) -> RunResult:
        cfg = self.config
        self._snapshot()
        self._schedule_snapshot()
        self._initialize()
        if cfg.reinit_period_s > 0 and cfg.reinit_period_s <= cfg.duration_s:
            self.schedule(cfg.reinit_period_s, TIMER, ("reinit",))
        if self._senses is not None:
            for t, node_id in self._senses:
                self.schedule(t, SENSE, node_id)
        elif cfg.event_rate_hz > 0 and self._traffic_time(1) <= cfg.duration_s:
            self.schedule(self._traffic_time(1), TRAFFIC)

        # Once every sensor is dead only arrivals (still counted as generated)
        # and snapshots remain, so the loop winds down on its own.
        while self._queue and self._queue[0][0] <= cfg.duration_s:
            time, _, kind, payload = self.next()
            self.now = time
            self.dispatch(kind, payload)
        return RunResult(cfg, self.topology, self.metrics, self.log, self.nodes,
                         self.gradient, self.protocol)


def run(config: RunConfig, topology: Optional[Topology] = None,
        senses: Optional[Iterable[Tuple[float, int]]] = None) -> RunResult:
    return Simulator(config, topology, senses).run()


def first_death_time(result: RunResult) -> Optional[float]:
    deaths = result.metrics.deaths
    return deaths[0][0] if deaths else None


def delivery_ratio(result: RunResult, t: float) -> float:
    m = result.metrics
    generated = sum(1 for tg, _ in m.generated if tg <= t)
    if generated == 0:
        return 1.0
    delivered = sum(1 for td in m.delivered.values() if td <= t)
    return delivered / generated


def residual_energy_total(result: RunResult, t: float) -> float:
    """Total sensor energy at the latest snapshot taken no later than ``t``."""
    snaps = result.metrics.snapshots
    idx = bisect.bisect_right([s.time_s for s in snaps], t) - 1
    if idx < 0:
        raise ValueError(f"t={t} precedes the first snapshot")
    return snaps[idx].residual_j


def energy_consumed(result: RunResult) -> float:
    return math.fsum(r.tx_cost_J + r.rx_cost_total_J for r in result.log)
