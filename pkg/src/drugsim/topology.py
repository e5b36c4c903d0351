"""Node deployment and unit-disk connectivity.

Random deployments use :class:`random.Random` (Mersenne Twister, MT19937)
seeded with the integer run seed, drawing ``x`` then ``y`` for each node in
id order. That generator and draw order are part of the reproducibility
contract: the same ``(node_count, width, height, seed)`` always yields the
same positions.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Optional

INFINITY = math.inf


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Topology:
    positions: Mapping[int, Position]
    radio_range: float
    adjacency: Mapping[int, FrozenSet[int]]
    sink: Optional[int] = None
    _dist: Dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def node_ids(self):
        return sorted(self.positions)

    def distance(self, a: int, b: int) -> float:
        key = (a, b) if a < b else (b, a)
        d = self._dist.get(key)
        if d is None:
            d = self.positions[a].distance(self.positions[b])
            self._dist[key] = d
        return d

    def neighbors(self, node: int) -> FrozenSet[int]:
        return self.adjacency[node]


def generate_deployment(node_count: int, width: float, height: float, seed: int) -> Dict[int, Position]:
    if node_count < 1:
        raise ConfigError("node_count must be at least 1")
    if not (width > 0 and height > 0):
        raise ConfigError("deployment area must have positive width and height")
    rng = random.Random(seed)
    positions = {}
    for i in range(node_count):
        x = rng.uniform(0.0, width)
        y = rng.uniform(0.0, height)
        positions[i] = Position(x, y)
    return positions


def build_adjacency(positions: Mapping[int, Position], radio_range: float,
                    sink: Optional[int] = None) -> Topology:
    """Unit-disk graph: i and j are neighbors iff their distance is within range."""
    if not radio_range > 0:
        raise ConfigError("radio_range must be positive")
    ids = sorted(positions)
    nbrs = {i: set() for i in ids}
    dist = {}
    for a_idx, a in enumerate(ids):
        pa = positions[a]
        for b in ids[a_idx + 1:]:
            d = pa.distance(positions[b])
            if d <= radio_range:
                nbrs[a].add(b)
                nbrs[b].add(a)
                dist[(a, b) if a < b else (b, a)] = d
    adjacency = {i: frozenset(s) for i, s in nbrs.items()}
    return Topology(dict(positions), radio_range, adjacency, sink, dist)


def bfs_hop_distance(topology: Topology, sink: int) -> Dict[int, float]:
    """Breadth-first hop count from ``sink``; unreachable nodes get ``INFINITY``."""
    if sink not in topology.positions:
        raise KeyError(f"unknown sink id {sink}")
    dist = {i: INFINITY for i in topology.positions}
    dist[sink] = 0
    frontier = deque([sink])
    while frontier:
        u = frontier.popleft()
        for v in topology.adjacency[u]:
            if dist[v] == INFINITY:
                dist[v] = dist[u] + 1
                frontier.append(v)
    return dist


def sink_position(placement: str, width: float, height: float) -> Position:
    """Resolve a sink placement: ``center``, ``corner`` or ``"x,y"``."""
    placement = placement.strip().lower()
    if placement == "center":
        return Position(width / 2.0, height / 2.0)
    if placement == "corner":
        return Position(0.0, 0.0)
    try:
        xs, ys = placement.split(",")
        return Position(float(xs), float(ys))
    except ValueError:
        raise ConfigError(f"sink: expected 'center', 'corner' or 'x,y', got {placement!r}") from None


def build_network(node_count: int, width: float, height: float, radio_range: float,
                  seed: int, sink: str = "center") -> Topology:
    """Random sensor deployment plus a dedicated sink with id ``node_count``."""
    positions = generate_deployment(node_count, width, height, seed)
    sink_id = node_count
    positions[sink_id] = sink_position(sink, width, height)
    return build_adjacency(positions, radio_range, sink=sink_id)


def line_topology(n_nodes: int, spacing: float, radio_range: float) -> Topology:
    """Nodes 0..n_nodes-1 on the x axis; node 0 is the sink."""
    positions = {i: Position(i * spacing, 0.0) for i in range(n_nodes)}
    return build_adjacency(positions, radio_range, sink=0)


def dump_deployment(topology: Topology, path) -> None:
    with open(path, "w") as fh:
        sink = -1 if topology.sink is None else topology.sink
        fh.write(f"# sink {sink} range {topology.radio_range!r}\n")
        for i in topology.node_ids:
            p = topology.positions[i]
            fh.write(f"{i} {p.x!r} {p.y!r}\n")


def load_deployment(path) -> Topology:
    sink = None
    radio_range = None
    positions = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 4 and parts[0] == "sink" and parts[2] == "range":
                    sink = int(parts[1])
                    radio_range = float(parts[3])
                continue
            try:
                i, x, y = line.split()
                positions[int(i)] = Position(float(x), float(y))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: expected 'id x y'") from None
    if radio_range is None:
        raise ConfigError(f"{path}: missing '# sink <id> range <r>' header")
    if sink is not None and sink < 0:
        sink = None
    return build_adjacency(positions, radio_range, sink=sink)
