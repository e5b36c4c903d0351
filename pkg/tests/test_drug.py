import pytest
from hypothesis import given, settings, strategies as st

from checks import (chain, check_drug_duplicates, check_drug_paths, check_drug_unicast,
                    check_threshold_gating, grid, records)
from drugsim.config import RunConfig
from drugsim.core import MetaData, MsgKind, NodeState, ProtocolParams, Send, SetTimer
from drugsim.drug import DrugProtocol, initialize_gradient, select_next_hop, should_ack
from drugsim.engine import Simulator, run
from drugsim.topology import (INFINITY, Position, bfs_hop_distance, build_adjacency,
                              build_network)


def test_gradient_on_chain():
    assert initialize_gradient(chain(2), 0) == {0: 0, 1: 1, 2: 2}


def test_gradient_sink_only():
    t = build_adjacency({0: Position(0, 0)}, 10)
    assert initialize_gradient(t, 0) == {0: 0}


def test_gradient_disconnected_is_infinite():
    t = build_adjacency({0: Position(0, 0), 1: Position(1000, 0)}, 150)
    assert initialize_gradient(t, 0)[1] == INFINITY


def test_gradient_matches_bfs_on_default_deployment():
    t = build_network(100, 1000, 1000, 150, seed=0)
    assert initialize_gradient(t, t.sink) == bfs_hop_distance(t, t.sink)


def test_equal_level_neighbours_keep_their_level():
    # triangle: both non-sink nodes are one hop from the sink
    t = build_adjacency({0: Position(0, 0), 1: Position(100, 0), 2: Position(50, 80)}, 150)
    assert initialize_gradient(t, 0) == {0: 0, 1: 1, 2: 1}


def test_every_node_broadcasts_once():
    t = build_network(60, 1000, 1000, 150, seed=5)
    senders = []
    values = initialize_gradient(t, t.sink, broadcasts=senders)
    assert sorted(senders) == sorted(i for i, v in values.items() if v != INFINITY)


def test_unknown_sink():
    with pytest.raises(KeyError):
        initialize_gradient(chain(2), 42)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 120), st.floats(60, 300))
def test_gradient_equivalence(seed, n, radio_range):
    t = build_network(n, 1000, 1000, radio_range, seed)
    assert initialize_gradient(t, t.sink) == bfs_hop_distance(t, t.sink)


@pytest.mark.parametrize("own_v,adv_v,energy,expected", [
    (2, 3, 0.4, True),
    (3, 3, 0.4, False),
    (2, 3, 0.04, False),
    (INFINITY, INFINITY, 0.4, False),
    (INFINITY, 3, 0.4, False),
    (2, 3, 0.05, True),
])
def test_should_ack(own_v, adv_v, energy, expected):
    assert should_ack(own_v, adv_v, energy, 0.05) is expected


B, C = 11, 12


@pytest.mark.parametrize("acks,expected", [
    ([(B, 1, 0.3), (C, 2, 0.5)], B),
    ([(B, 1, 0.3), (C, 1, 0.5)], C),
    ([(B, 1, 0.3), (C, 1, 0.3)], B),
    ([(C, 1, 0.3), (B, 1, 0.3)], B),
    ([], None),
])
def test_select_next_hop(acks, expected):
    assert select_next_hop(acks) == expected


def _proto():
    return DrugProtocol(chain(2), ProtocolParams())


def test_sensing_emits_one_adv_and_timer():
    p = _proto()
    n = NodeState(2, Position(200, 0), 0.5, gradient_value=2)
    out = p.on_event_sensed(n, MetaData(2, 0), 0.0)
    sends = [i for i in out if isinstance(i, Send)]
    assert len(sends) == 1 and sends[0].message.kind is MsgKind.ADV
    assert sends[0].message.is_broadcast
    assert any(isinstance(i, SetTimer) for i in out)
    assert p.on_event_sensed(n, MetaData(2, 0), 0.0) == []


def test_origin_below_threshold_still_advertises():
    p = _proto()
    n = NodeState(2, Position(200, 0), 0.01, gradient_value=2)
    out = p.on_event_sensed(n, MetaData(2, 0), 0.0)
    assert any(isinstance(i, Send) and i.message.kind is MsgKind.ADV for i in out)


def _chain_cfg(**kw):
    base = dict(node_count=2, event_rate_hz=0, duration_s=10, snapshot_s=1, protocol="drug")
    base.update(kw)
    return RunConfig(**base)


def test_three_node_chain_trace():
    res = run(_chain_cfg(), topology=chain(2), senses=[(1.0, 2)])
    kinds = [(r.kind, r.src, r.dst) for r in res.log if r.meta_origin == 2]
    assert kinds == [
        ("ADV", 2, -1), ("ACK", 1, 2), ("DATA", 2, 1),
        ("ADV", 1, -1), ("ACK", 0, 1), ("DATA", 1, 0),
    ]
    assert MetaData(2, 0) in res.metrics.delivered
    assert len(records(res, "DATA")) == 2


def test_dead_end_drops_after_retries():
    sim = Simulator(_chain_cfg(), topology=chain(2), senses=[(1.0, 2)])
    sim.nodes[1].residual_energy = 0.04
    res = sim.run()
    advs = [r for r in res.log if r.kind == "ADV" and r.meta_origin == 2]
    assert len(advs) == 1 + res.config.max_retries
    assert not records(res, "DATA")
    assert not res.metrics.delivered
    assert [(n, m) for _, n, m in res.protocol.dropped] == [(2, MetaData(2, 0))]


def test_sink_does_not_readvertise():
    res = run(_chain_cfg(), topology=chain(1), senses=[(1.0, 1)])
    assert MetaData(1, 0) in res.metrics.delivered
    assert not [r for r in res.log if r.src == 0 and r.kind == "ADV" and r.meta_origin >= 0]


def test_energy_tiebreak_spreads_load():
    # diamond: two equal-gradient relays, the richer one is picked
    pos = {0: Position(0, 0), 1: Position(100, 60), 2: Position(100, -60), 3: Position(200, 0)}
    t = build_adjacency(pos, 150, sink=0)
    sim = Simulator(_chain_cfg(node_count=3), topology=t, senses=[(1.0, 3)])
    sim.nodes[1].residual_energy = 0.3
    res = sim.run()
    first = records(res, "DATA")[0]
    assert (first.src, first.dst) == (3, 2)


@pytest.mark.parametrize("topo", [chain(6), grid()], ids=["chain", "grid"])
def test_protocol_invariants_on_fixtures(topo):
    senders = [i for i in topo.node_ids if i != topo.sink]
    senses = [(0.5 * k + 0.1, senders[k % len(senders)]) for k in range(60)]
    res = run(_chain_cfg(node_count=len(senders), initial_energy_j=0.08,
                         threshold_j=0.05, duration_s=40), topology=topo, senses=senses)
    check_drug_paths(res)
    check_drug_unicast(res)
    check_threshold_gating(res, 0.05)
    check_drug_duplicates(res)


def test_threshold_starvation_blocks_relaying():
    # with little headroom above the threshold, relays stop ACKing and delivery falls
    res = run(RunConfig(protocol="drug", seed=3, initial_energy_j=0.06, threshold_j=0.05,
                        duration_s=300))
    check_threshold_gating(res, 0.05)
    starved = {r.src for r in records(res, "ACK")}
    assert starved
    assert len(res.metrics.delivered) < len(res.metrics.generated)
