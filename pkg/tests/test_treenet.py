import itertools
import math

import pytest

from symfun.bounds import fooling_oracle
from symfun.errors import DomainError, NetworkError, ProtocolError
from symfun.funckernel import FunctionSpec
from symfun.network import Network, path_graph, star_graph
from symfun.treenet import (
    TreeNetwork,
    TreeProtocol,
    edge_complexity,
    edge_components,
    run_tree_protocol,
    sweep_assignments,
    worst_case_edge_bits,
)
from symfun.twonode import Event, Transcript, TwoNodeInstance, run_two_node

from oracles import ceil_bits


def tree(net, root=None):
    return TreeNetwork.from_network(net, root)


def binary_tree6():
    return tree(Network({i: 2 for i in range(6)}, ((0, 1), (0, 2), (1, 3), (1, 4), (2, 5))))


def small_family():
    yield tree(path_graph([2, 2, 2], 1))
    yield tree(path_graph([2, 2, 2, 2]))
    yield tree(star_graph(3))
    yield tree(star_graph(4))
    yield binary_tree6()
    yield tree(path_graph([3, 2, 4], 1))
    yield tree(Network({0: 3, 1: 2, 2: 3, 3: 2}, ((0, 1), (1, 2), (1, 3))))


def test_edge_components():
    assert edge_components(tree(path_graph([2, 2, 2], 1)), (1, 2))[0] == {1}
    assert edge_components(tree(star_graph(4)), (0, 1))[0] == {1}
    assert edge_components(tree(path_graph([2] * 4, 1)), (2, 3))[0] == {1, 2}
    with pytest.raises(NetworkError):
        edge_components(tree(star_graph(4)), (1, 2))


def test_edge_components_by_max_sum_not_size():
    t = tree(path_graph([5, 2, 2], 1))
    # {1} has max sum 4 > {2, 3} with max sum 2
    assert edge_components(t, (1, 2))[0] == {2, 3}


def test_edge_complexity_star():
    rep = edge_complexity(tree(star_graph(4)), FunctionSpec.threshold(2), (0, 1))
    assert rep.fooling_size == 4
    assert rep.upper_bits_per_instance == 2.0


def test_edge_complexity_non_binary_path():
    t = tree(path_graph([3, 2, 4], 1))
    rep = edge_complexity(t, FunctionSpec.threshold(3), (1, 2))
    # two-node reduction: side {1} has max 2, the rest max 4
    assert rep.fooling_size == fooling_oracle(3, 2, 4) == 6
    assert rep.case_tag == "c"


def test_edge_complexity_zero_threshold():
    t = tree(path_graph([3, 2, 4], 1))
    for e in t.edges:
        assert edge_complexity(t, FunctionSpec.threshold(0), e).upper_bits_per_instance == 0


def test_two_node_tree_matches_two_node_runner():
    t = tree(Network({1: 3, 2: 4}, ((1, 2),)), root=2)
    spec = FunctionSpec.threshold(3)
    x1, x2 = (2, 0, 1), (1, 3, 0)
    edges, decoded = run_tree_protocol(t, spec, 3, {1: x1, 2: x2})
    transcript, f1, f2 = run_two_node(TwoNodeInstance(2, 3, spec, 3, starter=1), x1, x2)
    assert edges[(1, 2)] == transcript
    assert decoded == {1: f1, 2: f2}


def test_star_all_zero():
    t = tree(star_graph(4))
    edges, decoded = run_tree_protocol(t, FunctionSpec.threshold(2), 4, {v: (0,) * 4 for v in t.nodes})
    assert all(f == (0, 0, 0, 0) for f in decoded.values())
    assert all(tr.total <= 8 for tr in edges.values())


def test_non_binary_path_run():
    t = tree(path_graph([3, 2, 4], 1))
    assignment = {1: (2, 0), 2: (1, 1), 3: (0, 3)}
    _, decoded = run_tree_protocol(t, FunctionSpec.threshold(3), 2, assignment)
    assert decoded == {1: (1, 1), 2: (1, 1), 3: (1, 1)}


def test_path3_binary_worst_case():
    accounts = worst_case_edge_bits(tree(path_graph([2, 2, 2], 1)), FunctionSpec.threshold(2), 1)
    assert {e: a.total_bits for e, a in accounts.items()} == {(1, 2): 2, (2, 3): 2}
    for a in accounts.values():
        assert a.total_bits == a.up_bits + a.down_bits
        assert a.bound_lower == a.bound_upper == 2.0


def test_constant_tree_costs_nothing():
    t = tree(path_graph([2, 3, 2]))
    accounts = worst_case_edge_bits(t, FunctionSpec.threshold(6), 2)
    assert all(a.total_bits == 0 for a in accounts.values())


@pytest.mark.parametrize("t", list(small_family()), ids=lambda t: f"n{t.n}-{len(t.edges)}e")
def test_per_edge_optimality_and_zero_error(t):
    total = t.max_sum()
    for theta in range(0, total + 2):
        spec = FunctionSpec.threshold(theta)
        for B in (1, 2, 3):
            if math.prod(t.alphabets.values()) ** B > 2**13:
                continue
            stats = sweep_assignments(TreeProtocol(t, spec, B))
            assert stats.errors == 0
            for e in t.edges:
                side, _ = edge_components(t, e)
                s_e = t.max_sum(side)
                size = fooling_oracle(theta, s_e, total - s_e) if 1 <= theta <= total else 1
                assert stats.worst[e][0] == ceil_bits(size, B), (theta, B, e)


@pytest.mark.parametrize("t", list(small_family()), ids=lambda t: f"n{t.n}-{len(t.edges)}e")
def test_root_invariance(t):
    spec = FunctionSpec.threshold(max(1, t.max_sum() // 2))
    B = 2 if math.prod(t.alphabets.values()) ** 2 <= 2**12 else 1
    reference = None
    for r in t.nodes:
        stats = sweep_assignments(TreeProtocol(t.rerooted(r), spec, B))
        assert stats.errors == 0
        worst = {e: w[0] for e, w in stats.worst.items()}
        reference = reference or worst
        assert worst == reference


def test_schedule_checker_rejects_early_codeword():
    t = tree(path_graph([2, 2, 2], 1))
    proto = TreeProtocol(t, FunctionSpec.threshold(2), 1)
    run = proto.run({1: (1,), 2: (0,), 3: (1,)})
    proto.check_schedule(run.transcript)
    events = list(run.transcript.events)
    bad = Transcript((events[1], events[0], *events[2:]))
    with pytest.raises(ProtocolError):
        proto.check_schedule(bad)
    with pytest.raises(ProtocolError):
        proto.check_schedule(Transcript((*events, Event(3, 2, "0", "forward"))))


def test_reply_only_after_own_edge_resolved():
    t = tree(path_graph([2, 2, 2], 1))
    proto = TreeProtocol(t, FunctionSpec.threshold(2), 1)
    events = list(proto.run({1: (0,), 2: (1,), 3: (0,)}).transcript.events)
    downs = [e for e in events if e.phase == "reply"]
    ups = [e for e in events if e.phase == "forward"]
    with pytest.raises(ProtocolError):
        proto.check_schedule(Transcript((*ups, downs[1], downs[0])))


def test_assignment_validation():
    t = tree(path_graph([2, 2]))
    with pytest.raises(DomainError):
        run_tree_protocol(t, FunctionSpec.threshold(1), 1, {0: (2,), 1: (0,)})


def test_cyclic_network_rejected():
    with pytest.raises(NetworkError):
        TreeNetwork({1: 2, 2: 2, 3: 2}, ((1, 2), (2, 3), (1, 3)))


def test_interval_on_tree_runs_zero_error():
    t = tree(path_graph([2, 2, 2, 2]))
    stats = sweep_assignments(TreeProtocol(t, FunctionSpec.interval(1, 2), 2))
    assert stats.errors == 0


def test_edge_transcripts_cover_all_edges():
    t = binary_tree6()
    proto = TreeProtocol(t, FunctionSpec.threshold(3), 2)
    assignment = dict(zip(t.nodes, itertools.repeat((1, 0))))
    run = proto.run(assignment)
    assert set(run.edge_transcripts()) == set(t.edges)
    assert sum(tr.total for tr in run.edge_transcripts().values()) == run.transcript.total
