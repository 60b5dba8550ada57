import math

import numpy as np
import pytest

from beepnet import engine as E
from beepnet import verify
from beepnet.engine import EngineConfig, Observation, WakeupSchedule
from beepnet.protocols import COMPETING, INACTIVE, MIS, Alg1, Alg4
from beepnet.topology import LBScenario, Graph, make_clique, make_gnp, make_lb_case1, make_path

P5 = make_path(5)
TRI = make_clique(3)


def test_is_independent_examples():
    assert verify.is_independent(P5, [])
    assert not verify.is_independent(P5, [1, 2])
    assert verify.is_independent(P5, [0, 2, 4])


def test_is_mis_examples():
    assert verify.is_mis(P5, [0, 2, 4])
    assert not verify.is_mis(P5, [0, 4])
    assert all(verify.is_mis(TRI, [u]) for u in range(3))
    assert not verify.is_mis(TRI, [])


@pytest.mark.parametrize("fn", [verify.is_mis, verify.is_independent])
def test_out_of_range_nodes(fn):
    with pytest.raises(ValueError):
        fn(P5, [5])
    with pytest.raises(ValueError):
        fn(P5, [-1])


def test_stable_configuration_examples():
    st = [MIS, INACTIVE, MIS, INACTIVE, MIS]
    assert verify.is_stable_configuration(P5, st)
    assert verify.is_stable_configuration(P5, ["MIS", "INACTIVE", "MIS", "INACTIVE", "MIS"])
    assert not verify.is_stable_configuration(P5, [MIS, MIS, INACTIVE, MIS, INACTIVE])
    assert not verify.is_stable_configuration(P5, [MIS, INACTIVE, COMPETING, INACTIVE, MIS])
    with pytest.raises(ValueError):
        verify.is_stable_configuration(P5, [MIS])


def test_convergence_round_alg4_single_node():
    g = Graph.from_edges(1, [])
    st = E.init(g, Alg4(), WakeupSchedule.all_at(1), EngineConfig())
    trace, res = E.run(st, 50)
    assert verify.convergence_round(trace, g) == 7
    # the per-round list form gives the same answer
    assert verify.convergence_round(list(trace), g) == 7
    assert res.convergence_round <= res.horizon


def test_convergence_round_none_when_oscillating():
    # two adjacent nodes that never settle: alg1 stopped mid-run
    g = make_clique(2)
    st = E.init(g, Alg1(2, 1), WakeupSchedule.all_at(2), EngineConfig())
    trace, _ = E.run(st, 2)
    assert verify.convergence_round(trace, g) is None
    assert verify.convergence_round([], g) is None


def test_safety_counts_on_crafted_trace():
    # both ends of an edge hold MIS for 100 rounds, then one leaves
    g = make_path(2)
    n_rounds = 150
    bits = np.zeros((n_rounds, 1), dtype=np.uint8)
    ev_t = np.array([0, 0, 100])
    ev_node = np.array([0, 1, 1])
    ev_status = np.array([MIS, MIS, INACTIVE], dtype=np.int8)
    tr = E.Trace(2, 0, bits, bits.copy(), ev_t, ev_node, ev_status,
                 np.zeros(2, dtype=np.int8))
    assert verify.safety_counts(g, tr) == (100, 1)
    assert verify.safety_counts(g, tr, persistence=101) == (100, 0)
    res = verify.summarize(g, tr)
    assert res.converged and res.convergence_round == 101 and not res.ok


# ---------------------------------------------------------------- beep potential


def _alg1_probe(n=32, horizon=600, seed=1):
    g = make_gnp(n, 8 / n, seed)
    st = E.init(g, Alg1(n, 2), WakeupSchedule.all_at(n), EngineConfig(), seed)
    probe, rounds = verify.record_potential(st, horizon)
    return g, probe


def test_beep_potential_examples():
    g = Graph.from_edges(2, [])
    st = E.init(g, Alg1(8, 2), WakeupSchedule.all_at(2), EngineConfig())
    st.states[0, 0] = COMPETING
    st.states[0, 2] = 1
    probe, _ = verify.record_potential(st, 1)
    assert verify.beep_potential(probe, [0], 0) == 0.03125
    assert verify.beep_potential(probe, [1], 0) == 0.0
    assert verify.beep_potential(probe, [], 0) == 0.0
    with pytest.raises(ValueError):
        verify.beep_potential(probe, [0], 1)


def test_beep_potential_is_exact_sum():
    g, probe = _alg1_probe(horizon=200)
    s = [0, 3, 5, 7]
    for t in (0, 50, 120, 199):
        assert verify.beep_potential(probe, s, t) == pytest.approx(probe.b[t, s].sum())


def test_beep_potential_changes_slowly():
    n = 32
    g, probe = _alg1_probe(n)
    window = 2 * math.ceil(math.log2(n))
    checked = 0
    for v in range(n):
        s = list(g.adjacency[v])
        if not s:
            continue
        e = probe.b[:, s].sum(axis=1)
        for lam in (0.25, 0.5, 1.0):
            for t in np.flatnonzero(e >= lam):
                if t < window:
                    continue
                assert e[t - window:t + 1].min() >= lam / 2 - 1 / 8
                checked += 1
    assert checked > 100


# ---------------------------------------------------------------- good nodes


def test_good_nodes_regular_graph():
    g = Graph.from_edges(6, [(u, (u + 1) % 6) for u in range(6)])
    assert verify.good_nodes(g, range(6)) == set(range(6))


def test_good_nodes_star():
    g = Graph.from_edges(6, [(0, v) for v in range(1, 6)])
    # a leaf's only neighbor has the larger degree; the center sees five
    # neighbors of degree 1 <= 5, so only the center qualifies
    assert verify.good_nodes(g, range(6)) == {0}
    # restricting the active set changes degrees
    assert verify.good_nodes(g, [0, 1]) == {0, 1}


def test_good_edge_count():
    g = Graph.from_edges(6, [(0, v) for v in range(1, 6)])
    assert verify.good_edge_count(g, range(6)) == (5, 5)
    assert verify.good_edge_count(g, [1, 2]) == (0, 0)


# ---------------------------------------------------------------- lower-bound oracles


def test_pair_oracle_two_nodes():
    assert verify.pair_symmetry_oracle(2, 100_000, 0) == pytest.approx(2.0, abs=0.1)


def test_pair_oracle_monotone():
    means = [verify.pair_symmetry_oracle(n, 20_000, 1) for n in (2, 16, 256)]
    assert means == sorted(means)


def test_pair_oracle_errors():
    with pytest.raises(ValueError):
        verify.pair_symmetry_oracle(3, 10, 0)
    with pytest.raises(ValueError):
        verify.pair_symmetry_oracle(4, 0, 0)


def test_expected_max_geometric():
    assert verify.expected_max_geometric(1) == pytest.approx(2.0)
    # E[max of two] = 2 + 2 - E[min] with min ~ Geometric(3/4)
    assert verify.expected_max_geometric(2) == pytest.approx(4 - 4 / 3)
    assert verify.termination_lower_bound(256) == pytest.approx(8 / math.e)


def test_indistinguishability_prefix_zero():
    sc = make_lb_case1(4, 2, 0.9, 2)
    trace = verify.replay_scenario(sc, 0)
    assert verify.indistinguishability_check(sc, trace, 0)


def test_indistinguishability_detects_extra_beeper():
    # U_1 = {0, 1}; node 2 wakes a round early next to node 0 only, so node 0
    # hears a beep in its first round while node 1 hears silence
    g = Graph.from_edges(3, [(0, 1), (0, 2)])
    sc = LBScenario(g, (1, 1, 0), ("U_1", "U_1", "X"), dict(case=1, k=3, p=1.0, ell=2))
    trace = verify.replay_scenario(sc, 0)
    assert E.observation_history(trace, 0)[0] is Observation.HEARD
    assert E.observation_history(trace, 1)[0] is Observation.SILENCE
    assert not verify.indistinguishability_check(sc, trace, 1)
    # without the extra node both members see the same thing
    sc0 = LBScenario(Graph.from_edges(3, [(0, 1)]), sc.wakeup, sc.group_labels, sc.params)
    assert verify.indistinguishability_check(sc0, verify.replay_scenario(sc0, 0), 2)


def test_case1_collision_prefix():
    sc = make_lb_case1(6, 4, 0.9, 2)
    trace = verify.replay_scenario(sc, 3)
    us = [lab for lab in sc.groups("U_")]
    # the U cliques hear collisions in every listening round of their prefix,
    # unless some sub-clique failed to produce two beepers
    held = verify.collision_prefix_check(sc, trace, 5, us)
    assert held == verify.indistinguishability_check(sc, trace, 5) or not held


def test_sub_clique_probability():
    assert verify.sub_clique_collision_probability(4, 0.9) == pytest.approx(1 - 0.1 ** 4 - 4 * 0.9 * 0.1 ** 3)
    assert verify.sub_clique_collision_probability(1, 0.9) == 0.0
