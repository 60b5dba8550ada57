import numpy as np
import pytest

from beepnet import engine as E
from beepnet import verify
from beepnet.engine import (
    ConfigurationError,
    EngineConfig,
    FeedbackMode,
    Observation,
    WakeMode,
    WakeupSchedule,
)
from beepnet.protocols import Alg1, Alg2, Alg3, Alg4
from beepnet.topology import make_clique, make_gnp, make_path
from scripted import Scripted

PLAIN = EngineConfig(FeedbackMode.PLAIN, WakeMode.ADVERSARIAL_ONLY)
CD = EngineConfig(FeedbackMode.SENDER_CD, WakeMode.ADVERSARIAL_ONLY)
WOB = EngineConfig(FeedbackMode.PLAIN, WakeMode.WAKE_ON_BEEP)


def scripted_run(g, table, schedule, config, horizon):
    st = E.init(g, Scripted(table), schedule, config, 0)
    return st, [E.step(st) for _ in range(horizon)]


def test_init_all_asleep():
    st = E.init(make_path(4), Alg4(), WakeupSchedule.all_at(4), PLAIN)
    assert st.t == 0 and not st.awake.any()


def test_schedule_size_mismatch():
    with pytest.raises(ConfigurationError):
        E.init(make_path(4), Alg4(), WakeupSchedule.all_at(3), PLAIN)


def test_never_wake_needs_wake_on_beep():
    sched = WakeupSchedule.from_rounds([0, None, 3])
    with pytest.raises(ConfigurationError):
        E.init(make_path(3), Alg4(), sched, PLAIN)
    E.init(make_path(3), Alg3(), sched, WOB)


def test_negative_wake_round_rejected():
    with pytest.raises(ConfigurationError):
        WakeupSchedule.from_rounds([0, -2])


def test_isolated_beeper_hears_nothing():
    g = make_clique(1)
    for cfg in (PLAIN, CD):
        _, rts = scripted_run(g, [[1, 1]], WakeupSchedule.all_at(1), cfg, 2)
        assert all(rt.beeped[0] and not rt.heard[0] for rt in rts)


def test_concurrent_beeps_plain_vs_sender_cd():
    g = make_clique(2)
    table = [[1], [1]]
    _, (rt,) = scripted_run(g, table, WakeupSchedule.all_at(2), PLAIN, 1)
    assert rt.beeped.all() and not rt.heard.any()
    _, (rt,) = scripted_run(g, table, WakeupSchedule.all_at(2), CD, 1)
    assert rt.beeped.all() and rt.heard.all()


def test_listener_hears_presence_only():
    # center listens, two leaves beep: one bit, no count
    g = make_path(3)
    _, (rt,) = scripted_run(g, [[1], [0], [1]], WakeupSchedule.all_at(3), PLAIN, 1)
    assert rt.heard[1] and not rt.heard[0] and not rt.heard[2]
    assert rt.feedback(1).heard_beep


def test_sleeping_neighbor_beeps_not_heard():
    g = make_path(2)
    sched = WakeupSchedule.from_rounds([0, 5])
    _, rts = scripted_run(g, [[0, 0], [1, 1]], sched, PLAIN, 3)
    assert not any(rt.heard[0] for rt in rts)
    assert rts[0].action(1) is None and rts[0].feedback(1) is None


def test_adversarial_wake_first_action_at_wake_round():
    g = make_clique(1)
    sched = WakeupSchedule.from_rounds([3])
    st, rts = scripted_run(g, [[1, 0]], sched, PLAIN, 6)
    assert [rt.awake[0] for rt in rts] == [False] * 3 + [True] * 3
    assert rts[3].beeped[0] and rts[3].woke[0]
    assert st.states[0, 0] == 3


def test_wake_on_beep_timing():
    # node 0 wakes at 5 and beeps; node 1 (never adversarially woken) acts from 6
    g = make_path(2)
    sched = WakeupSchedule.from_rounds([5, None])
    st, rts = scripted_run(g, [[1, 0, 0], [0, 0, 0]], sched, WOB, 8)
    assert rts[5].beeped[0]
    assert not rts[5].awake[1]
    assert rts[6].awake[1] and rts[6].woke[1]
    assert st.states[1, 0] == 6


def test_adversarial_only_ignores_beeps_for_sleepers():
    g = make_path(2)
    sched = WakeupSchedule.from_rounds([0, 4])
    _, rts = scripted_run(g, [[1, 1, 1, 1], [0, 0, 0, 0]], sched, PLAIN, 5)
    assert [rt.awake[1] for rt in rts] == [False] * 4 + [True]


def test_awake_is_monotone_and_statuses_recorded():
    g = make_gnp(40, 0.1, 3)
    st = E.init(g, Alg3(), WakeupSchedule.staggered(40, 2), WOB, 1)
    trace, _ = E.run(st, 300)
    prev = np.zeros(g.n, dtype=bool)
    for rt in trace:
        assert (rt.awake | ~prev).all()
        prev = rt.awake
    assert len(trace) == 300


def _run_bytes(g, proto, sched, cfg, seed, horizon):
    st = E.init(g, proto, sched, cfg, seed)
    tr, res = E.run(st, horizon)
    return tr.beep_bits.tobytes() + tr.heard_bits.tobytes() + tr.ev_t.tobytes(), res


@pytest.mark.parametrize("proto,cfg,sched", [
    (Alg1(32), PLAIN, "all"),
    (Alg2(), EngineConfig(FeedbackMode.SENDER_CD, WakeMode.WAKE_ON_BEEP), "stag"),
    (Alg3(), WOB, "stag"),
    (Alg4(), PLAIN, "all"),
])
def test_determinism(proto, cfg, sched):
    g = make_gnp(32, 0.2, 4)
    s = WakeupSchedule.all_at(32) if sched == "all" else WakeupSchedule.staggered(32, 1)
    a, ra = _run_bytes(g, proto, s, cfg, 11, 800)
    b, rb = _run_bytes(g, proto, s, cfg, 11, 800)
    c, _ = _run_bytes(g, proto, s, cfg, 12, 800)
    assert a == b and ra.csv_row() == rb.csv_row()
    assert a != c


def test_run_from_copied_state_is_identical():
    g = make_gnp(20, 0.2, 1)
    st = E.init(g, Alg4(), WakeupSchedule.all_at(20), PLAIN, 5)
    cp = st.copy()
    t1, r1 = E.run(st, 200)
    t2, r2 = E.run(cp, 200)
    assert np.array_equal(t1.beep_bits, t2.beep_bits) and r1.csv_row() == r2.csv_row()


def test_step_matches_run():
    g = make_gnp(20, 0.2, 1)
    a = E.init(g, Alg1(20), WakeupSchedule.staggered(20, 3), PLAIN, 2)
    b = a.copy()
    trace, _ = E.run(a, 150)
    for idx in range(150):
        rt = E.step(b)
        ref = trace[idx]
        assert rt.t == ref.t == idx
        assert np.array_equal(rt.beeped, ref.beeped)
        assert np.array_equal(rt.heard, ref.heard)
        assert np.array_equal(rt.statuses, ref.statuses)


def test_horizon_must_be_positive():
    st = E.init(make_path(3), Alg4(), WakeupSchedule.all_at(3), PLAIN)
    with pytest.raises(ValueError):
        E.run(st, 0)


def test_run_in_chunks_equals_single_run():
    g = make_gnp(30, 0.15, 9)
    a = E.init(g, Alg3(), WakeupSchedule.staggered(30, 1), WOB, 4)
    b = a.copy()
    whole, _ = E.run(a, 400)
    p1, _ = E.run(b, 150)
    p2, _ = E.run(b, 250)
    assert np.array_equal(whole.beep_bits, np.vstack([p1.beep_bits, p2.beep_bits]))
    assert p2.t0 == 150


@pytest.mark.parametrize("proto,cfg,sender_cd", [
    (Alg1(64), PLAIN, False),
    (Alg2(), EngineConfig(FeedbackMode.SENDER_CD, WakeMode.WAKE_ON_BEEP), True),
    (Alg3(), WOB, False),
    (Alg4(), PLAIN, False),
])
def test_feedback_correctness(proto, cfg, sender_cd):
    g = make_gnp(64, 8 / 64, 2)
    sched = WakeupSchedule.all_at(64) if proto.name in ("alg1", "alg4") else WakeupSchedule.staggered(64, 1)
    st = E.init(g, proto, sched, cfg, 3)
    trace, _ = E.run(st, 1500)
    assert verify.check_feedback(g, trace, sender_cd=sender_cd) == 0
    # a corrupted trace is caught
    trace.heard_bits[700, 0] ^= 1
    assert verify.check_feedback(g, trace, sender_cd=sender_cd) == 1


def test_plain_never_gives_beepers_feedback():
    g = make_clique(8)
    st = E.init(g, Alg4(), WakeupSchedule.all_at(8), PLAIN, 1)
    for rt in E.run(st, 300)[0]:
        assert not (rt.beeped & rt.heard).any()


def test_isolation_of_randomness_on_path():
    n = 12
    g = make_path(n)
    base = E.init(g, Alg1(n), WakeupSchedule.all_at(n), PLAIN, 21)
    pert = base.copy()
    pert.keys[0] ^= np.uint64(0xDEADBEEF)
    ta, _ = E.run(base, 3000)
    tb, _ = E.run(pert, 3000)
    A = np.unpackbits(ta.beep_bits, axis=1, count=n, bitorder="little")
    B = np.unpackbits(tb.beep_bits, axis=1, count=n, bitorder="little")
    diff = A != B
    assert diff.any()
    t0 = np.flatnonzero(diff[:, 0])[0]
    # nothing else can change before node 0's first divergent action
    assert not diff[:t0, 1:].any()
    for v in range(1, n):
        rows = np.flatnonzero(diff[:, v])
        if rows.size:
            assert rows[0] >= t0 + v


def test_observation_history():
    g = make_path(2)
    sched = WakeupSchedule.from_rounds([0, 2])
    table = [[1, 0, 0, 0, 0], [1, 0, 0, 0, 0]]
    st = E.init(g, Scripted(table), sched, PLAIN, 0)
    trace, _ = E.run(st, 5)
    B, H, S = Observation.BEEPED, Observation.HEARD, Observation.SILENCE
    # node 1 wakes at 2 and beeps; node 0 listens then
    assert E.observation_history(trace, 0) == [B, S, H, S, S]
    assert E.observation_history(trace, 1) == [B, S, S]
    assert E.observation_history(list(trace), 1) == [B, S, S]
    assert len(E.observation_history(trace, 1)) == 5 - 2


def test_observation_history_never_woke():
    g = make_path(2)
    st = E.init(g, Scripted([[0], [0]]), WakeupSchedule.from_rounds([0, None]), WOB, 0)
    trace, _ = E.run(st, 4)
    assert E.observation_history(trace, 1) == []
