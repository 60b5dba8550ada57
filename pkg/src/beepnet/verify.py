"""Correctness checks, convergence measurement and analysis oracles.

Everything here works from status labels and recorded traces; nothing
reaches into automaton internals except the beep-potential probe, which
asks the size-bounded protocol for its current beep probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from beepnet.protocols.base import COMPETING, INACTIVE, MIS, SLEEPING, STATUS_NAMES
from beepnet.topology import Graph, LBScenario

PERSISTENCE_ROUNDS = 64
_NAME_TO_STATUS = {name: i for i, name in enumerate(STATUS_NAMES)}


# --------------------------------------------------------------------------
# set predicates


def _node_set(g: Graph, s: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for u in s:
        if not 0 <= int(u) < g.n:
            raise ValueError(f"node {u} out of range for n={g.n}")
        mask[int(u)] = True
    return mask


def is_independent(g: Graph, s: Iterable[int]) -> bool:
    mask = _node_set(g, s)
    return not any(mask[v] for u in np.flatnonzero(mask) for v in g.adjacency[u])


def is_mis(g: Graph, s: Iterable[int]) -> bool:
    """Independent, and every node outside ``s`` has a neighbor in ``s``."""
    mask = _node_set(g, s)
    for u in range(g.n):
        nb_in = any(mask[v] for v in g.adjacency[u])
        if mask[u] and nb_in:
            return False
        if not mask[u] and not nb_in:
            return False
    return True


def _as_status_array(statuses) -> np.ndarray:
    arr = list(statuses)
    if arr and isinstance(arr[0], str):
        arr = [_NAME_TO_STATUS[x] for x in arr]
    return np.asarray(arr, dtype=np.int8)


def stable_nodes(g: Graph, statuses) -> np.ndarray:
    """Mask of stable nodes: MIS with all-inactive neighborhood, or next to one."""
    st = _as_status_array(statuses)
    if st.size != g.n:
        raise ValueError(f"need one status per node ({g.n}), got {st.size}")
    anchor = np.zeros(g.n, dtype=bool)
    for u in np.flatnonzero(st == MIS):
        anchor[u] = all(st[v] == INACTIVE for v in g.adjacency[u])
    stable = anchor.copy()
    for u in range(g.n):
        if not stable[u]:
            stable[u] = any(anchor[v] for v in g.adjacency[u])
    return stable


def is_stable_configuration(g: Graph, statuses) -> bool:
    return bool(stable_nodes(g, statuses).all())


# --------------------------------------------------------------------------
# run summaries


@dataclass
class RunResult:
    converged: bool
    convergence_round: int | None
    mis_set: tuple[int, ...]
    safety_violations: int
    persistent_violations: int
    max_k: int | None
    n: int
    algorithm: str
    seed: int
    horizon: int
    graph: str = ""
    final_is_mis: bool = False
    final_stable: bool = False
    diagnostics: dict = field(default_factory=dict, repr=False)

    CSV_HEADER = ("seed", "algorithm", "graph", "n", "horizon", "converged",
                  "convergence_round", "mis_size", "safety_violations", "max_k")

    @property
    def mis_size(self) -> int:
        return len(self.mis_set)

    @property
    def ok(self) -> bool:
        return self.converged and self.persistent_violations == 0

    def csv_row(self) -> list[str]:
        return [
            str(self.seed), self.algorithm, self.graph, str(self.n), str(self.horizon),
            "true" if self.converged else "false",
            "" if self.convergence_round is None else str(self.convergence_round),
            str(self.mis_size), str(self.safety_violations),
            "" if self.max_k is None else str(self.max_k),
        ]


def convergence_round(traces, g: Graph) -> int | None:
    """First round from which the final labels hold, if they are stable.

    Labels recorded after round ``r`` are in effect from round ``r + 1``, so a
    node entering the MIS during round 6 converges at 7.
    """
    if hasattr(traces, "ev_t"):
        final = traces.final_statuses
        last = traces.ev_t[-1] + 1 if traces.ev_t.size else traces.t0
    else:
        traces = list(traces)
        if not traces:
            return None
        final = traces[-1].statuses
        last = traces[0].t + 1
        for prev, cur in zip(traces, traces[1:]):
            if not np.array_equal(prev.statuses, cur.statuses):
                last = cur.t + 1
    if not is_stable_configuration(g, final):
        return None
    return int(last)


def mis_intervals(trace) -> dict[int, list[tuple[int, int]]]:
    """Per node, half-open round ranges ``[a, b)`` during which it was labelled MIS."""
    end = trace.t0 + len(trace)
    open_at: dict[int, int] = {
        int(u): trace.t0 for u in np.flatnonzero(trace.initial_status == MIS)
    }
    out: dict[int, list[tuple[int, int]]] = {}
    for t, u, s in zip(trace.ev_t.tolist(), trace.ev_node.tolist(), trace.ev_status.tolist()):
        if s == MIS and u not in open_at:
            open_at[u] = t
        elif s != MIS and u in open_at:
            out.setdefault(u, []).append((open_at.pop(u), t))
    for u, a in open_at.items():
        out.setdefault(u, []).append((a, end))
    return out


def safety_episodes(g: Graph, trace) -> list[tuple[int, int, int, int]]:
    """Maximal stretches ``(u, v, start, stop)`` where adjacent u, v were both MIS."""
    iv = mis_intervals(trace)
    episodes = []
    for u in sorted(iv):
        for v in g.adjacency[u]:
            if v <= u or v not in iv:
                continue
            a, b = iv[u], iv[v]
            i = j = 0
            while i < len(a) and j < len(b):
                lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
                if lo < hi:
                    episodes.append((u, v, lo, hi))
                if a[i][1] < b[j][1]:
                    i += 1
                else:
                    j += 1
    return episodes


def safety_counts(g: Graph, trace, persistence: int = PERSISTENCE_ROUNDS) -> tuple[int, int]:
    """``(violation rounds, episodes lasting >= persistence rounds)``."""
    episodes = safety_episodes(g, trace)
    if not episodes:
        return 0, 0
    spans = sorted((a, b) for _, _, a, b in episodes)
    rounds = 0
    cur_a, cur_b = spans[0]
    for a, b in spans[1:]:
        if a > cur_b:
            rounds += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    rounds += cur_b - cur_a
    persistent = sum(1 for _, _, a, b in episodes if b - a >= persistence)
    return rounds, persistent


def summarize(g: Graph, trace, state=None, graph_name: str = "") -> RunResult:
    final = trace.final_statuses
    mis = tuple(int(u) for u in np.flatnonzero(final == MIS))
    conv = convergence_round(trace, g)
    violations, persistent = safety_counts(g, trace)
    diag, max_k, algorithm, seed = {}, None, "", 0
    if state is not None:
        diag = state.diagnostics()
        algorithm, seed = state.protocol.name, state.seed
        if "k" in diag:
            # k never decreases, so the final value is the per-node maximum
            max_k = int(diag["k"][state.awake].max()) if state.awake.any() else None
    return RunResult(
        converged=conv is not None,
        convergence_round=conv,
        mis_set=mis,
        safety_violations=violations,
        persistent_violations=persistent,
        max_k=max_k,
        n=g.n,
        algorithm=algorithm,
        seed=seed,
        horizon=len(trace),
        graph=graph_name,
        final_is_mis=is_mis(g, mis),
        final_stable=is_stable_configuration(g, final),
        diagnostics=diag,
    )


def check_feedback(g: Graph, trace, sender_cd: bool = False, chunk: int = 4096) -> int:
    """Count rounds whose recorded feedback disagrees with a recomputation.

    A listener must hear a beep iff some awake neighbor beeped; a beeper hears
    one only with sender-side collision detection.  Sleeping nodes never beep.
    """
    n = g.n
    indptr, indices = g.csr()
    adj = sp.csr_matrix((np.ones(indices.size, dtype=np.int32), indices, indptr), shape=(n, n))
    bad = 0
    st = trace.initial_status.copy()
    j = 0
    for lo in range(0, len(trace), chunk):
        hi = min(len(trace), lo + chunk)
        beeped = np.unpackbits(trace.beep_bits[lo:hi], axis=1, count=n, bitorder="little").astype(bool)
        heard = np.unpackbits(trace.heard_bits[lo:hi], axis=1, count=n, bitorder="little").astype(bool)
        awake = np.empty((hi - lo, n), dtype=bool)
        for r in range(lo, hi):
            t = trace.t0 + r
            while j < trace.ev_t.size and trace.ev_t[j] == t:
                st[trace.ev_node[j]] = trace.ev_status[j]
                j += 1
            awake[r - lo] = st != SLEEPING
        nb_beep = (adj @ beeped.T.astype(np.int32)).T > 0
        expect = np.where(beeped, nb_beep if sender_cd else False, nb_beep) & awake
        bad_rows = (expect != heard).any(axis=1) | (beeped & ~awake).any(axis=1)
        bad += int(bad_rows.sum())
    return bad


# --------------------------------------------------------------------------
# beep potential of the size-bounded protocol


@dataclass
class PotentialProbe:
    """Per-round, per-node competing beep probabilities ``b[t - t0, u]``."""

    t0: int
    b: np.ndarray

    def covers(self, t: int) -> bool:
        return self.t0 <= t < self.t0 + self.b.shape[0]


def record_potential(state, horizon: int):
    """Step ``state`` for ``horizon`` rounds, sampling beep probabilities first.

    Returns ``(probe, trace)``; ``state.protocol`` must expose
    ``beep_probability`` (the size-bounded protocol does).
    """
    from beepnet import engine

    t0 = state.t
    b = np.zeros((horizon, state.graph.n))
    rounds = []
    for r in range(horizon):
        b[r] = state.protocol.beep_probability(state.states)
        rounds.append(engine.step(state))
    return PotentialProbe(t0, b), rounds


def beep_potential(probe: PotentialProbe, s: Iterable[int], t: int) -> float:
    """Sum of the beep probabilities of the nodes in ``s`` during round ``t``."""
    if not probe.covers(t):
        raise ValueError(f"round {t} not covered by probe starting at {probe.t0}")
    idx = list(s)
    return float(probe.b[t - probe.t0, idx].sum()) if idx else 0.0


# --------------------------------------------------------------------------
# good nodes


def good_nodes(g: Graph, active: Iterable[int]) -> set[int]:
    """Active nodes with at least ``d_v/3`` active neighbors of degree <= ``d_v``.

    Degrees count active neighbors only.
    """
    act = _node_set(g, active)
    deg = np.array([sum(act[v] for v in g.adjacency[u]) if act[u] else 0 for u in range(g.n)])
    good = set()
    for v in np.flatnonzero(act):
        low = sum(1 for u in g.adjacency[v] if act[u] and deg[u] <= deg[v])
        if 3 * low >= deg[v]:
            good.add(int(v))
    return good


def good_edge_count(g: Graph, active: Iterable[int]) -> tuple[int, int]:
    """``(good edges, all edges)`` of the subgraph induced by ``active``."""
    act = _node_set(g, active)
    good = good_nodes(g, np.flatnonzero(act))
    edges = [(u, v) for u, v in g.edges() if act[u] and act[v]]
    return sum(1 for u, v in edges if u in good or v in good), len(edges)


# --------------------------------------------------------------------------
# lower-bound oracles


def pair_symmetry_oracle(n: int, trials: int, seed: int, chunk: int = 4096) -> float:
    """Mean round at which the last of ``n/2`` symmetric pairs breaks symmetry.

    Each undecided pair breaks in a round with probability 1/2, the best any
    algorithm can do (``max_p 2p(1-p)``).
    """
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    total = 0
    for lo in range(0, trials, chunk):
        size = min(chunk, trials - lo)
        total += int(rng.geometric(0.5, size=(size, n // 2)).max(axis=1).sum())
    return total / trials


def expected_max_geometric(m: int, p: float = 0.5, tol: float = 1e-15) -> float:
    """``E[max of m iid Geometric(p)]`` on ``{1, 2, ...}``, by tail summation."""
    q = 1.0 - p
    total, t = 0.0, 0
    while True:
        term = 1.0 - (1.0 - q ** t) ** m
        total += term
        t += 1
        if term < tol and t > 1:
            return total


def termination_lower_bound(n: int) -> float:
    return math.log2(n) / math.e


def replay_scenario(scenario: LBScenario, seed: int, horizon: int | None = None):
    """Run the reference automata on a lower-bound scenario.

    Case 1 nodes go silent once they hear a beep; case 2 nodes beep with
    probability ``p_prime`` from their ``m``-th round on.  Returns the trace.
    """
    from beepnet import engine
    from beepnet.protocols.reference import SilenceBeeper

    prm = scenario.params
    if prm["case"] == 1:
        proto = SilenceBeeper(prm["ell"], prm["p"], "silent")
        span = prm["k"]
    else:
        proto = SilenceBeeper(prm["ell"], prm["p"], "beep", prm["m"], prm["p_prime"])
        span = max(prm["q"], prm["m"]) + 1
    if horizon is None:
        horizon = max(scenario.wakeup) + span + 1
    sched = engine.WakeupSchedule.from_rounds(scenario.wakeup)
    state = engine.init(scenario.graph, proto, sched, engine.EngineConfig(), seed)
    trace, _ = engine.run(state, horizon)
    return trace


def indistinguishability_check(scenario: LBScenario, traces, prefix_len: int,
                               prefix: str = "U_") -> bool:
    """Do all members of each ``U`` clique share their first ``prefix_len`` observations?"""
    from beepnet.engine import observation_history

    if prefix_len <= 0:
        return True
    for members in scenario.groups(prefix).values():
        if len(members) < 2:
            continue
        ref = observation_history(traces, members[0])[:prefix_len]
        for u in members[1:]:
            if observation_history(traces, u)[:prefix_len] != ref:
                return False
    return True


def collision_prefix_check(scenario: LBScenario, traces, rounds: int, groups: Sequence[str]) -> bool:
    """Did every node of ``groups`` hear a beep whenever it listened in its first ``rounds``?"""
    from beepnet.engine import Observation, observation_history

    by_label = scenario.groups()
    for lab in groups:
        for u in by_label.get(lab, []):
            hist = observation_history(traces, u)[:rounds]
            if any(o is Observation.SILENCE for o in hist):
                return False
    return True


def sub_clique_collision_probability(size: int, p: float) -> float:
    """Probability that at least two of ``size`` independent p-beepers beep."""
    return 1.0 - (1.0 - p) ** size - size * p * (1.0 - p) ** (size - 1)
