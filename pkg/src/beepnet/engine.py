"""Round-by-round execution of the synchronous beeping model.

One round, for every node at once:

1. nodes whose adversarial wake round is ``t`` (or that heard a beep last
   round under wake-on-beep) become awake;
2. every awake automaton decides to beep or listen;
3. each node learns whether at least one awake neighbor beeped;
4. listeners get that bit; beepers get it only with sender-side collision
   detection, otherwise nothing;
5. under wake-on-beep, sleeping nodes with a beeping neighbor are scheduled
   to act from ``t + 1``;
6. awake automata absorb their feedback and report a status label.

A node scheduled to wake at ``w`` takes its first action in round ``w``.
Nodes never hear their own beep.
"""

from __future__ import annotations

import copy
import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numba as nb
import numpy as np

from beepnet.protocols.base import SLEEPING, STATUS_NAMES, Protocol
from beepnet.rng import node_keys
from beepnet.topology import Graph

NEVER = -1


class ConfigurationError(ValueError):
    """Inconsistent graph, schedule or engine configuration."""


class FeedbackMode(enum.Enum):
    PLAIN = "plain"
    SENDER_CD = "sender_cd"


class WakeMode(enum.Enum):
    ADVERSARIAL_ONLY = "adversarial"
    WAKE_ON_BEEP = "wake_on_beep"


class Observation(enum.Enum):
    BEEPED = "B"
    HEARD = "H"
    SILENCE = "."


@dataclass(frozen=True)
class EngineConfig:
    feedback: FeedbackMode = FeedbackMode.PLAIN
    wake: WakeMode = WakeMode.ADVERSARIAL_ONLY


@dataclass(frozen=True)
class WakeupSchedule:
    """Adversarial wake round per node; ``NEVER`` (-1) means no adversarial wake."""

    wake_round: tuple[int, ...]

    @classmethod
    def from_rounds(cls, rounds: Sequence[float | int | None]) -> "WakeupSchedule":
        out = []
        for r in rounds:
            if r is None or (isinstance(r, float) and math.isinf(r)):
                out.append(NEVER)
            elif r < 0:
                raise ConfigurationError(f"wake rounds must be >= 0, got {r}")
            else:
                out.append(int(r))
        return cls(tuple(out))

    @classmethod
    def all_at(cls, n: int, t: int = 0) -> "WakeupSchedule":
        return cls((int(t),) * n)

    @classmethod
    def staggered(cls, n: int, stride: int = 1) -> "WakeupSchedule":
        """Node ``u`` wakes at round ``u * stride``."""
        return cls(tuple(u * int(stride) for u in range(n)))

    @classmethod
    def single(cls, n: int, source: int = 0, t: int = 0) -> "WakeupSchedule":
        """Only ``source`` is woken by the adversary (for wake-on-beep runs)."""
        return cls(tuple(t if u == source else NEVER for u in range(n)))

    def __len__(self):
        return len(self.wake_round)

    @property
    def finite(self) -> bool:
        return all(r != NEVER for r in self.wake_round)


@dataclass
class RoundFeedback:
    heard_beep: bool
    woke_this_round: bool


@dataclass
class RoundTrace:
    """What happened in round ``t``.

    ``beeped``/``heard``/``awake``/``woke`` are boolean node vectors; the two
    action/feedback vectors are meaningful only where ``awake`` is set.
    ``statuses`` are the labels reported after the round's update.
    """

    t: int
    beeped: np.ndarray
    heard: np.ndarray
    awake: np.ndarray
    woke: np.ndarray
    statuses: np.ndarray

    def action(self, u: int) -> str | None:
        if not self.awake[u]:
            return None
        return "BEEP" if self.beeped[u] else "LISTEN"

    def feedback(self, u: int) -> RoundFeedback | None:
        if not self.awake[u]:
            return None
        return RoundFeedback(bool(self.heard[u]), bool(self.woke[u]))

    def status_names(self) -> list[str]:
        return [STATUS_NAMES[s] for s in self.statuses]


class Trace(Sequence[RoundTrace]):
    """Packed record of consecutive rounds ``t0 .. t0 + len - 1``.

    Actions and feedback are stored as little-endian packed bit rows; status
    labels as change events ``(t, node, status)``.
    """

    def __init__(self, n, t0, beep_bits, heard_bits, ev_t, ev_node, ev_status, initial_status):
        self.n = n
        self.t0 = t0
        self.beep_bits = beep_bits
        self.heard_bits = heard_bits
        self.ev_t = ev_t
        self.ev_node = ev_node
        self.ev_status = ev_status
        self.initial_status = initial_status

    def __len__(self):
        return self.beep_bits.shape[0]

    def _unpack(self, bits, idx):
        return np.unpackbits(bits[idx], count=self.n, bitorder="little").astype(bool)

    def beeped(self, idx: int) -> np.ndarray:
        return self._unpack(self.beep_bits, idx)

    def heard(self, idx: int) -> np.ndarray:
        return self._unpack(self.heard_bits, idx)

    def statuses_after(self, idx: int) -> np.ndarray:
        """Labels after round ``t0 + idx``; ``idx = -1`` gives the starting labels."""
        st = self.initial_status.copy()
        stop = np.searchsorted(self.ev_t, self.t0 + idx, side="right")
        st[self.ev_node[:stop]] = self.ev_status[:stop]
        return st

    @property
    def final_statuses(self) -> np.ndarray:
        return self.statuses_after(len(self) - 1)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return [self[i] for i in range(*idx.indices(len(self)))]
        if idx < 0:
            idx += len(self)
        if not 0 <= idx < len(self):
            raise IndexError(idx)
        st = self.statuses_after(idx)
        prev = self.statuses_after(idx - 1)
        awake = st != SLEEPING
        return RoundTrace(
            t=self.t0 + idx,
            beeped=self.beeped(idx),
            heard=self.heard(idx),
            awake=awake,
            woke=awake & (prev == SLEEPING),
            statuses=st,
        )

    def __iter__(self) -> Iterator[RoundTrace]:
        st = self.initial_status.copy()
        j = 0
        for idx in range(len(self)):
            prev = st.copy()
            t = self.t0 + idx
            while j < self.ev_t.size and self.ev_t[j] == t:
                st[self.ev_node[j]] = self.ev_status[j]
                j += 1
            awake = st != SLEEPING
            yield RoundTrace(t, self.beeped(idx), self.heard(idx), awake,
                             awake & (prev == SLEEPING), st.copy())

    def status_matrix(self) -> np.ndarray:
        """Dense ``(len, n)`` label matrix; only for short traces."""
        return np.array([rt.statuses for rt in self], dtype=np.int8).reshape(len(self), self.n)


@dataclass
class SimState:
    graph: Graph
    protocol: Protocol
    schedule: WakeupSchedule
    config: EngineConfig
    seed: int
    keys: np.ndarray
    states: np.ndarray
    t: int = 0
    awake: np.ndarray = field(default=None)
    pending: np.ndarray = field(default=None)
    statuses: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.graph.n
        self.indptr, self.indices = self.graph.csr()
        self.wake_round = np.asarray(self.schedule.wake_round, dtype=np.int64)
        if self.awake is None:
            self.awake = np.zeros(n, dtype=np.bool_)
        if self.pending is None:
            self.pending = np.zeros(n, dtype=np.bool_)
        if self.statuses is None:
            self.statuses = np.full(n, SLEEPING, dtype=np.int8)

    def copy(self) -> "SimState":
        return copy.deepcopy(self)

    def diagnostics(self) -> dict[str, np.ndarray]:
        return self.protocol.diagnostics(self.states)


def init(graph: Graph, protocol: Protocol, schedule: WakeupSchedule,
         config: EngineConfig | None = None, seed: int = 0) -> SimState:
    """Fresh simulation at round 0 with every node asleep."""
    config = config or EngineConfig()
    if len(schedule) != graph.n:
        raise ConfigurationError(
            f"schedule covers {len(schedule)} nodes but the graph has {graph.n}"
        )
    if config.wake is WakeMode.ADVERSARIAL_ONLY and not schedule.finite:
        raise ConfigurationError("every node needs a finite wake round without wake-on-beep")
    keys = node_keys(seed, graph.n)
    states = protocol.initial_state(keys)
    return SimState(graph, protocol, schedule, config, int(seed), keys, states)


# No allocation happens inside, so the loop runs without the refcounting
# runtime.  Not disk-cached: the kernels arrive as dispatcher-typed arguments,
# which numba's cache index cannot pickle back once reloaded (about 0.5 s of
# compilation per protocol per process instead).
@nb.njit(nogil=True, _nrt=False)
def _simulate(indptr, indices, wake_round, wake_on_beep, sender_cd, keys, awake, pending,
              states, statuses, params, t0, horizon, decide, absorb, status,
              beep, heard, hit, beep_bits, heard_bits, ev_t, ev_node, ev_status, n_ev):
    n = keys.size
    cap = ev_t.size
    for h in range(horizon):
        if n_ev + n > cap:
            return h, n_ev
        t = t0 + h
        for u in range(n):
            if not awake[u] and (wake_round[u] == t or pending[u]):
                awake[u] = True
                pending[u] = False
        for u in range(n):
            beep[u] = False
            if awake[u]:
                beep[u] = decide(states, u, params, t, keys[u])
        # push from the (usually few) beepers instead of scanning every neighborhood
        for u in range(n):
            hit[u] = False
        for u in range(n):
            if beep[u]:
                for j in range(indptr[u], indptr[u + 1]):
                    hit[indices[j]] = True
        for u in range(n):
            if awake[u]:
                heard[u] = hit[u] and (sender_cd or not beep[u])
            else:
                heard[u] = False
                if wake_on_beep and hit[u]:
                    pending[u] = True
        for u in range(n):
            if awake[u]:
                absorb(states, u, params, t, keys[u], beep[u], heard[u])
                st = status(states, u, params)
                if st != statuses[u]:
                    statuses[u] = st
                    ev_t[n_ev] = t
                    ev_node[n_ev] = u
                    ev_status[n_ev] = st
                    n_ev += 1
            if beep[u]:
                beep_bits[h, u >> 3] |= np.uint8(1 << (u & 7))
            if heard[u]:
                heard_bits[h, u >> 3] |= np.uint8(1 << (u & 7))
    return horizon, n_ev


def _advance(state: SimState, horizon: int) -> Trace:
    n = state.graph.n
    nbytes = (n + 7) // 8
    beep_bits = np.zeros((horizon, nbytes), dtype=np.uint8)
    heard_bits = np.zeros((horizon, nbytes), dtype=np.uint8)
    cap = max(8 * n, 1 << 14)
    ev_t = np.empty(cap, dtype=np.int64)
    ev_node = np.empty(cap, dtype=np.int64)
    ev_status = np.empty(cap, dtype=np.int8)
    initial = state.statuses.copy()
    n_ev = 0
    done = 0
    p = state.protocol
    beep = np.zeros(n, dtype=np.bool_)
    heard = np.zeros(n, dtype=np.bool_)
    hit = np.zeros(n, dtype=np.bool_)
    while done < horizon:
        ran, n_ev = _simulate(
            state.indptr, state.indices, state.wake_round,
            state.config.wake is WakeMode.WAKE_ON_BEEP,
            state.config.feedback is FeedbackMode.SENDER_CD,
            state.keys, state.awake, state.pending, state.states, state.statuses,
            p.params, state.t, horizon - done, p.decide, p.absorb, p.status,
            beep, heard, hit, beep_bits[done:], heard_bits[done:], ev_t, ev_node, ev_status, n_ev,
        )
        done += ran
        state.t += ran
        if done < horizon:
            cap *= 2
            ev_t = np.resize(ev_t, cap)
            ev_node = np.resize(ev_node, cap)
            ev_status = np.resize(ev_status, cap)
    return Trace(n, state.t - horizon, beep_bits, heard_bits,
                 ev_t[:n_ev].copy(), ev_node[:n_ev].copy(), ev_status[:n_ev].copy(), initial)


def step(state: SimState) -> RoundTrace:
    """Execute one round in place and return its record."""
    return _advance(state, 1)[0]


def run(state: SimState, horizon: int):
    """Execute ``horizon`` rounds in place; returns ``(trace, RunResult)``."""
    from beepnet.verify import summarize

    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    trace = _advance(state, int(horizon))
    return trace, summarize(state.graph, trace, state)


def observation_history(traces: Trace | Sequence[RoundTrace], node: int) -> list[Observation]:
    """What ``node`` did or heard in each round since it started participating."""
    if isinstance(traces, Trace):
        return _packed_history(traces, node)
    out: list[Observation] = []
    for rt in traces:
        if not rt.awake[node]:
            continue
        if rt.beeped[node]:
            out.append(Observation.BEEPED)
        elif rt.heard[node]:
            out.append(Observation.HEARD)
        else:
            out.append(Observation.SILENCE)
    return out


def _packed_history(trace: Trace, node: int) -> list[Observation]:
    # a node never falls back asleep, so it participates from its first label change
    if trace.initial_status[node] != SLEEPING:
        start = 0
    else:
        hits = np.flatnonzero(trace.ev_node == node)
        if hits.size == 0:
            return []
        start = int(trace.ev_t[hits[0]]) - trace.t0
    byte, bit = node >> 3, node & 7
    beeped = (trace.beep_bits[start:, byte] >> bit) & 1
    heard = (trace.heard_bits[start:, byte] >> bit) & 1
    codes = np.where(beeped == 1, 0, np.where(heard == 1, 1, 2))
    table = (Observation.BEEPED, Observation.HEARD, Observation.SILENCE)
    return [table[c] for c in codes]
