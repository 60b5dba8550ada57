"""Upper bound on the network size: restart-on-beep with doubling phases.

A node listens for ``c*L^2`` rounds, then competes for ``L`` phases of
``c*L`` rounds (``L = ceil(log2 N)``), beeping with probability
``2^i / (8N)`` in phase ``i``.  Surviving all phases puts it in the MIS loop,
where every two-round block is either beep/listen or listen/beep with equal
probability.  Hearing a beep in any listening round restarts it.
"""

from __future__ import annotations

import math

import numpy as np

from beepnet.protocols.base import COMPETING, INACTIVE, MIS, Protocol, kernel, pow2
from beepnet.rng import bernoulli

MODE, CNT, PHASE, COIN, POS = range(5)
P_N, P_C, P_L, P_INACTIVE, P_PHASE = range(5)


@kernel
def _decide(S, u, params, t, key):
    mode = S[u, MODE]
    if mode == INACTIVE:
        return False
    if mode == COMPETING:
        return bernoulli(key, t, 0, pow2(S[u, PHASE]) / (8.0 * params[P_N]))
    if S[u, POS] == 0:
        S[u, COIN] = 1 if bernoulli(key, t, 1, 0.5) else 0
    return (S[u, POS] == 0) == (S[u, COIN] == 1)


@kernel
def _absorb(S, u, params, t, key, beeped, heard):
    if heard and not beeped:
        S[u, MODE] = INACTIVE
        S[u, CNT] = 0
        S[u, PHASE] = 0
        return
    mode = S[u, MODE]
    if mode == INACTIVE:
        S[u, CNT] += 1
        if S[u, CNT] >= params[P_INACTIVE]:
            S[u, MODE] = COMPETING
            S[u, CNT] = 0
            S[u, PHASE] = 1
    elif mode == COMPETING:
        S[u, CNT] += 1
        if S[u, CNT] >= params[P_PHASE]:
            S[u, CNT] = 0
            S[u, PHASE] += 1
            if S[u, PHASE] > params[P_L]:
                S[u, MODE] = MIS
                S[u, PHASE] = 0
                S[u, POS] = 0
    else:
        S[u, POS] = 1 - S[u, POS]


@kernel
def _status(S, u, params):
    return S[u, MODE]


def ceil_log2(x: int) -> int:
    return max(0, math.ceil(math.log2(x))) if x > 1 else 0


class Alg1(Protocol):
    """Restart-on-beep MIS for nodes that know an upper bound ``N`` on ``n``."""

    name = "alg1"
    fields = ("mode", "count", "phase", "coin", "pos")
    decide = _decide
    absorb = _absorb
    status = _status

    def __init__(self, N: int, c: int = 2):
        if N < 2:
            raise ValueError(f"alg1 needs N >= 2, got {N}")
        if c < 1:
            raise ValueError(f"alg1 needs c >= 1, got {c}")
        self.N, self.c = int(N), int(c)
        self.L = ceil_log2(self.N)
        self.inactive_rounds = self.c * self.L * self.L
        self.phase_rounds = self.c * self.L
        self.params = np.array(
            [self.N, self.c, self.L, self.inactive_rounds, self.phase_rounds], dtype=np.float64
        )

    def initial_state(self, keys):
        s = np.zeros((keys.size, self.n_fields), dtype=np.int64)
        s[:, MODE] = INACTIVE
        return s

    def beep_probability(self, states: np.ndarray) -> np.ndarray:
        """Per-node competing beep probability; zero unless competing."""
        states = np.atleast_2d(states)
        prob = np.exp2(states[:, PHASE].astype(float)) / (8.0 * self.N)
        return np.where(states[:, MODE] == COMPETING, prob, 0.0)

    def diagnostics(self, states):
        return {"phase": states[:, PHASE].copy()}

    def describe(self):
        return {"algorithm": self.name, "N": self.N, "c": self.c}
