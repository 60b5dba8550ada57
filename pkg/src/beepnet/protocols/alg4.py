"""Synchronized-clock MIS: a beeping simulation of Luby's permutation algorithm.

Rounds come in triplets aligned to ``t mod 3``:

* Restart-Bit (``t = 0 mod 3``): beep iff ``t != 0 mod k``.  Otherwise listen;
  a beep means inactive and ``k <- 2k``, silence advances the node
  (inactive -> competing, competing -> MIS) effective from ``t + 1``.
* MIS-Bit (``t = 1 mod 3``): MIS nodes beep; a listener that hears one
  becomes inactive.
* Competing-Bit (``t = 2 mod 3``): competing nodes beep with probability 1/2
  and drop to inactive on hearing a beep.  An MIS node beeps when ``next = 1``
  (then redraws ``next``), otherwise listens with ``next <- 1``; hearing a
  beep then costs it the MIS state and doubles ``k``.

Reported status: a node that advanced to competing is still labelled
INACTIVE until the following MIS-Bit has passed in silence.  Behavior is
identical in both states until that round, and the label would otherwise
flicker every ``k`` rounds next to a stable MIS node.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from beepnet.protocols.base import COMPETING, INACTIVE, MIS, Protocol, kernel
from beepnet.rng import bernoulli

STATE, K, NEXT, PENDING = range(4)
INITIAL_K = 6
INIT_SLOT = 255


@kernel
def _decide(S, u, params, t, key):
    ph = t % 3
    if ph == 0:
        return t % S[u, K] != 0
    if ph == 1:
        return S[u, STATE] == MIS
    if S[u, STATE] == INACTIVE:
        return False
    if S[u, STATE] == COMPETING:
        return bernoulli(key, t, 0, 0.5)
    return S[u, NEXT] == 1


@kernel
def _absorb(S, u, params, t, key, beeped, heard):
    ph = t % 3
    if ph == 0:
        if t % S[u, K] == 0:
            if heard:
                S[u, STATE] = INACTIVE
                S[u, K] *= 2
                S[u, PENDING] = 0
            elif S[u, STATE] == INACTIVE:
                S[u, STATE] = COMPETING
                S[u, PENDING] = 1
            elif S[u, STATE] == COMPETING:
                S[u, STATE] = MIS
    elif ph == 1:
        S[u, PENDING] = 0
        if S[u, STATE] != MIS and heard:
            S[u, STATE] = INACTIVE
    else:
        if S[u, STATE] == COMPETING:
            if heard and not beeped:
                S[u, STATE] = INACTIVE
        elif S[u, STATE] == MIS:
            if beeped:
                S[u, NEXT] = 1 if bernoulli(key, t, 1, 0.5) else 0
            else:
                S[u, NEXT] = 1
                if heard:
                    S[u, STATE] = INACTIVE
                    S[u, K] *= 2


@kernel
def _status(S, u, params):
    if S[u, STATE] == COMPETING and S[u, PENDING] == 1:
        return INACTIVE
    return S[u, STATE]


@nb.njit(cache=True)
def _initial_next(keys):
    out = np.empty(keys.size, dtype=np.int64)
    for u in range(keys.size):
        out[u] = 1 if bernoulli(keys[u], 0, INIT_SLOT, 0.5) else 0
    return out


class Alg4(Protocol):
    """MIS for nodes that share the global round number."""

    name = "alg4"
    fields = ("state", "k", "next", "pending")
    decide = _decide
    absorb = _absorb
    status = _status

    def initial_state(self, keys):
        s = np.zeros((keys.size, self.n_fields), dtype=np.int64)
        s[:, STATE] = INACTIVE
        s[:, K] = INITIAL_K
        s[:, NEXT] = _initial_next(keys)
        return s

    def diagnostics(self, states):
        return {"k": states[:, K].copy()}
