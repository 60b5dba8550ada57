"""Wake-on-beep MIS with sender-side collision detection.

After a wake-up beep and one waiting round, phase ``x = 1, 2, ...`` runs
steps ``i = 0..x``.  Each step is two 3-round exchanges:

* exchange 1: listen (clear ``v``) / beep with probability ``2^-i`` and set
  ``v`` / listen; any beep received in the exchange clears ``v``.
* exchange 2: listen / beep and join the MIS if ``v = 1`` / listen; a beep
  received here makes the node inactive and it terminates.

The 3-round framing absorbs the one-round wake skew between neighbors.
"""

from __future__ import annotations

import numpy as np

from beepnet.protocols.base import COMPETING, INACTIVE, MIS, Protocol, kernel, pow2neg
from beepnet.rng import bernoulli

JUST_WOKE, WAIT, LOOP, JOINED, TERMINATED = range(5)
MODE, X, I, EX, R, V = range(6)


@kernel
def _decide(S, u, params, t, key):
    mode = S[u, MODE]
    if mode == JUST_WOKE:
        return True
    if mode != LOOP:
        return False
    if S[u, EX] == 1:
        if S[u, R] == 0:
            S[u, V] = 0
        elif S[u, R] == 1:
            if bernoulli(key, t, 0, pow2neg(S[u, I])):
                S[u, V] = 1
                return True
        return False
    return S[u, R] == 1 and S[u, V] == 1


@kernel
def _absorb(S, u, params, t, key, beeped, heard):
    mode = S[u, MODE]
    if mode == JUST_WOKE:
        S[u, MODE] = WAIT
        return
    if mode == WAIT:
        S[u, MODE] = LOOP
        S[u, X] = 1
        S[u, I] = 0
        S[u, EX] = 1
        S[u, R] = 0
        S[u, V] = 0
        return
    if mode != LOOP:
        return
    if S[u, EX] == 1:
        if heard:
            S[u, V] = 0
    else:
        if S[u, R] == 1 and beeped:
            S[u, MODE] = JOINED
            return
        if heard:
            S[u, MODE] = TERMINATED
            return
    S[u, R] += 1
    if S[u, R] == 3:
        S[u, R] = 0
        if S[u, EX] == 1:
            S[u, EX] = 2
        else:
            S[u, EX] = 1
            S[u, I] += 1
            if S[u, I] > S[u, X]:
                S[u, X] += 1
                S[u, I] = 0


@kernel
def _status(S, u, params):
    mode = S[u, MODE]
    if mode == JOINED:
        return MIS
    if mode == TERMINATED:
        return INACTIVE
    return COMPETING


class Alg2(Protocol):
    """Size-oblivious MIS; needs sender-side collision detection and wake-on-beep."""

    name = "alg2"
    fields = ("mode", "x", "i", "exchange", "round", "v")
    decide = _decide
    absorb = _absorb
    status = _status

    def diagnostics(self, states):
        return {"x": states[:, X].copy(), "i": states[:, I].copy()}
