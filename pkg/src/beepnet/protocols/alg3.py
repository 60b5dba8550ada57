"""Wake-on-beep MIS without sender-side collision detection.

Same phase/step skeleton as :mod:`alg2`, but each step replaces the two
exchanges by ``c*x`` competition exchanges driven by a random 0/1 vector
``X`` with at least one 1.  In exchange ``k`` a candidate (``v = 1``) beeps
in the middle round iff ``X[k] = 1``.  Hearing a beep in the first or middle
round clears ``v`` and sets the inhibit flag ``z``; hearing one in the last
round clears ``v`` and, unless the automaton is built with
``literal=True``, sets ``z`` as well.  A node with ``z = 1`` skips the next
candidacy coin.

Why the late round also inhibits: with wake-on-beep, neighbors run one
round apart at most, so a node one round ahead of an MIS neighbor hears
that neighbor's beeps only in its third round.  Under the literal rule it
never gets inhibited, keeps drawing candidacy coins, and when it beeps
first in an exchange it knocks the MIS node out.  Staggered wakeups on a
path hit this every time.  Candidates never leave the loop: a node whose ``v`` survives a whole
step is reported as MIS and keeps beeping on its ``X`` vectors.

``X`` is not stored.  Its bits are draws keyed by the round the step
started in, so the vector is fixed at step start and can be rebuilt with
:func:`competition_vector`.
"""

from __future__ import annotations

import numpy as np

from beepnet.protocols.base import COMPETING, INACTIVE, MIS, Protocol, kernel, pow2neg
from beepnet.rng import bernoulli, uniform

JUST_WOKE, WAIT, LOOP = range(3)
MODE, X, I, K, R, V, Z, JOINED, FORCED, STEP_T, FRESH = range(11)
P_C, P_LATE_Z = range(2)
XBIT_SLOT = 100


@kernel
def _xbit(key, step_t, k, forced):
    if k == forced:
        return True
    return bernoulli(key, step_t, XBIT_SLOT + k, 0.5)


@kernel
def _decide(S, u, params, t, key):
    mode = S[u, MODE]
    if mode == JUST_WOKE:
        return True
    if mode != LOOP:
        return False
    if S[u, FRESH] == 1:
        S[u, FRESH] = 0
        if S[u, V] == 0 and S[u, Z] == 0:
            if bernoulli(key, t, 0, pow2neg(S[u, I])):
                S[u, V] = 1
        cx = int(params[P_C]) * S[u, X]
        f = int(uniform(key, t, 1) * cx)
        S[u, FORCED] = min(f, cx - 1)
        S[u, STEP_T] = t
        S[u, Z] = 0
    if S[u, R] == 1:
        return S[u, V] == 1 and _xbit(key, S[u, STEP_T], S[u, K], S[u, FORCED])
    return False


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
        S[u, K] = 0
        S[u, R] = 0
        S[u, V] = 0
        S[u, Z] = 0
        S[u, JOINED] = 0
        S[u, FRESH] = 1
        return
    r = S[u, R]
    if heard and not beeped:
        S[u, V] = 0
        if r < 2 or params[P_LATE_Z] == 1.0:
            S[u, Z] = 1
    if S[u, V] == 0:
        S[u, JOINED] = 0
    S[u, R] = r + 1
    if S[u, R] == 3:
        S[u, R] = 0
        S[u, K] += 1
        if S[u, K] == int(params[P_C]) * S[u, X]:
            S[u, K] = 0
            S[u, JOINED] = S[u, V]
            S[u, I] += 1
            if S[u, I] > S[u, X]:
                S[u, X] += 1
                S[u, I] = 0
            S[u, FRESH] = 1


@kernel
def _status(S, u, params):
    if S[u, MODE] != LOOP:
        return COMPETING
    if S[u, V] == 0:
        return INACTIVE
    if S[u, JOINED] == 1:
        return MIS
    return COMPETING


def competition_vector(key: int, step_t: int, length: int, forced: int) -> np.ndarray:
    """Materialize the ``X`` vector a node drew for the step starting at ``step_t``."""
    return np.array(
        [_xbit(np.uint64(key), step_t, k, forced) for k in range(length)], dtype=np.int8
    )


class Alg3(Protocol):
    """Size-oblivious MIS for plain beeping with wake-on-beep."""

    name = "alg3"
    fields = ("mode", "x", "i", "k", "round", "v", "z", "joined", "forced", "step_t", "fresh")
    decide = _decide
    absorb = _absorb
    status = _status

    def __init__(self, c: int = 3, literal: bool = False):
        if c < 1:
            raise ValueError(f"alg3 needs c >= 1, got {c}")
        self.c = int(c)
        self.literal = bool(literal)
        self.params = np.array([self.c, 0.0 if literal else 1.0], dtype=np.float64)

    def diagnostics(self, states):
        return {"x": states[:, X].copy(), "v": states[:, V].copy(), "z": states[:, Z].copy()}

    def describe(self):
        d = {"algorithm": self.name, "c": self.c}
        if self.literal:
            d["literal"] = True
        return d
