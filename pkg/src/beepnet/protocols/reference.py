"""Reference automata for replaying the lower-bound executions.

A node that hears nothing but silence listens for ``ell - 1`` rounds and
then beeps with probability ``p`` in every round from its ``ell``-th
participating round on.  Once it has heard a beep it switches to the
collision rule: stay silent forever, or beep with probability ``p_prime``
in every round from its ``m``-th participating round on.
"""

from __future__ import annotations

import numpy as np

from beepnet.protocols.base import COMPETING, INACTIVE, Protocol, kernel
from beepnet.rng import bernoulli

ROUNDS, HEARD = range(2)
P_ELL, P_P, P_AFTER, P_M, P_PPRIME = range(5)


@kernel
def _decide(S, u, params, t, key):
    r = S[u, ROUNDS] + 1
    if S[u, HEARD] == 0:
        return r >= params[P_ELL] and bernoulli(key, t, 0, params[P_P])
    if params[P_AFTER] == 1.0:
        return r >= params[P_M] and bernoulli(key, t, 0, params[P_PPRIME])
    return False


@kernel
def _absorb(S, u, params, t, key, beeped, heard):
    S[u, ROUNDS] += 1
    if heard and not beeped:
        S[u, HEARD] = 1


@kernel
def _status(S, u, params):
    if S[u, HEARD] == 1 and params[P_AFTER] == 0.0:
        return INACTIVE
    return COMPETING


class SilenceBeeper(Protocol):
    """Two-rule automaton keyed on whether the node has heard a beep yet."""

    name = "reference"
    fields = ("rounds", "heard")
    decide = _decide
    absorb = _absorb
    status = _status

    def __init__(self, ell: int, p: float, after_hear: str = "silent", m: int = 1, p_prime: float = 1.0):
        if ell < 1:
            raise ValueError(f"ell must be >= 1, got {ell}")
        if not 0.0 < p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {p}")
        if after_hear not in ("silent", "beep"):
            raise ValueError(f"after_hear must be 'silent' or 'beep', got {after_hear!r}")
        if after_hear == "beep" and (m < 1 or not 0.0 < p_prime <= 1.0):
            raise ValueError("collision rule needs m >= 1 and p_prime in (0, 1]")
        self.ell, self.p, self.after_hear, self.m, self.p_prime = ell, p, after_hear, m, p_prime
        self.params = np.array(
            [ell, p, 1.0 if after_hear == "beep" else 0.0, m, p_prime], dtype=np.float64
        )

    def describe(self):
        d = {"algorithm": self.name, "ell": self.ell, "p": self.p, "after_hear": self.after_hear}
        if self.after_hear == "beep":
            d.update(m=self.m, p_prime=self.p_prime)
        return d


def reference_silence_beeper(ell: int, p: float, after_hear: str = "silent", m: int = 1, p_prime: float = 1.0) -> SilenceBeeper:
    return SilenceBeeper(ell, p, after_hear, m, p_prime)
