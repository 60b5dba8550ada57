"""Counter-based per-node random streams.

Every random draw is a pure function of ``(node key, round, slot)``::

    node_key(seed, u) = mix(mix(seed ^ SEED_SALT) ^ mix(u + NODE_SALT))
    word(key, t, slot) = mix(key ^ mix((t << 16 | slot) + DRAW_SALT))
    uniform = (word >> 11) * 2**-53

where ``mix`` is the SplitMix64 finalizer.  A node's actions therefore
depend only on its own key and on what it heard, never on how many draws
other nodes made.  ``slot`` distinguishes draws within one round and must be
below ``2**16``.
"""

from __future__ import annotations

import numba as nb
import numpy as np

SEED_SALT = np.uint64(0x243F6A8885A308D3)
NODE_SALT = np.uint64(0x9E3779B97F4A7C15)
DRAW_SALT = np.uint64(0x13198A2E03707344)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@nb.njit(cache=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True)
def draw_word(key, t, slot):
    ctr = (np.uint64(t) << np.uint64(16)) | np.uint64(slot)
    return mix64(np.uint64(key) ^ mix64(ctr + DRAW_SALT))


@nb.njit(cache=True)
def uniform(key, t, slot):
    return float(draw_word(key, t, slot) >> np.uint64(11)) * _INV53


@nb.njit(cache=True)
def bernoulli(key, t, slot, p):
    return uniform(key, t, slot) < p


@nb.njit(cache=True)
def _node_keys(seed, n):
    out = np.empty(n, dtype=np.uint64)
    base = mix64(np.uint64(seed) ^ SEED_SALT)
    for u in range(n):
        out[u] = mix64(base ^ mix64(np.uint64(u) + NODE_SALT))
    return out


def node_keys(seed: int, n: int) -> np.ndarray:
    """Per-node stream keys for run ``seed`` (``seed`` is taken mod 2**64)."""
    return _node_keys(np.uint64(int(seed) % (1 << 64)), n)
