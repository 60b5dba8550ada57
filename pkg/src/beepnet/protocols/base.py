"""Shared pieces of the node automata.

An automaton is a row ``S[u]`` of ``int64`` fields plus a vector of float
parameters, driven by three jitted functions::

    decide(S, u, params, t, key) -> bool        # True = beep, False = listen
    absorb(S, u, params, t, key, beeped, heard) # fold this round's feedback in
    status(S, u, params) -> int                 # INACTIVE / COMPETING / MIS

They take the whole state matrix and a row index rather than a row view;
views cost a refcounted allocation per call inside the engine loop.
``decide`` may record its own random choices in ``S[u]``.  Status labels are
only read by the verification code and never feed back into behavior.
"""

from __future__ import annotations

import numba as nb
import numpy as np

SLEEPING = 0
INACTIVE = 1
COMPETING = 2
MIS = 3

STATUS_NAMES = ("SLEEPING", "INACTIVE", "COMPETING", "MIS")


def kernel(fn):
    """Compile an automaton kernel.

    Kernels only read and write arrays they are handed, so they are built
    without numba's reference-counting runtime; with it every call pays
    atomic increfs on the state matrix, which dominated the engine loop.
    """
    return nb.njit(cache=True, _nrt=False)(fn)


@nb.njit(cache=True)
def pow2(i):
    """``2.0 ** i`` for ``i >= 0`` without a libm call."""
    if i < 62:
        return float(1 << i)
    return 2.0 ** i


@nb.njit(cache=True)
def pow2neg(i):
    """``2.0 ** -i`` for ``i >= 0``."""
    if i < 62:
        return 1.0 / float(1 << i)
    return 0.5 ** i


class Protocol:
    """Bundle of jitted automaton functions plus per-run parameters.

    Subclasses set ``name``, ``fields`` and the three kernels, and fill
    ``params`` in ``__init__``.
    """

    name = "protocol"
    fields: tuple[str, ...] = ()
    decide = None
    absorb = None
    status = None

    def __init__(self):
        self.params = np.zeros(1, dtype=np.float64)

    @property
    def n_fields(self) -> int:
        return len(self.fields)

    def field(self, name: str) -> int:
        return self.fields.index(name)

    def initial_state(self, keys: np.ndarray) -> np.ndarray:
        return np.zeros((keys.size, self.n_fields), dtype=np.int64)

    def diagnostics(self, states: np.ndarray) -> dict[str, np.ndarray]:
        return {}

    def describe(self) -> dict:
        return {"algorithm": self.name}

    def __repr__(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.describe().items() if k != "algorithm")
        return f"{type(self).__name__}({extra})"


class Automaton:
    """One node's automaton, stepped by hand with scripted feedback.

    Handy for conformance tests and for poking at a single node; the engine
    itself drives whole state matrices.
    """

    def __init__(self, protocol: Protocol, key: int, t0: int = 0):
        self.protocol = protocol
        # through the class: jitted functions bind like methods on instances
        self._k = type(protocol)
        self.key = np.uint64(key)
        self.states = protocol.initial_state(np.array([self.key], dtype=np.uint64))
        self.t = t0

    def decide(self) -> bool:
        return bool(self._k.decide(self.states, 0, self.protocol.params, self.t, self.key))

    def absorb(self, beeped: bool, heard: bool) -> None:
        self._k.absorb(
            self.states, 0, self.protocol.params, self.t, self.key, beeped, heard
        )
        self.t += 1

    def status(self) -> int:
        return int(self._k.status(self.states, 0, self.protocol.params))

    def step(self, heard: bool = False) -> bool:
        """Decide, then absorb ``heard``; returns whether the node beeped."""
        beeped = self.decide()
        self.absorb(beeped, heard)
        return beeped

    def __getitem__(self, name: str) -> int:
        return int(self.states[0, self.protocol.field(name)])
