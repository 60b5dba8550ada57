from beepnet.protocols.alg1 import Alg1
from beepnet.protocols.alg2 import Alg2
from beepnet.protocols.alg3 import Alg3, competition_vector
from beepnet.protocols.alg4 import Alg4
from beepnet.protocols.base import (
    COMPETING,
    INACTIVE,
    MIS,
    SLEEPING,
    STATUS_NAMES,
    Automaton,
    Protocol,
)
from beepnet.protocols.reference import SilenceBeeper, reference_silence_beeper

ALGORITHMS = ("alg1", "alg2", "alg3", "alg4")


def make_protocol(name: str, N: int | None = None, c: int | None = None) -> Protocol:
    """Build one of the four MIS automata by name."""
    if name == "alg1":
        if N is None:
            raise ValueError("alg1 needs N")
        return Alg1(N, 2 if c is None else c)
    if name == "alg2":
        return Alg2()
    if name == "alg3":
        return Alg3(3 if c is None else c)
    if name == "alg4":
        return Alg4()
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


__all__ = [
    "ALGORITHMS",
    "Alg1",
    "Alg2",
    "Alg3",
    "Alg4",
    "Automaton",
    "COMPETING",
    "INACTIVE",
    "MIS",
    "Protocol",
    "SLEEPING",
    "STATUS_NAMES",
    "SilenceBeeper",
    "competition_vector",
    "make_protocol",
    "reference_silence_beeper",
]
