"""Deterministic simulator for maximal-independent-set algorithms in the beeping model."""

from beepnet.engine import (
    ConfigurationError,
    EngineConfig,
    FeedbackMode,
    WakeMode,
    WakeupSchedule,
    init,
    run,
    step,
)
from beepnet.protocols import ALGORITHMS, make_protocol
from beepnet.topology import Graph, make_clique, make_disjoint_pairs, make_gnp, make_path

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ConfigurationError",
    "EngineConfig",
    "FeedbackMode",
    "Graph",
    "WakeMode",
    "WakeupSchedule",
    "init",
    "make_clique",
    "make_disjoint_pairs",
    "make_gnp",
    "make_path",
    "make_protocol",
    "run",
    "step",
]
