"""Experiment configuration and batch execution.

A config names an algorithm and its constants, a graph family, how nodes
wake, the feedback model, seeds and a horizon.  Runs are independent, so a
batch may execute on several threads (the simulation loop releases the
GIL); results always come back sorted by ``(n, seed)``.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from beepnet import engine
from beepnet.engine import ConfigurationError, EngineConfig, FeedbackMode, WakeMode, WakeupSchedule
from beepnet.protocols import ALGORITHMS, make_protocol
from beepnet.topology import Graph, make_clique, make_disjoint_pairs, make_gnp, make_path
from beepnet.verify import RunResult

GRAPH_KINDS = ("clique", "path", "pairs", "gnp")

# wake-on-beep is what the size-oblivious algorithms are designed for
DEFAULT_WAKE_MODE = {"alg1": "adversarial", "alg2": "wake_on_beep", "alg3": "wake_on_beep",
                     "alg4": "adversarial"}
DEFAULT_SCHEDULE = {"alg1": "all-at-0", "alg2": "staggered", "alg3": "staggered",
                    "alg4": "all-at-0"}


def default_horizon(n: int) -> int:
    L = max(1, math.ceil(math.log2(max(n, 2))))
    return 200 * L ** 3


def parse_seeds(spec) -> list[int]:
    """``"0..9"`` (inclusive), ``"1,4,7"``, a single int, or a list of ints."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(s) for s in spec]
    spec = str(spec).strip()
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ConfigurationError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ConfigurationError(f"no seeds in {spec!r}")
    return out


def parse_ns(spec) -> list[int]:
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(x) for x in spec]
    return parse_seeds(spec)


@dataclass
class ExperimentConfig:
    algorithm: str = "alg1"
    N: int | None = None
    c: int | None = None
    graph: str = "gnp"
    graph_seed: int | None = None
    n: list[int] = field(default_factory=lambda: [16])
    wake: str | None = None
    wake_mode: str | None = None
    feedback: str | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    horizon: int | None = None
    csv: str | None = None
    trace: str | None = None

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        """Build from a nested mapping (the YAML layout in the README)."""
        d = dict(d)
        flat: dict[str, Any] = {}
        g = d.pop("graph", None)
        if isinstance(g, dict):
            kind = g.get("kind", "gnp")
            if kind == "gnp" and "p" in g:
                kind = f"gnp:{g['p']}"
            if kind == "file":
                kind = g["path"]
            flat["graph"] = kind
            if "seed" in g:
                flat["graph_seed"] = int(g["seed"])
        elif g is not None:
            flat["graph"] = str(g)
        w = d.pop("wake", None)
        if isinstance(w, dict):
            if "schedule" in w:
                flat["wake"] = str(w["schedule"])
                if "stride" in w:
                    flat["wake"] += f":{int(w['stride'])}"
            if "mode" in w:
                flat["wake_mode"] = str(w["mode"])
        elif w is not None:
            flat["wake"] = str(w)
        out = d.pop("output", None) or {}
        for key in ("csv", "trace"):
            if key in out:
                flat[key] = out[key]
        for key in ("algorithm", "N", "c", "graph_seed", "wake_mode", "feedback", "horizon",
                    "csv", "trace"):
            if key in d:
                flat[key] = d.pop(key)
        if "n" in d:
            flat["n"] = parse_ns(d.pop("n"))
        if "seeds" in d:
            flat["seeds"] = parse_seeds(d.pop("seeds"))
        if "seed" in d:
            flat["seeds"] = parse_seeds(d.pop("seed"))
        if d:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(d))}")
        return cls(**flat)

    def resolved(self) -> "ExperimentConfig":
        """Fill per-algorithm defaults and check the invariants."""
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        cfg = replace(
            self,
            wake=self.wake or DEFAULT_SCHEDULE[self.algorithm],
            wake_mode=self.wake_mode or DEFAULT_WAKE_MODE[self.algorithm],
            feedback=self.feedback or ("sender_cd" if self.algorithm == "alg2" else "plain"),
        )
        try:
            fb = FeedbackMode(cfg.feedback)
            WakeMode(cfg.wake_mode)
        except ValueError as e:
            raise ConfigurationError(str(e)) from None
        if (fb is FeedbackMode.SENDER_CD) != (cfg.algorithm == "alg2"):
            raise ConfigurationError(
                "alg2 needs sender-side collision detection and the other algorithms run "
                f"without it; got feedback={cfg.feedback} for {cfg.algorithm}"
            )
        sched = cfg.wake.split(":")[0]
        if cfg.algorithm == "alg4" and sched not in ("all-at-0",) and not _is_file(cfg.wake):
            raise ConfigurationError("alg4 needs wake all-at-0 or an explicit wake file")
        if sched not in ("all-at-0", "staggered", "single", "scenario") and not _is_file(cfg.wake):
            raise ConfigurationError(f"unknown wake spec {cfg.wake!r}")
        if not cfg.n or any(n < 1 for n in cfg.n):
            raise ConfigurationError(f"n must be positive, got {cfg.n}")
        if cfg.algorithm == "alg1" and cfg.N is not None and cfg.N < max(cfg.n):
            raise ConfigurationError(f"alg1 needs N >= n, got N={cfg.N} for n={max(cfg.n)}")
        if cfg.c is not None and cfg.c < 1:
            raise ConfigurationError(f"c must be >= 1, got {cfg.c}")
        if cfg.horizon is not None and cfg.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {cfg.horizon}")
        kind = cfg.graph.split(":")[0]
        if kind not in GRAPH_KINDS and not _is_file(cfg.graph):
            raise ConfigurationError(f"unknown graph {cfg.graph!r} (and no such file)")
        if sched == "scenario" and not _is_file(cfg.graph):
            raise ConfigurationError("wake spec 'scenario' needs an edge-list file graph")
        return cfg

    def engine_config(self) -> EngineConfig:
        return EngineConfig(FeedbackMode(self.feedback), WakeMode(self.wake_mode))


def _is_file(spec: str) -> bool:
    return Path(spec).is_file()


def build_graph(spec: str, n: int, seed: int) -> tuple[Graph, str]:
    """Graph plus the name used in CSV rows."""
    if _is_file(spec):
        from beepnet.formats import read_graph

        return read_graph(spec), Path(spec).name
    kind, _, arg = spec.partition(":")
    if kind == "clique":
        return make_clique(n), "clique"
    if kind == "path":
        return make_path(n), "path"
    if kind == "pairs":
        return make_disjoint_pairs(n), "pairs"
    if kind == "gnp":
        if arg:
            p = float(arg)
            return make_gnp(n, p, seed), f"gnp(p={p:g})"
        return make_gnp(n, min(1.0, 8.0 / n), seed), "gnp(8/n)"
    raise ConfigurationError(f"unknown graph {spec!r}")


def build_schedule(spec: str, g: Graph, graph_spec: str = "") -> WakeupSchedule:
    kind, _, arg = spec.partition(":")
    if kind == "all-at-0":
        return WakeupSchedule.all_at(g.n, 0)
    if kind == "staggered":
        return WakeupSchedule.staggered(g.n, int(arg) if arg else 1)
    if kind == "single":
        return WakeupSchedule.single(g.n, int(arg) if arg else 0)
    from beepnet.formats import read_wake_rounds

    path = graph_spec if kind == "scenario" else spec
    wake = read_wake_rounds(path)
    if any(u >= g.n for u in wake):
        raise ConfigurationError(f"{path}: wake rounds for nodes outside the {g.n}-node graph")
    return WakeupSchedule.from_rounds([wake.get(u) for u in range(g.n)])


def run_one(cfg: ExperimentConfig, n: int, seed: int, keep_trace: bool = False):
    """One ``(n, seed)`` run of a resolved config; returns ``(RunResult, graph, trace)``."""
    gseed = seed if cfg.graph_seed is None else cfg.graph_seed
    g, gname = build_graph(cfg.graph, n, gseed)
    N = cfg.N if cfg.N is not None else g.n
    if cfg.algorithm == "alg1" and N < g.n:
        raise ConfigurationError(f"alg1 needs N >= n, got N={N} for n={g.n}")
    proto = make_protocol(cfg.algorithm, N=N, c=cfg.c)
    sched = build_schedule(cfg.wake, g, cfg.graph)
    state = engine.init(g, proto, sched, cfg.engine_config(), seed)
    horizon = cfg.horizon or default_horizon(g.n)
    trace, res = engine.run(state, horizon)
    res.graph = gname
    return res, g, (trace if keep_trace else None)


def thread_count() -> int:
    env = os.environ.get("BEEPNET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"BEEPNET_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> list[RunResult]:
    cfg = cfg.resolved()
    jobs = sorted((n, s) for n in cfg.n for s in cfg.seeds)
    threads = threads or thread_count()
    if threads <= 1 or len(jobs) <= 1:
        return [run_one(cfg, n, s)[0] for n, s in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves submission order, so rows stay sorted
        return list(pool.map(lambda job: run_one(cfg, *job)[0], jobs))


def median_summary(results: list[RunResult]) -> list[str]:
    """One comment line per n with the median convergence round.

    Runs that did not converge count as infinitely slow.
    """
    lines = []
    for n in sorted({r.n for r in results}):
        rows = [r for r in results if r.n == n]
        med = median_convergence(rows)
        conv = sum(r.converged for r in rows)
        lines.append(f"n={n} runs={len(rows)} converged={conv} median_convergence_round={med:g}")
    return lines


def median_convergence(results: list[RunResult]) -> float:
    vals = [math.inf if r.convergence_round is None else r.convergence_round for r in results]
    return statistics.median(vals)
