"""Command-line front end: ``beepnet run|experiment|scenario|verify-trace``.

Exit codes: 0 success, 1 a run failed to converge or kept an adjacent MIS
pair for too long (or a checked statistic missed its threshold), 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from beepnet import formats, verify
from beepnet.engine import ConfigurationError
from beepnet.experiment import (
    ExperimentConfig,
    median_summary,
    parse_ns,
    parse_seeds,
    run_experiment,
    run_one,
    thread_count,
)
from beepnet.protocols import ALGORITHMS
from beepnet.protocols.base import MIS
from beepnet.topology import InvalidGraphError, make_lb_case1, make_lb_case2

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load_yaml(path: str) -> dict:
    import yaml

    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return data


def _config_from_args(args, sweep: bool) -> ExperimentConfig:
    cfg = ExperimentConfig.from_dict(_load_yaml(args.config)) if args.config else ExperimentConfig()
    over = {}
    for key in ("algorithm", "N", "c", "graph", "graph_seed", "wake", "wake_mode", "feedback",
                "horizon", "csv", "trace"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    if args.n is not None:
        over["n"] = parse_ns(args.n)
    if args.seeds is not None:
        over["seeds"] = parse_seeds(args.seeds)
    for k, v in over.items():
        setattr(cfg, k, v)
    cfg = cfg.resolved()
    if not sweep and (len(cfg.n) != 1 or len(cfg.seeds) != 1):
        raise ConfigurationError("run takes a single n and a single seed; use experiment to sweep")
    return cfg


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file; flags override its values")
    p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--graph", help="clique | path | pairs | gnp | gnp:<p> | edge-list file")
    p.add_argument("--graph-seed", type=int, dest="graph_seed",
                   help="seed for random graphs (default: the run seed)")
    p.add_argument("--n", help="node count, or a sweep such as 32,64 or 16..20")
    p.add_argument("--N", type=int, help="upper bound on n for alg1 (default n)")
    p.add_argument("--c", type=int, help="constant c for alg1/alg3")
    p.add_argument("--feedback", choices=("plain", "sender_cd"))
    p.add_argument("--wake", help="all-at-0 | staggered[:stride] | single[:node] | scenario | wake file")
    p.add_argument("--wake-mode", dest="wake_mode", choices=("adversarial", "wake_on_beep"))
    p.add_argument("--seed", "--seeds", dest="seeds", help="seed, list 1,2,3 or range 0..9")
    p.add_argument("--horizon", type=int, help="rounds to simulate (default 200*ceil(log2 n)^3)")
    p.add_argument("--csv", help="write result rows here (default stdout)")


def _emit_csv(cfg: ExperimentConfig, results, comments=()) -> None:
    text = formats.csv_text(results, comments)
    if cfg.csv:
        Path(cfg.csv).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = _config_from_args(args, sweep=False)
    res, g, trace = run_one(cfg, cfg.n[0], cfg.seeds[0], keep_trace=bool(cfg.trace))
    if cfg.trace:
        meta = {"algorithm": cfg.algorithm, "feedback": cfg.feedback, "wake_mode": cfg.wake_mode,
                "seed": cfg.seeds[0], "graph": res.graph}
        formats.save_trace(cfg.trace, g, trace, meta)
    _emit_csv(cfg, [res])
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_experiment(args) -> int:
    cfg = _config_from_args(args, sweep=True)
    if cfg.trace:
        raise ConfigurationError("traces are written by run, not experiment")
    threads = args.threads or thread_count()
    results = run_experiment(cfg, threads)
    _emit_csv(cfg, results, median_summary(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_scenario(args) -> int:
    seeds = parse_seeds(args.seeds)
    if args.case == "pairs":
        n = args.n if args.n is not None else 256
        mean = verify.pair_symmetry_oracle(n, args.trials, seeds[0])
        bound = verify.termination_lower_bound(n)
        exact = verify.expected_max_geometric(n // 2)
        print(f"pairs n={n} trials={args.trials} seed={seeds[0]}")
        print(f"mean_break_round={mean:.4f} lower_bound={bound:.4f} closed_form={exact:.4f}")
        return EXIT_OK if mean >= bound else EXIT_FAIL
    try:
        if args.case == "case1":
            sc = make_lb_case1(args.k, args.clique_scale, args.p, args.ell)
            prefix = args.prefix_len if args.prefix_len is not None else args.k - 1
        else:
            sc = make_lb_case2(args.k, args.clique_scale, args.p, args.p_prime, args.ell, args.m)
            prefix = args.prefix_len if args.prefix_len is not None else sc.params["q"]
    except InvalidGraphError as e:
        raise ConfigurationError(str(e)) from None
    if args.out:
        formats.write_scenario(args.out, sc)
    held = 0
    for s in seeds:
        trace = verify.replay_scenario(sc, s)
        held += verify.indistinguishability_check(sc, trace, prefix)
    frac = held / len(seeds)
    print(f"{args.case} k={args.k} clique_scale={args.clique_scale} p={args.p} ell={args.ell} "
          f"nodes={sc.graph.n} seeds={len(seeds)} prefix_len={prefix}")
    print(f"indistinguishable_fraction={frac:.4f}")
    if args.expect is not None:
        return EXIT_OK if frac >= args.expect else EXIT_FAIL
    return EXIT_OK


def cmd_verify_trace(args) -> int:
    header, g, trace = formats.load_trace(args.trace_file)
    sender_cd = header.get("feedback") == "sender_cd"
    bad = verify.check_feedback(g, trace, sender_cd=sender_cd)
    final = trace.final_statuses
    mis = np.flatnonzero(final == MIS)
    res = verify.summarize(g, trace)
    print(f"rounds={len(trace)} n={g.n} feedback_mismatch_rounds={bad}")
    print(f"final_is_mis={verify.is_mis(g, mis)} stable={res.final_stable} "
          f"convergence_round={res.convergence_round} persistent_violations={res.persistent_violations}")
    return EXIT_OK if bad == 0 and res.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beepnet", description="Beeping-model MIS simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one (graph, seed) run; one CSV row")
    _add_run_flags(p)
    p.add_argument("--trace", help="write a line-delimited JSON trace here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="sweep n and seeds; CSV rows plus per-n medians")
    _add_run_flags(p)
    p.add_argument("--threads", type=int, help="parallel runs (default $BEEPNET_THREADS or CPUs)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scenario", help="lower-bound constructions and the pair oracle")
    p.add_argument("case", choices=("case1", "case2", "pairs"))
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--clique-scale", type=int, default=4, dest="clique_scale")
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--p-prime", type=float, default=0.5, dest="p_prime")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--prefix-len", type=int, dest="prefix_len",
                   help="observation prefix to compare (default k-1 for case1, k//4 for case2)")
    p.add_argument("--n", type=int, help="pairs: node count (even)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", "--seeds", dest="seeds", default="0..499")
    p.add_argument("--expect", type=float, help="exit 1 if the fraction falls below this")
    p.add_argument("--out", help="also write the scenario as an edge list")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("verify-trace", help="re-check feedback and the final MIS of a stored trace")
    p.add_argument("trace_file")
    p.set_defaults(func=cmd_verify_trace)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage already; keep --help at 0
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ConfigurationError, InvalidGraphError, ValueError, FileNotFoundError) as e:
        print(f"beepnet: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
