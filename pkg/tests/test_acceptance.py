"""The ten acceptance criteria, each at its stated tolerance.

Each test records a one-line summary of what it measured; conftest.py
prints them as PASS/FAIL lines at the end of the session.
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np

from beepnet import engine as E
from beepnet import verify
from beepnet.engine import EngineConfig, FeedbackMode, WakeMode, WakeupSchedule
from beepnet.experiment import ExperimentConfig, median_convergence, run_experiment
from beepnet.protocols import Alg1, Alg2, Alg4
from beepnet.topology import Graph, make_clique, make_gnp, make_lb_case1, make_path

ALGS = ("alg1", "alg2", "alg3", "alg4")
SWEEP = (32, 64, 128, 256, 512)


def L(n):
    return math.ceil(math.log2(n))


# ---------------------------------------------------------------- 1: safety


def test_criterion_01_safety(record_property):
    t0 = time.time()
    bad, total, per_alg = [], 0, {}
    for alg in ALGS:
        runs = 0
        for fam in ("clique", "path", "pairs", "gnp"):
            for n in (16, 64, 256):
                cfg = ExperimentConfig(algorithm=alg, graph=fam, n=[n], seeds=list(range(17)),
                                       horizon=100 * L(n) ** 3)
                for r in run_experiment(cfg, threads=1):
                    runs += 1
                    if not (r.final_is_mis and r.final_stable and r.persistent_violations == 0):
                        bad.append((alg, fam, n, r.seed))
        per_alg[alg] = runs
        total += runs
    secs = time.time() - t0
    record_property("detail", f"{total} runs ({per_alg['alg1']} per algorithm), "
                              f"{len(bad)} unsafe or unstable, {secs:.0f}s (target < 300s)")
    assert min(per_alg.values()) >= 200
    assert not bad, bad[:10]
    assert secs < 300


# ---------------------------------------------------------------- 2-5: convergence


_sweeps: dict[str, dict] = {}


def sweep(alg):
    """50 seeds of G(n, 8/n) per n, with each algorithm's standard wake setup."""
    if alg not in _sweeps:
        out = {}
        for n in SWEEP:
            cfg = ExperimentConfig(algorithm=alg, graph="gnp", n=[n], seeds=list(range(50)),
                                   horizon=20 * L(n) ** 3)
            out[n] = run_experiment(cfg, threads=1)
        _sweeps[alg] = out
    return _sweeps[alg]


def medians(alg):
    return {n: median_convergence(rs) for n, rs in sweep(alg).items()}


def fmt(med, bound):
    return " ".join(f"{n}:{med[n]:g}/{bound(n):g}" for n in SWEEP)


def test_criterion_02_alg1_convergence(record_property):
    med = medians("alg1")
    bound = lambda n: 100 * L(n) ** 3  # N = n
    ratio = med[512] / med[64]
    limit = 3.0 * (L(512) / L(64)) ** 3
    record_property("detail", f"median/bound {fmt(med, bound)}; "
                              f"growth {ratio:.2f} (limit {limit:.3f})")
    assert all(med[n] <= bound(n) for n in SWEEP)
    assert ratio <= limit


def test_criterion_03_alg2_convergence(record_property):
    med = medians("alg2")
    bound = lambda n: 150 * L(n) ** 2
    record_property("detail", f"median/bound {fmt(med, bound)}")
    assert all(med[n] <= bound(n) for n in SWEEP)


def test_criterion_04_alg3_convergence(record_property):
    med = medians("alg3")
    bound = lambda n: 150 * L(n) ** 3
    record_property("detail", f"median/bound {fmt(med, bound)}")
    assert all(med[n] <= bound(n) for n in SWEEP)


def test_criterion_05_alg4_convergence_and_k(record_property):
    med = medians("alg4")
    bound = lambda n: 150 * L(n) ** 2
    worst_k = {n: max(r.max_k for r in rs) for n, rs in sweep("alg4").items()}
    record_property("detail", f"median/bound {fmt(med, bound)}; max_k/limit "
                              + " ".join(f"{n}:{worst_k[n]}/{12 * L(n)}" for n in SWEEP))
    assert all(med[n] <= bound(n) for n in SWEEP)
    assert all(worst_k[n] <= 12 * L(n) for n in SWEEP)


# ---------------------------------------------------------------- 6: pairs oracle


def test_criterion_06_pair_oracle(record_property):
    mean = verify.pair_symmetry_oracle(256, 100_000, 0)
    exact = verify.expected_max_geometric(128)
    bound = verify.termination_lower_bound(256)
    rel = abs(mean - exact) / exact
    record_property("detail", f"mean {mean:.4f} >= {bound:.4f}; closed form {exact:.4f}, "
                              f"off by {100 * rel:.2f}% (limit 2%)")
    assert mean >= bound
    assert rel <= 0.02


# ---------------------------------------------------------------- 7: case 1 replay


def test_criterion_07_case1_indistinguishable(record_property):
    k = 6
    sc = make_lb_case1(k, 4, 0.9, 2)
    held = sum(verify.indistinguishability_check(sc, verify.replay_scenario(sc, s), k - 1)
               for s in range(500))
    record_property("detail", f"{held}/500 seeds with identical {k - 1}-round prefixes "
                              f"in every U clique (need >= 95%)")
    assert held >= 0.95 * 500


# ---------------------------------------------------------------- 8: oracle equivalence


_PERMS = {n: np.array(list(itertools.permutations(range(n)))) for n in range(1, 8)}


def canonical(g: Graph) -> tuple[int, bytes]:
    """Smallest upper-triangle bit string over all relabelings."""
    n = g.n
    a = np.zeros((n, n), dtype=np.uint8)
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1
    p = _PERMS[n]
    iu = np.triu_indices(n, 1)
    perm = a[p[:, :, None], p[:, None, :]][:, iu[0], iu[1]]
    best = min(map(bytes, perm)) if perm.shape[1] else b""
    return n, best


def brute_force_mis(g: Graph, s: set[int]) -> bool:
    edges = g.edges()
    if any(u in s and v in s for u, v in edges):
        return False
    # maximal: no outside node can be added without breaking independence
    for v in range(g.n):
        if v in s:
            continue
        if all(u not in s for u in g.adjacency[v]):
            return False
    return True


def graph_suite():
    seen, suite = set(), []

    def add(g):
        key = canonical(g)
        if key not in seen:
            seen.add(key)
            suite.append(g)

    for n in range(1, 8):
        add(make_clique(n))
        add(make_path(n))
        for p in (0.15, 0.3, 0.5, 0.7, 0.85):
            for seed in range(40 if n < 7 else 60):
                add(make_gnp(n, p, seed))
    return suite


def test_criterion_08_oracle_equivalence(record_property):
    suite = graph_suite()
    checks = disagreements = inequality_fail = 0
    for g in suite:
        for r in range(g.n + 1):
            for combo in itertools.combinations(range(g.n), r):
                checks += 1
                if verify.is_mis(g, combo) != brute_force_mis(g, set(combo)):
                    disagreements += 1
        for r in range(g.n + 1):
            for active in itertools.combinations(range(g.n), r):
                good_e, all_e = verify.good_edge_count(g, active)
                act = set(active)
                deg = {v: sum(1 for u in g.adjacency[v] if u in act) for v in act}
                good_deg = sum(deg[v] for v in verify.good_nodes(g, active))
                if 2 * good_e < all_e or 2 * good_deg < all_e:
                    inequality_fail += 1
    record_property("detail", f"{len(suite)} non-isomorphic graphs, {checks} subset checks, "
                              f"{disagreements} disagreements, {inequality_fail} good-edge failures")
    assert checks >= 10_000
    assert disagreements == 0
    assert inequality_fail == 0


# ---------------------------------------------------------------- 9: goldens


def _isolated(proto, config, wake=0):
    g = Graph.from_edges(1, [])
    st = E.init(g, proto, WakeupSchedule.from_rounds([wake]), config, 0)
    return E.run(st, 100)[1].convergence_round


def test_criterion_09_goldens(record_property):
    plain = EngineConfig(FeedbackMode.PLAIN, WakeMode.ADVERSARIAL_ONLY)
    cd = EngineConfig(FeedbackMode.SENDER_CD, WakeMode.WAKE_ON_BEEP)
    got = {
        "alg1 N=8 c=2": (_isolated(Alg1(8, 2), plain, wake=3) - 3, 36),
        "alg2 first MIS round": (_isolated(Alg2(), cd) + 1, 8),
        "alg4": (_isolated(Alg4(), plain), 7),
    }
    record_property("detail", ", ".join(f"{k}: {v[0]} (expect {v[1]})" for k, v in got.items()))
    assert all(a == b for a, b in got.values())


# ---------------------------------------------------------------- 10: determinism


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "beepnet", *args], cwd=cwd,
                          capture_output=True, text=True)


def test_criterion_10_determinism(tmp_path, record_property):
    same = []
    jobs = {
        "run": ["run", "--algorithm", "alg3", "--graph", "gnp", "--n", "64", "--seed", "5",
                "--csv", "{d}/r.csv", "--trace", "{d}/t.jsonl"],
        "experiment": ["experiment", "--algorithm", "alg1", "--graph", "path", "--n", "16,32",
                       "--seeds", "0..4", "--csv", "{d}/e.csv"],
    }
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        for args in jobs.values():
            proc = _cli([a.format(d=tmp_path / d) for a in args], tmp_path)
            assert proc.returncode == 0, proc.stderr
    for name in ("r.csv", "t.jsonl", "e.csv"):
        same.append((tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes())
    record_property("detail", f"{sum(same)}/3 output files byte-identical across two processes")
    assert all(same)
