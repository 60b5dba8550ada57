"""Symmetry breaking on disjoint pairs needs about log n rounds.

n/2 pairs each break symmetry with probability at most 1/2 per round, so
the last pair finishes at the maximum of n/2 geometric variables.  The
Monte Carlo estimate is compared with the exact expectation and with the
log2(n)/e lower bound.
"""

from beepnet import verify
from beepnet.experiment import ExperimentConfig, median_convergence, run_experiment

for n in (2, 16, 64, 256, 1024):
    mc = verify.pair_symmetry_oracle(n, 50_000, seed=1)
    exact = verify.expected_max_geometric(n // 2)
    print(f"n={n:5d}  monte carlo {mc:7.3f}  exact {exact:7.3f}  "
          f"lower bound {verify.termination_lower_bound(n):6.3f}")

# the real algorithms pay constant-factor overheads on the same graphs
for alg in ("alg2", "alg4"):
    cfg = ExperimentConfig(algorithm=alg, graph="pairs", n=[256], seeds=list(range(20)))
    print(f"{alg} on 128 pairs: median convergence {median_convergence(run_experiment(cfg)):g}")
