"""How the median convergence round grows with n.

Sweeps n over powers of two on G(n, 8/n) and prints the median convergence
round per algorithm next to log2(n)^2 and log2(n)^3 for scale.  Runs that
miss the horizon count as infinitely slow.
"""

import math

from beepnet.experiment import ExperimentConfig, median_convergence, run_experiment

NS = (32, 64, 128, 256)
SEEDS = list(range(15))

print("n     " + "".join(f"{a:>9}" for a in ("alg1", "alg2", "alg3", "alg4")) + "   log^2   log^3")
for n in NS:
    L = math.ceil(math.log2(n))
    meds = []
    for alg in ("alg1", "alg2", "alg3", "alg4"):
        cfg = ExperimentConfig(algorithm=alg, graph="gnp", n=[n], seeds=SEEDS, horizon=20 * L ** 3)
        meds.append(median_convergence(run_experiment(cfg)))
    print(f"{n:<6}" + "".join(f"{m:>9g}" for m in meds) + f"{L * L:>8}{L ** 3:>8}")
