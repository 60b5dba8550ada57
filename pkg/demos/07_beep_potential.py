"""The beep potential of alg1 around one node.

E_S(t) sums the beep probabilities of the nodes in S.  While nodes compete
the potential of a neighborhood climbs phase by phase; a heard beep resets
nodes to zero, so it can collapse at once but only rises slowly.
"""

import numpy as np

from beepnet import engine, verify
from beepnet.engine import EngineConfig, WakeupSchedule
from beepnet.protocols import Alg1
from beepnet.topology import make_gnp

n = 64
g = make_gnp(n, 8 / n, 4)
state = engine.init(g, Alg1(n, 2), WakeupSchedule.all_at(n), EngineConfig(), 4)
probe, _ = verify.record_potential(state, 400)

# the node whose neighborhood reaches the highest potential
peak = [probe.b[:, list(g.adjacency[u])].sum(axis=1).max() if g.degree(u) else 0.0
        for u in range(n)]
v = int(np.argmax(peak))
nbrs = list(g.adjacency[v])
print(f"node {v} has {len(nbrs)} neighbors; silent for the first {Alg1(n).inactive_rounds} rounds")
for t in range(70, 200, 5):
    e = verify.beep_potential(probe, nbrs, t)
    print(f"t={t:3d}  E={e:6.3f}  " + "#" * int(40 * min(e, 1.0)))

good = verify.good_nodes(g, range(n))
print(f"{len(good)} of {n} nodes are good; good edges / edges = {verify.good_edge_count(g, range(n))}")
