"""Why alg3 also inhibits on beeps heard in the last round of an exchange.

With wake-on-beep, neighbors start at most one round apart.  A node one
round ahead of an MIS neighbor hears that neighbor's beeps only in the
third round of its own exchanges.  If those beeps do not set the inhibit
flag, the node keeps recandidating and eventually knocks the MIS node out.
"""

from beepnet import engine, verify
from beepnet.engine import EngineConfig, FeedbackMode, WakeMode, WakeupSchedule
from beepnet.protocols import Alg3
from beepnet.topology import make_path

cfg = EngineConfig(FeedbackMode.PLAIN, WakeMode.WAKE_ON_BEEP)
for literal in (True, False):
    lost, rounds = 0, []
    for seed in range(20):
        state = engine.init(make_path(16), Alg3(3, literal=literal),
                            WakeupSchedule.staggered(16), cfg, seed)
        trace, res = engine.run(state, 3000)
        spans = [b - a for s in verify.mis_intervals(trace).values() for a, b in s if b < 3000]
        lost += sum(1 for d in spans if d >= 64)
        rounds.append(res.convergence_round)
    done = [r for r in rounds if r is not None]
    label = "third-round beeps ignored" if literal else "third-round beeps inhibit"
    print(f"{label}: {lost} established MIS nodes displaced, "
          f"{len(done)}/20 runs settled, slowest settled run {max(done)} rounds")
