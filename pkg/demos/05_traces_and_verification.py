"""Store a run as a trace file, load it back and re-check it.

The trace records who beeped and who heard a beep in every round, plus each
status change.  Feedback is recomputed from the graph to make sure the
stored run obeys the beeping model.
"""

import tempfile
from pathlib import Path

from beepnet import engine, formats, verify
from beepnet.engine import EngineConfig, FeedbackMode, WakeMode, WakeupSchedule
from beepnet.protocols import Alg2
from beepnet.topology import make_path

g = make_path(10)
cfg = EngineConfig(FeedbackMode.SENDER_CD, WakeMode.WAKE_ON_BEEP)
state = engine.init(g, Alg2(), WakeupSchedule.single(10, 0), cfg, seed=3)
trace, res = engine.run(state, 300)

path = Path(tempfile.mkdtemp()) / "path10.jsonl"
formats.save_trace(path, g, trace, {"algorithm": "alg2", "feedback": "sender_cd"})
print(path.read_text().splitlines()[1])

header, g2, trace2 = formats.load_trace(path)
print("feedback mismatches:", verify.check_feedback(g2, trace2, sender_cd=True))
print("final MIS:", verify.summarize(g2, trace2).mis_set, "valid:", verify.is_mis(g2, res.mis_set))

# a wake-up wave: node u starts u rounds after node 0
for u in (0, 1, 5, 9):
    hist = engine.observation_history(trace2, u)
    print(f"node {u}: woke at round {len(trace2) - len(hist)}, first rounds "
          + "".join(o.value for o in hist[:12]))
