"""Text formats: edge lists, scenarios, round traces and result CSVs.

Edge list::

    n 5
    0 1
    1 2

Scenarios add ``# wake <node> <round>`` and ``# label <node> <string>``
comment lines after the edges.

Traces are line-delimited JSON.  The first line is a header carrying the
graph and run provenance; then one object per round::

    {"t": 12, "actions": "3,2,5", "heard": "10", "statuses": {"4": "MIS"}}

``actions``/``heard`` are run lengths of alternating bit values over node
ids, starting with a run of zeros (possibly empty).  ``statuses`` lists only
the nodes whose label changed in that round.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from beepnet.engine import Trace
from beepnet.protocols.base import SLEEPING, STATUS_NAMES
from beepnet.topology import Graph, InvalidGraphError, LBScenario
from beepnet.verify import RunResult

TRACE_FORMAT = "beepnet-trace/1"


# --------------------------------------------------------------------------
# graphs and scenarios


def format_graph(g: Graph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def format_scenario(sc: LBScenario) -> str:
    out = [format_graph(sc.graph).rstrip("\n")]
    for u, w in enumerate(sc.wakeup):
        out.append(f"# wake {u} {w}")
    for u, lab in enumerate(sc.group_labels):
        out.append(f"# label {u} {lab}")
    return "\n".join(out) + "\n"


def parse_edge_list(text: str) -> tuple[Graph, dict[int, int], dict[int, str]]:
    """Parse an edge list; returns the graph plus any wake/label comments."""
    n = None
    edges = []
    wake: dict[int, int] = {}
    labels: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 2)
            if len(parts) == 3 and parts[0] == "wake":
                wake[int(parts[1])] = int(parts[2])
            elif len(parts) == 3 and parts[0] == "label":
                labels[int(parts[1])] = parts[2]
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise InvalidGraphError(f"line {lineno}: expected 'n <count>', got {raw!r}")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise InvalidGraphError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise InvalidGraphError("missing 'n <count>' header")
    return Graph.from_edges(n, edges), wake, labels


def read_wake_rounds(path: str | Path) -> dict[int, int]:
    """Wake rounds from ``# wake <node> <round>`` lines (or bare ``<node> <round>``
    lines in a file that has no ``n`` header)."""
    wake: dict[int, int] = {}
    text = Path(path).read_text()
    bare = not any(ln.split()[:1] == ["n"] for ln in text.splitlines())
    for ln in text.splitlines():
        parts = ln.replace("#", " ").split()
        if len(parts) == 3 and parts[0] == "wake":
            wake[int(parts[1])] = int(parts[2])
        elif bare and len(parts) == 2 and not ln.lstrip().startswith("#"):
            wake[int(parts[0])] = int(parts[1])
    return wake


def read_graph(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())[0]


def write_graph(path: str | Path, g: Graph) -> None:
    Path(path).write_text(format_graph(g))


def read_scenario(path: str | Path) -> LBScenario:
    g, wake, labels = parse_edge_list(Path(path).read_text())
    return LBScenario(
        g,
        tuple(wake.get(u, -1) for u in range(g.n)),
        tuple(labels.get(u, "") for u in range(g.n)),
    )


def write_scenario(path: str | Path, sc: LBScenario) -> None:
    Path(path).write_text(format_scenario(sc))


# --------------------------------------------------------------------------
# run-length bit strings


def rle_encode(bits: np.ndarray) -> str:
    bits = np.asarray(bits, dtype=bool)
    if bits.size == 0:
        return ""
    change = np.flatnonzero(bits[1:] != bits[:-1]) + 1
    bounds = np.concatenate(([0], change, [bits.size]))
    runs = np.diff(bounds).tolist()
    if bits[0]:
        runs.insert(0, 0)
    return ",".join(map(str, runs))


def rle_decode(s: str, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=bool)
    if not s:
        return out
    pos, val = 0, False
    for r in s.split(","):
        r = int(r)
        if val:
            out[pos:pos + r] = True
        pos += r
        val = not val
    if pos != n:
        raise ValueError(f"run lengths cover {pos} nodes, expected {n}")
    return out


# --------------------------------------------------------------------------
# traces


def write_trace(fh: TextIO, g: Graph, trace: Trace, meta: dict | None = None) -> None:
    header = {"format": TRACE_FORMAT, "n": g.n, "t0": int(trace.t0), "rounds": len(trace)}
    header.update(meta or {})
    header["edges"] = [list(e) for e in g.edges()]
    header["initial"] = {
        str(u): STATUS_NAMES[s] for u, s in enumerate(trace.initial_status) if s != SLEEPING
    }
    fh.write(json.dumps(header, separators=(",", ":")) + "\n")
    j = 0
    ev_t = trace.ev_t
    for idx in range(len(trace)):
        t = trace.t0 + idx
        changed = {}
        while j < ev_t.size and ev_t[j] == t:
            changed[str(int(trace.ev_node[j]))] = STATUS_NAMES[trace.ev_status[j]]
            j += 1
        rec = {
            "t": int(t),
            "actions": rle_encode(trace.beeped(idx)),
            "heard": rle_encode(trace.heard(idx)),
            "statuses": changed,
        }
        fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def save_trace(path: str | Path, g: Graph, trace: Trace, meta: dict | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        write_trace(fh, g, trace, meta)


def load_trace(path: str | Path) -> tuple[dict, Graph, Trace]:
    """Read a trace file back; returns ``(header, graph, trace)``."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("format") != TRACE_FORMAT:
            raise ValueError(f"{path}: not a {TRACE_FORMAT} file")
        n = int(header["n"])
        g = Graph.from_edges(n, [tuple(e) for e in header["edges"]])
        initial = np.full(n, SLEEPING, dtype=np.int8)
        for u, name in header.get("initial", {}).items():
            initial[int(u)] = STATUS_NAMES.index(name)
        beep_rows, heard_rows, ev = [], [], []
        t0 = int(header.get("t0", 0))
        for i, line in enumerate(fh):
            rec = json.loads(line)
            if rec["t"] != t0 + i:
                raise ValueError(f"{path}: round {rec['t']} out of sequence")
            beep_rows.append(np.packbits(rle_decode(rec["actions"], n), bitorder="little"))
            heard_rows.append(np.packbits(rle_decode(rec["heard"], n), bitorder="little"))
            for u, name in sorted(rec["statuses"].items(), key=lambda kv: int(kv[0])):
                ev.append((rec["t"], int(u), STATUS_NAMES.index(name)))
    nbytes = (n + 7) // 8
    ev_arr = np.array(ev, dtype=np.int64).reshape(-1, 3)
    trace = Trace(
        n, t0,
        np.array(beep_rows, dtype=np.uint8).reshape(-1, nbytes),
        np.array(heard_rows, dtype=np.uint8).reshape(-1, nbytes),
        ev_arr[:, 0].copy(), ev_arr[:, 1].copy(), ev_arr[:, 2].astype(np.int8), initial,
    )
    return header, g, trace


# --------------------------------------------------------------------------
# result tables


def write_csv(fh: TextIO, results: Iterable[RunResult], comments: Iterable[str] = ()) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RunResult.CSV_HEADER)
    for r in results:
        w.writerow(r.csv_row())
    for c in comments:
        fh.write(f"# {c}\n")


def csv_text(results: Iterable[RunResult], comments: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    write_csv(buf, results, comments)
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict[str, str]]:
    """Rows of a results CSV as dicts; comment lines are skipped."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
