"""Files written for a run and for a grid of runs.

Everything here is plain text with fixed column counts so any strict CSV/TSV
reader (or a plotting tool) can consume it directly.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .video import moving_average

RUN_FILES = ("trace.txt", "sender.log", "receiver.log", "metrics.csv", "psnr_smooth.csv",
             "jitter.csv", "channel.csv", "routes.csv", "summary.txt")


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9f}"
    return str(x)


def _csv(header, rows, delimiter=",") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def psnr_smooth_csv(psnr, window: int = 100) -> str:
    smooth = moving_average(psnr, window)
    return _csv(["frame", "psnr_db", "psnr_smooth_db"],
                ([i, _num(p), _num(s)] for i, (p, s) in enumerate(zip(psnr, smooth))))


def jitter_csv(jitter, window: int = 100) -> str:
    """Only frames that have a jitter value (both it and its predecessor arrived)."""
    jitter = np.asarray(jitter, dtype=np.float64)
    frames = np.flatnonzero(~np.isnan(jitter))
    values = jitter[frames]
    smooth = moving_average(values, window)
    return _csv(["frame", "jitter_s", "jitter_smooth_s"],
                ([int(f), _num(v), _num(s)] for f, v, s in zip(frames, values, smooth)))


def summary_text(summary: dict) -> str:
    return "".join(f"{k} = {_num(v) if not isinstance(v, str) else v}\n" for k, v in summary.items())


def write_run(result, out_dir, window: int = 100) -> Path:
    """Write every artefact of one :class:`RunResult` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    m = result.metrics
    files = {
        "trace.txt": result.trace.to_text(),
        "sender.log": result.sender_log.to_text(),
        "receiver.log": result.receiver_log.to_text(),
        "metrics.csv": m.to_csv(),
        "psnr_smooth.csv": psnr_smooth_csv(m.psnr, window),
        "jitter.csv": jitter_csv(m.jitter, window),
        "channel.csv": result.channel.to_csv(),
        "routes.csv": result.route_log.to_csv(),
        "summary.txt": summary_text(result.summary()),
    }
    if result.event_log:
        files["events.log"] = "\n".join(result.event_log) + "\n"
    for name, text in files.items():
        (out / name).write_text(text)
    return out


# -- grid-level reports -----------------------------------------------------

def extractability_tsv(rows, node_counts, spacings) -> str:
    """Table-shaped verdicts for static cells: ``Y:0.985`` / ``N:0.021`` / ``ERR`` / ``-``.

    ``rows`` maps ``(protocol, n_nodes, spacing)`` to a summary dict, or to
    ``None`` for a cell that failed.
    """
    protocols = sorted({p for p, _, _ in rows})
    header = ["protocol", "n_nodes"] + [f"D={d:g}" for d in spacings]
    out = []
    for p in protocols:
        for n in node_counts:
            line = [p, str(n)]
            for d in spacings:
                if (p, n, d) not in rows:
                    line.append("-")
                elif rows[p, n, d] is None:
                    line.append("ERR")
                else:
                    s = rows[p, n, d]
                    line.append(f"{'Y' if s['extractable'] else 'N'}:{s['decodable_rate']:.3f}")
            out.append(line)
    return _csv(header, out, delimiter="\t")


COMPARISON_METRICS = ("mean_psnr_db", "mean_abs_jitter_s", "loss_rate", "first_frame_time_s")


def comparison_csv(summaries, protocols=("AODV", "DSDV")) -> str:
    """One row per (n_nodes, spacing, mobility); protocol metrics side by side."""
    by_cell: dict[tuple, dict[str, dict]] = {}
    for s in summaries:
        key = (s["n_nodes"], s["spacing"], s["mobility"])
        by_cell.setdefault(key, {})[s["protocol"]] = s
    header = ["n_nodes", "spacing", "mobility"] + [
        f"{p.lower()}_{m}" for p in protocols for m in COMPARISON_METRICS]
    rows = []
    for key in sorted(by_cell, key=lambda k: (k[2] != "STATIC", k[2], k[0], k[1])):
        n, d, mob = key
        row = [str(n), f"{d:g}", mob]
        for p in protocols:
            s = by_cell[key].get(p)
            row += [_num(s[m]) if s is not None else "" for m in COMPARISON_METRICS]
        rows.append(row)
    return _csv(header, rows)
