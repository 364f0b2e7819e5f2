"""Tabular exports of finished runs.

``summary.csv`` holds the highlight rows of each run's final generation: a
MOPrompt run contributes its max-accuracy and min-token front points, a
baseline run its best-accuracy prompt. ``fronts.csv`` lists front 0 of every
generation, one point per line, for front-evolution plots.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

from .optimizer import RUN_FILE, RunRecord, load_run

__all__ = ["SUMMARY_COLUMNS", "FRONT_COLUMNS", "ReportError", "find_runs",
           "summary_rows", "front_rows", "write_report"]

SUMMARY_COLUMNS = ("model", "strategy", "framework", "highlight", "accuracy", "tokens",
                   "run", "prompt_id", "prompt")
FRONT_COLUMNS = ("run", "generation", "cost", "error")

FRAMEWORK_LABELS = {"moprompt": "MOPrompt", "evoprompt": "EvoPrompt"}
STRATEGY_LABELS = {"zero": "Zero-shot", "few": "Few-shot"}


class ReportError(ValueError):
    pass


def find_runs(paths) -> list[Path]:
    """Resolve arguments to run directories.

    A directory holding ``run.json`` is a run; otherwise its immediate
    subdirectories holding one are taken in name order.
    """
    runs = []
    for p in map(Path, paths):
        if not p.is_dir():
            raise ReportError(f"{p}: not a directory")
        if (p / RUN_FILE).is_file():
            runs.append(p)
            continue
        found = sorted(c for c in p.iterdir() if c.is_dir() and (c / RUN_FILE).is_file())
        if not found:
            raise ReportError(f"{p}: no run found (expected {RUN_FILE})")
        runs.extend(found)
    if not runs:
        raise ReportError("no run directories given")
    return runs


def _label(run_dir: Path) -> str:
    return run_dir.name or str(run_dir)


def summary_rows(meta: dict, snapshots, run_label: str = "") -> list[dict]:
    if not snapshots:
        raise ReportError(f"run {run_label}: no generations recorded (status {meta.get('status')})")
    config = meta["config"]
    record = RunRecord(config=config, snapshots=list(snapshots))
    summ = record.summary()
    base = {
        "model": meta.get("evaluator_model") or "",
        "strategy": STRATEGY_LABELS.get(config.get("strategy"), config.get("strategy")),
        "framework": FRAMEWORK_LABELS.get(config["framework"], config["framework"]),
        "run": run_label,
    }
    if config["framework"] == "moprompt":
        picks = (("Max Acc (Front)", summ["max_accuracy"]), ("Min Tokens (Front)", summ["min_tokens"]))
    else:
        picks = (("Best Accuracy", summ["best_accuracy"]),)
    return [dict(base, highlight=h, accuracy=f"{r['accuracy']:.4f}", tokens=r["tokens"],
                 prompt_id=r["prompt_id"], prompt=r["prompt"]) for h, r in picks]


def front_rows(snapshots, run_label: str = "") -> list[dict]:
    rows = []
    for snap in snapshots:
        pts = sorted(i.objectives.as_tuple() for i in snap.front0)
        for cost, error in pts:
            rows.append({"run": run_label, "generation": snap.generation,
                         "cost": cost, "error": f"{error:.4f}"})
    return rows


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_report(run_paths, out_dir) -> tuple[Path, Path]:
    """Write ``summary.csv`` and ``fronts.csv`` for ``run_paths`` into ``out_dir``."""
    summary, fronts = [], []
    for run_dir in find_runs(run_paths):
        meta, snaps = load_run(run_dir)
        label = _label(run_dir)
        summary.extend(summary_rows(meta, snaps, label))
        fronts.extend(front_rows(snaps, label))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s_path, f_path = out / "summary.csv", out / "fronts.csv"
    s_path.write_text(_csv(summary, SUMMARY_COLUMNS), encoding="utf-8")
    f_path.write_text(_csv(fronts, FRONT_COLUMNS), encoding="utf-8")
    return s_path, f_path
