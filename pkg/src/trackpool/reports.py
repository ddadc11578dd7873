"""Run reports: delimited outputs, config snapshot, and rendered figures.

results.csv is fully deterministic for a given config and seed (floats are
written via repr, wall-clock timings go to a separate file), so identical
runs produce byte-identical results files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .boxes import BoundingBox
from .errors import FormatError
from .metrics import (PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS, EvalCurves,
                      evaluate)
from .tracker import RunRecord

RESULTS_HEADER = "frame,cx,cy,w,h,winner,executives"


def _f(v: float) -> str:
    return repr(float(v))


def write_results_csv(record: RunRecord, path) -> Path:
    lines = [RESULTS_HEADER]
    for idx, cx, cy, w, h, winner, exe in record.results_rows():
        lines.append(f"{idx},{_f(cx)},{_f(cy)},{_f(w)},{_f(h)},{winner},{exe}")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def read_results_csv(path):
    """(boxes, winners, executive masks) parsed back from results.csv."""
    text = Path(path).read_text().splitlines()
    if not text or text[0] != RESULTS_HEADER:
        raise FormatError(f"{path}: missing results header")
    boxes, winners, masks = [], [], []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise FormatError(f"{path} line {lineno}: expected 7 fields")
        try:
            boxes.append(BoundingBox(float(parts[1]), float(parts[2]),
                                     float(parts[3]), float(parts[4])))
            winners.append(int(parts[5]))
            masks.append(int(parts[6]))
        except ValueError:
            raise FormatError(f"{path} line {lineno}: bad field") from None
    return boxes, winners, masks


def write_metrics_csv(curves: EvalCurves, path) -> Path:
    lines = ["kind,threshold,value"]
    for tau, v in zip(PRECISION_THRESHOLDS, curves.precision):
        lines.append(f"precision,{_f(tau)},{_f(v)}")
    for theta, v in zip(SUCCESS_THRESHOLDS, curves.success):
        lines.append(f"success,{_f(theta)},{_f(v)}")
    lines.append(f"summary,precision_at_20,{_f(curves.precision_at_20)}")
    lines.append(f"summary,auc,{_f(curves.auc)}")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def write_fitness_csv(record: RunRecord, path) -> Path:
    lines = ["frame,expert,mean_overlap,fluctuation,pair_score,"
             "smoothness,self_score,fitness"]
    for fr in record.frames:
        for mask in sorted(fr.breakdowns):
            b = fr.breakdowns[mask]
            lines.append(f"{fr.index},{mask},{_f(b.mean_overlap)},"
                         f"{_f(b.fluctuation)},{_f(b.pair_score)},"
                         f"{_f(b.smoothness)},{_f(b.self_score)},{_f(b.fitness)}")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def write_timings_csv(record: RunRecord, path) -> Path:
    lines = ["frame,wall_ms"]
    for fr in record.frames:
        lines.append(f"{fr.index},{fr.wall_ms:.3f}")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def _render_figures(out_dir: Path, curves: Optional[EvalCurves],
                    record: RunRecord, gt: Optional[Sequence[BoundingBox]]) -> list:
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    written = []

    def save(fig, name):
        p = out_dir / name
        fig.savefig(p, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(p)

    if curves is not None:
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(PRECISION_THRESHOLDS, curves.precision, lw=2)
        ax.axvline(20, color="gray", ls=":", lw=1)
        ax.set(xlabel="center error threshold [px]", ylabel="precision",
               title=f"Precision  P(20px) = {curves.precision_at_20:.3f}",
               xlim=(0, 50), ylim=(0, 1.02))
        ax.grid(alpha=0.3)
        save(fig, "precision.png")

        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(SUCCESS_THRESHOLDS, curves.success, lw=2)
        ax.set(xlabel="overlap threshold", ylabel="success rate",
               title=f"Success  AUC = {curves.auc:.3f}",
               xlim=(0, 1), ylim=(0, 1.02))
        ax.grid(alpha=0.3)
        save(fig, "success.png")

    if gt is not None:
        err = [b.center_distance(g) for b, g in zip(record.boxes, gt)]
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.plot(range(1, len(err) + 1), err, lw=1.5)
        ax.axhline(20, color="gray", ls=":", lw=1)
        ax.set(xlabel="frame", ylabel="center error [px]",
               title=f"Center error ({record.sequence})")
        ax.grid(alpha=0.3)
        save(fig, "center_error.png")
    return written


def emit_reports(record: RunRecord, out_dir,
                 gt: Optional[Sequence[BoundingBox]] = None,
                 figures: bool = True) -> dict:
    """Write all report files; returns {name: path}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": write_results_csv(record, out / "results.csv"),
        "config": Path(out / "config.txt"),
        "timings": write_timings_csv(record, out / "timings.csv"),
        "fitness": write_fitness_csv(record, out / "fitness_trace.csv"),
    }
    record.config.to_file(paths["config"])

    curves = None
    if gt is not None:
        if len(gt) != len(record.frames):
            raise ValueError(f"{len(gt)} ground-truth boxes for "
                             f"{len(record.frames)} tracked frames")
        curves = evaluate(record.boxes, gt)
        paths["metrics"] = write_metrics_csv(curves, out / "metrics.csv")
    if figures:
        for p in _render_figures(out, curves, record, gt):
            paths[p.stem] = p
    return paths
