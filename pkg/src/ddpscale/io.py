"""Curve files (CSV / JSON), report files and the log-log scaling plot."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .scaling import PowerLawFit, Report
from .simulator import ScalingCurve

CURVE_HEADER = ("n_gpus", "epoch_time_s")
X_LABEL = "Number of GPUs"
Y_LABEL = "Training time per epoch (s)"


def _fmt_time(t: float) -> str:
    # repr is the shortest string that round-trips the double exactly
    return repr(float(t))


def curve_to_csv(curve: ScalingCurve) -> str:
    lines = [",".join(CURVE_HEADER)]
    lines += [f"{n},{_fmt_time(t)}" for n, t in curve.points]
    return "\n".join(lines) + "\n"


def curve_to_json(curve: ScalingCurve) -> str:
    doc = {"label": curve.label, "points": [[n, float(t)] for n, t in curve.points]}
    return json.dumps(doc, indent=2) + "\n"


def emit_curve(curve: ScalingCurve, path: str | Path, format: str = "csv") -> Path:
    if format == "csv":
        text = curve_to_csv(curve)
    elif format == "json":
        text = curve_to_json(curve)
    else:
        raise ValidationError(f"emit_curve: curve {curve.label!r}: unsupported format {format!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def load_curve_csv(path: str | Path, label: str | None = None) -> ScalingCurve:
    """Read a ``n_gpus,epoch_time_s`` file; the label defaults to the file stem."""
    path = Path(path)
    label = label or path.stem
    where = f"load_curve_csv: {str(path)!r}"
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != CURVE_HEADER:
        got = ",".join(rows[0]) if rows else ""
        raise ValidationError(f"{where}: header mismatch, expected {','.join(CURVE_HEADER)!r}, got {got!r}")
    points: list[tuple[int, float]] = []
    for row_no, row in enumerate(rows[1:], start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValidationError(f"{where}: row {row_no}: expected 2 cells, got {row!r}")
        n_cell, t_cell = (c.strip() for c in row)
        try:
            n = int(n_cell)
        except ValueError:
            raise ValidationError(f"{where}: row {row_no}: non-numeric n_gpus {n_cell!r}") from None
        try:
            t = float(t_cell)
        except ValueError:
            raise ValidationError(f"{where}: row {row_no}: non-numeric epoch_time_s {t_cell!r}") from None
        if n < 1:
            raise ValidationError(f"{where}: row {row_no}: n_gpus must be >= 1, got {n}")
        if points and n <= points[-1][0]:
            raise ValidationError(
                f"{where}: row {row_no}: non-increasing n_gpus {n} after {points[-1][0]}"
            )
        if not np.isfinite(t) or t <= 0:
            raise ValidationError(f"{where}: row {row_no}: non-positive or non-finite epoch_time_s {t_cell!r}")
        points.append((n, t))
    if not points:
        raise ValidationError(f"{where}: no data rows")
    return ScalingCurve(label, tuple(points))


def load_curve_json(path: str | Path) -> ScalingCurve:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        label = doc["label"]
        points = tuple((p[0], p[1]) for p in doc["points"])
    except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"load_curve_json: {str(path)!r}: malformed curve document ({exc})") from None
    return ScalingCurve(label, points)


def load_curve(path: str | Path) -> ScalingCurve:
    """Dispatch on extension: ``.json`` or CSV otherwise."""
    if Path(path).suffix.lower() == ".json":
        return load_curve_json(path)
    return load_curve_csv(path)


def write_report(report: Report, path: str | Path, format: str = "md") -> Path:
    if format == "md":
        text = report.to_markdown()
    elif format == "csv":
        text = report.to_csv()
    elif format == "json":
        text = json.dumps(report.to_records(), indent=2) + "\n"
    else:
        raise ValidationError(f"write_report: unsupported format {format!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def scaling_figure(curves: Sequence[ScalingCurve], fits: Sequence[PowerLawFit | None] | None = None):
    """Log-log figure of epoch time vs GPU count, one marker series and one fit line per curve."""
    from matplotlib.figure import Figure

    if not curves:
        raise ValidationError("emit_plot: at least one curve is required")
    fits = list(fits) if fits is not None else [None] * len(curves)
    if len(fits) != len(curves):
        raise ValidationError(f"emit_plot: got {len(curves)} curves but {len(fits)} fits")

    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot()
    colors = [f"C{i % 10}" for i in range(len(curves))]
    for curve, fit, color in zip(curves, fits, colors):
        n = curve.n_gpus
        ax.plot(n, curve.epoch_times, "o", color=color, label=curve.label)
        if fit is not None:
            xs = np.array([n.min(), n.max()])
            ax.plot(xs, fit.predict(xs), "-", color=color, alpha=0.8,
                    label=f"{curve.label} fit (beta={fit.beta:.2f})")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(X_LABEL)
    ax.set_ylabel(Y_LABEL)
    ax.legend(fontsize="small")
    fig.tight_layout()
    return fig


def emit_plot(
    curves: Sequence[ScalingCurve],
    fits: Sequence[PowerLawFit | None] | None,
    path: str | Path,
) -> Path:
    """Write the scaling figure as SVG; identical inputs give identical bytes."""
    import matplotlib

    fig = scaling_figure(curves, fits)
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "ddpscale", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
