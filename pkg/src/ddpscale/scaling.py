"""Power-law fits t = alpha * n**-beta and the analyses built on them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import AnalysisError, ValidationError
from .simulator import ScalingCurve

DEFAULT_KNEE_THRESHOLD = 1.25


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    beta: float
    r_squared: float
    n_points: int
    two_point: bool = False

    def predict(self, n_gpus: float | np.ndarray) -> float | np.ndarray:
        return self.alpha * np.power(n_gpus, -self.beta, dtype=float)

    @property
    def anti_scaling(self) -> bool:
        return self.beta < 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AllocationPlan:
    n_gpus: int
    predicted_epoch_time: float
    speedup_vs_baseline: float
    efficiency: float
    gpu_seconds_per_epoch: float
    target_epoch_time: float
    baseline_n: int = 1
    unreachable: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _log_arrays(curve: ScalingCurve) -> tuple[np.ndarray, np.ndarray]:
    n = curve.n_gpus
    t = curve.epoch_times
    if not (np.all(np.isfinite(n)) and np.all(np.isfinite(t)) and np.all(n > 0) and np.all(t > 0)):
        raise AnalysisError(f"fit_power_law: invalid curve {curve.label!r}, non-finite or non-positive values")
    return np.log(n), np.log(t)


def fit_power_law(curve: ScalingCurve, truncate_at_min: bool = False) -> PowerLawFit:
    """Ordinary least squares of ln t on ln n.

    With ``truncate_at_min`` the points after the fastest one are ignored,
    which removes the communication-bound tail of a non-monotone curve.
    """
    if truncate_at_min:
        curve = curve.truncated_at_min()
    if len(curve) < 2:
        raise AnalysisError(
            f"fit_power_law: insufficient data for curve {curve.label!r}, "
            f"need >= 2 points, got {len(curve)}"
        )
    x, y = _log_arrays(curve)
    dx = x - x.mean()
    dy = y - y.mean()
    slope = float(dx @ dy / (dx @ dx))
    intercept = float(y.mean() - slope * x.mean())
    two_point = len(curve) == 2
    fit = PowerLawFit(alpha=math.exp(intercept), beta=-slope, r_squared=1.0, n_points=len(curve), two_point=two_point)
    if two_point:
        return fit
    r2 = r_squared_log(curve, fit)
    return PowerLawFit(fit.alpha, fit.beta, r2, fit.n_points, False)


def r_squared_log(curve: ScalingCurve, fit: PowerLawFit) -> float:
    """Coefficient of determination of ``fit`` over ln(epoch time)."""
    if len(curve) < 2:
        raise AnalysisError(
            f"r_squared_log: insufficient data for curve {curve.label!r}, got {len(curve)} point(s)"
        )
    x, y = _log_arrays(curve)
    resid = y - (math.log(fit.alpha) - fit.beta * x)
    ss_res = float(resid @ resid)
    if np.ptp(y) == 0:
        if np.allclose(resid, 0.0, rtol=0.0, atol=1e-12):
            return 1.0
        raise AnalysisError(
            f"r_squared_log: degenerate curve {curve.label!r}, constant epoch time "
            f"{float(np.exp(y[0]))!r} with nonzero residuals"
        )
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    return 1.0 - ss_res / ss_tot


def speedup(curve: ScalingCurve, n_from: int, n_to: int) -> float:
    """Measured speedup t(n_from) / t(n_to)."""
    times = dict(curve.points)
    for n in (n_from, n_to):
        if n not in times:
            raise AnalysisError(
                f"speedup: count not in curve {curve.label!r}: n={n!r} "
                f"(available {sorted(times)})"
            )
    if n_from == n_to:
        return 1.0
    return times[n_from] / times[n_to]


def predicted_speedup(fit: PowerLawFit, n_from: float, n_to: float) -> float:
    if n_from < 1 or n_to < 1:
        raise ValidationError(f"predicted_speedup: GPU counts must be >= 1, got {n_from!r} -> {n_to!r}")
    return (n_to / n_from) ** fit.beta


def doubling_speedups(curve: ScalingCurve) -> list[float]:
    """Speedup of each consecutive pair rescaled to one doubling of GPUs."""
    out = []
    for (n0, t0), (n1, t1) in zip(curve.points, curve.points[1:]):
        out.append((t0 / t1) ** (math.log(2.0) / math.log(n1 / n0)))
    return out


def detect_knee(curve: ScalingCurve, min_doubling_speedup: float = DEFAULT_KNEE_THRESHOLD) -> int | None:
    """First GPU count after which every step up the grid gains less than the threshold per doubling.

    Returns None when the last pair of points still scales at or above the
    threshold.
    """
    if not (math.isfinite(min_doubling_speedup) and min_doubling_speedup > 1):
        raise AnalysisError(
            f"detect_knee: invalid threshold {min_doubling_speedup!r} for curve {curve.label!r}, must be > 1"
        )
    if len(curve) < 2:
        raise AnalysisError(f"detect_knee: insufficient data for curve {curve.label!r}, got {len(curve)} point(s)")
    knee = None
    # walk backwards while the tail stays below threshold
    for i, s in reversed(list(enumerate(doubling_speedups(curve)))):
        if s >= min_doubling_speedup:
            break
        knee = curve.points[i][0]
    return knee


def allocate_for_target(
    fit: PowerLawFit,
    target_epoch_time: float,
    n_max: int,
    baseline_n: int = 1,
) -> AllocationPlan:
    """Smallest GPU count whose predicted epoch time meets the target.

    The count is capped at ``n_max``; if the cap still misses the target the
    plan is returned with ``unreachable=True`` and the ``n_max`` figures.
    """
    if not (math.isfinite(target_epoch_time) and target_epoch_time > 0):
        raise AnalysisError(f"allocate_for_target: invalid target {target_epoch_time!r}, must be > 0")
    if not fit.beta > 0:
        raise AnalysisError(f"allocate_for_target: non-scaling law, beta={fit.beta!r} must be > 0")
    if n_max < 1:
        raise ValidationError(f"allocate_for_target: n_max must be >= 1, got {n_max!r}")

    def predict(k: int) -> float:
        return fit.alpha * float(k) ** -fit.beta

    n_real = (fit.alpha / target_epoch_time) ** (1.0 / fit.beta)
    unreachable = n_real > n_max
    if unreachable:
        n = n_max
    else:
        n = max(1, math.ceil(n_real))
        # ceil of a rounded root can land one off in either direction
        while n > 1 and predict(n - 1) <= target_epoch_time:
            n -= 1
        while predict(n) > target_epoch_time and n < n_max:
            n += 1
        unreachable = predict(n) > target_epoch_time
    t = predict(n)
    sp = predict(baseline_n) / t
    return AllocationPlan(
        n_gpus=n,
        predicted_epoch_time=t,
        speedup_vs_baseline=sp,
        efficiency=sp / (n / baseline_n),
        gpu_seconds_per_epoch=n * t,
        target_epoch_time=target_epoch_time,
        baseline_n=baseline_n,
        unreachable=unreachable,
    )


def format_param_count(p: float) -> str:
    """Two significant digits in compact scientific form, e.g. 2100000 -> '2.1e6'."""
    mantissa, exponent = f"{float(p):.1e}".split("e")
    return f"{mantissa}e{int(exponent)}"


REPORT_HEADER = ("Model", "Number of Parameters", "beta", "R2")


@dataclass(frozen=True)
class Report:
    rows: tuple[tuple[str, str, str, str], ...]
    fits: tuple[PowerLawFit, ...]

    def to_markdown(self) -> str:
        lines = ["| " + " | ".join(REPORT_HEADER) + " |", "|" + "---|" * len(REPORT_HEADER)]
        lines += ["| " + " | ".join(row) + " |" for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        return [dict(zip(REPORT_HEADER, row)) | {"fit": fit.to_dict()} for row, fit in zip(self.rows, self.fits)]


def make_report(entries: Sequence[tuple[str, float, PowerLawFit]]) -> Report:
    """Table of model, parameter count, beta and R2, in input order."""
    if not entries:
        raise ValidationError("make_report: at least one entry is required")
    rows = []
    for name, params, fit in entries:
        r2 = f"{fit.r_squared:.2f}"
        if fit.two_point:
            r2 += " (two-point fit)"
        rows.append((name, format_param_count(params), f"{fit.beta:.2f}", r2))
    return Report(tuple(rows), tuple(e[2] for e in entries))
