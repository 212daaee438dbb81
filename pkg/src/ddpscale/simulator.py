"""Epoch-time simulation across GPU counts."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cluster import ClusterSpec, allreduce_time
from .errors import ValidationError
from .workload import WorkloadSpec, compute_time_per_step, gradient_message_size, steps_per_epoch

PAPER_GPU_GRID: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256, 364, 416)


def _check_grid(gpu_counts: Sequence[int], where: str) -> None:
    if len(gpu_counts) == 0:
        raise ValidationError(f"{where}: gpu_counts must be non-empty")
    prev = 0
    for i, n in enumerate(gpu_counts):
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ValidationError(f"{where}: gpu_counts[{i}] must be an integer >= 1, got {n!r}")
        if n <= prev:
            raise ValidationError(
                f"{where}: gpu_counts must be strictly increasing, "
                f"gpu_counts[{i}]={n!r} follows {prev!r}"
            )
        prev = n


@dataclass(frozen=True)
class ScalingCurve:
    """Epoch time measured (or simulated) at a strictly increasing set of GPU counts."""

    label: str
    points: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        pts = tuple((int(n), float(t)) for n, t in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValidationError(f"curve {self.label!r}: invalid curve, no points")
        _check_grid([n for n, _ in pts], f"curve {self.label!r}")
        for n, t in pts:
            if not math.isfinite(t) or t <= 0:
                raise ValidationError(
                    f"curve {self.label!r}: invalid curve, epoch time at n={n} must be "
                    f"finite and > 0, got {t!r}"
                )

    @classmethod
    def from_arrays(cls, label: str, n_gpus: Iterable[int], epoch_times: Iterable[float]) -> "ScalingCurve":
        return cls(label, tuple(zip(n_gpus, epoch_times)))

    @property
    def n_gpus(self) -> np.ndarray:
        return np.array([n for n, _ in self.points], dtype=float)

    @property
    def epoch_times(self) -> np.ndarray:
        return np.array([t for _, t in self.points], dtype=float)

    def time_at(self, n_gpus: int) -> float:
        for n, t in self.points:
            if n == n_gpus:
                return t
        raise KeyError(n_gpus)

    def truncated_at_min(self) -> "ScalingCurve":
        """Drop every point after the fastest one."""
        n_min, _ = find_min_time(self)
        return ScalingCurve(self.label, tuple(p for p in self.points if p[0] <= n_min))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ExperimentSpec:
    workload: WorkloadSpec
    cluster: ClusterSpec
    gpu_counts: tuple[int, ...] = PAPER_GPU_GRID
    noise_sigma: float = 0.0
    seed: int = 0
    label: str = field(default="")

    def __post_init__(self) -> None:
        object.__setattr__(self, "gpu_counts", tuple(self.gpu_counts))
        if not self.label:
            object.__setattr__(self, "label", self.workload.name)
        _check_grid(self.gpu_counts, f"experiment {self.label!r}")
        s = self.noise_sigma
        if not isinstance(s, (int, float)) or not math.isfinite(s) or s < 0:
            raise ValidationError(f"experiment {self.label!r}: noise_sigma must be >= 0, got {s!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValidationError(f"experiment {self.label!r}: seed must be an integer, got {self.seed!r}")


def simulate_epoch_time(w: WorkloadSpec, c: ClusterSpec, n_gpus: int) -> float:
    """Noise-free seconds per epoch: steps x (compute + all-reduce + overhead)."""
    steps = steps_per_epoch(w, n_gpus)
    per_step = (
        compute_time_per_step(w)
        + allreduce_time(c, gradient_message_size(w), n_gpus)
        + c.step_overhead
    )
    return steps * per_step


def log_noise(label: str, n_gpus: int, seed: int, sigma: float) -> float:
    """Multiplicative factor exp(eps), eps ~ N(0, sigma), keyed on (seed, label, n).

    Keying per point keeps every other point's noise fixed when the grid grows.
    """
    if sigma == 0:
        return 1.0
    key = [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF, zlib.crc32(label.encode("utf-8")), int(n_gpus)]
    rng = np.random.default_rng(np.random.SeedSequence(key))
    return math.exp(sigma * rng.standard_normal())


def sweep(e: ExperimentSpec) -> ScalingCurve:
    points = []
    for n in e.gpu_counts:
        t = simulate_epoch_time(e.workload, e.cluster, n)
        points.append((n, t * log_noise(e.label, n, e.seed, e.noise_sigma)))
    return ScalingCurve(e.label, tuple(points))


def power_law_curve(
    alpha: float,
    beta: float,
    gpu_counts: Sequence[int] = PAPER_GPU_GRID,
    noise_sigma: float = 0.0,
    seed: int = 0,
    label: str = "power-law",
) -> ScalingCurve:
    """Synthetic curve t = alpha * n**-beta with the same seeded noise as ``sweep``."""
    _check_grid(gpu_counts, f"curve {label!r}")
    points = tuple(
        (n, alpha * float(n) ** -beta * log_noise(label, n, seed, noise_sigma)) for n in gpu_counts
    )
    return ScalingCurve(label, points)


def find_min_time(curve: ScalingCurve) -> tuple[int, float]:
    """Fastest point; ties go to the smaller GPU count."""
    best = curve.points[0]
    for p in curve.points[1:]:
        if p[1] < best[1]:
            best = p
    return best
