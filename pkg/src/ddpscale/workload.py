"""Training workload description and the per-step quantities derived from it."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ValidationError

VALID_BYTES_PER_PARAM = (2, 4, 8)


class StepClampWarning(UserWarning):
    """Emitted when drop_last would leave an epoch with zero steps."""


class Steps(int):
    """Step count that remembers whether it was clamped up to one.

    Behaves as a plain ``int`` everywhere; ``clamped`` is True only when
    ``drop_last`` floored the count to zero and it was raised back to 1.
    """

    clamped: bool

    def __new__(cls, value: int, clamped: bool = False) -> "Steps":
        obj = super().__new__(cls, value)
        obj.clamped = clamped
        return obj


@dataclass(frozen=True)
class WorkloadSpec:
    """A data-parallel training job reduced to the numbers that set its cost.

    ``batch_size_per_device`` is the local batch; the global batch grows
    with the number of GPUs.
    """

    name: str
    param_count: int
    dataset_size: int
    batch_size_per_device: int
    compute_time_per_sample: float
    epochs: int = 1
    bytes_per_param: int = 4
    drop_last: bool = False

    def __post_init__(self) -> None:
        for key in ("param_count", "dataset_size", "batch_size_per_device", "epochs"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError(
                    f"workload {self.name!r}: {key} must be an integer >= 1, got {value!r}"
                )
        if self.bytes_per_param not in VALID_BYTES_PER_PARAM:
            raise ValidationError(
                f"workload {self.name!r}: bytes_per_param must be one of "
                f"{VALID_BYTES_PER_PARAM}, got {self.bytes_per_param!r}"
            )
        c = self.compute_time_per_sample
        if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
            raise ValidationError(
                f"workload {self.name!r}: compute_time_per_sample must be finite and > 0, got {c!r}"
            )


def gradient_message_size(w: WorkloadSpec) -> int:
    """Bytes of gradient all-reduced every step."""
    return w.param_count * w.bytes_per_param


def steps_per_epoch(w: WorkloadSpec, n_gpus: int, drop_last: bool | None = None) -> Steps:
    """Optimizer steps needed to cover the dataset once on ``n_gpus`` devices.

    ``drop_last=None`` uses the workload's own setting.
    """
    if n_gpus < 1:
        raise ValidationError(f"steps_per_epoch: n_gpus must be >= 1, got {n_gpus!r}")
    if drop_last is None:
        drop_last = w.drop_last
    global_batch = w.batch_size_per_device * n_gpus
    if drop_last:
        steps = w.dataset_size // global_batch
        if steps == 0:
            warnings.warn(
                f"workload {w.name!r}: global batch {global_batch} exceeds dataset size "
                f"{w.dataset_size} with drop_last; clamping to 1 step",
                StepClampWarning,
                stacklevel=2,
            )
            return Steps(1, clamped=True)
        return Steps(steps)
    return Steps(-(-w.dataset_size // global_batch))


def compute_time_per_step(w: WorkloadSpec) -> float:
    # every device always processes a full local batch, so this ignores n
    return w.batch_size_per_device * w.compute_time_per_sample
