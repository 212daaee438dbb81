"""Two-level GPU cluster model and gradient all-reduce cost.

Nodes hold ``gpus_per_node`` devices joined by fast links; nodes talk over a
slower interconnect. An all-reduce spanning several nodes is charged as an
intra-node ring followed by an inter-node ring, both on the full message.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ValidationError


class TopologyWarning(UserWarning):
    """Cluster parameters are legal but unusual (inter-node faster than intra-node)."""


@dataclass(frozen=True)
class ClusterSpec:
    gpus_per_node: int = 2
    intra_bandwidth: float = 2.5e10  # bytes/s
    inter_bandwidth: float = 1.25e10  # bytes/s
    intra_latency: float = 5e-6  # s per hop
    inter_latency: float = 1e-4  # s per hop
    step_overhead: float = 1e-3  # s per step

    def __post_init__(self) -> None:
        g = self.gpus_per_node
        if isinstance(g, bool) or not isinstance(g, int) or g < 1:
            raise ValidationError(f"cluster: gpus_per_node must be an integer >= 1, got {g!r}")
        for key in ("intra_bandwidth", "inter_bandwidth"):
            value = getattr(self, key)
            # inf is allowed: it models a communication-free interconnect
            if not isinstance(value, (int, float)) or math.isnan(value) or value <= 0:
                raise ValidationError(f"cluster: {key} must be > 0, got {value!r}")
        for key in ("intra_latency", "inter_latency", "step_overhead"):
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise ValidationError(f"cluster: {key} must be finite and >= 0, got {value!r}")
        if self.intra_bandwidth < self.inter_bandwidth:
            warnings.warn(
                f"cluster: intra_bandwidth {self.intra_bandwidth!r} is below "
                f"inter_bandwidth {self.inter_bandwidth!r}",
                TopologyWarning,
                stacklevel=3,
            )

    def nodes_for(self, n_gpus: int) -> int:
        return -(-n_gpus // self.gpus_per_node)


def ring_allreduce_time(message: float, participants: int, bandwidth: float, latency: float) -> float:
    """Cost of a ring all-reduce: reduce-scatter plus all-gather.

    Each of the ``2(p-1)`` phases moves ``message/p`` bytes and pays one hop
    of latency.
    """
    if participants < 1:
        raise ValidationError(f"ring_allreduce_time: participants must be >= 1, got {participants!r}")
    if message < 0:
        raise ValidationError(f"ring_allreduce_time: message must be >= 0, got {message!r}")
    if participants == 1:
        return 0.0
    hops = 2 * (participants - 1)
    return hops / participants * message / bandwidth + hops * latency


def allreduce_time(c: ClusterSpec, message: float, n_gpus: int) -> float:
    """Hierarchical all-reduce time for ``n_gpus`` devices on cluster ``c``."""
    if n_gpus < 1:
        raise ValidationError(f"allreduce_time: n_gpus must be >= 1, got {n_gpus!r}")
    g = c.gpus_per_node
    if n_gpus <= g:
        return ring_allreduce_time(message, n_gpus, c.intra_bandwidth, c.intra_latency)
    intra = ring_allreduce_time(message, g, c.intra_bandwidth, c.intra_latency)
    inter = ring_allreduce_time(message, c.nodes_for(n_gpus), c.inter_bandwidth, c.inter_latency)
    return intra + inter
