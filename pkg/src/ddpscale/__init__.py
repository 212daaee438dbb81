"""Data-parallel training-time simulator and power-law scaling toolkit."""

from .cluster import ClusterSpec, allreduce_time, ring_allreduce_time
from .config import RunConfig, load_config, load_preset
from .errors import AnalysisError, DdpscaleError, ValidationError
from .io import emit_curve, emit_plot, load_curve, load_curve_csv
from .scaling import (
    AllocationPlan,
    PowerLawFit,
    allocate_for_target,
    detect_knee,
    fit_power_law,
    make_report,
    predicted_speedup,
    r_squared_log,
    speedup,
)
from .simulator import (
    PAPER_GPU_GRID,
    ExperimentSpec,
    ScalingCurve,
    find_min_time,
    power_law_curve,
    simulate_epoch_time,
    sweep,
)
from .workload import WorkloadSpec, compute_time_per_step, gradient_message_size, steps_per_epoch

__version__ = "0.1.0"
