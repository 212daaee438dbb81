"""
Diminishing returns and compute allocation
==========================================

Each consecutive pair of grid points is converted to a speedup per
doubling of GPUs, which makes uneven spacing (256 -> 364 -> 416)
comparable. The knee is where that rate stays below a threshold for the
rest of the grid. A fitted law can then be inverted to size a job for a
target epoch time.
"""

from ddpscale import ScalingCurve, allocate_for_target, detect_knee, fit_power_law, load_preset, sweep
from ddpscale.scaling import doubling_speedups

config = load_preset("paper-grid")
for e in config.experiments:
    curve = sweep(e)
    rates = " ".join(f"{r:5.2f}" for r in doubling_speedups(curve))
    print(f"{e.label:8s} per-doubling speedups: {rates}  knee@1.25 = {detect_knee(curve, 1.25)}")

# The last QM9 grid step (364 -> 416) goes from 3 to 2 steps per epoch and
# shows up as a big jump; without it the knees fall at 64 GPUs or below
for e in config.experiments[1:3]:
    curve = sweep(e)
    trimmed = ScalingCurve(curve.label, curve.points[:-1])
    print(f"{e.label:8s} knee without n=416: {detect_knee(trimmed, 1.25)}")

# Size DimeNet for a 4 s epoch and a 10 s epoch
dimenet = fit_power_law(sweep(config.experiments[0]))
for target in (10.0, 4.0, 1.0):
    plan = allocate_for_target(dimenet, target, n_max=416)
    flag = " (unreachable within 416 GPUs)" if plan.unreachable else ""
    print(f"target {target:4.1f} s -> {plan.n_gpus} GPUs, predicted {plan.predicted_epoch_time:.2f} s, "
          f"efficiency {plan.efficiency:.2f}{flag}")
