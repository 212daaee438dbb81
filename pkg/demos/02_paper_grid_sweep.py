"""
Simulating the four-model GPU sweep
===================================

The ``paper-grid`` preset holds four calibrated workloads (DimeNet, NNConv,
SchNet, PNA) on the 2..416 GPU grid. Each was tuned so its small- and
large-scale epoch times match the reported timings.
"""

from pathlib import Path

from ddpscale import emit_plot, find_min_time, fit_power_law, load_preset, speedup, sweep

config = load_preset("paper-grid")
curves = [sweep(e) for e in config.experiments]

for curve in curves:
    cells = "  ".join(f"{t:8.3f}" for t in curve.epoch_times)
    print(f"{curve.label:8s} {cells}")

# DimeNet keeps improving out to 416 GPUs; PNA bottoms out and then slows down
for curve in curves:
    n_min, t_min = find_min_time(curve)
    last = curve.points[-1][0]
    print(f"{curve.label:8s} fastest at n={n_min:3d} ({t_min:.3f} s), "
          f"2->{last} speedup {speedup(curve, 2, last):5.1f}x")

out = Path("demo_output")
out.mkdir(exist_ok=True)
path = emit_plot(curves, [fit_power_law(c) for c in curves], out / "paper_grid.svg")
print("wrote", path)
