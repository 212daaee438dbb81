"""
Re-deriving the shipped presets
===============================

Each preset fixes the cluster (two GPUs per node, 25/12.5 GB/s links,
1 ms per-step overhead) and solves two 1-D root finds: per-sample compute
cost against the small-scale anchor time, and inter-node hop latency
against the large-scale anchor. Pass ``--write`` to overwrite the JSON
files inside the package.
"""

import sys
from pathlib import Path

import ddpscale
from ddpscale import simulate_epoch_time
from ddpscale.calibration import PAPER_TARGETS, calibrate, write_presets

for target in PAPER_TARGETS:
    w, c = calibrate(target)
    lo = simulate_epoch_time(w, c, target.low.n_gpus)
    hi = simulate_epoch_time(w, c, target.high.n_gpus)
    print(f"{target.name:8s} compute/sample={w.compute_time_per_sample:.4g} s  "
          f"inter_latency={c.inter_latency:.4g} s  "
          f"t({target.low.n_gpus})={lo:.3f} (anchor {target.low.epoch_time})  "
          f"t({target.high.n_gpus})={hi:.3f} (anchor {target.high.epoch_time})")

if "--write" in sys.argv:
    for path in write_presets(Path(ddpscale.__file__).parent / "presets"):
        print("wrote", path)
