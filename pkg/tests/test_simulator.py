import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddpscale import (
    PAPER_GPU_GRID, ClusterSpec, ExperimentSpec, ScalingCurve, WorkloadSpec,
    find_min_time, fit_power_law, power_law_curve, simulate_epoch_time, sweep,
)
from ddpscale.errors import ValidationError
from ddpscale.simulator import log_noise

# smallest dataset that splits into whole global batches at every paper grid count
DIVISIBLE_D = 128 * math.lcm(*PAPER_GPU_GRID)


def test_communication_free_limit_is_perfect(free_cluster):
    w = WorkloadSpec("w", 1000, 256 * 8, 128, 0.01)
    for n in (1, 2, 4, 8, 16):
        expected = (w.dataset_size / (128 * n)) * 128 * 0.01
        assert simulate_epoch_time(w, free_cluster, n) == pytest.approx(expected, rel=1e-12)


def test_single_device_single_step():
    w = WorkloadSpec("w", 10**6, 128, 128, 0.002)
    c = ClusterSpec(step_overhead=0.05)
    assert simulate_epoch_time(w, c, 1) == pytest.approx(128 * 0.002 + 0.05, rel=1e-12)


def test_epoch_time_hand_computed(qm9_workload):
    c = ClusterSpec(gpus_per_node=2, intra_bandwidth=1e10, inter_bandwidth=1e9,
                    intra_latency=0.0, inter_latency=0.0, step_overhead=1e-3)
    # n=4: 196 steps * (0.128 compute + 2.728e-3 all-reduce + 1e-3 overhead)
    assert simulate_epoch_time(qm9_workload, c, 4) == pytest.approx(196 * (0.128 + 2.728e-3 + 1e-3), rel=1e-12)


def test_sweep_halving(free_cluster):
    w = WorkloadSpec("w", 1000, 1024, 128, 0.01)
    curve = sweep(ExperimentSpec(w, free_cluster, (2, 4)))
    (n0, t0), (n1, t1) = curve.points
    assert (n0, n1) == (2, 4)
    assert t1 == pytest.approx(t0 / 2, rel=1e-12)


def test_sweep_paper_grid_has_ten_points(qm9_workload):
    curve = sweep(ExperimentSpec(qm9_workload, ClusterSpec()))
    assert [n for n, _ in curve.points] == [2, 4, 8, 16, 32, 64, 128, 256, 364, 416]
    assert curve.label == "NNConv"


def test_perfect_scaling_fit_is_exact(free_cluster):
    w = WorkloadSpec("perfect", 1000, DIVISIBLE_D, 128, 1e-3)
    curve = sweep(ExperimentSpec(w, free_cluster))
    products = curve.n_gpus * curve.epoch_times
    assert np.allclose(products, products[0], rtol=1e-12)
    assert fit_power_law(curve).beta == pytest.approx(1.0, abs=1e-9)


def test_sweep_noise_is_deterministic_and_grid_stable(qm9_workload):
    spec = ExperimentSpec(qm9_workload, ClusterSpec(), (2, 4, 8), noise_sigma=0.1, seed=7)
    a, b = sweep(spec), sweep(spec)
    assert a == b
    wider = sweep(replace(spec, gpu_counts=(2, 3, 4, 8, 16)))
    assert dict(wider.points)[4] == dict(a.points)[4]
    other_seed = sweep(replace(spec, seed=8))
    assert other_seed != a


def test_noise_is_lognormal_with_given_sigma():
    eps = np.log([log_noise("x", n, 3, 0.05) for n in range(1, 4001)])
    assert abs(eps.mean()) < 0.005
    assert eps.std() == pytest.approx(0.05, rel=0.05)


def test_noise_off_is_exact():
    assert log_noise("x", 2, 0, 0.0) == 1.0


def test_power_law_curve_values():
    curve = power_law_curve(100.0, 0.5, (2, 4, 8, 16))
    assert np.allclose(curve.epoch_times, [70.71067811865476, 50.0, 35.35533905932738, 25.0], rtol=1e-12)


@pytest.mark.parametrize("points, expected", [
    ([(2, 2.8), (128, 0.76), (256, 0.9)], (128, 0.76)),
    ([(2, 4.0), (4, 2.0), (8, 1.0)], (8, 1.0)),
    ([(2, 1.0), (4, 1.0)], (2, 1.0)),
])
def test_find_min_time(points, expected):
    assert find_min_time(ScalingCurve("c", tuple(points))) == expected


@pytest.mark.parametrize("points", [
    [], [(2, 1.0), (2, 0.5)], [(4, 1.0), (2, 0.5)], [(2, 0.0)], [(2, -1.0)], [(0, 1.0)], [(2, math.inf)],
])
def test_curve_invariants(points):
    with pytest.raises(ValidationError):
        ScalingCurve("bad", tuple(points))


def test_experiment_invariants(qm9_workload):
    with pytest.raises(ValidationError, match="strictly increasing"):
        ExperimentSpec(qm9_workload, ClusterSpec(), (4, 2))
    with pytest.raises(ValidationError, match="noise_sigma"):
        ExperimentSpec(qm9_workload, ClusterSpec(), noise_sigma=-0.1)
    with pytest.raises(ValidationError):
        ExperimentSpec(qm9_workload, ClusterSpec(), ())


def test_overhead_makes_tail_non_decreasing():
    # one step per epoch from n=8 on; all-reduce and overhead then only grow
    w = WorkloadSpec("tiny", 10**5, 1024, 128, 1e-3)
    c = ClusterSpec(step_overhead=0.01, inter_latency=1e-4)
    times = [simulate_epoch_time(w, c, n) for n in (8, 16, 32, 64, 128)]
    assert times == sorted(times)


workloads = st.builds(
    WorkloadSpec, name=st.just("w"), param_count=st.integers(1, 10**7),
    dataset_size=st.integers(1, 10**6), batch_size_per_device=st.integers(1, 256),
    compute_time_per_sample=st.floats(1e-6, 1e-1),
)
clusters = st.builds(
    ClusterSpec, gpus_per_node=st.integers(1, 8), intra_bandwidth=st.floats(1e10, 1e11),
    inter_bandwidth=st.floats(1e8, 1e10), intra_latency=st.floats(0, 1e-4),
    inter_latency=st.floats(0, 1e-2), step_overhead=st.floats(0, 1e-2),
)


@pytest.mark.filterwarnings("ignore::ddpscale.cluster.TopologyWarning")
@settings(max_examples=50)
@given(workloads, clusters, st.integers(1, 512))
def test_epoch_time_monotone_in_costs(w, c, n):
    t = simulate_epoch_time(w, c, n)
    assert t > 0
    assert simulate_epoch_time(w, replace(c, inter_bandwidth=c.inter_bandwidth * 2), n) <= t
    assert simulate_epoch_time(w, replace(c, intra_bandwidth=c.intra_bandwidth * 2), n) <= t
    assert simulate_epoch_time(w, replace(c, inter_latency=c.inter_latency + 1e-4), n) >= t
    assert simulate_epoch_time(w, replace(c, intra_latency=c.intra_latency + 1e-4), n) >= t
    assert simulate_epoch_time(w, replace(c, step_overhead=c.step_overhead + 1e-3), n) >= t
    assert simulate_epoch_time(replace(w, dataset_size=w.dataset_size + 1000), c, n) >= t
    assert simulate_epoch_time(replace(w, compute_time_per_sample=w.compute_time_per_sample * 2), c, n) >= t


@settings(max_examples=25)
@given(workloads, clusters, st.floats(0, 0.3), st.integers(0, 2**40))
def test_sweep_order_independent(w, c, sigma, seed):
    grid = (1, 2, 3, 8, 64)
    spec = ExperimentSpec(w, c, grid, noise_sigma=sigma, seed=seed)
    full = dict(sweep(spec).points)
    for n in reversed(grid):
        single = sweep(replace(spec, gpu_counts=(n,)))
        assert single.points[0][1] == full[n]
