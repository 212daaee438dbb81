import warnings
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from ddpscale import WorkloadSpec, compute_time_per_step, gradient_message_size, steps_per_epoch
from ddpscale.errors import ValidationError
from ddpscale.workload import StepClampWarning


def make(**kw):
    base = dict(name="w", param_count=1, dataset_size=100_000, batch_size_per_device=128,
                compute_time_per_sample=1e-3)
    base.update(kw)
    return WorkloadSpec(**base)


@pytest.mark.parametrize("params, nbytes, expected", [
    (2_100_000, 4, 8_400_000),
    (1, 4, 4),
    (620_000, 4, 2_480_000),
    (620_000, 2, 1_240_000),
])
def test_gradient_message_size(params, nbytes, expected):
    assert gradient_message_size(make(param_count=params, bytes_per_param=nbytes)) == expected


@pytest.mark.parametrize("dataset, n, drop_last, expected", [
    (100_000, 2, False, 391),
    (256, 2, False, 1),
    (250_000, 416, False, 5),
    (100_000, 2, True, 390),
    (100_000, 416, False, 2),
    (100_000, 364, False, 3),
])
def test_steps_per_epoch(dataset, n, drop_last, expected):
    assert steps_per_epoch(make(dataset_size=dataset), n, drop_last) == expected


def test_steps_drop_last_clamps_with_flag():
    w = make(dataset_size=100)
    with pytest.warns(StepClampWarning):
        steps = steps_per_epoch(w, 4, drop_last=True)
    assert steps == 1 and steps.clamped
    assert not steps_per_epoch(w, 4, drop_last=False).clamped


def test_steps_uses_workload_drop_last_by_default():
    w = make(dataset_size=300, drop_last=True)
    assert steps_per_epoch(w, 2) == 1
    assert steps_per_epoch(w, 2, drop_last=False) == 2


@pytest.mark.parametrize("b, c, expected", [(128, 0.001, 0.128), (1, 0.5, 0.5), (128, 1.65, 211.2)])
def test_compute_time_per_step(b, c, expected):
    assert compute_time_per_step(make(batch_size_per_device=b, compute_time_per_sample=c)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("field, value", [
    ("param_count", 0), ("dataset_size", 0), ("batch_size_per_device", 0), ("epochs", 0),
    ("bytes_per_param", 3), ("compute_time_per_sample", 0.0), ("compute_time_per_sample", float("nan")),
    ("param_count", 2.5),
])
def test_invalid_workload(field, value):
    with pytest.raises(ValidationError, match=field):
        make(**{field: value})


@given(st.integers(1, 10**7), st.integers(1, 512), st.integers(1, 1024), st.integers(1, 1024))
def test_steps_properties(dataset, batch, n, m):
    w = make(dataset_size=dataset, batch_size_per_device=batch)
    lo, hi = sorted((n, m))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StepClampWarning)
        assert steps_per_epoch(w, hi) <= steps_per_epoch(w, lo)
        assert steps_per_epoch(w, n, False) - steps_per_epoch(w, n, True) in (0, 1)
        assert steps_per_epoch(w, n) >= 1
        assert steps_per_epoch(replace(w, dataset_size=dataset + 1), n) >= steps_per_epoch(w, n)


@given(st.integers(1, 10**9), st.sampled_from([2, 4, 8]))
def test_message_linear_in_params(p, nbytes):
    w = make(param_count=p, bytes_per_param=nbytes)
    assert gradient_message_size(replace(w, param_count=2 * p)) == 2 * gradient_message_size(w)
