import json

import pytest

from ddpscale import ScalingCurve, detect_knee, find_min_time, fit_power_law, load_preset, simulate_epoch_time, sweep
from ddpscale.calibration import PAPER_TARGETS, calibrate, preset_document
from ddpscale.config import available_presets, preset_path

REPORTED = {  # (low n, low t, high n, high t) from the published timings
    "DimeNet": (2, 200.0, 416, 4.0),
    "NNConv": (2, 27.0, 416, 1.08),
    "SchNet": (2, 9.9, 416, 0.91),
    "PNA": (2, 2.8, 128, 0.76),
}


@pytest.fixture(scope="module")
def curves():
    config = load_preset("paper-grid")
    return {e.label: sweep(e) for e in config.experiments}


def test_available_presets():
    assert available_presets() == ["dimenet", "nnconv", "paper-grid", "pna", "schnet"]


@pytest.mark.parametrize("stem, names", [("paper-grid", None), ("dimenet", ["DimeNet"]), ("pna", ["PNA"])])
def test_shipped_presets_match_calibration(stem, names):
    shipped = json.loads(preset_path(stem).read_text())
    assert shipped == json.loads(json.dumps(preset_document(names)))


@pytest.mark.parametrize("label", list(REPORTED))
def test_presets_within_ten_percent(curves, label):
    n_lo, t_lo, n_hi, t_hi = REPORTED[label]
    curve = curves[label]
    assert curve.time_at(n_lo) == pytest.approx(t_lo, rel=0.10)
    assert curve.time_at(n_hi) == pytest.approx(t_hi, rel=0.10)


def test_dimenet_bounds(curves):
    # "over 200 s" on two GPUs, "less than 4 s" on 416
    assert 200 <= curves["DimeNet"].time_at(2) <= 220
    assert curves["DimeNet"].time_at(416) < 4.0


def test_unrounded_calibration_hits_anchors():
    for target in PAPER_TARGETS:
        w, c = calibrate(target, round_digits=None)
        assert simulate_epoch_time(w, c, target.low.n_gpus) == pytest.approx(target.low.epoch_time, rel=1e-10)
        assert simulate_epoch_time(w, c, target.high.n_gpus) == pytest.approx(target.high.epoch_time, rel=1e-10)


def test_beta_ordering_matches_published(curves):
    betas = [fit_power_law(curves[m]).beta for m in ("DimeNet", "NNConv", "SchNet", "PNA")]
    assert betas == sorted(betas, reverse=True)


def test_pna_interior_minimum(curves):
    n_min, t_min = find_min_time(curves["PNA"])
    assert n_min < curves["PNA"].points[-1][0]
    assert t_min == pytest.approx(0.76, rel=0.10)


def test_pna_grid_skips_416(curves):
    assert curves["PNA"].points[-1][0] == 364


@pytest.mark.xfail(strict=True, reason="ceil step counts on 250K samples put the minimum at 256, not 128")
def test_pna_minimum_at_128(curves):
    assert find_min_time(curves["PNA"])[0] == 128


@pytest.mark.xfail(strict=True, reason="the 364->416 step-count drop (3->2 steps) keeps QM9 tails above threshold")
def test_every_preset_has_knee_by_64(curves):
    for curve in curves.values():
        knee = detect_knee(curve, 1.25)
        assert knee is not None and knee <= 64


def test_knees_on_grid_without_last_point(curves):
    # dropping the 416 point removes the step-count discontinuity
    for label in ("NNConv", "SchNet"):
        trimmed = ScalingCurve(label, curves[label].points[:-1])
        assert detect_knee(trimmed, 1.25) <= 64
    assert detect_knee(curves["PNA"], 1.25) <= 64
