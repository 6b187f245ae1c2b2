import numpy as np
import pytest

import touchsmooth as ts


def test_presets_listed():
    names = ts.preset_names()
    assert "mma5" in names and "three-stage" in names
    assert "[kalman]" in ts.preset_text("three-stage")


def test_truth_and_noise_shapes():
    truth = ts.generate_truth("linear", 10.0)
    assert truth.shape == (481, 2)
    np.testing.assert_allclose(np.linalg.norm(np.diff(truth, axis=0), axis=1), 1 / 6)
    noisy = ts.add_noise(truth, seed=3, trial=2)
    assert noisy.shape == truth.shape
    np.testing.assert_array_equal(noisy, ts.add_noise(truth, seed=3, trial=2))
    m = ts.measure1(truth, noisy)
    assert 1.1 < m < 1.6


def test_filter_beats_noise():
    truth = ts.generate_truth("linear", 25.0)
    noisy = ts.add_noise(truth, trial=0)
    est, delay = ts.filter(noisy, "three-stage")
    assert delay == 5
    shown = ts.emission_view(est, delay)
    assert ts.measure1(truth, shown, delay) < ts.measure1(truth, noisy)


def test_filter_with_spec_text():
    line = ts.generate_truth("linear", 30.0, duration=1.0)
    est, delay = ts.filter(line, spec="[mma]\nn = 2\n[sg]\n")
    assert delay == 4
    # The last `delay` frames flush with a shrunken window; the rest is exact.
    np.testing.assert_allclose(est[:-delay], line[:-delay], atol=1e-9)


def test_errors_surface_as_value_error():
    with pytest.raises(ValueError, match="unknown key"):
        ts.filter(np.zeros((10, 2)), spec="[mma]\nwidth = 3\n")
    with pytest.raises(ValueError):
        ts.filter(np.zeros((10, 3)))
    with pytest.raises(ValueError):
        ts.generate_truth("spiral")


def test_unit_oracles():
    w = ts.savitzky_golay_coefficients(2, 5)
    np.testing.assert_allclose(w, [-0.086, 0.343, 0.486, 0.343, -0.086], atol=5e-4)
    assert abs(ts.diffuse_step([0, 4, 0])[1] - 2.003195) < 1e-6
    assert ts.kde_smooth([7, 7, 7, 7, 7]) == 7
    ramp = np.stack([np.arange(16.0), np.zeros(16)], axis=1)
    assert ts.estimate_noise_sd(ramp) == 0


def test_bench_rows():
    rows = ts.bench("zigzag", ["mma5"], trials=4, grid=[(25.0, 0.0)], threads=1)
    assert len(rows) == 1
    r = rows[0]
    assert r["shape"] == "zigzag" and r["frames"] == 481
    assert r["filtered"]["mma5"]["group_delay"] == 5
    again = ts.bench("zigzag", ["mma5"], trials=4, grid=[(25.0, 0.0)], threads=2)
    assert again[0]["filtered"]["mma5"]["mse"] == r["filtered"]["mma5"]["mse"]


def test_calibration():
    along, perp, achieved = ts.calibrate_noise(1.35, trials=20)
    assert perp == pytest.approx(2 * along)
    assert achieved == pytest.approx(1.35, rel=0.02)
