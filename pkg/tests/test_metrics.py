from __future__ import annotations

import math

import numpy as np
import pytest

from swcs.metrics import (
    UNRESOLVED,
    fwhm,
    midpoint_half_max_times,
    profile_through_center,
    rmse,
    separability_times,
    theoretical_fwhm,
    theoretical_t0,
    theoretical_t2,
)
from swcs.phantoms import GaussianPhantomSpec, gaussian_frame


def profile_sequence(spec, times):
    return np.array(
        [profile_through_center(gaussian_frame(spec, t)) for t in times]
    ), np.asarray(times)


def test_rmse_zero_on_equality():
    rng = np.random.default_rng(0)
    img = rng.random((8, 8))
    mask = np.ones((8, 8), bool)
    assert rmse(img, img, mask) == 0.0


def test_rmse_constant_offset():
    rng = np.random.default_rng(1)
    truth = rng.random((8, 8))
    mask = rng.random((8, 8)) > 0.4
    assert rmse(truth + 0.37, truth, mask) == pytest.approx(0.37)


def test_rmse_uses_magnitude_of_complex_recon():
    truth = np.ones((4, 4))
    recon = np.full((4, 4), 1j)
    assert rmse(recon, truth, np.ones((4, 4), bool)) == pytest.approx(0.0)


def test_rmse_permutation_invariant_within_mask():
    rng = np.random.default_rng(2)
    truth = rng.random((6, 6))
    recon = rng.random((6, 6))
    mask = np.ones((6, 6), bool)
    base = rmse(recon, truth, mask)
    perm = rng.permutation(36)
    assert rmse(
        recon.reshape(-1)[perm].reshape(6, 6),
        truth.reshape(-1)[perm].reshape(6, 6),
        mask,
    ) == pytest.approx(base)


def test_rmse_empty_mask_raises():
    with pytest.raises(ValueError):
        rmse(np.ones((4, 4)), np.ones((4, 4)), np.zeros((4, 4), bool))


def test_fwhm_sampled_gaussian():
    x = np.arange(64) - 32
    profile = np.exp(-(x**2) / (2 * 4.0**2))
    assert fwhm(profile) == pytest.approx(9.419, abs=0.05)


def test_fwhm_rectangular_pulse():
    profile = np.zeros(64)
    profile[20:41] = 1.0
    assert fwhm(profile) == pytest.approx(21, abs=1.0)


def test_fwhm_scale_invariant():
    x = np.arange(64) - 32
    profile = np.exp(-(x**2) / (2 * 9.0))
    assert fwhm(3.7 * profile) == fwhm(profile)


def test_fwhm_edge_peak_raises():
    profile = np.linspace(0, 1, 32)
    with pytest.raises(ValueError):
        fwhm(profile)


def test_theoretical_values_frozen():
    assert theoretical_fwhm(4.0) == pytest.approx(9.419280180123797, abs=1e-9)
    assert theoretical_t2(2.0, 0.128) == pytest.approx(-15.625)
    assert theoretical_t0(2.0, 0.128) == pytest.approx(-25.979274, abs=1e-3)
    assert theoretical_t0(10.0, 0.032) == pytest.approx(-519.585486, abs=1e-3)


def test_ground_truth_times_match_theory_within_one_frame():
    spec = GaussianPhantomSpec(
        sigma=2.0, velocity=0.128, t_min=-60, t_max=59, image_size=48
    )
    times = list(range(-45, 46))
    profiles, tarr = profile_sequence(spec, times)
    t0, t1 = midpoint_half_max_times(profiles, tarr)
    # noiseless ground truth: drop the depth cut below the newly formed
    # dip at the boundary frame (depth ~7e-4 of peak there)
    t2, t3 = separability_times(profiles, tarr, depth_fraction=1e-4)
    assert abs(t0 - theoretical_t0(2.0, 0.128)) <= 1.0
    assert abs(t2 - theoretical_t2(2.0, 0.128)) <= 1.0
    # time-reversal symmetry of the phantom
    assert t1 == -t0
    assert t3 == -t2


def test_midpoint_times_unresolved_when_superimposed():
    # max separation (v * 500 = 10 px) never exceeds sigma: one bump at
    # every frame, so neither crossing exists
    spec = GaussianPhantomSpec(
        sigma=10.0, velocity=0.02, t_min=-500, t_max=499, image_size=96
    )
    times = list(range(-500, 500, 50))
    profiles, tarr = profile_sequence(spec, times)
    t0, t1 = midpoint_half_max_times(profiles, tarr)
    t2, t3 = separability_times(profiles, tarr)
    assert t0 is UNRESOLVED and t1 is UNRESOLVED
    assert t2 is UNRESOLVED and t3 is UNRESOLVED


def test_separability_respects_depth_threshold():
    x = np.arange(64) - 32
    dip = np.exp(-((x - 5.0) ** 2) / 18) + np.exp(-((x + 5.0) ** 2) / 18)
    profiles = dip[None, :].repeat(2, axis=0)
    times = np.array([-1, 1])
    t2, t3 = separability_times(profiles, times, depth_fraction=1e-3)
    assert t2 == -1 and t3 == 1
    # same profile, but demanding a deeper dip than it has
    depth = (dip.max() - dip[32]) / dip.max()
    t2, t3 = separability_times(profiles, times, depth_fraction=depth * 1.5)
    assert t2 is UNRESOLVED and t3 is UNRESOLVED


def test_times_require_strictly_increasing_input():
    profiles = np.ones((3, 16))
    with pytest.raises(ValueError):
        midpoint_half_max_times(profiles, np.array([-2, -2, 1]))
    with pytest.raises(ValueError):
        separability_times(profiles, np.array([3, 2, 1]))


def test_profile_through_center_uses_magnitude():
    img = np.zeros((8, 8), complex)
    img[4, :] = 1j * np.arange(8)
    assert np.array_equal(profile_through_center(img), np.arange(8.0))
