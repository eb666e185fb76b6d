from __future__ import annotations

import math

import numpy as np
import pytest

from swcs.estimate import CgConfig, reconstruct_estimate
from swcs.operators import NonuniformDft, hamming_window_weights, unit_weights
from swcs.trajectories import golden_angle_stack

from .test_operators import cartesian_grid_rows, random_image


def test_zero_data_returns_zero_at_iteration_zero():
    n = 8
    trajs = golden_angle_stack(5, 2 * n)
    op = NonuniformDft(n, trajs)
    res = reconstruct_estimate(np.zeros(op.data_shape, complex), op, unit_weights(5))
    assert res.iterations == 0
    assert np.count_nonzero(res.image) == 0
    assert res.converged


def test_static_impulse_recovered_from_full_window():
    # 305 spokes fully sample a 64-wide image; the weighted LS solution
    # puts the peak exactly at the impulse and keeps every other pixel's
    # energy below 5% of the peak's.
    n = 64
    trajs = golden_angle_stack(305, 2 * n)
    op = NonuniformDft(n, trajs)
    img = np.zeros((n, n), complex)
    img[n // 2, n // 2] = 1.0
    weights = hamming_window_weights(305)
    res = reconstruct_estimate(
        op.forward(img), op, weights, CgConfig(max_iterations=30, tolerance=1e-8)
    )
    rec = np.abs(res.image)
    peak = np.unravel_index(np.argmax(rec), rec.shape)
    assert peak == (n // 2, n // 2)
    off = rec.copy()
    off[peak] = 0.0
    assert (off.max() / rec[peak]) ** 2 < 0.05


def test_normal_equation_residual_monotone():
    n = 16
    rng = np.random.default_rng(4)
    trajs = golden_angle_stack(40, 2 * n)
    op = NonuniformDft(n, trajs)
    data = op.forward(random_image(rng, n)) + 0.01 * (
        rng.standard_normal(op.data_shape) + 1j * rng.standard_normal(op.data_shape)
    )
    res = reconstruct_estimate(
        data, op, hamming_window_weights(40), CgConfig(max_iterations=40, tolerance=1e-12)
    )
    residuals = np.array([r for _, r in res.history])
    assert np.all(np.diff(residuals) <= 1e-12)


def test_linearity_in_data_for_fixed_iterations():
    n = 16
    rng = np.random.default_rng(6)
    trajs = golden_angle_stack(30, 2 * n)
    op = NonuniformDft(n, trajs)
    data = rng.standard_normal(op.data_shape) + 1j * rng.standard_normal(op.data_shape)
    cfg = CgConfig(max_iterations=8, tolerance=1e-14)
    w = hamming_window_weights(30)
    base = reconstruct_estimate(data, op, w, cfg)
    alpha = 2.75 - 1.25j
    scaled = reconstruct_estimate(alpha * data, op, w, cfg)
    assert scaled.iterations == base.iterations
    reference = alpha * base.image
    assert np.abs(scaled.image - reference).max() <= 1e-10 * np.abs(reference).max()


def test_complete_cartesian_sampling_matches_inverse_fft():
    n = 16
    rng = np.random.default_rng(7)
    img = random_image(rng, n)
    op = NonuniformDft(n, cartesian_grid_rows(n))
    data = op.forward(img)
    res = reconstruct_estimate(
        data, op, unit_weights(n), CgConfig(max_iterations=5, tolerance=1e-12)
    )
    ref = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(data)))
    assert np.abs(res.image - ref).max() <= 1e-8 * np.abs(ref).max()
    assert np.abs(res.image - img).max() <= 1e-8


def test_non_convergence_is_flagged_not_raised():
    n = 16
    rng = np.random.default_rng(8)
    trajs = golden_angle_stack(10, 2 * n)
    op = NonuniformDft(n, trajs)
    data = rng.standard_normal(op.data_shape) + 1j * rng.standard_normal(op.data_shape)
    res = reconstruct_estimate(
        data, op, unit_weights(10), CgConfig(max_iterations=2, tolerance=1e-14)
    )
    assert not res.converged
    assert res.iterations == 2
    assert np.isfinite(res.image).all()


def test_shape_mismatch_raises():
    n = 8
    op = NonuniformDft(n, golden_angle_stack(4, 2 * n))
    with pytest.raises(ValueError):
        reconstruct_estimate(np.zeros((3, 2 * n), complex), op, unit_weights(3))
    with pytest.raises(ValueError):
        reconstruct_estimate(np.zeros((4, 2 * n), complex), op, unit_weights(3))


def test_warm_start_from_solution_is_immediate():
    n = 12
    rng = np.random.default_rng(9)
    op = NonuniformDft(n, cartesian_grid_rows(n))
    truth = random_image(rng, n)
    data = op.forward(truth)
    cfg = CgConfig(max_iterations=20, tolerance=1e-10)
    cold = reconstruct_estimate(data, op, unit_weights(n), cfg)
    assert cold.converged
    warm = reconstruct_estimate(data, op, unit_weights(n), cfg, x0=cold.image)
    assert warm.iterations == 0
    assert np.array_equal(warm.image, cold.image)
