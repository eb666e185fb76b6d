from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swcs.operators import (
    KSpaceData,
    NonuniformDft,
    WindowWeights,
    apply_window,
    hamming_weight,
    hamming_window_weights,
)
from swcs.trajectories import golden_angle, golden_angle_stack, make_spoke


def random_image(rng, n, interior=False):
    img = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if interior:
        out = np.zeros_like(img)
        q = n // 4
        out[q:-q, q:-q] = img[q:-q, q:-q]
        return out
    return img


def cartesian_grid_rows(n):
    """Full k-space grid as n 'trajectories' of n samples (one per row)."""
    freqs = 2 * math.pi * (np.arange(n) - n // 2) / n
    rows = []
    for ky in freqs:
        rows.append(np.stack([freqs, np.full(n, ky)], axis=1))
    return rows


def test_forward_centered_impulse_is_flat():
    n = 16
    img = np.zeros((n, n), complex)
    img[n // 2, n // 2] = 1.0
    op = NonuniformDft(n, [make_spoke(0.7, 32), make_spoke(2.1, 32)])
    assert np.allclose(op.forward(img), 1.0, atol=1e-12)


def test_forward_dc_sums_pixels():
    n = 12
    op = NonuniformDft(n, [np.zeros((1, 2))])
    assert op.forward(np.ones((n, n), complex))[0, 0] == pytest.approx(n * n)


def test_forward_shift_theorem():
    n = 16
    rng = np.random.default_rng(3)
    img = random_image(rng, n, interior=True)
    shifted = np.roll(img, 1, axis=1)
    spoke = make_spoke(0.3, 32)
    op = NonuniformDft(n, [spoke])
    expected = np.exp(-1j * spoke[:, 0]).reshape(1, -1)
    assert np.allclose(op.forward(shifted), op.forward(img) * expected, atol=1e-9)


def test_adjoint_of_dc_sample_is_constant():
    n = 8
    op = NonuniformDft(n, [np.zeros((1, 2))])
    img = op.adjoint(np.ones((1, 1), complex))
    assert np.allclose(img, 1.0)


def test_adjoint_of_zero_is_zero():
    op = NonuniformDft(8, [make_spoke(1.0, 16)])
    assert np.count_nonzero(op.adjoint(np.zeros((1, 16), complex))) == 0


@pytest.mark.parametrize("n", [8, 16, 32])
def test_adjoint_identity_20_trials(n):
    rng = np.random.default_rng(100 + n)
    trajs = [make_spoke(golden_angle(m), 2 * n) for m in range(5)]
    op = NonuniformDft(n, trajs)
    for _ in range(20):
        x = random_image(rng, n)
        y = rng.standard_normal(op.data_shape) + 1j * rng.standard_normal(op.data_shape)
        fx = op.forward(x)
        lhs = np.vdot(y, fx)
        rhs = np.vdot(op.adjoint(y), x)
        defect = abs(lhs - rhs) / (np.linalg.norm(fx) * np.linalg.norm(y))
        assert defect < 1e-10


def test_linearity():
    n = 16
    rng = np.random.default_rng(5)
    op = NonuniformDft(n, [make_spoke(golden_angle(m), 2 * n) for m in range(3)])
    x, z = random_image(rng, n), random_image(rng, n)
    a, b = 1.7 - 0.3j, -0.4 + 2.2j
    lhs = op.forward(a * x + b * z)
    rhs = a * op.forward(x) + b * op.forward(z)
    assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(rhs).max()


def test_cartesian_rows_match_fft():
    n = 16
    rng = np.random.default_rng(8)
    img = random_image(rng, n)
    op = NonuniformDft(n, cartesian_grid_rows(n))
    got = op.forward(img)
    ref = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(img)))
    assert np.abs(got - ref).max() <= 1e-10 * np.abs(ref).max()


def test_cartesian_axis_spokes_match_fft():
    n = 16
    rng = np.random.default_rng(9)
    img = random_image(rng, n)
    radii = 2 * math.pi * (np.arange(n) - n // 2) / n
    kx_axis = np.stack([radii, np.zeros(n)], axis=1)
    ky_axis = np.stack([np.zeros(n), radii], axis=1)
    got = NonuniformDft(n, [kx_axis, ky_axis]).forward(img)
    ref = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(img)))
    assert np.allclose(got[0], ref[n // 2, :], atol=1e-10 * np.abs(ref).max())
    assert np.allclose(got[1], ref[:, n // 2], atol=1e-10 * np.abs(ref).max())


def test_columns_match_forward_of_impulses():
    n = 10
    op = NonuniformDft(n, [make_spoke(0.4, 20), make_spoke(1.9, 20)])
    pixels = np.array([0, 37, n * n - 1])
    cols = op.columns(pixels)
    for j, p in enumerate(pixels):
        img = np.zeros((n, n), complex)
        img.reshape(-1)[p] = 1.0
        assert np.allclose(cols[:, j], op.forward(img).reshape(-1), atol=1e-12)


def test_forward_rejects_wrong_size():
    op = NonuniformDft(8, [make_spoke(0.0, 16)])
    with pytest.raises(ValueError):
        op.forward(np.zeros((9, 9), complex))
    with pytest.raises(ValueError):
        op.adjoint(np.zeros((2, 16), complex))


def test_chunked_path_matches_cached(monkeypatch):
    import swcs.operators as ops

    n = 12
    rng = np.random.default_rng(11)
    trajs = [make_spoke(golden_angle(m), 2 * n) for m in range(4)]
    img = random_image(rng, n)
    y = rng.standard_normal((4, 2 * n)) + 1j * rng.standard_normal((4, 2 * n))
    cached = NonuniformDft(n, trajs)
    fwd_cached, adj_cached = cached.forward(img), cached.adjoint(y)
    monkeypatch.setattr(ops, "FACTOR_CACHE_LIMIT_BYTES", 0)
    monkeypatch.setattr(ops, "_CHUNK", 7)
    streamed = NonuniformDft(n, trajs)
    assert streamed._get_factors() is None
    assert np.allclose(streamed.forward(img), fwd_cached, atol=1e-12)
    assert np.allclose(streamed.adjoint(y), adj_cached, atol=1e-12)


def test_hamming_weight_examples():
    assert hamming_weight(0, 304) == pytest.approx(0.08)
    assert hamming_weight(152, 304) == pytest.approx(1.0)
    assert hamming_weight(76, 304) == pytest.approx(0.54)


@given(st.integers(min_value=2, max_value=4000))
def test_hamming_window_center_max_and_symmetric(count):
    w = hamming_window_weights(count).values
    assert w.argmax() == (count - 1) // 2 or w.argmax() == count // 2
    assert np.allclose(w, w[::-1], atol=1e-12)
    assert w.min() >= 0.08 - 1e-12 and w.max() <= 1.0 + 1e-12


def test_hamming_window_odd_center_is_one():
    w = hamming_window_weights(305).values
    assert w[152] == pytest.approx(1.0)
    assert w[0] == pytest.approx(0.08)


def test_apply_window_identity_and_scaling():
    rng = np.random.default_rng(21)
    data = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
    ones = WindowWeights(np.ones(3))
    assert np.array_equal(apply_window(data, ones), data)
    w = WindowWeights(np.array([0.08, 1.0, 0.54]))
    scaled = apply_window(data, w)
    assert np.allclose(scaled[0], 0.08 * data[0])
    inverse = WindowWeights(1.0 / w.values)
    roundtrip = apply_window(scaled, inverse)
    assert np.abs(roundtrip - data).max() < 1e-12


def test_apply_window_count_mismatch():
    with pytest.raises(ValueError):
        apply_window(np.zeros((3, 4), complex), WindowWeights(np.ones(2)))


def test_kspace_data_shape_checks():
    trajs = golden_angle_stack(3, 8)
    with pytest.raises(ValueError):
        KSpaceData(trajectories=tuple(trajs), samples=np.zeros((2, 8), complex))
    data = KSpaceData(trajectories=tuple(trajs), samples=np.zeros((3, 8), complex))
    sub = data.subset([2, 3])
    assert [t.index for t in sub.trajectories] == [2, 3]
