"""Analytical moving phantoms and their exact k-space data.

Two scenes are provided:

* a pair of identical 2D Gaussians moving apart horizontally at constant
  speed (centres at ``x = +/- v*t``, ``y = 0``), and
* the classic 10-ellipsoid 3D head phantom with the imaging plane
  translating along z, so each frame is a different axial slice.

Measurement data is generated directly in k-space from closed-form
Fourier transforms; rasterised frames exist for ground truth and for
oracle comparisons only, which keeps the simulated data free of the
discrete forward model used by the reconstruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1

from .operators import KSpaceData
from .trajectories import Trajectory


@dataclass(frozen=True)
class GaussianPhantomSpec:
    """Two unit-peak Gaussians with centres at (+/- velocity * t, 0)."""

    sigma: float
    velocity: float
    t_min: int
    t_max: int
    image_size: int = 256

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.velocity < 0:
            raise ValueError("velocity must be >= 0")
        if self.t_min >= self.t_max:
            raise ValueError("t_min must be smaller than t_max")


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid rotated by ``phi`` about the z axis.

    Geometry is in normalised units (the unit cube [-1, 1]^3 maps onto
    the image FOV); ``intensity`` adds to every interior voxel.
    """

    intensity: float
    a: float
    b: float
    c: float
    x0: float
    y0: float
    z0: float
    phi_deg: float = 0.0

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("semi-axes must be positive")
        if not math.isfinite(self.intensity):
            raise ValueError("intensity must be finite")


# Classic head phantom: outer skull at 2.0, interior at 1.02, with the
# usual ventricles and small lesions (original low-contrast intensities).
HEAD_PHANTOM: tuple[Ellipsoid, ...] = (
    Ellipsoid(2.00, 0.6900, 0.920, 0.810, 0.00, 0.0000, 0.00, 0.0),
    Ellipsoid(-0.98, 0.6624, 0.874, 0.780, 0.00, -0.0184, 0.00, 0.0),
    Ellipsoid(-0.02, 0.1100, 0.310, 0.220, 0.22, 0.0000, 0.00, -18.0),
    Ellipsoid(-0.02, 0.1600, 0.410, 0.280, -0.22, 0.0000, 0.00, 18.0),
    Ellipsoid(0.01, 0.2100, 0.250, 0.410, 0.00, 0.3500, -0.15, 0.0),
    Ellipsoid(0.01, 0.0460, 0.046, 0.050, 0.00, 0.1000, 0.25, 0.0),
    Ellipsoid(0.01, 0.0460, 0.046, 0.050, 0.00, -0.1000, 0.25, 0.0),
    Ellipsoid(0.01, 0.0460, 0.023, 0.050, -0.08, -0.6050, 0.00, 0.0),
    Ellipsoid(0.01, 0.0230, 0.023, 0.020, 0.00, -0.6060, 0.00, 0.0),
    Ellipsoid(0.01, 0.0230, 0.046, 0.020, 0.06, -0.6050, 0.00, 0.0),
)


@dataclass(frozen=True)
class SheppLoganSpec:
    """3D head phantom crossed by a moving axial imaging plane.

    ``slice_thickness`` is in grid (pixel) units and ``speed`` is the
    dimensionless per-frame motion parameter: the plane sits at
    ``z = slice_thickness * speed * t`` grid units for frame time t,
    so the plane is at the phantom centre at t = 0.
    """

    slice_thickness: float
    speed: float
    image_size: int = 256
    ellipsoids: tuple[Ellipsoid, ...] = HEAD_PHANTOM

    def __post_init__(self) -> None:
        if self.slice_thickness <= 0:
            raise ValueError("slice_thickness must be positive")
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        if not self.ellipsoids:
            raise ValueError("at least one ellipsoid required")


@dataclass(frozen=True)
class NoiseSpec:
    """Complex Gaussian measurement noise, relative to the data maximum."""

    sigma_rel: float
    seed: int

    def __post_init__(self) -> None:
        if self.sigma_rel < 0:
            raise ValueError("sigma_rel must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


def _centered_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    pos = np.arange(n, dtype=np.float64) - n // 2
    return np.meshgrid(pos, pos, indexing="xy")


def gaussian_frame(spec: GaussianPhantomSpec, t: int) -> np.ndarray:
    """Rasterised frame at time t (real, (N, N), row index = y)."""
    if not spec.t_min <= t <= spec.t_max:
        raise ValueError(f"t={t} outside frame range [{spec.t_min}, {spec.t_max}]")
    xx, yy = _centered_grid(spec.image_size)
    a = spec.velocity * t
    two_s2 = 2.0 * spec.sigma**2
    return np.exp(-((xx - a) ** 2 + yy**2) / two_s2) + np.exp(
        -((xx + a) ** 2 + yy**2) / two_s2
    )


def gaussian_kspace(spec: GaussianPhantomSpec, t: int, samples: np.ndarray) -> np.ndarray:
    """Closed-form transform of the two-Gaussian frame at the samples.

    Normalised to match the pixel-sum forward model on fine grids:
    ``2*pi*sigma^2 * exp(-sigma^2 |k|^2 / 2) * 2*cos(kx * v * t)``.
    """
    samples = np.asarray(samples, dtype=np.float64)
    kx, ky = samples[..., 0], samples[..., 1]
    envelope = 2.0 * np.pi * spec.sigma**2 * np.exp(
        -(spec.sigma**2) * (kx**2 + ky**2) / 2.0
    )
    return (envelope * 2.0 * np.cos(kx * spec.velocity * t)).astype(np.complex128)


def slice_position(t: int | float, spec: SheppLoganSpec, t_center: float = 0.0) -> float:
    """z offset of the imaging plane at frame time t, in grid units."""
    return spec.slice_thickness * spec.speed * (t - t_center)


def _slice_ellipses(spec: SheppLoganSpec, z: float):
    """Cross-section ellipses (intensity, ax, ay, x0, y0, phi) at height z.

    All lengths in pixels; ellipsoids not cut by the plane are dropped.
    """
    half = spec.image_size / 2.0
    out = []
    for e in spec.ellipsoids:
        zc = (z - e.z0 * half) / (e.c * half)
        s2 = 1.0 - zc * zc
        if s2 <= 0.0:
            continue
        s = math.sqrt(s2)
        out.append(
            (
                e.intensity,
                e.a * half * s,
                e.b * half * s,
                e.x0 * half,
                e.y0 * half,
                math.radians(e.phi_deg),
            )
        )
    return out


def shepp_logan_slice_image(spec: SheppLoganSpec, z: float) -> np.ndarray:
    """Rasterised slice at height z (real, (N, N)), pixel-centre sampling."""
    n = spec.image_size
    xx, yy = _centered_grid(n)
    img = np.zeros((n, n), dtype=np.float64)
    for intensity, ax, ay, x0, y0, phi in _slice_ellipses(spec, z):
        dx, dy = xx - x0, yy - y0
        u = dx * math.cos(phi) + dy * math.sin(phi)
        v = -dx * math.sin(phi) + dy * math.cos(phi)
        img[(u / ax) ** 2 + (v / ay) ** 2 <= 1.0] += intensity
    return img


def shepp_logan_mask(spec: SheppLoganSpec, z: float) -> np.ndarray:
    """Pixels inside the outer ellipsoid's cross-section at height z."""
    n = spec.image_size
    outer = spec.ellipsoids[0]
    half = n / 2.0
    zc = (z - outer.z0 * half) / (outer.c * half)
    s2 = 1.0 - zc * zc
    if s2 <= 0.0:
        return np.zeros((n, n), dtype=bool)
    s = math.sqrt(s2)
    xx, yy = _centered_grid(n)
    dx, dy = xx - outer.x0 * half, yy - outer.y0 * half
    phi = math.radians(outer.phi_deg)
    u = dx * math.cos(phi) + dy * math.sin(phi)
    v = -dx * math.sin(phi) + dy * math.cos(phi)
    return (u / (outer.a * half * s)) ** 2 + (v / (outer.b * half * s)) ** 2 <= 1.0


def shepp_logan_slice_kspace(
    spec: SheppLoganSpec, z: float, samples: np.ndarray
) -> np.ndarray:
    """Exact 2D transform of the slice at height z, at the given samples.

    Each cross-section ellipse contributes its jinc-type transform
    ``2 * pi * ax * ay * J1(g) / g`` with ``g`` the axis-scaled frequency
    magnitude, phase-shifted by the ellipse centre.
    """
    samples = np.asarray(samples, dtype=np.float64)
    kx, ky = samples[..., 0], samples[..., 1]
    out = np.zeros(kx.shape, dtype=np.complex128)
    for intensity, ax, ay, x0, y0, phi in _slice_ellipses(spec, z):
        k1 = kx * math.cos(phi) + ky * math.sin(phi)
        k2 = -kx * math.sin(phi) + ky * math.cos(phi)
        g = np.hypot(ax * k1, ay * k2)
        amp = np.empty_like(g)
        small = g < 1e-12
        amp[~small] = j1(g[~small]) / g[~small]
        amp[small] = 0.5
        out += (2.0 * np.pi * intensity * ax * ay * amp) * np.exp(
            -1j * (kx * x0 + ky * y0)
        )
    return out


def synthesize_kspace(
    trajectories: list[Trajectory],
    spec: GaussianPhantomSpec | SheppLoganSpec,
) -> KSpaceData:
    """Exact k-space data for every trajectory at its own frame time."""
    rows = np.empty(
        (len(trajectories), trajectories[0].n_samples), dtype=np.complex128
    )
    for i, traj in enumerate(trajectories):
        if isinstance(spec, GaussianPhantomSpec):
            rows[i] = gaussian_kspace(spec, traj.frame_time, traj.samples)
        else:
            z = slice_position(traj.frame_time, spec)
            rows[i] = shepp_logan_slice_kspace(spec, z, traj.samples)
    return KSpaceData(trajectories=tuple(trajectories), samples=rows)


def ground_truth_frame(
    spec: GaussianPhantomSpec | SheppLoganSpec, t: int
) -> np.ndarray:
    """Rasterised ground-truth image for frame time t."""
    if isinstance(spec, GaussianPhantomSpec):
        return gaussian_frame(spec, t)
    return shepp_logan_slice_image(spec, slice_position(t, spec))


def add_noise(data: KSpaceData, noise: NoiseSpec) -> KSpaceData:
    """Add i.i.d. complex Gaussian noise scaled to the data maximum.

    Real and imaginary parts each get standard deviation
    ``sigma_rel * max|data|``.  Noise for trajectory m is drawn from a
    generator seeded by (seed, m), so results do not depend on the order
    in which trajectories are processed.
    """
    if noise.sigma_rel == 0.0:
        return data
    scale = noise.sigma_rel * np.abs(data.samples).max()
    out = np.array(data.samples, copy=True)
    for i, traj in enumerate(data.trajectories):
        rng = np.random.default_rng([noise.seed, traj.index])
        k = data.samples.shape[1]
        out[i] += scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return KSpaceData(trajectories=data.trajectories, samples=out)
