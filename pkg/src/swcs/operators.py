"""Non-uniform discrete Fourier operators and Hamming data weighting.

Images are complex (N, N) ndarrays indexed ``img[iy, ix]`` with pixel
coordinates ``x = ix - N//2`` and ``y = iy - N//2`` (origin at the image
centre).  k-space data for a set of M equal-length trajectories is a
complex (M, K) ndarray, one row per trajectory in acquisition order.

The forward map evaluates, for every sample coordinate k,

    y(k) = sum_r  x[r] * exp(-1j * (kx * x + ky * y))

exactly (direct summation).  The 2D exponential factors into per-axis
terms, so each application reduces to dense matrix products against two
(samples, N) factor matrices; those factors are cached per operator
instance when they fit the memory budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .trajectories import Trajectory

# Factor matrices above this many bytes are recomputed chunk-wise per
# application instead of being cached on the instance.
FACTOR_CACHE_LIMIT_BYTES = 2 * 1024**3
_CHUNK = 8192


def _phase_table(coords: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """exp(-1j * outer(coords, positions)) built via separate cos/sin."""
    phase = coords[:, None] * positions[None, :]
    out = np.empty(phase.shape, dtype=np.complex128)
    np.cos(phase, out=out.real)
    np.sin(phase, out=out.imag)
    out.imag *= -1.0
    return out


@dataclass(frozen=True)
class WindowWeights:
    """Per-trajectory scalar weights, maximal at the window centre."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("weights must be a non-empty 1D array")
        if not np.isfinite(values).all() or values.min() <= 0.0:
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "values", values)
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return self.values.size


def hamming_weight(m: int | float, window_length: int | float) -> float:
    """Hamming window value 0.54 - 0.46*cos(2*pi*m/M) for 0 <= m <= M."""
    if not 0 <= m <= window_length:
        raise ValueError("position must satisfy 0 <= m <= window_length")
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * m / window_length)


def hamming_window_weights(count: int) -> WindowWeights:
    """Hamming weights for a window of ``count`` trajectories.

    Positions are counted from the window start so the middle trajectory
    gets weight 1 and the ends get 0.08.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return WindowWeights(np.ones(1))
    m = np.arange(count, dtype=np.float64)
    return WindowWeights(0.54 - 0.46 * np.cos(2.0 * np.pi * m / (count - 1)))


def unit_weights(count: int) -> WindowWeights:
    return WindowWeights(np.ones(count))


def apply_window(data: np.ndarray, weights: WindowWeights) -> np.ndarray:
    """Scale every sample of trajectory m by its window weight.

    Callers weighting the data this way must weight the operator rows
    identically (the weighted forward map is ``W F``); see
    :func:`swcs.estimate.reconstruct_estimate`.
    """
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] != len(weights):
        raise ValueError("weight count must equal trajectory count")
    return data * weights.values[:, None]


class NonuniformDft:
    """Exact type-II non-uniform DFT over a fixed trajectory subset.

    Parameters
    ----------
    n : int
        Image size (N x N).
    trajectories : sequence of Trajectory or of (K, 2) arrays
        Sample coordinates, one entry per trajectory.  All trajectories
        must have the same sample count.
    """

    def __init__(self, n: int, trajectories) -> None:
        if n < 2:
            raise ValueError("image size must be >= 2")
        coords = []
        for t in trajectories:
            c = t.samples if isinstance(t, Trajectory) else np.asarray(t, dtype=np.float64)
            if c.ndim != 2 or c.shape[1] != 2:
                raise ValueError("each trajectory needs (K, 2) coordinates")
            coords.append(c)
        if not coords:
            raise ValueError("at least one trajectory required")
        if len({c.shape[0] for c in coords}) != 1:
            raise ValueError("all trajectories must share one sample count")
        self.n = n
        self.n_trajectories = len(coords)
        self.samples_per_trajectory = coords[0].shape[0]
        flat = np.vstack(coords)
        if np.abs(flat).max() > np.pi + 1e-12:
            raise ValueError("sample coordinates must lie in [-pi, pi]^2")
        self._kx = np.ascontiguousarray(flat[:, 0])
        self._ky = np.ascontiguousarray(flat[:, 1])
        self._positions = (np.arange(n) - n // 2).astype(np.float64)
        self._factors: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n_samples(self) -> int:
        return self._kx.size

    @property
    def data_shape(self) -> tuple[int, int]:
        return (self.n_trajectories, self.samples_per_trajectory)

    def _factor_bytes(self) -> int:
        return 2 * self.n_samples * self.n * 16

    def _get_factors(self) -> tuple[np.ndarray, np.ndarray] | None:
        if self._factors is None and self._factor_bytes() <= FACTOR_CACHE_LIMIT_BYTES:
            self._factors = (
                _phase_table(self._kx, self._positions),
                _phase_table(self._ky, self._positions),
            )
        return self._factors

    def forward(self, image: np.ndarray) -> np.ndarray:
        """Evaluate the NDFT of ``image`` at every sample coordinate."""
        image = np.asarray(image)
        if image.shape != (self.n, self.n):
            raise ValueError(f"image must have shape {(self.n, self.n)}")
        image = image.astype(np.complex128, copy=False)
        out = np.empty(self.n_samples, dtype=np.complex128)
        factors = self._get_factors()
        for lo in range(0, self.n_samples, _CHUNK):
            hi = min(lo + _CHUNK, self.n_samples)
            if factors is not None:
                ax, by = factors[0][lo:hi], factors[1][lo:hi]
            else:
                ax = _phase_table(self._kx[lo:hi], self._positions)
                by = _phase_table(self._ky[lo:hi], self._positions)
            # y_c = sum_iy by[c, iy] * (sum_ix image[iy, ix] * ax[c, ix])
            v = image @ ax.T
            out[lo:hi] = np.einsum("ci,ic->c", by, v)
        return out.reshape(self.data_shape)

    def adjoint(self, data: np.ndarray) -> np.ndarray:
        """Exact conjugate transpose of :meth:`forward`."""
        data = np.asarray(data)
        if data.shape != self.data_shape:
            raise ValueError(f"data must have shape {self.data_shape}")
        flat = data.reshape(-1).astype(np.complex128, copy=False)
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        factors = self._get_factors()
        for lo in range(0, self.n_samples, _CHUNK):
            hi = min(lo + _CHUNK, self.n_samples)
            if factors is not None:
                ax, by = factors[0][lo:hi], factors[1][lo:hi]
            else:
                ax = _phase_table(self._kx[lo:hi], self._positions)
                by = _phase_table(self._ky[lo:hi], self._positions)
            out += (by.conj() * flat[lo:hi, None]).T @ ax.conj()
        return out

    def columns(self, pixels: np.ndarray) -> np.ndarray:
        """Dense operator columns for a set of flat pixel indices.

        Returns an (n_samples, len(pixels)) matrix whose p-th column is
        the forward response of a unit impulse at ``pixels[p]`` (indices
        into the C-order flattened image).
        """
        pixels = np.asarray(pixels, dtype=np.intp)
        iy, ix = np.divmod(pixels, self.n)
        xs = self._positions[ix]
        ys = self._positions[iy]
        out = np.empty((self.n_samples, pixels.size), dtype=np.complex128)
        for lo in range(0, self.n_samples, _CHUNK):
            hi = min(lo + _CHUNK, self.n_samples)
            phase = self._kx[lo:hi, None] * xs[None, :] + self._ky[lo:hi, None] * ys[None, :]
            block = out[lo:hi]
            np.cos(phase, out=block.real)
            np.sin(phase, out=block.imag)
            block.imag *= -1.0
        return out


@dataclass(frozen=True)
class KSpaceData:
    """Measured samples for a set of trajectories (one row each)."""

    trajectories: tuple[Trajectory, ...]
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 2 or samples.shape[0] != len(self.trajectories):
            raise ValueError("samples must be (M, K) with one row per trajectory")
        if any(t.n_samples != samples.shape[1] for t in self.trajectories):
            raise ValueError("sample vector length must match trajectory K")
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        object.__setattr__(self, "samples", samples)
        self.samples.setflags(write=False)

    @property
    def n_trajectories(self) -> int:
        return self.samples.shape[0]

    @property
    def samples_per_trajectory(self) -> int:
        return self.samples.shape[1]

    def subset(self, indices) -> "KSpaceData":
        """Rows for the given acquisition indices (e.g. a window)."""
        by_index = {t.index: i for i, t in enumerate(self.trajectories)}
        rows = [by_index[m] for m in indices]
        return KSpaceData(
            trajectories=tuple(self.trajectories[i] for i in rows),
            samples=self.samples[rows],
        )
