"""Quantitative evaluation: masked RMSE, FWHM, and resolution times.

All metrics operate on magnitude images / profiles.  The time metrics
scan a sequence of central horizontal profiles (the line y = 0) over
frame time t:

* ``t0`` / ``t1``: when the grey level midway between the two Gaussians
  reaches half of the frame's profile maximum (approaching / parting).
* ``t2`` / ``t3``: the last t < 0 / first t > 0 at which two separate
  peaks with a genuine dip between them are detectable.

Unresolvable cases return ``None`` (the "unresolved" sentinel).
Closed-form reference values for the Gaussian scene are provided for
the theory columns of the report tables.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

UNRESOLVED = None


def _as_magnitude(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    return np.abs(image) if np.iscomplexobj(image) else image


def rmse(recon: np.ndarray, truth: np.ndarray, mask: np.ndarray) -> float:
    """Root mean square error over the masked pixels.

    Complex reconstructions are compared by magnitude.
    """
    recon = _as_magnitude(recon)
    truth = _as_magnitude(truth)
    mask = np.asarray(mask, dtype=bool)
    if recon.shape != truth.shape or recon.shape != mask.shape:
        raise ValueError("reconstruction, truth and mask shapes must match")
    if not mask.any():
        raise ValueError("mask must select at least one pixel")
    diff = recon[mask] - truth[mask]
    return float(np.sqrt(np.mean(diff**2)))


def profile_through_center(image: np.ndarray) -> np.ndarray:
    """Magnitude samples along the y = 0 line (the centre row)."""
    image = _as_magnitude(image)
    return image[image.shape[0] // 2, :]


def fwhm(profile: np.ndarray, spacing: float = 1.0) -> float:
    """Full width at half maximum of the profile's global peak.

    The two half-maximum crossings bracketing the peak are located by
    linear interpolation between adjacent samples.  Raises if the peak
    sits on the boundary or a crossing is missing on either side.
    """
    p = np.asarray(profile, dtype=np.float64)
    if p.ndim != 1 or p.size < 3:
        raise ValueError("profile must be 1D with at least 3 samples")
    peak = int(np.argmax(p))
    if peak == 0 or peak == p.size - 1:
        raise ValueError("profile peak lies on the boundary")
    half = p[peak] / 2.0

    def crossing(idx_from: int, step: int) -> float:
        i = idx_from
        while 0 <= i + step < p.size:
            j = i + step
            if p[j] < half <= p[i]:
                frac = (p[i] - half) / (p[i] - p[j])
                return i + step * frac
            i = j
        raise ValueError("no half-maximum crossing on one side of the peak")

    left = crossing(peak, -1)
    right = crossing(peak, +1)
    return float((right - left) * spacing)


def _midpoint_ratio(profile: np.ndarray) -> float:
    p = np.asarray(profile, dtype=np.float64)
    top = p.max()
    if top <= 0:
        return 0.0
    return float(p[p.size // 2] / top)


def midpoint_half_max_times(
    profiles: np.ndarray, times: np.ndarray
) -> tuple[int | None, int | None]:
    """(t0, t1): midpoint grey level crossing half maximum.

    ``profiles`` is (T, N) with rows ordered by ascending integer
    ``times``, which must span both signs of t.  Half maximum is taken
    per frame, relative to that frame's own profile maximum.  Returns
    the unresolved sentinel on a side where the level never crosses
    (e.g. the Gaussians are superimposed on every supplied frame).
    """
    profiles = np.atleast_2d(np.asarray(profiles, dtype=np.float64))
    times = np.asarray(times, dtype=np.int64)
    if profiles.shape[0] != times.size:
        raise ValueError("one profile per time point required")
    if not (np.diff(times) > 0).all():
        raise ValueError("times must be strictly increasing")
    ratios = np.array([_midpoint_ratio(p) for p in profiles])
    above = ratios >= 0.5

    neg = times < 0
    t0: int | None = UNRESOLVED
    if neg.any() and not above[neg][0]:
        hits = np.nonzero(above & neg)[0]
        if hits.size:
            t0 = int(times[hits[0]])

    pos = times > 0
    t1: int | None = UNRESOLVED
    if pos.any():
        idx = np.nonzero(pos)[0]
        if above[idx[0]]:
            run = idx[0]
            for i in idx:
                if not above[i]:
                    break
                run = i
            if run != idx[-1]:
                t1 = int(times[run])
    return t0, t1


def _has_two_peaks(profile: np.ndarray, depth_fraction: float) -> bool:
    # the approaching pair straddles the profile centre, so the two
    # candidate maxima must sit on opposite sides of it (rejects
    # off-centre ripple pairs in reconstructions)
    p = np.asarray(profile, dtype=np.float64)
    interior = np.nonzero((p[1:-1] > p[:-2]) & (p[1:-1] > p[2:]))[0] + 1
    if interior.size < 2:
        return False
    top_two = interior[np.argsort(p[interior])][-2:]
    i, j = int(top_two.min()), int(top_two.max())
    center = p.size // 2
    if not i <= center <= j or i == j:
        return False
    dip = p[i : j + 1].min()
    depth = min(p[i], p[j]) - dip
    return depth > depth_fraction * p.max()


def separability_times(
    profiles: np.ndarray,
    times: np.ndarray,
    depth_fraction: float = 1e-3,
) -> tuple[int | None, int | None]:
    """(t2, t3): last t < 0 / first t > 0 with two distinguishable peaks.

    A frame counts as resolved when its profile has two local maxima
    separated by a dip deeper than ``depth_fraction`` of the profile
    maximum.  Returns the unresolved sentinel per side when no frame on
    that side qualifies.
    """
    profiles = np.atleast_2d(np.asarray(profiles, dtype=np.float64))
    times = np.asarray(times, dtype=np.int64)
    if profiles.shape[0] != times.size:
        raise ValueError("one profile per time point required")
    if not (np.diff(times) > 0).all():
        raise ValueError("times must be strictly increasing")
    resolved = np.array([_has_two_peaks(p, depth_fraction) for p in profiles])

    t2: int | None = UNRESOLVED
    neg = np.nonzero(resolved & (times < 0))[0]
    if neg.size:
        t2 = int(times[neg[-1]])
    t3: int | None = UNRESOLVED
    pos = np.nonzero(resolved & (times > 0))[0]
    if pos.size:
        t3 = int(times[pos[0]])
    return t2, t3


def theoretical_fwhm(sigma: float) -> float:
    """FWHM of a single Gaussian bump: 2*sqrt(2 ln 2) * sigma."""
    return 2.0 * math.sqrt(2.0 * math.log(2.0)) * sigma


def _pair_profile_max(separation: float, sigma: float) -> float:
    """Peak value of two unit Gaussians centred at +/- separation."""

    def negated(x: float) -> float:
        return -(
            math.exp(-((x - separation) ** 2) / (2 * sigma**2))
            + math.exp(-((x + separation) ** 2) / (2 * sigma**2))
        )

    res = minimize_scalar(
        negated, bounds=(0.0, separation + 5 * sigma), method="bounded",
        options={"xatol": 1e-10},
    )
    return float(max(-res.fun, -negated(0.0)))


def theoretical_t0(sigma: float, velocity: float) -> float | None:
    """Continuous-phantom t at which the midpoint level crosses half max.

    Solves ``2 exp(-(vt)^2 / 2 sigma^2) = max_profile / 2`` for the
    separation; returns the (negative) approach-side time, or the
    unresolved sentinel when the level never drops below half maximum.
    """
    if velocity <= 0:
        return UNRESOLVED

    def gap(a: float) -> float:
        mid = 2.0 * math.exp(-(a**2) / (2 * sigma**2))
        return mid / _pair_profile_max(a, sigma) - 0.5

    lo, hi = sigma, 60.0 * sigma
    if gap(hi) > 0:
        return UNRESOLVED
    a_star = brentq(gap, lo, hi, xtol=1e-9)
    return -a_star / velocity


def theoretical_t2(sigma: float, velocity: float) -> float | None:
    """Continuous-phantom separability limit: the dip exists for
    ``v |t| > sigma``, so t2 = -sigma / v."""
    if velocity <= 0:
        return UNRESOLVED
    return -sigma / velocity
