"""Golden-angle radial k-space trajectories and sliding-window selection.

Conventions used throughout the package:

* k-space coordinates are in radians per pixel, each component in
  ``[-pi, pi]``.
* A trajectory (spoke) is a full diameter through the k-space origin:
  ``K`` samples at uniformly spaced radii covering ``[-k_max, k_max)``,
  so the DC sample appears exactly once (at position ``K // 2``).
* Acquisition indices ``m`` are 1-based (``1 .. m_total``); the spoke
  acquired at index ``m`` has angle ``golden_angle(m - 1)`` so the first
  spoke lies on the kx axis.  One spoke is acquired per time frame and
  ``frame_time = m - 1 - m_total // 2`` centres the experiment on t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Angular increment between successive spokes, pi * (sqrt(5) - 1) / 2,
# i.e. 111.2461 degrees.  Any contiguous run of spokes covers the
# half-circle near-uniformly.
GOLDEN_ANGLE = math.pi * (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One radial spoke: acquisition index, angle, sample coordinates.

    ``samples`` has shape (K, 2) holding (kx, ky) pairs in rad/pixel.
    ``frame_time`` is the integer time frame the spoke belongs to (one
    spoke per frame).
    """

    index: int
    angle: float
    samples: np.ndarray = field(repr=False)
    frame_time: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 2 or samples.shape[0] < 1:
            raise ValueError("samples must have shape (K, 2) with K > 0")
        if np.abs(samples).max() > np.pi + 1e-12:
            raise ValueError("sample coordinates must lie in [-pi, pi]")
        object.__setattr__(self, "samples", samples)
        self.samples.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class WindowSelection:
    """Contiguous run of acquisition indices around a centre frame."""

    center: int
    half_width: int
    members: tuple[int, ...]
    clamped: bool

    def __post_init__(self) -> None:
        m = self.members
        if any(b - a != 1 for a, b in zip(m, m[1:])):
            raise ValueError("window members must be contiguous")


def golden_angle(m: int) -> float:
    """Angle of the m-th golden-angle increment, folded into [0, pi).

    Parameters
    ----------
    m : int
        Non-negative multiple count.

    Returns
    -------
    float
        ``(m * GOLDEN_ANGLE) mod pi``.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    return math.fmod(m * GOLDEN_ANGLE, math.pi)


def spoke_radii(n_samples: int, k_max: float) -> np.ndarray:
    """Uniform radii over [-k_max, k_max) including 0 exactly once."""
    if n_samples < 2 or n_samples % 2:
        raise ValueError("n_samples must be even and >= 2")
    if not 0.0 < k_max <= math.pi:
        raise ValueError("k_max must be in (0, pi]")
    step = 2.0 * k_max / n_samples
    return (np.arange(n_samples) - n_samples // 2) * step


def make_spoke(angle: float, n_samples: int, k_max: float = math.pi) -> np.ndarray:
    """Sample coordinates of one full-diameter spoke.

    Parameters
    ----------
    angle : float
        Spoke angle in radians.
    n_samples : int
        Number of samples along the spoke; must be even so the DC point
        is unambiguous.
    k_max : float
        Largest sampled spatial frequency, in (0, pi].

    Returns
    -------
    np.ndarray
        (n_samples, 2) array of (kx, ky) coordinates.
    """
    radii = spoke_radii(n_samples, k_max)
    direction = np.array([math.cos(angle), math.sin(angle)])
    return radii[:, None] * direction[None, :]


def golden_angle_stack(
    m_total: int, n_samples: int, k_max: float = math.pi
) -> list[Trajectory]:
    """Build the full acquisition: one golden-angle spoke per frame.

    Index ``m`` runs 1..m_total; ``frame_time`` runs so that the frame at
    ``m = m_total // 2 + 1`` has t = 0.
    """
    if m_total < 1:
        raise ValueError("m_total must be >= 1")
    out = []
    for m in range(1, m_total + 1):
        theta = golden_angle(m - 1)
        out.append(
            Trajectory(
                index=m,
                angle=theta,
                samples=make_spoke(theta, n_samples, k_max),
                frame_time=m - 1 - m_total // 2,
            )
        )
    return out


def sliding_window(m0: int, nu: int, m_total: int) -> WindowSelection:
    """Select the nu+1 contiguous acquisition indices centred on m0.

    Near the sequence boundaries the window is shifted inward so the
    member count stays nu+1; such selections are flagged ``clamped``.

    Parameters
    ----------
    m0 : int
        Centre acquisition index, 1-based.
    nu : int
        Window size (even); the selection holds nu+1 spokes.
    m_total : int
        Total number of acquired spokes.
    """
    if not 1 <= m0 <= m_total:
        raise ValueError("m0 must be within [1, m_total]")
    if nu <= 0 or nu % 2:
        raise ValueError("nu must be positive and even")
    if nu >= m_total:
        raise ValueError("nu must be smaller than m_total")
    half = nu // 2
    lo = m0 - half
    lo = max(1, min(lo, m_total - nu))
    hi = lo + nu
    clamped = lo != m0 - half
    return WindowSelection(
        center=m0,
        half_width=half,
        members=tuple(range(lo, hi + 1)),
        clamped=clamped,
    )


def select(trajectories: list[Trajectory], window: WindowSelection) -> list[Trajectory]:
    """Trajectories belonging to a window, in acquisition order."""
    by_index = {t.index: t for t in trajectories}
    try:
        return [by_index[m] for m in window.members]
    except KeyError as exc:
        raise ValueError(f"window member {exc} not present in trajectory set") from exc
