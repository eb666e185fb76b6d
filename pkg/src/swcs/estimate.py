"""Windowed least-squares estimate via conjugate gradient.

Solves ``min_x || W F x - W y ||_2^2`` for the blurred estimate, where W
scales every sample of trajectory m by its window weight.  CG runs on
the normal equations ``F^H W^2 F x = F^H W^2 y``; early stopping acts as
the regularisation, so the iteration/tolerance limits are part of the
method, not merely numerics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import NonuniformDft, WindowWeights


@dataclass(frozen=True)
class CgConfig:
    """Stopping rule for conjugate-gradient solves."""

    max_iterations: int = 50
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError("tolerance must be in (0, 1)")


@dataclass
class EstimateResult:
    image: np.ndarray = field(repr=False)
    iterations: int
    residual: float
    converged: bool
    history: list[tuple[int, float]] = field(repr=False)


def conjugate_gradient(
    apply_a,
    b: np.ndarray,
    cfg: CgConfig,
    x0: np.ndarray | None = None,
) -> EstimateResult:
    """Krylov solve of a Hermitian positive semi-definite system A x = b.

    Uses the conjugate-residual recurrence (the minimal-residual member
    of the conjugate-direction family, same cost and Krylov space as
    textbook CG) so the tracked residual norm is non-increasing by
    construction.  Stops when ``||b - A x|| <= tol * ||b||`` or at
    ``max_iterations``; hitting the cap is reported via ``converged``
    but still returns the iterate.
    """
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0 and x0 is None:
        return EstimateResult(np.zeros_like(b), 0, 0.0, True, [(0, 0.0)])
    x = np.zeros_like(b) if x0 is None else x0.astype(np.complex128, copy=True)
    r = b - apply_a(x) if x0 is not None else b.copy()
    if b_norm == 0.0:
        b_norm = 1.0
    history = [(0, float(np.linalg.norm(r) / b_norm))]
    if history[0][1] <= cfg.tolerance:
        return EstimateResult(x, 0, history[0][1], True, history)
    p = r.copy()
    ar = apply_a(r)
    ap = ar.copy()
    num = np.vdot(r, ar).real
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        denom = np.vdot(ap, ap).real
        if denom <= 0.0 or num <= 0.0:
            break
        alpha = num / denom
        x += alpha * p
        r -= alpha * ap
        rel = float(np.linalg.norm(r) / b_norm)
        if rel > history[-1][1]:
            x -= alpha * p
            break
        iterations = it
        history.append((it, rel))
        if rel <= cfg.tolerance:
            break
        ar = apply_a(r)
        num_new = np.vdot(r, ar).real
        beta = num_new / num
        p = r + beta * p
        ap = ar + beta * ap
        num = num_new
    residual = history[-1][1]
    return EstimateResult(
        x, iterations, residual, bool(residual <= cfg.tolerance), history
    )


def reconstruct_estimate(
    data: np.ndarray,
    op: NonuniformDft,
    weights: WindowWeights,
    cfg: CgConfig | None = None,
    x0: np.ndarray | None = None,
) -> EstimateResult:
    """Blurred estimate from one trajectory window.

    Parameters
    ----------
    data : np.ndarray
        (M, K) window data, unweighted.
    op : NonuniformDft
        Forward map over the same M trajectories.
    weights : WindowWeights
        Per-trajectory window weights (applied to operator and data).
    cfg : CgConfig, optional
        Stopping rule; defaults to ``CgConfig()``.
    x0 : np.ndarray, optional
        Warm-start image; zero start when omitted.
    """
    cfg = cfg or CgConfig()
    data = np.asarray(data, dtype=np.complex128)
    if data.shape != op.data_shape:
        raise ValueError(f"data must have shape {op.data_shape}")
    if len(weights) != op.n_trajectories:
        raise ValueError("weight count must equal trajectory count")
    wsq = (weights.values**2)[:, None]

    def apply_normal(x: np.ndarray) -> np.ndarray:
        return op.adjoint(wsq * op.forward(x))

    b = op.adjoint(wsq * data)
    return conjugate_gradient(apply_normal, b, cfg, x0=x0)
