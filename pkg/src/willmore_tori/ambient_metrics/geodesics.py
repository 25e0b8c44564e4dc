"""Geodesic exponential map by fixed-step RK4 with step doubling."""

from typing import Optional

import numpy as np

from willmore_tori.ambient_metrics.curvature import orthonormal_frame
from willmore_tori.ambient_metrics.models import (
    EuclideanMetric,
    MetricModel,
    NormalExpansionMetric,
)
from willmore_tori.exceptions import ConvergenceError, DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.settings import numerics

logger = get_logger(__name__)


def default_frame(model: MetricModel, P) -> np.ndarray:
    """Coordinate frame at P orthonormalized w.r.t. g(P); columns are the frame vectors."""
    return orthonormal_frame(model.sample(np.asarray(P, dtype=float)).g)


def _rk4(model: MetricModel, x0: np.ndarray, v0: np.ndarray, steps: int) -> np.ndarray:
    h = 1.0 / steps

    def accel(x, v):
        gamma = model.christoffel(x)
        return -np.einsum("...kij,...i,...j->...k", gamma, v, v)

    x, v = x0.copy(), v0.copy()
    for _ in range(steps):
        k1x, k1v = v, accel(x, v)
        k2x, k2v = v + 0.5 * h * k1v, accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = v + 0.5 * h * k2v, accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = v + h * k3v, accel(x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x


def _is_base_point(model: MetricModel, P: np.ndarray) -> bool:
    return isinstance(model, NormalExpansionMetric) and not np.any(P)


def exp_map(
    model: MetricModel,
    P,
    frame: Optional[np.ndarray] = None,
    v=None,
    tol: Optional[float] = None,
    max_norm: Optional[float] = None,
) -> np.ndarray:
    """
    Geodesic exponential map exp_P(frame . v) for a batch of tangent vectors v.

    Straight lines for the Euclidean model and for a normal-coordinate expansion
    at its own base point; otherwise RK4 with the step count doubled until the
    endpoints move by less than ``tol``.

    Raises:
        DomainError: if |v| exceeds ``max_norm`` or a path leaves the metric domain.
        ConvergenceError: if the step budget is exhausted.
    """
    cfg = numerics().geodesic
    tol = cfg.tol if tol is None else tol
    P = np.asarray(P, dtype=float)
    v = np.asarray(v, dtype=float)
    if frame is None:
        frame = default_frame(model, P)

    if max_norm is None and isinstance(model, NormalExpansionMetric):
        max_norm = model.rho0 / 2.0
    if max_norm is not None:
        norm = float(np.linalg.norm(v, axis=-1).max(initial=0.0))
        if norm > max_norm:
            raise DomainError(f"|v| = {norm:.6g} exceeds the exponential map budget {max_norm:.6g}")

    w = v @ np.asarray(frame).T
    if isinstance(model, EuclideanMetric) or _is_base_point(model, P):
        return P + w

    x0 = np.broadcast_to(P, w.shape).copy()
    steps = cfg.min_steps
    previous = _rk4(model, x0, w, steps)
    while steps < cfg.max_steps:
        steps *= 2
        current = _rk4(model, x0, w, steps)
        change = float(np.abs(current - previous).max(initial=0.0))
        if change < tol:
            logger.debug(f"exp_map converged with {steps} RK4 steps (change {change:.3e})")
            return current
        previous = current

    raise ConvergenceError(
        f"Geodesic integration did not converge within {cfg.max_steps} steps",
        {"last_change": change, "tol": tol},
    )
