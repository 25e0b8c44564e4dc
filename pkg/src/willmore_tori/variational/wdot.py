"""Derivative of the Willmore energy of a fixed torus under a quadratic metric perturbation."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from willmore_tori.ambient_metrics.curvature import CurvatureData, h_tensor, normal_derivative_h
from willmore_tori.ambient_metrics.models import EuclideanMetric, NormalExpansionMetric, ScaledMetric
from willmore_tori.surface_kernel.energy import willmore_energy
from willmore_tori.surface_kernel.forms import fundamental_forms
from willmore_tori.surface_kernel.grid import SQRT2, build_clifford_torus

PI2 = np.pi**2


@dataclass(frozen=True)
class WdotSteps:
    """
    The three partial integrals of dW/dt at t = 0 on R(torus):

    normal: integral of 2 H tr(d_n h)
    divergence: integral of H (-4 e_i(h_ni) + 4 h_nj <nabla_ei e_i, e_j>)
    trace: integral of H^2 (tr h - 2 h_nn)
    """

    normal: float
    divergence: float
    trace: float

    @property
    def total(self) -> float:
        return 0.5 * (self.normal + self.divergence + self.trace)


def _axis_ricci(curv: CurvatureData, rotation: np.ndarray) -> float:
    axis = np.asarray(rotation)[:, 2]
    return curv.ricci(axis, axis)


def wdot_closed_form(curv: CurvatureData, rotation=None) -> float:
    """-4 sqrt2 pi^2 (Sc - Ric(R e_z, R e_z))."""
    rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    return -4.0 * SQRT2 * PI2 * (curv.sc - _axis_ricci(curv, rotation))


def wdot_closed_form_steps(curv: CurvatureData, rotation=None) -> WdotSteps:
    rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    sc = curv.sc
    r33 = _axis_ricci(curv, rotation)
    return WdotSteps(
        normal=-4.0 * SQRT2 * PI2 * sc + (4.0 * SQRT2 / 3.0) * PI2 * r33,
        divergence=(8.0 / 3.0) * PI2 * r33 * (2.0 - SQRT2),
        trace=-4.0 * SQRT2 * PI2 * sc + (PI2 / 3.0) * (28.0 * SQRT2 - 16.0) * r33,
    )


def wdot_quadrature_steps(curv: CurvatureData, rotation=None, resolution: int = 64) -> WdotSteps:
    """Partial integrals on R(torus) in a Gram-Schmidt frame of the parameter tangents."""
    rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    grid = build_clifford_torus(resolution, resolution).rotated(rotation)
    forms = fundamental_forms(grid, EuclideanMetric())
    y = grid.positions
    n = forms.n
    H = forms.H
    x0 = forms.tangents[..., 0, :]
    x1 = forms.tangents[..., 1, :]

    # e_i = c_i^k X_k
    len0 = np.linalg.norm(x0, axis=-1)
    e1 = x0 / len0[..., None]
    v = x1 - np.einsum("...a,...a->...", x1, e1)[..., None] * e1
    len1 = np.linalg.norm(v, axis=-1)
    e2 = v / len1[..., None]
    proj = np.einsum("...a,...a->...", x1, e1)
    coeff = np.zeros(grid.shape + (2, 2))
    coeff[..., 0, 0] = 1.0 / len0
    coeff[..., 1, 0] = -proj / (len0 * len1)
    coeff[..., 1, 1] = 1.0 / len1
    frame = np.stack([e1, e2], axis=-2)

    def along(i: int, values: np.ndarray) -> np.ndarray:
        pad = (1,) * (values.ndim - 2)
        c0 = coeff[..., i, 0].reshape(grid.shape + pad)
        c1 = coeff[..., i, 1].reshape(grid.shape + pad)
        return c0 * grid.diff(values, 0) + c1 * grid.diff(values, 1)

    h = h_tensor(curv, y)
    dnh = normal_derivative_h(curv, y, n)
    h_n = np.einsum("...a,...ab->...b", n, h)
    h_ni = np.einsum("...b,...ib->...i", h_n, frame)
    h_nn = np.einsum("...a,...a->...", h_n, n)
    tr_dnh = np.einsum("...ia,...ab,...ib->...", frame, dnh, frame)
    tr_h = np.einsum("...ia,...ab,...ib->...", frame, h, frame)

    divergence = np.zeros(grid.shape)
    for i in range(2):
        divergence -= 4.0 * along(i, h_ni[..., i])
        de = along(i, frame[..., i, :])
        for j in range(2):
            divergence += 4.0 * h_ni[..., j] * np.einsum("...a,...a->...", de, frame[..., j, :])

    measure = forms.measure
    return WdotSteps(
        normal=float(np.sum(2.0 * H * tr_dnh * measure)),
        divergence=float(np.sum(H * divergence * measure)),
        trace=float(np.sum(H**2 * (tr_h - 2.0 * h_nn) * measure)),
    )


def wdot_quadrature(curv: CurvatureData, rotation=None, resolution: int = 64) -> float:
    return wdot_quadrature_steps(curv, rotation, resolution).total


def wdot_finite_difference(
    curv: CurvatureData,
    rotation=None,
    steps: Sequence[float] = (1e-3, 5e-4),
    resolution: int = 64,
    rho0: Optional[float] = None,
) -> float:
    """
    Richardson-extrapolated (W(g_t) - W(g_0)) / t for g_t = delta + t h on R(torus).

    g_t is the normal-coordinate expansion rescaled by sqrt(t).
    """
    rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    grid = build_clifford_torus(resolution, resolution).rotated(rotation)
    chart = NormalExpansionMetric(curv, rho0 or 10.0)
    base = willmore_energy(fundamental_forms(grid, EuclideanMetric()))

    def quotient(t: float) -> float:
        metric = ScaledMetric(chart, float(np.sqrt(t)))
        return (willmore_energy(fundamental_forms(grid, metric)) - base) / t

    coarse, fine = (quotient(t) for t in steps)
    ratio = steps[0] / steps[1]
    return (ratio * fine - coarse) / (ratio - 1.0)
