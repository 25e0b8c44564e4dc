"""First and second fundamental forms of a sampled surface in an ambient metric."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from willmore_tori.ambient_metrics.curvature import christoffel_symbols
from willmore_tori.ambient_metrics.models import MetricModel
from willmore_tori.exceptions import DegenerateSurfaceError
from willmore_tori.logging_config import get_logger
from willmore_tori.surface_kernel.grid import SurfaceGrid

logger = get_logger(__name__)


@dataclass(frozen=True)
class FormsField:
    """Per-node geometry of a surface: induced metric, normal, second fundamental form."""

    grid: SurfaceGrid = field(repr=False)
    metric: MetricModel = field(repr=False)
    tangents: np.ndarray = field(repr=False)  # (n0, n1, 2, 3): X_i
    gbar: np.ndarray = field(repr=False)
    gbar_inv: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    Aring: np.ndarray = field(repr=False)
    n: np.ndarray = field(repr=False)
    dsigma: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)  # ambient metric at the nodes

    @cached_property
    def A_norm2(self) -> np.ndarray:
        """|A|^2 = gbar^ik gbar^jl A_ij A_kl."""
        return np.einsum("...ik,...jl,...ij,...kl->...", self.gbar_inv, self.gbar_inv, self.A, self.A)

    @cached_property
    def Aring_norm2(self) -> np.ndarray:
        return np.einsum(
            "...ik,...jl,...ij,...kl->...", self.gbar_inv, self.gbar_inv, self.Aring, self.Aring
        )

    @property
    def measure(self) -> np.ndarray:
        """dsigma times quadrature weights."""
        return self.dsigma * self.grid.weights

    def trace_errors(self) -> tuple[float, float]:
        """Max |gbar^ij A_ij - H| and max |gbar^ij Aring_ij|."""
        tr_a = np.einsum("...ij,...ij->...", self.gbar_inv, self.A)
        tr_ring = np.einsum("...ij,...ij->...", self.gbar_inv, self.Aring)
        return float(np.abs(tr_a - self.H).max()), float(np.abs(tr_ring).max())


def orientation_sign(grid: SurfaceGrid) -> float:
    """+1 if X_0 x X_1 points out of the enclosed region, -1 otherwise."""
    x = grid.positions
    cross = np.cross(grid.diff(x, 0), grid.diff(x, 1))
    volume = np.sum(np.einsum("...a,...a->...", x, cross) * grid.weights) / 3.0
    return 1.0 if volume >= 0.0 else -1.0


def fundamental_forms(grid: SurfaceGrid, metric: MetricModel) -> FormsField:
    """
    Geometry of ``grid`` in ``metric``.

    The unit normal is g^-1 nu / |nu|_g with nu = X_0 x X_1, oriented outward
    by the sign of the Euclidean enclosed volume. A_ij = -g(n, X_ij + Gamma(X_i, X_j)),
    so spheres have positive mean curvature H = gbar^ij A_ij.

    Raises:
        DomainError: if a node leaves the metric's validity domain.
        DegenerateSurfaceError: if det gbar <= 0 at some node.
    """
    x = grid.positions
    x0 = grid.diff(x, 0)
    x1 = grid.diff(x, 1)
    x00 = grid.diff(x, 0, order=2)
    x11 = grid.diff(x, 1, order=2)
    x01 = grid.diff(x0, 1)

    sample = metric.sample(x)
    g = sample.g
    g_inv = np.linalg.inv(g)
    gamma = christoffel_symbols(g_inv, sample.dg)

    tangents = np.stack([x0, x1], axis=-2)
    gbar = np.einsum("...ia,...ab,...jb->...ij", tangents, g, tangents)
    det = gbar[..., 0, 0] * gbar[..., 1, 1] - gbar[..., 0, 1] * gbar[..., 1, 0]
    bad = ~(np.isfinite(det) & (det > 0.0))
    if np.any(bad):
        node = tuple(int(k) for k in np.argwhere(bad)[0])
        logger.error(f"Degenerate induced metric at node {node} (det={det[node]:.3e})")
        raise DegenerateSurfaceError("Induced metric is not positive definite", node)

    nu = orientation_sign(grid) * np.cross(x0, x1)
    nu_norm = np.sqrt(np.einsum("...a,...ab,...b->...", nu, g_inv, nu))
    n = np.einsum("...ab,...b->...a", g_inv, nu) / nu_norm[..., None]

    second = np.stack([np.stack([x00, x01], axis=-2), np.stack([x01, x11], axis=-2)], axis=-3)
    christ = np.einsum("...kab,...ia,...jb->...ijk", gamma, tangents, tangents)
    A = -np.einsum("...a,...ija->...ij", nu, second + christ) / nu_norm[..., None, None]
    A = 0.5 * (A + np.swapaxes(A, -1, -2))

    gbar_inv = np.linalg.inv(gbar)
    H = np.einsum("...ij,...ij->...", gbar_inv, A)
    Aring = A - 0.5 * H[..., None, None] * gbar

    return FormsField(
        grid=grid,
        metric=metric,
        tangents=tangents,
        gbar=gbar,
        gbar_inv=gbar_inv,
        A=A,
        H=H,
        Aring=Aring,
        n=n,
        dsigma=np.sqrt(det),
        g=g,
    )
