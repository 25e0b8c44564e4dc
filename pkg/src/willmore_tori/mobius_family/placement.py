"""Placing family tori in an ambient metric: exp_P(eps R T_omega(torus)) in rescaled coordinates."""

from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.geodesics import default_frame, exp_map
from willmore_tori.ambient_metrics.models import (
    EuclideanMetric,
    MetricModel,
    NormalExpansionMetric,
    ScaledMetric,
    curvature_at,
)
from willmore_tori.exceptions import DomainError
from willmore_tori.mobius_family.family import MobiusParam, ResolutionReport, family_surface
from willmore_tori.surface_kernel.grid import SurfaceGrid

Placement = Literal["exact", "local"]


@dataclass(frozen=True)
class PlacedSurface:
    """Surface grid in the coordinates y = (x - P) / eps and the metric g_eps in those coordinates."""

    grid: SurfaceGrid
    metric: ScaledMetric
    report: ResolutionReport
    mode: str


def local_chart(model: Union[MetricModel, CurvatureField], P, rho0: float = 10.0) -> NormalExpansionMetric:
    """Truncated normal-coordinate model of the curvature at P."""
    if isinstance(model, CurvatureField):
        return model.chart(P)
    return NormalExpansionMetric(curvature_at(model, np.asarray(P, dtype=float)), rho0)


def place_torus(
    model: Union[MetricModel, CurvatureField],
    epsilon: float,
    P,
    param: MobiusParam,
    mode: Placement = "exact",
    resolution: Optional[int] = None,
    surface: Optional[tuple[SurfaceGrid, ResolutionReport]] = None,
) -> PlacedSurface:
    """
    Sigma_{eps,P,R,omega}[0] in the rescaled metric.

    Curvature fields and mode="local" use the normal-coordinate expansion at P,
    where the exponential map is the identity. Otherwise the torus is pushed
    through the model's geodesic exponential map at P.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    P = np.asarray(P, dtype=float)
    grid, report = surface if surface is not None else family_surface(param, resolution)

    if isinstance(model, CurvatureField) or mode == "local":
        chart = local_chart(model, P)
        return PlacedSurface(grid, ScaledMetric(chart, epsilon), report, "local")

    if isinstance(model, EuclideanMetric) or (
        isinstance(model, NormalExpansionMetric) and not np.any(P)
    ):
        return PlacedSurface(grid, ScaledMetric(model, epsilon, P), report, "exact")

    frame = default_frame(model, P)
    x = exp_map(model, P, frame, epsilon * grid.positions)
    y = (x - P) / epsilon
    return PlacedSurface(grid.with_positions(y), ScaledMetric(model, epsilon, P), report, "exact")
