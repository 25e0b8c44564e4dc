"""Ambient 3-metric models, curvature data and the exponential map."""

from willmore_tori.ambient_metrics.curvature import (
    CurvatureData,
    h_bounds,
    h_gradient,
    h_tensor,
    normal_derivative_h,
    riemann_from_ricci,
    synthetic_curvature,
)
from willmore_tori.ambient_metrics.factory import create_metric, get_metric_factory
from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.geodesics import default_frame, exp_map
from willmore_tori.ambient_metrics.models import (
    ConstantCurvatureMetric,
    EuclideanMetric,
    MetricModel,
    NormalExpansionMetric,
    ScaledMetric,
    SchwarzschildMetric,
    curvature_at,
    metric_at,
)
from willmore_tori.ambient_metrics.types import MetricKind

__all__ = [
    "ConstantCurvatureMetric",
    "CurvatureData",
    "CurvatureField",
    "EuclideanMetric",
    "MetricKind",
    "MetricModel",
    "NormalExpansionMetric",
    "ScaledMetric",
    "SchwarzschildMetric",
    "create_metric",
    "curvature_at",
    "default_frame",
    "exp_map",
    "get_metric_factory",
    "h_bounds",
    "h_gradient",
    "h_tensor",
    "metric_at",
    "normal_derivative_h",
    "riemann_from_ricci",
    "synthetic_curvature",
]
