"""Quadrature of surface densities: area, Willmore energy, Hawking mass."""

import numpy as np

from willmore_tori.ambient_metrics.models import (
    ConstantCurvatureMetric,
    EuclideanMetric,
    MetricModel,
    ScaledMetric,
)
from willmore_tori.exceptions import DomainError
from willmore_tori.surface_kernel.forms import FormsField
from willmore_tori.surface_kernel.grid import ScalarField, field_values

CLIFFORD_AREA = 4.0 * np.sqrt(2.0) * np.pi**2
CLIFFORD_ENERGY = 8.0 * np.pi**2
SPHERE_ENERGY = 16.0 * np.pi


def integrate(density, forms: FormsField) -> float:
    """Sum of density * dsigma * quadrature weights."""
    values = field_values(density, forms.grid)
    return float(np.sum(values * forms.measure))


def area(forms: FormsField) -> float:
    return float(np.sum(forms.measure))


def willmore_energy(forms: FormsField) -> float:
    """W = integral of H^2 dsigma."""
    return integrate(forms.H**2, forms)


def hawking_mass(forms: FormsField) -> float:
    """sqrt(Area) / (64 pi^(3/2)) * (16 pi - W)."""
    return float(np.sqrt(area(forms)) / (64.0 * np.pi**1.5) * (SPHERE_ENERGY - willmore_energy(forms)))


def space_form_curvature(metric: MetricModel) -> float:
    """Sectional curvature of a constant-curvature chart, scaled models included."""
    if isinstance(metric, EuclideanMetric):
        return 0.0
    if isinstance(metric, ConstantCurvatureMetric):
        return metric.curvature
    if isinstance(metric, ScaledMetric):
        return metric.epsilon**2 * space_form_curvature(metric.base)
    raise DomainError(f"{metric!r} does not have constant sectional curvature")


def conformal_willmore_energy(forms: FormsField) -> float:
    """W + 4 K Area, invariant under conformal changes of a space form metric."""
    return willmore_energy(forms) + 4.0 * space_form_curvature(forms.metric) * area(forms)


def density_field(values: np.ndarray, forms: FormsField) -> ScalarField:
    return ScalarField(values, forms.grid)
