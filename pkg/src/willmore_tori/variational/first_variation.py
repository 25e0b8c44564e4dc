"""First variation of the Willmore energy."""

from typing import Optional, Sequence

import numpy as np

from willmore_tori.ambient_metrics.models import MetricModel
from willmore_tori.surface_kernel.calculus import SurfaceCalculus
from willmore_tori.surface_kernel.energy import integrate, willmore_energy
from willmore_tori.surface_kernel.forms import FormsField, fundamental_forms
from willmore_tori.surface_kernel.grid import ScalarField, SurfaceGrid, field_values


def ricci_normal(forms: FormsField, metric: Optional[MetricModel] = None) -> np.ndarray:
    """Ric(n, n) at the nodes."""
    metric = metric or forms.metric
    if metric.is_flat:
        return np.zeros(forms.grid.shape)
    ric = metric.ricci_tensor(forms.grid.positions)
    return np.einsum("...a,...ab,...b->...", forms.n, ric, forms.n)


def first_variation_density(forms: FormsField, metric: Optional[MetricModel] = None) -> ScalarField:
    """
    W' = -lap H - |A|^2 H - H Ric(n, n) + H^3 / 2.

    For a normal variation with speed phi, dW/dt = 2 * integral of W' phi dsigma.
    """
    calc = SurfaceCalculus(forms)
    H = forms.H
    density = -calc.laplacian(H) - forms.A_norm2 * H - H * ricci_normal(forms, metric) + 0.5 * H**3
    return ScalarField(density, forms.grid)


def normal_graph(grid: SurfaceGrid, forms: FormsField, phi) -> SurfaceGrid:
    """Surface X + phi n, n the ambient unit normal of ``forms``."""
    values = field_values(phi, grid)
    return grid.with_positions(grid.positions + values[..., None] * forms.n)


def energy_derivative_check(
    grid: SurfaceGrid,
    metric: MetricModel,
    phi,
    steps: Sequence[float] = (1e-3, 5e-4),
) -> tuple[float, float]:
    """
    (Richardson-extrapolated centered difference of W along X + t phi n,
    predicted value 2 * integral of W' phi dsigma).
    """
    forms = fundamental_forms(grid, metric)
    predicted = 2.0 * integrate(first_variation_density(forms, metric).values * field_values(phi, grid), forms)

    def centered(t: float) -> float:
        plus = willmore_energy(fundamental_forms(normal_graph(grid, forms, t * field_values(phi, grid)), metric))
        minus = willmore_energy(fundamental_forms(normal_graph(grid, forms, -t * field_values(phi, grid)), metric))
        return (plus - minus) / (2.0 * t)

    coarse, fine = (centered(t) for t in steps)
    ratio = (steps[0] / steps[1]) ** 2
    return (ratio * fine - coarse) / (ratio - 1.0), predicted
