"""Normal-graph corrector: W'(Sigma[phi]) = beta_0 H + sum beta_i Z_i with area and orthogonality constraints."""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import linalg

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import EuclideanMetric, MetricModel
from willmore_tori.exceptions import ConvergenceError, DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam, family_surface
from willmore_tori.mobius_family.jacobi import jacobi_fields
from willmore_tori.mobius_family.placement import Placement, place_torus
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel.energy import CLIFFORD_AREA, area, willmore_energy
from willmore_tori.surface_kernel.forms import FormsField, fundamental_forms
from willmore_tori.surface_kernel.grid import ScalarField, SurfaceGrid
from willmore_tori.variational.first_variation import first_variation_density
from willmore_tori.variational.galerkin import FourierBasis, GalerkinBasis
from willmore_tori.variational.operator import JacobiOperator, galerkin_matrix

logger = get_logger(__name__)


@dataclass(frozen=True)
class CorrectorResult:
    """Corrected surface data; beta[0] multiplies H, beta[1:] the Jacobi fields in ``labels``."""

    phi: ScalarField = field(repr=False)
    beta: np.ndarray
    labels: tuple[str, ...]
    residual_history: list[float]
    area_error: float
    orthogonality: np.ndarray
    energy: float
    energy_uncorrected: float
    jacobian_refreshes: int
    surface: SurfaceGrid = field(repr=False)

    @property
    def iterations(self) -> int:
        return len(self.residual_history) - 1

    @property
    def phi_sup(self) -> float:
        return float(np.abs(self.phi.values).max())

    def summary(self) -> dict:
        return {
            "beta": dict(zip(("mean_curvature",) + self.labels, self.beta.tolist())),
            "residual_history": self.residual_history,
            "area_error": self.area_error,
            "orthogonality": self.orthogonality.tolist(),
            "phi_sup": self.phi_sup,
            "energy": self.energy,
            "energy_uncorrected": self.energy_uncorrected,
            "jacobian_refreshes": self.jacobian_refreshes,
        }


class _BorderedSystem:
    """Discrete G(c, beta) on the Galerkin coefficients c of phi and the multipliers beta."""

    def __init__(self, placed_grid: SurfaceGrid, metric: MetricModel, basis: GalerkinBasis, fields: np.ndarray):
        self.grid = placed_grid
        self.metric = metric
        self.basis = basis
        self.fields = fields  # (7, n0, n1), Z_1..Z_7
        self.normal = fundamental_forms(placed_grid, metric).n
        self.size = basis.size

    def surface(self, coeffs: np.ndarray) -> tuple[np.ndarray, FormsField]:
        phi = self.basis.synthesize(coeffs)
        grid = self.grid.with_positions(self.grid.positions + phi[..., None] * self.normal)
        return phi, fundamental_forms(grid, self.metric)

    def residual(self, x: np.ndarray) -> np.ndarray:
        coeffs, beta = x[: self.size], x[self.size :]
        phi, forms = self.surface(coeffs)
        target = beta[0] * forms.H + np.tensordot(beta[1:], self.fields, axes=1)
        rows = self.basis.project(first_variation_density(forms, self.metric).values - target)
        constraints = np.einsum("kij,ij->k", self.fields, phi * forms.measure)
        return np.concatenate([rows, [area(forms) - CLIFFORD_AREA], constraints])

    def flat_jacobian(self, reference: FormsField) -> np.ndarray:
        n = self.size
        m = self.fields.shape[0] + 1
        operator = galerkin_matrix(JacobiOperator(reference), self.basis)
        border = self.basis.project(np.concatenate([reference.H[None], self.fields]).transpose(1, 2, 0))
        jac = np.zeros((n + m, n + m))
        jac[:n, :n] = 0.5 * (operator + operator.T)
        jac[:n, n:] = -border
        jac[n:, :n] = border.T
        return jac

    def finite_difference_jacobian(self, x: np.ndarray, base: np.ndarray, flat: np.ndarray, step: float) -> np.ndarray:
        """Columns for c by forward differences; beta columns are exact in the flat Jacobian."""
        jac = flat.copy()
        for col in range(self.size):
            shifted = x.copy()
            shifted[col] += step
            jac[:, col] = (self.residual(shifted) - base) / step
        return jac


def _safe_norm(system: _BorderedSystem, x: np.ndarray) -> tuple[float, Optional[np.ndarray]]:
    try:
        r = system.residual(x)
    except DomainError:
        return float("inf"), None
    return float(np.linalg.norm(r)), r


def corrector_solve(
    model: Union[MetricModel, CurvatureField],
    epsilon: float,
    P,
    param: MobiusParam,
    tol: Optional[float] = None,
    truncation: Optional[int] = None,
    resolution: Optional[int] = None,
    mode: Placement = "exact",
) -> CorrectorResult:
    """
    Newton solve for phi on the placed torus Sigma_{eps,P,R,omega}[0] in rescaled coordinates.

    The Jacobian is the flat Galerkin operator bordered by H and Z_1..Z_7; it is
    replaced by a finite-difference Jacobian once if the contraction degrades.

    Raises:
        ConvergenceError: if the residual does not reach ``tol`` within max_iter steps.
    """
    cfg = numerics().corrector
    tol = cfg.tol if tol is None else tol
    truncation = truncation or cfg.truncation
    resolution = resolution or cfg.resolution

    surface = family_surface(param, resolution)
    reference_grid = surface[0]
    placed = place_torus(model, epsilon, P, param, mode=mode, surface=surface)
    reference = fundamental_forms(reference_grid, EuclideanMetric())
    jacobi = jacobi_fields(param, reference_grid)
    fields = jacobi.stack()[1:]
    basis = GalerkinBasis(FourierBasis(truncation), reference_grid, reference.dsigma)
    system = _BorderedSystem(placed.grid, placed.metric, basis, fields)

    x = np.zeros(system.size + fields.shape[0] + 1)
    norm, r = _safe_norm(system, x)
    if r is None:
        raise DomainError("Unperturbed placed torus leaves the metric domain")
    history = [norm]
    jac = system.flat_jacobian(reference)
    refreshed = 0
    energy0 = willmore_energy(system.surface(x[: system.size])[1])

    for iteration in range(cfg.max_iter):
        if norm < tol:
            break
        step = -linalg.solve(jac, r)
        lam = 1.0
        new_norm, new_r = _safe_norm(system, x + step)
        halvings = 0
        while new_norm >= norm and halvings < cfg.max_halvings:
            lam *= 0.5
            halvings += 1
            new_norm, new_r = _safe_norm(system, x + lam * step)
        if new_norm >= norm:
            if refreshed:
                break
            logger.info(f"Line search stalled at iteration {iteration}; refreshing Jacobian")
            jac = system.finite_difference_jacobian(x, r, jac, step=1e-7)
            refreshed += 1
            continue
        contraction = new_norm / norm
        x = x + lam * step
        norm, r = new_norm, new_r
        history.append(norm)
        logger.debug(f"Newton step {iteration}: residual {norm:.3e} (lambda={lam})")
        if contraction > 0.5 and not refreshed and norm >= tol:
            jac = system.finite_difference_jacobian(x, r, jac, step=1e-7)
            refreshed += 1

    if norm >= tol:
        logger.error(
            f"Corrector did not converge: residual {norm:.3e} > {tol:.1e}",
            extra={"event": "corrector_failed", "epsilon": epsilon, "omega": list(param.omega)},
        )
        raise ConvergenceError(
            f"Corrector residual {norm:.3e} above tolerance {tol:.1e} after {len(history) - 1} steps",
            {"residual_history": history, "epsilon": epsilon},
        )

    coeffs, beta = x[: system.size], x[system.size :]
    phi, forms = system.surface(coeffs)
    orthogonality = np.einsum("kij,ij->k", fields, phi * forms.measure)
    logger.info(
        f"Corrector converged in {len(history) - 1} steps at eps={epsilon}",
        extra={"event": "corrector_converged", "epsilon": epsilon, "residual": norm},
    )
    return CorrectorResult(
        phi=ScalarField(phi, reference_grid),
        beta=beta,
        labels=jacobi.labels[1:],
        residual_history=history,
        area_error=abs(area(forms) - CLIFFORD_AREA),
        orthogonality=orthogonality,
        energy=willmore_energy(forms),
        energy_uncorrected=energy0,
        jacobian_refreshes=refreshed,
        surface=forms.grid,
    )
