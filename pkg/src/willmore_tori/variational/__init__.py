"""First and second variation of the Willmore energy, dW/dt under metric perturbations and the corrector."""

from willmore_tori.variational.corrector import CorrectorResult, corrector_solve
from willmore_tori.variational.first_variation import (
    energy_derivative_check,
    first_variation_density,
    normal_graph,
    ricci_normal,
)
from willmore_tori.variational.galerkin import FourierBasis, GalerkinBasis
from willmore_tori.variational.operator import (
    JacobiOperator,
    OperatorMatrix,
    assemble_flat_operator,
    curved_operator_density,
    flat_operator,
    galerkin_matrix,
    jacobi_residuals,
    linearization_discrepancy,
)
from willmore_tori.variational.spectrum import SpectrumReport, near_kernel, perturbed, rayleigh_quotient
from willmore_tori.variational.wdot import (
    WdotSteps,
    wdot_closed_form,
    wdot_closed_form_steps,
    wdot_finite_difference,
    wdot_quadrature,
    wdot_quadrature_steps,
)

__all__ = [
    "CorrectorResult",
    "FourierBasis",
    "GalerkinBasis",
    "JacobiOperator",
    "OperatorMatrix",
    "SpectrumReport",
    "WdotSteps",
    "assemble_flat_operator",
    "corrector_solve",
    "curved_operator_density",
    "energy_derivative_check",
    "first_variation_density",
    "flat_operator",
    "galerkin_matrix",
    "jacobi_residuals",
    "linearization_discrepancy",
    "near_kernel",
    "normal_graph",
    "perturbed",
    "rayleigh_quotient",
    "ricci_normal",
    "wdot_closed_form",
    "wdot_closed_form_steps",
    "wdot_finite_difference",
    "wdot_quadrature",
    "wdot_quadrature_steps",
]
