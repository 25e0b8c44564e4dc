"""Reduced energy landscape, expansion fits, curvature conditions and extremization."""

from willmore_tori.reduction_lab.conditions import ale_check, condition_check
from willmore_tori.reduction_lab.energy import curvature_of, reduced_energy
from willmore_tori.reduction_lab.expansions import (
    degenerate_expansion_fit,
    polynomial_fit,
    sphere_expansion_fit,
    symmetric_expansion_fit,
)
from willmore_tori.reduction_lab.extremize import extremize, schwarzschild_axis_signs
from willmore_tori.reduction_lab.landscape import landscape
from willmore_tori.reduction_lab.models import (
    ALEReport,
    AxisSigns,
    ConditionReport,
    ExpansionFit,
    ExtremizeResult,
    LandscapePoint,
    LandscapeRow,
    LandscapeTable,
)

__all__ = [
    "ALEReport",
    "AxisSigns",
    "ConditionReport",
    "ExpansionFit",
    "ExtremizeResult",
    "LandscapePoint",
    "LandscapeRow",
    "LandscapeTable",
    "ale_check",
    "condition_check",
    "curvature_of",
    "degenerate_expansion_fit",
    "extremize",
    "landscape",
    "polynomial_fit",
    "reduced_energy",
    "schwarzschild_axis_signs",
    "sphere_expansion_fit",
    "symmetric_expansion_fit",
]
