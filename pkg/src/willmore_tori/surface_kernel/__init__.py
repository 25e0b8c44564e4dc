"""Spectral surface kernel: grids, fundamental forms, quadrature."""

from willmore_tori.surface_kernel.calculus import (
    SurfaceCalculus,
    laplace_beltrami,
    surface_gradient,
    surface_hessian,
)
from willmore_tori.surface_kernel.energy import (
    CLIFFORD_AREA,
    CLIFFORD_ENERGY,
    SPHERE_ENERGY,
    area,
    conformal_willmore_energy,
    hawking_mass,
    integrate,
    willmore_energy,
)
from willmore_tori.surface_kernel.forms import FormsField, fundamental_forms
from willmore_tori.surface_kernel.grid import (
    FourierAxis,
    LegendreAxis,
    ScalarField,
    SurfaceGrid,
    build_clifford_torus,
    build_round_sphere,
    clifford_point,
    graded_torus,
    spectral_gradient,
)
from willmore_tori.surface_kernel.grid_csv import read_grid_csv, write_grid_csv

__all__ = [
    "CLIFFORD_AREA",
    "CLIFFORD_ENERGY",
    "SPHERE_ENERGY",
    "FormsField",
    "FourierAxis",
    "LegendreAxis",
    "ScalarField",
    "SurfaceCalculus",
    "SurfaceGrid",
    "area",
    "build_clifford_torus",
    "build_round_sphere",
    "clifford_point",
    "conformal_willmore_energy",
    "fundamental_forms",
    "graded_torus",
    "hawking_mass",
    "integrate",
    "laplace_beltrami",
    "read_grid_csv",
    "spectral_gradient",
    "surface_gradient",
    "surface_hessian",
    "willmore_energy",
    "write_grid_csv",
]
