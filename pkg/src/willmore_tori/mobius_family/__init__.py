"""Mobius inversions of the Clifford torus and the family T_omega."""

from willmore_tori.mobius_family.family import (
    LIMIT_RADIUS,
    MobiusParam,
    ResolutionReport,
    degeneration_sphere,
    family_map,
    family_surface,
    family_torus,
    hausdorff_to_sphere,
    modulus_from_eta,
    omega_chart,
    resolution_for,
)
from willmore_tori.mobius_family.inversion import (
    InversionSpec,
    distortion_ratio,
    invert,
    invert_grid,
    random_inversions,
)
from willmore_tori.mobius_family.jacobi import DERIVED_LABELS, JacobiBasis, jacobi_fields
from willmore_tori.mobius_family.offsets import (
    SMALL_RADIUS_LIMIT,
    area_functional,
    area_preserving_offset,
    small_radius_offset,
)
from willmore_tori.mobius_family.placement import PlacedSurface, local_chart, place_torus

__all__ = [
    "DERIVED_LABELS",
    "LIMIT_RADIUS",
    "SMALL_RADIUS_LIMIT",
    "InversionSpec",
    "JacobiBasis",
    "MobiusParam",
    "PlacedSurface",
    "ResolutionReport",
    "area_functional",
    "area_preserving_offset",
    "degeneration_sphere",
    "distortion_ratio",
    "family_map",
    "family_surface",
    "family_torus",
    "hausdorff_to_sphere",
    "invert",
    "invert_grid",
    "jacobi_fields",
    "local_chart",
    "modulus_from_eta",
    "omega_chart",
    "place_torus",
    "random_inversions",
    "resolution_for",
    "small_radius_offset",
]
