"""Sphere inversions and admissible random inversion centers."""

from dataclasses import dataclass

import numpy as np

from willmore_tori.exceptions import DomainError
from willmore_tori.surface_kernel.grid import SQRT2, SurfaceGrid


@dataclass(frozen=True)
class InversionSpec:
    """Inversion in the sphere of radius ``radius`` about ``center``."""

    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.shape != (3,) or not np.all(np.isfinite(center)):
            raise DomainError(f"Inversion center must be a finite triple, got {self.center}")
        if not self.radius > 0:
            raise DomainError(f"Inversion radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(c) for c in center))


def invert(spec: InversionSpec, points) -> np.ndarray:
    """x0 + eta^2 (x - x0) / |x - x0|^2, pointwise."""
    x0 = np.asarray(spec.center)
    u = np.asarray(points, dtype=float) - x0
    r2 = np.einsum("...i,...i->...", u, u)
    if np.any(r2 == 0.0):
        raise DomainError(f"Cannot invert the center {spec.center} of the inversion sphere")
    return x0 + spec.radius**2 * u / r2[..., None]


def invert_grid(spec: InversionSpec, grid: SurfaceGrid) -> SurfaceGrid:
    return grid.with_positions(invert(spec, grid.positions))


def distance_to_clifford(points) -> np.ndarray:
    """Euclidean distance to the Clifford torus (tube of radius 1 around the circle of radius sqrt 2)."""
    p = np.asarray(points, dtype=float)
    rho = np.hypot(p[..., 0], p[..., 1])
    return np.abs(np.hypot(rho - SQRT2, p[..., 2]) - 1.0)


def distortion_ratio(spec: InversionSpec, grid: SurfaceGrid) -> float:
    """max |D Phi| / min |D Phi| over the grid, i.e. (max |x - x0| / min |x - x0|)^2."""
    r = np.linalg.norm(grid.positions - np.asarray(spec.center), axis=-1)
    return float((r.max() / r.min()) ** 2)


def random_inversions(
    rng: np.random.Generator,
    count: int,
    min_distance: float = 1.0,
    max_center_norm: float = 4.0,
    radius_range: tuple[float, float] = (0.5, 3.0),
) -> list[InversionSpec]:
    """Inversions with centers at least ``min_distance`` away from the Clifford torus."""
    specs: list[InversionSpec] = []
    while len(specs) < count:
        c = rng.uniform(-max_center_norm, max_center_norm, size=3)
        if np.linalg.norm(c) > max_center_norm or distance_to_clifford(c) < min_distance:
            continue
        specs.append(InversionSpec(tuple(c), float(rng.uniform(*radius_range))))
    return specs
