"""Jacobi fields: normal components of the generators of the Mobius symmetries."""

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy import linalg

from willmore_tori.ambient_metrics.models import EuclideanMetric
from willmore_tori.exceptions import DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam, family_map
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel.forms import fundamental_forms
from willmore_tori.surface_kernel.grid import ScalarField, SurfaceGrid, clifford_point

logger = get_logger(__name__)

POLAR_LABELS = (
    "dilation",
    "translation_x",
    "translation_y",
    "translation_z",
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "inversion",
)
CARTESIAN_LABELS = (
    "dilation",
    "translation_x",
    "translation_y",
    "translation_z",
    "rotation_x",
    "rotation_y",
    "omega_x",
    "omega_y",
)
# Fields taken by finite differences in omega; the rest are closed-form generators.
DERIVED_LABELS = frozenset({"inversion", "omega_x", "omega_y"})


@dataclass(frozen=True)
class JacobiBasis:
    """Z_0 (dilation) and Z_1..Z_7 (area-preserving generators) on a family grid."""

    fields: tuple[ScalarField, ...] = field(repr=False)
    labels: tuple[str, ...]
    chart: str
    trivial: tuple[bool, ...]
    richardson_error: float

    def stack(self) -> np.ndarray:
        return np.stack([f.values for f in self.fields])

    def __getitem__(self, label: str) -> ScalarField:
        return self.fields[self.labels.index(label)]


def preimage_points(grid: SurfaceGrid) -> np.ndarray:
    if grid.phi is None or grid.theta is None:
        raise DomainError("Grid carries no torus angles; build it with family_surface or graded_torus")
    return clifford_point(grid.phi, grid.theta)


def _centered(param: MobiusParam, points: np.ndarray, direction: np.ndarray, step: float) -> np.ndarray:
    omega = np.asarray(param.omega)
    plus = family_map(param.with_omega(omega + step * direction), points)
    minus = family_map(param.with_omega(omega - step * direction), points)
    return (plus - minus) / (2.0 * step)


def conformal_fields(y: np.ndarray) -> np.ndarray:
    """
    The ten conformal Killing fields of R^3 at points y, stacked on a leading axis:
    translations e_k, rotations e_k x y, the dilation y and the special conformal
    fields 2 (e_k . y) y - |y|^2 e_k.
    """
    y = np.asarray(y, dtype=float)
    eye = np.eye(3)
    r2 = np.einsum("...i,...i->...", y, y)[..., None]
    fields = [np.broadcast_to(e, y.shape) for e in eye]
    fields += [np.cross(e, y) for e in eye]
    fields.append(y)
    fields += [2.0 * y[..., k : k + 1] * y - r2 * e for k, e in enumerate(eye)]
    return np.stack(fields)


def conformal_projection(y: np.ndarray, velocity: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Least-squares fit of a velocity field on the points y by a conformal Killing field.

    The omega-velocity of a Mobius family is one, so the fit keeps it and drops
    the node-to-node roundoff of the difference quotients. Returns the fitted
    field and the relative max misfit.
    """
    basis = conformal_fields(y).reshape(10, -1)
    scale = np.linalg.norm(basis, axis=1)
    coeffs, *_ = linalg.lstsq((basis / scale[:, None]).T, np.ravel(velocity))
    fitted = np.tensordot(coeffs / scale, conformal_fields(y), axes=1)
    misfit = float(np.abs(fitted - velocity).max()) / max(1.0, float(np.abs(velocity).max()))
    return fitted, misfit


def omega_derivative(
    param: MobiusParam, points: np.ndarray, direction, step: Optional[float] = None
) -> tuple[np.ndarray, float]:
    """d/dt T_{omega + t direction}(points) by centered differences, with the Richardson discrepancy."""
    cfg = numerics().mobius
    step = cfg.fd_step if step is None else step
    direction = np.asarray(direction, dtype=float)
    if param.modulus + step >= 1.0:
        raise DomainError(f"Finite-difference step {step} leaves the unit disk at |omega|={param.modulus}")
    coarse = _centered(param, points, direction, step)
    fine = _centered(param, points, direction, 0.5 * step)
    scale = max(1.0, float(np.abs(fine).max()))
    discrepancy = float(np.abs(coarse - fine).max()) / scale
    if discrepancy >= cfg.richardson_tol:
        logger.warning(
            f"Richardson discrepancy {discrepancy:.2e} for omega={param.omega}",
            extra={"event": "richardson_mismatch", "omega": list(param.omega)},
        )
    # Richardson extrapolation of the two centered quotients
    return (4.0 * fine - coarse) / 3.0, discrepancy


def jacobi_fields(
    param: MobiusParam,
    grid: SurfaceGrid,
    chart: Literal["auto", "polar", "cartesian"] = "auto",
    fd_step: Optional[float] = None,
) -> JacobiBasis:
    """
    Euclidean normal components of dilation, translations, rotations and the
    omega-derivative of the family on ``grid`` (a family_surface / family_torus output).

    The polar chart uses the radial omega-derivative; below |omega| = chart_switch
    the cartesian chart replaces the axial rotation and the radial derivative by
    the derivatives in omega_x and omega_y. Omega-derivatives are Richardson
    difference quotients refitted by a conformal Killing field.
    """
    cfg = numerics().mobius
    if chart == "auto":
        chart = "cartesian" if param.modulus < cfg.chart_switch else "polar"

    points = preimage_points(grid)
    image = family_map(param, points)
    if not np.allclose(image, grid.positions, rtol=0.0, atol=1e-9 * max(1.0, np.abs(image).max())):
        raise DomainError("Grid positions do not match the family member of param")

    normal = fundamental_forms(grid, EuclideanMetric()).n
    y = grid.positions
    axes = param.rotation_matrix.T  # rows are R e_k

    def normal_part(v: np.ndarray) -> np.ndarray:
        return np.einsum("...a,...a->...", v, normal)

    def velocity(direction) -> tuple[np.ndarray, float]:
        raw, discrepancy = omega_derivative(param, points, direction, fd_step)
        fitted, misfit = conformal_projection(y, raw)
        if misfit >= cfg.richardson_tol:
            logger.warning(
                f"omega-velocity misfit {misfit:.2e} against conformal fields at omega={param.omega}",
                extra={"event": "conformal_misfit", "omega": list(param.omega)},
            )
        return fitted, discrepancy

    values = [normal_part(y)]
    values += [normal_part(np.broadcast_to(b, y.shape)) for b in axes]
    values += [normal_part(np.cross(b, y)) for b in axes[:2]]

    if chart == "polar":
        values.append(normal_part(np.cross(axes[2], y)))
        derivative, error = velocity(param.direction)
        values.append(normal_part(derivative))
        labels = POLAR_LABELS
    else:
        dx, err_x = velocity(np.array([1.0, 0.0]))
        dy, err_y = velocity(np.array([0.0, 1.0]))
        values += [normal_part(dx), normal_part(dy)]
        error = max(err_x, err_y)
        labels = CARTESIAN_LABELS

    scale = float(np.abs(y).max())
    trivial = tuple(bool(np.abs(v).max() < 1e-10 * scale) for v in values)
    for label, flag in zip(labels, trivial):
        if flag:
            logger.info(f"Jacobi field '{label}' vanishes identically at omega={param.omega}")

    return JacobiBasis(
        fields=tuple(ScalarField(v, grid) for v in values),
        labels=labels,
        chart=chart,
        trivial=trivial,
        richardson_error=error,
    )
