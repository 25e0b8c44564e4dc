"""Interior extrema of the reduced energy and their diagnostics."""

from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import MetricModel, SchwarzschildMetric
from willmore_tori.ambient_metrics.rotations import (
    axis_from_angles,
    axis_quaternion,
    quaternion_from_rotvec,
    rotation_matrix,
    rotvec_from_quaternion,
)
from willmore_tori.exceptions import ConvergenceError, DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam
from willmore_tori.mobius_family.placement import Placement
from willmore_tori.reduction_lab.energy import curvature_of, reduced_energy
from willmore_tori.reduction_lab.expansions import symmetric_expansion_fit
from willmore_tori.reduction_lab.models import AxisSigns, ExtremizeResult, LandscapePoint
from willmore_tori.variational.corrector import corrector_solve

logger = get_logger(__name__)

Mode = Literal["min", "max"]

COORDINATE_AXES = np.concatenate([np.eye(3), -np.eye(3)])
BOUNDARY_DIRECTIONS = 16
SCHWARZSCHILD_TAU = 0.2


@dataclass(frozen=True)
class _Domain:
    """Base point parametrization: fixed, free (periodic field) or the annulus tau <= |P| <= 1/tau."""

    P0: np.ndarray
    free: bool = False
    annulus: Optional[tuple[float, float]] = None

    @property
    def n_vars(self) -> int:
        if self.annulus is not None:
            return 1
        return 3 if self.free else 0

    def point(self, u: np.ndarray) -> np.ndarray:
        if self.annulus is not None:
            lo, hi = self.annulus
            return np.array([lo + (hi - lo) * float(expit(u[0])), 0.0, 0.0])
        if self.free:
            return self.P0 + u[:3]
        return self.P0

    def starts(self) -> list[np.ndarray]:
        if self.annulus is not None:
            lo, hi = self.annulus
            radii = np.geomspace(lo, hi, 7)[1:-1]
            return [np.array([np.log((r - lo) / (hi - r))]) for r in radii]
        return [np.zeros(self.n_vars)]

    def boundary_points(self) -> list[np.ndarray]:
        if self.annulus is None:
            return []
        return [np.array([r, 0.0, 0.0]) for r in self.annulus]

    def contains_interior(self, P: np.ndarray, rtol: float = 1e-3) -> bool:
        if self.annulus is None:
            return True
        r = float(np.linalg.norm(P))
        lo, hi = self.annulus
        return lo * (1.0 + rtol) < r < hi * (1.0 - rtol)


def _domain_for(model, P0, tau: Optional[float]) -> _Domain:
    P0 = np.asarray(P0, dtype=float)
    if isinstance(model, SchwarzschildMetric):
        tau = SCHWARZSCHILD_TAU if tau is None else tau
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        scale = model.mass
        return _Domain(P0, annulus=(tau * scale, scale / tau))
    return _Domain(P0, free=isinstance(model, CurvatureField))


def _omega(z: np.ndarray, r_boundary: float) -> np.ndarray:
    """Open-disk chart omega = r tanh|z| z / |z|."""
    size = float(np.linalg.norm(z))
    if size == 0.0:
        return np.zeros(2)
    return r_boundary * np.tanh(size) * z / size


def _point(P, quaternion, omega, energy) -> LandscapePoint:
    return LandscapePoint(
        P=np.asarray(P).tolist(),
        rotation=np.asarray(quaternion).tolist(),
        axis=rotation_matrix(quaternion)[:, 2].tolist(),
        omega=np.asarray(omega).tolist(),
        energy=float(energy),
    )


def extremize(
    model: Union[MetricModel, CurvatureField],
    epsilon: float,
    mode: Mode = "min",
    r_boundary: float = 0.9,
    P0=(0.0, 0.0, 0.0),
    tau: Optional[float] = None,
    placement: Placement = "local",
    resolution: Optional[int] = None,
    xatol: float = 1e-4,
    maxiter: int = 400,
    criticality: bool = False,
    fail_on_boundary: bool = False,
) -> ExtremizeResult:
    """
    Nelder-Mead search for the min (or max) of the uncorrected reduced energy.

    A symmetric-slice search over (P, axis) at omega = 0 seeds a full search over
    (P, rotation vector, omega) with |omega| < r_boundary. Interiority is judged
    against 16 omega-directions x 6 axes on |omega| = r_boundary and, for
    Schwarzschild, the two spheres bounding the annulus of base points.

    Raises:
        ConvergenceError: if ``fail_on_boundary`` and the extremum is not interior.
    """
    if mode not in ("min", "max"):
        raise DomainError(f"mode must be 'min' or 'max', got {mode}")
    if not 0.0 < r_boundary < 1.0:
        raise DomainError(f"r_boundary must lie in (0, 1), got {r_boundary}")
    sign = 1.0 if mode == "min" else -1.0
    domain = _domain_for(model, P0, tau)
    k = domain.n_vars
    evaluations = 0

    def energy(P, quaternion, omega) -> float:
        nonlocal evaluations
        evaluations += 1
        param = MobiusParam(omega=tuple(omega), rotation=tuple(quaternion))
        try:
            return reduced_energy(model, epsilon, P, param, mode=placement, resolution=resolution)
        except DomainError:
            return sign * np.inf

    def symmetric_objective(u: np.ndarray) -> float:
        axis = axis_from_angles(u[k], u[k + 1])
        return sign * energy(domain.point(u), axis_quaternion(axis), (0.0, 0.0))

    # seed from the Ricci eigenvector favouring the requested extremum
    curv = curvature_of(model, domain.point(domain.starts()[0]))
    _, _, vmin, vmax = curv.eigen_extremes()
    favoured = vmin if mode == "min" else vmax
    seeds = []
    for start in domain.starts():
        for axis in (favoured, *np.eye(3)):
            polar = float(np.arccos(np.clip(axis[2], -1.0, 1.0)))
            azimuth = float(np.arctan2(axis[1], axis[0]))
            seeds.append(np.concatenate([start, [polar, azimuth]]))
    seed = min(seeds, key=symmetric_objective)

    options = {"xatol": xatol, "fatol": 1e-12, "maxiter": maxiter}
    simplex = np.vstack([seed] + [seed + 0.2 * e for e in np.eye(seed.size)])
    sym = minimize(symmetric_objective, seed, method="Nelder-Mead", options={**options, "initial_simplex": simplex})
    P_sym = domain.point(sym.x)
    q_sym = axis_quaternion(axis_from_angles(sym.x[k], sym.x[k + 1]))
    symmetric_point = _point(P_sym, q_sym, (0.0, 0.0), sign * sym.fun)

    def full_objective(v: np.ndarray) -> float:
        return sign * energy(
            domain.point(v), quaternion_from_rotvec(v[k : k + 3]), _omega(v[k + 3 :], r_boundary)
        )

    x0 = np.concatenate([sym.x[:k], rotvec_from_quaternion(q_sym), [0.05, 0.0]])
    simplex = np.vstack([x0] + [x0 + 0.2 * e for e in np.eye(x0.size)])
    full = minimize(full_objective, x0, method="Nelder-Mead", options={**options, "initial_simplex": simplex})
    best_x, best_f = (full.x, full.fun) if full.fun <= sym.fun else (None, sym.fun)
    if best_x is None:
        P_opt, q_opt, w_opt = P_sym, q_sym, np.zeros(2)
    else:
        P_opt = domain.point(best_x)
        q_opt = quaternion_from_rotvec(best_x[k : k + 3])
        w_opt = _omega(best_x[k + 3 :], r_boundary)
    e_opt = sign * best_f

    boundary = []
    for axis in COORDINATE_AXES:
        q = axis_quaternion(axis)
        for j in range(BOUNDARY_DIRECTIONS):
            angle = 2.0 * np.pi * j / BOUNDARY_DIRECTIONS
            w = r_boundary * np.array([np.cos(angle), np.sin(angle)])
            boundary.append(energy(P_opt, q, w))
        for P in domain.boundary_points():
            boundary.append(energy(P, q, (0.0, 0.0)))
    boundary = np.asarray(boundary)
    boundary = boundary[np.isfinite(boundary)]
    boundary_extreme = float(boundary.min() if mode == "min" else boundary.max())
    margin = sign * (boundary_extreme - e_opt)
    interior = bool(
        margin > 0.0
        and np.linalg.norm(w_opt) < 0.99 * r_boundary
        and domain.contains_interior(P_opt)
    )

    betas = None
    if criticality:
        result = corrector_solve(
            model, epsilon, P_opt, MobiusParam(omega=tuple(w_opt), rotation=tuple(q_opt)), mode=placement
        )
        betas = np.abs(result.beta[1:]).tolist()

    point = _point(P_opt, q_opt, w_opt, e_opt)
    extra = {"event": "extremize", "mode": mode, "margin": margin, "interior": interior}
    if interior:
        logger.info(f"Interior {mode} {e_opt:.12f} with margin {margin:.3e}", extra=extra)
    else:
        logger.warning(f"{mode} is not interior (margin {margin:.3e})", extra=extra)
        if fail_on_boundary:
            raise ConvergenceError(
                f"Extremum on the boundary: margin {margin:.3e}, |omega|={np.linalg.norm(w_opt):.4f}",
                {"point": point.model_dump(), "margin": margin},
            )

    return ExtremizeResult(
        mode=mode,
        epsilon=epsilon,
        r_boundary=r_boundary,
        point=point,
        symmetric_point=symmetric_point,
        boundary_extreme=boundary_extreme,
        margin=margin,
        interior=interior,
        evaluations=evaluations,
        stationarity_tol=xatol,
        criticality=betas,
    )


def schwarzschild_axis_signs(
    model: MetricModel,
    P=(2.0, 0.0, 0.0),
    eps_list: Optional[Sequence[float]] = None,
    mode: Placement = "exact",
) -> AxisSigns:
    """Symmetric eps^2 coefficients with the torus axis radial and tangential at P."""
    P = np.asarray(P, dtype=float)
    radial = P / np.linalg.norm(P)
    trial = np.eye(3)[int(np.argmin(np.abs(radial)))]
    tangential = trial - (trial @ radial) * radial
    tangential /= np.linalg.norm(tangential)
    fits = [
        symmetric_expansion_fit(model, P, tuple(axis_quaternion(axis)), eps_list, mode=mode)
        for axis in (radial, tangential)
    ]
    return AxisSigns(
        P=P.tolist(),
        radial=fits[0],
        tangential=fits[1],
        sign_flip=bool(fits[0].c_lead * fits[1].c_lead < 0.0),
    )
