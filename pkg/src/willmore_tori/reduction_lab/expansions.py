"""Small-parameter expansions of the torus and sphere energies against their closed forms."""

from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import EuclideanMetric, MetricModel, NormalExpansionMetric
from willmore_tori.ambient_metrics.rotations import IDENTITY_QUATERNION, rotation_matrix
from willmore_tori.exceptions import DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam, resolution_for
from willmore_tori.mobius_family.placement import Placement, local_chart
from willmore_tori.reduction_lab.energy import curvature_of, reduced_energy
from willmore_tori.reduction_lab.models import ExpansionFit
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel.energy import CLIFFORD_ENERGY, SPHERE_ENERGY, willmore_energy
from willmore_tori.surface_kernel.forms import fundamental_forms
from willmore_tori.surface_kernel.grid import SQRT2, build_round_sphere

logger = get_logger(__name__)

PI2 = np.pi**2


def polynomial_fit(x: Sequence[float], y: Sequence[float], powers: Sequence[int]) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of sum_k c_k x^p_k and the residual 2-norm."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    design = np.stack([x**p for p in powers], axis=1)
    coeffs, _, _, _ = linalg.lstsq(design, y)
    return coeffs, float(np.linalg.norm(design @ coeffs - y))


def symmetric_target(curv, rotation: np.ndarray) -> float:
    """-4 sqrt2 pi^2 (Sc - Ric(R e_z, R e_z))."""
    axis = rotation[:, 2]
    return -4.0 * SQRT2 * PI2 * (curv.sc - curv.ricci(axis, axis))


def degenerate_target(curv) -> float:
    """-(8 sqrt2 / 3) pi^2 Sc."""
    return -(8.0 * SQRT2 / 3.0) * PI2 * curv.sc


def sphere_target(curv) -> float:
    """-(8 pi / 3) Sc."""
    return -(8.0 * np.pi / 3.0) * curv.sc


def _even_in_scale(model, P, mode: Placement) -> bool:
    """The placed metric is delta + s^2 h(y) with h quadratic, so W has no odd powers of s."""
    if mode == "local" or isinstance(model, (EuclideanMetric, CurvatureField)):
        return True
    return isinstance(model, NormalExpansionMetric) and not np.any(np.asarray(P, dtype=float))


def _remainder_power(even: bool) -> Optional[int]:
    power = numerics().expansion.remainder_power
    if power is None:
        return None
    return power + 1 if even and power % 2 else power


def _relative(value: float, target: float) -> float:
    return abs(value - target) / abs(target) if target != 0.0 else abs(value)


def _fit(
    kind: str,
    x: Sequence[float],
    energies: Sequence[float],
    expected_c0: float,
    target: float,
    remainder_power: Optional[int],
) -> ExpansionFit:
    plain, plain_residual = polynomial_fit(x, energies, (0, 2))
    if remainder_power is not None and len(x) > 3:
        coeffs, residual = polynomial_fit(x, energies, (0, 2, remainder_power))
        remainder = float(coeffs[2])
    else:
        coeffs, residual, remainder = plain, plain_residual, None
    c_lead = float(coeffs[1])
    bound = 1e-3 * abs(c_lead) * max(x) ** 2
    flagged = residual > max(bound, 1e-9)
    if flagged:
        logger.warning(
            f"{kind} fit residual {residual:.3e} above {bound:.3e}",
            extra={"event": "fit_residual", "kind": kind},
        )
    return ExpansionFit(
        kind=kind,
        abscissae=[float(v) for v in x],
        energies=[float(v) for v in energies],
        c0=float(coeffs[0]),
        c_lead=c_lead,
        target=target,
        expected_c0=expected_c0,
        rel_error=_relative(c_lead, target),
        residual_norm=residual,
        c_remainder=remainder,
        c_lead_plain=float(plain[1]),
        flagged=flagged,
    )


def symmetric_expansion_fit(
    model: Union[MetricModel, CurvatureField],
    P=(0.0, 0.0, 0.0),
    rotation=IDENTITY_QUATERNION,
    eps_list: Optional[Sequence[float]] = None,
    mode: Placement = "exact",
    resolution: Optional[int] = None,
) -> ExpansionFit:
    """Fit W(eps) = c0 + c eps^2 (+ remainder) on omega = 0 tori with axis R e_z."""
    cfg = numerics().expansion
    eps_list = list(eps_list or cfg.eps_list)
    if len(eps_list) < 4 or min(eps_list) <= 0.0 or max(eps_list) > 0.2:
        raise DomainError(f"eps_list needs >= 4 values in (0, 0.2], got {eps_list}")
    param = MobiusParam(rotation=tuple(rotation))
    energies = [reduced_energy(model, eps, P, param, mode=mode, resolution=resolution) for eps in eps_list]
    target = symmetric_target(curvature_of(model, P), rotation_matrix(param.rotation))
    return _fit(
        "symmetric", eps_list, energies, CLIFFORD_ENERGY, target, _remainder_power(_even_in_scale(model, P, mode))
    )


def degenerate_expansion_fit(
    model: Union[MetricModel, CurvatureField],
    P=(0.0, 0.0, 0.0),
    rotation=IDENTITY_QUATERNION,
    omega_moduli: Sequence[float] = (0.9, 0.95, 0.99),
    epsilon: float = 0.05,
    direction=(1.0, 0.0),
    mode: Placement = "exact",
) -> ExpansionFit:
    """
    (W - 8 pi^2) / eps^2 along |omega| -> 1 against -(8 sqrt2 / 3) pi^2 Sc.

    Rows whose grid hits the resolution cap are excluded and listed.
    """
    moduli = sorted(float(m) for m in omega_moduli)
    if moduli[0] < 0.9 or moduli[-1] > 0.995:
        raise DomainError(f"omega moduli must lie in [0.9, 0.995], got {moduli}")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    target = degenerate_target(curvature_of(model, P))

    kept, energies, excluded = [], [], []
    for m in moduli:
        param = MobiusParam(omega=tuple(m * d), rotation=tuple(rotation))
        if resolution_for(param).capped:
            excluded.append(m)
            continue
        kept.append(m)
        energies.append(reduced_energy(model, epsilon, P, param, mode=mode))
    if not kept:
        raise DomainError("Every omega modulus hit the resolution cap")

    scaled = [(w - CLIFFORD_ENERGY) / epsilon**2 for w in energies]
    deviations = [abs(s - target) for s in scaled]
    c_lead = scaled[-1]
    return ExpansionFit(
        kind="degenerate",
        abscissae=kept,
        energies=energies,
        c0=float(energies[-1] - c_lead * epsilon**2),
        c_lead=c_lead,
        target=target,
        expected_c0=CLIFFORD_ENERGY,
        rel_error=_relative(c_lead, target),
        residual_norm=0.0,
        deviations=deviations,
        excluded=excluded,
        monotone=bool(np.all(np.diff(deviations) <= 0.0)),
        flagged=bool(excluded),
    )


def sphere_expansion_fit(
    model: Union[MetricModel, CurvatureField],
    P=(0.0, 0.0, 0.0),
    radii: Optional[Sequence[float]] = None,
    direction=(0.0, 0.0, 1.0),
    n_lat: int = 32,
    n_lon: int = 64,
) -> ExpansionFit:
    """Fit W(r) = 16 pi + c r^2 (+ remainder) for round spheres through P of radius r."""
    cfg = numerics().expansion
    radii = list(radii or cfg.sphere_radii)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    P = np.asarray(P, dtype=float)

    if isinstance(model, EuclideanMetric):
        chart = model
    elif isinstance(model, NormalExpansionMetric) and not np.any(P):
        chart = model
    else:
        chart = local_chart(model, P)
    rho0 = getattr(chart, "rho0", np.inf)
    if max(radii) > 0.1 * rho0:
        raise DomainError(f"Sphere radii must stay below 0.1 rho0 = {0.1 * rho0}")

    energies = [
        willmore_energy(fundamental_forms(build_round_sphere(n_lat, n_lon, r * d, r), chart)) for r in radii
    ]
    target = sphere_target(curvature_of(model, P))
    return _fit("sphere", radii, energies, SPHERE_ENERGY, target, _remainder_power(True))
