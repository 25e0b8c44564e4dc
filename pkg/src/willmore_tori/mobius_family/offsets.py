"""Area-preserving inversion offsets of the Clifford torus."""

from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from willmore_tori.exceptions import ConvergenceError, DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel.energy import CLIFFORD_AREA
from willmore_tori.surface_kernel.grid import SQRT2, graded_angle

logger = get_logger(__name__)

OUTER_RADIUS = SQRT2 + 1.0
# eta^2 / xi_tilde -> sqrt(4 sqrt(2) pi) as eta -> 0
SMALL_RADIUS_LIMIT = np.sqrt(4.0 * SQRT2 * np.pi)


def _area_integrand(phi: np.ndarray, xi_tilde: float) -> np.ndarray:
    """theta-integrated area density of the inverted torus at unit inversion radius."""
    c = OUTER_RADIUS + xi_tilde
    rho = SQRT2 + np.cos(phi)
    sin2 = np.sin(phi) ** 2
    gap = 2.0 * np.sin(0.5 * phi) ** 2 + xi_tilde
    a_minus_b = gap**2 + sin2
    a_plus_b = (rho + c) ** 2 + sin2
    a = 0.5 * (a_minus_b + a_plus_b)
    return rho * 2.0 * np.pi * a / (a_minus_b * a_plus_b) ** 1.5


def area_functional(
    xi_tilde: float,
    eta: float,
    rtol: Optional[float] = None,
) -> float:
    """
    Area of the torus translated by -(sqrt 2 + 1 + xi_tilde) e_x and inverted
    in the sphere of radius eta about the origin.

    The theta integral is done in closed form; the phi integral by the
    trapezoid rule on a grid graded toward phi = 0, doubled until two
    successive values agree to ``rtol``.
    """
    cfg = numerics().mobius
    rtol = cfg.quadrature_rtol if rtol is None else rtol
    if xi_tilde <= 0:
        raise DomainError(f"xi_tilde must be positive, got {xi_tilde}")
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")

    kappa = min(1.0, np.sqrt(xi_tilde))
    n = cfg.quadrature_min_nodes
    previous = None
    while n <= cfg.quadrature_max_nodes:
        s = 2.0 * np.pi * np.arange(n) / n
        phi, speed = graded_angle(s, kappa)
        value = float(np.sum(_area_integrand(phi, xi_tilde) * speed) * 2.0 * np.pi / n)
        if previous is not None and abs(value - previous) <= rtol * abs(value):
            return eta**4 * value
        previous = value
        n *= 2

    raise ConvergenceError(
        f"Area quadrature did not converge for xi_tilde={xi_tilde:.3e}",
        {"xi_tilde": xi_tilde, "eta": eta, "max_nodes": cfg.quadrature_max_nodes},
    )


@lru_cache(maxsize=4096)
def small_radius_offset(eta: float) -> float:
    """
    xi_tilde(eta) > 0 such that the inversion about the origin of radius eta of
    the torus translated by -(sqrt 2 + 1 + xi_tilde) e_x has the Clifford area.

    Raises:
        ConvergenceError: if no bracket is found or the quadrature fails.
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    cfg = numerics().mobius

    def excess(xi_tilde: float) -> float:
        return area_functional(xi_tilde, eta) / CLIFFORD_AREA - 1.0

    lower = 0.1 * min(eta**2 / SMALL_RADIUS_LIMIT, 1.0)
    for _ in range(60):
        if excess(lower) > 0.0:
            break
        lower /= 10.0
    else:
        raise ConvergenceError(f"No lower bracket for eta={eta}", {"lower": lower})

    upper = max(1.0, 2.0 * eta)
    for _ in range(60):
        if excess(upper) < 0.0:
            break
        upper *= 2.0
    else:
        raise ConvergenceError(f"No upper bracket for eta={eta}", {"upper": upper})

    try:
        root = brentq(excess, lower, upper, xtol=cfg.offset_xtol, rtol=1e-14, maxiter=200)
    except (RuntimeError, ValueError) as e:
        logger.error(f"Offset root finding failed for eta={eta}: {e}", exc_info=True)
        raise ConvergenceError(str(e), {"eta": eta, "bracket": (lower, upper)}) from e

    logger.debug(f"xi_tilde({eta:.6g}) = {root:.15g}")
    return float(root)


def area_preserving_offset(eta: float) -> float:
    """xi_eta > sqrt 2 + 1: the inversion about -xi_eta e_x of radius eta preserves the Clifford area."""
    return OUTER_RADIUS + small_radius_offset(float(eta))
