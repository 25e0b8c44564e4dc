"""Reduced energy: W of the placed torus, optionally after the normal-graph correction."""

from typing import Optional, Union

import numpy as np

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.curvature import CurvatureData
from willmore_tori.ambient_metrics.models import MetricModel, curvature_at
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam
from willmore_tori.mobius_family.placement import Placement, place_torus
from willmore_tori.surface_kernel.energy import willmore_energy
from willmore_tori.surface_kernel.forms import fundamental_forms
from willmore_tori.variational.corrector import corrector_solve

logger = get_logger(__name__)


def reduced_energy(
    model: Union[MetricModel, CurvatureField],
    epsilon: float,
    P,
    param: MobiusParam,
    corrected: bool = False,
    mode: Placement = "exact",
    resolution: Optional[int] = None,
) -> float:
    """
    W_{g_eps} of Sigma_{eps,P,R,omega}[0], or of the corrected torus when ``corrected``.

    The two differ by O(eps^4) while the curvature signal is O(eps^2).
    """
    P = np.asarray(P, dtype=float)
    if corrected:
        return corrector_solve(model, epsilon, P, param, mode=mode, resolution=resolution).energy
    placed = place_torus(model, epsilon, P, param, mode=mode, resolution=resolution)
    try:
        return willmore_energy(fundamental_forms(placed.grid, placed.metric))
    except Exception:
        logger.error(
            f"Energy evaluation failed at eps={epsilon}, P={P.tolist()}, omega={param.omega}",
            exc_info=True,
        )
        raise


def curvature_of(model: Union[MetricModel, CurvatureField], P) -> CurvatureData:
    """Curvature at P in the orthonormal frame used to place tori."""
    if isinstance(model, CurvatureField):
        return model.at(P)
    return curvature_at(model, np.asarray(P, dtype=float))
