"""Reduced-energy sweeps over (P, R, omega) on a bounded worker pool."""

from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import MetricModel
from willmore_tori.ambient_metrics.rotations import rotation_matrix
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam
from willmore_tori.mobius_family.placement import Placement
from willmore_tori.reduction_lab.energy import reduced_energy
from willmore_tori.reduction_lab.models import LandscapeRow, LandscapeTable
from willmore_tori.settings import numerics

logger = get_logger(__name__)


def landscape(
    model: Union[MetricModel, CurvatureField],
    epsilon: float,
    points: Sequence,
    rotations: Sequence,
    omegas: Sequence,
    corrected: bool = False,
    mode: Placement = "exact",
    resolution: Optional[int] = None,
    workers: Optional[int] = None,
) -> LandscapeTable:
    """Energies on the product grid points x rotations x omegas; rows keep the input order."""
    workers = workers or numerics().workers
    tasks = [
        (np.asarray(P, dtype=float), MobiusParam(omega=tuple(w), rotation=tuple(q)))
        for P, q, w in product(points, rotations, omegas)
    ]

    def evaluate(task) -> float:
        P, param = task
        return reduced_energy(model, epsilon, P, param, corrected=corrected, mode=mode, resolution=resolution)

    logger.info(f"Landscape of {len(tasks)} tori at eps={epsilon} on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        energies = list(pool.map(evaluate, tasks))

    rows = [
        LandscapeRow(
            P=P.tolist(),
            axis=rotation_matrix(param.rotation)[:, 2].tolist(),
            rotation=list(param.rotation),
            omega=list(param.omega),
            energy=energy,
        )
        for (P, param), energy in zip(tasks, energies)
    ]
    return LandscapeTable(epsilon=epsilon, model=repr(model), corrected=corrected, rows=rows)
