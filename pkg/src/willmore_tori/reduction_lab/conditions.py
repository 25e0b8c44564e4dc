"""Curvature conditions for interior extrema and the asymptotic flatness check."""

from typing import Optional, Sequence, Union

import numpy as np

from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import MetricModel
from willmore_tori.exceptions import DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.reduction_lab.energy import curvature_of
from willmore_tori.reduction_lab.models import ALEReport, ConditionReport

logger = get_logger(__name__)

STRICT_TOL = 1e-12


def _strictly_greater(a: float, b: float) -> bool:
    return a - b > STRICT_TOL * max(1.0, abs(a), abs(b))


def condition_check(
    model: Union[MetricModel, CurvatureField],
    sample_points: Sequence,
    sample_dirs: Optional[Sequence] = None,
) -> ConditionReport:
    """
    3 sup_P (Sc - min_v Ric(v, v)) > 2 sup_P Sc   (interior minimum)
    3 inf_P (Sc - max_v Ric(v, v)) < 2 inf_P Sc   (interior maximum)

    The inner extrema are the Ricci eigenvalue extremes. Strictness is decided
    up to a relative 1e-12 so isotropic data lands on the borderline.
    """
    points = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if points.size == 0:
        raise DomainError("condition_check needs at least one sample point")
    dirs = None
    if sample_dirs is not None:
        dirs = np.atleast_2d(np.asarray(sample_dirs, dtype=float))
        dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)

    sc = np.empty(len(points))
    low = np.empty(len(points))
    high = np.empty(len(points))
    v_low, v_high = [], []
    identity_error = 0.0
    direction_gap = np.inf
    for k, P in enumerate(points):
        curv = curvature_of(model, P)
        lmin, lmax, vmin, vmax = curv.eigen_extremes()
        sc[k], low[k], high[k] = curv.sc, lmin, lmax
        v_low.append(vmin)
        v_high.append(vmax)
        for v in (vmin, vmax):
            identity = 0.5 * curv.sc + curv.sectional_orthogonal_to(v)
            identity_error = max(identity_error, abs(curv.sc - curv.ricci(v, v) - identity))
        if dirs is not None:
            sampled = np.einsum("ka,ab,kb->k", dirs, curv.ric, dirs).min()
            direction_gap = min(direction_gap, float(sampled - lmin))

    gap1 = sc - low
    gap2 = sc - high
    i1 = int(np.argmax(gap1))
    i2 = int(np.argmin(gap2))
    lhs1, rhs1 = 3.0 * float(gap1[i1]), 2.0 * float(sc.max())
    lhs2, rhs2 = 3.0 * float(gap2[i2]), 2.0 * float(sc.min())
    report = ConditionReport(
        lhs1=lhs1,
        rhs1=rhs1,
        lhs2=lhs2,
        rhs2=rhs2,
        assump1_holds=_strictly_greater(lhs1, rhs1),
        assump2_holds=_strictly_greater(rhs2, lhs2),
        witness_min_point=points[i1].tolist(),
        witness_min_direction=np.asarray(v_low[i1]).tolist(),
        witness_max_point=points[i2].tolist(),
        witness_max_direction=np.asarray(v_high[i2]).tolist(),
        sectional_identity_error=identity_error,
        sampled_direction_gap=None if dirs is None else direction_gap,
    )
    logger.info(
        f"Curvature conditions: first {report.assump1_holds}, second {report.assump2_holds}",
        extra={"event": "condition_check", "lhs1": lhs1, "rhs1": rhs1, "lhs2": lhs2, "rhs2": rhs2},
    )
    return report


def _unit_ball(center: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    dirs = rng.normal(size=(count, 3))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    radii = rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / 3.0)
    return center + radii * dirs


def ale_check(
    model: MetricModel,
    radii: Sequence[float] = (5.0, 10.0, 20.0, 40.0),
    samples: int = 64,
    seed: int = 0,
) -> ALEReport:
    """
    Scale-invariant C^2 deviation max(|g - delta| + |x| |dg| + |x|^2 |ddg|) on unit
    balls around points at radius R, and its decay exponent in R.
    """
    rng = np.random.default_rng(seed)
    deviations, sc_min = [], np.inf
    for R in radii:
        centers = R * np.eye(3)
        worst = 0.0
        for center in centers:
            x = _unit_ball(center, samples, rng)
            s = model.sample(x)
            r = np.linalg.norm(x, axis=-1)
            dev = (
                np.abs(s.g - np.eye(3)).max(axis=(-2, -1))
                + r * np.abs(s.dg).max(axis=(-3, -2, -1))
                + r**2 * np.abs(s.ddg).max(axis=(-4, -3, -2, -1))
            )
            worst = max(worst, float(dev.max()))
            ric = model.ricci_tensor(x)
            g_inv = np.linalg.inv(s.g)
            sc_min = min(sc_min, float(np.einsum("...ab,...ab->...", g_inv, ric).min()))
        deviations.append(worst)
    slope = float(np.polyfit(np.log(radii), np.log(deviations), 1)[0])
    return ALEReport(
        radii=[float(r) for r in radii],
        deviations=deviations,
        decay_exponent=slope,
        scalar_curvature_min=sc_min,
        asymptotically_flat=bool(slope < 0.0 and np.all(np.diff(deviations) < 0.0)),
    )
