"""Experiment stages behind the CLI subcommands and the run loop writing their reports."""

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from willmore_tori.ambient_metrics import CurvatureData, CurvatureField, EuclideanMetric, MetricModel, create_metric
from willmore_tori.ambient_metrics.rotations import axis_quaternion, rotation_matrix
from willmore_tori.ambient_metrics.types import MetricKind
from willmore_tori.cli_reports.config import Command, ExperimentConfig, Suite
from willmore_tori.cli_reports.writers import ReportWriter
from willmore_tori.exceptions import WillmoreToriError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family import (
    DERIVED_LABELS,
    SMALL_RADIUS_LIMIT,
    MobiusParam,
    area_preserving_offset,
    distortion_ratio,
    family_surface,
    invert_grid,
    random_inversions,
    small_radius_offset,
)
from willmore_tori.reduction_lab import (
    ale_check,
    condition_check,
    degenerate_expansion_fit,
    extremize,
    landscape,
    schwarzschild_axis_signs,
    sphere_expansion_fit,
    symmetric_expansion_fit,
)
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel import (
    CLIFFORD_AREA,
    CLIFFORD_ENERGY,
    area,
    build_clifford_torus,
    fundamental_forms,
    integrate,
    willmore_energy,
)
from willmore_tori.surface_kernel.grid import SQRT2
from willmore_tori.variational import (
    assemble_flat_operator,
    corrector_solve,
    jacobi_residuals,
    near_kernel,
    wdot_closed_form_steps,
    wdot_quadrature_steps,
)

logger = get_logger(__name__)

AmbientModel = Union[MetricModel, CurvatureField]

KERNEL_DIMENSION = 8
"""Near-kernel size of L0~ on the family: Z_0 (dilation) counts alongside the seven area-preserving Z_1..Z_7."""
FAMILY_MODULI = (0.3, 0.6, 0.9)
JACOBI_RESOLUTION = 96
LARGE_ETA = 8.0
SMALL_ETA = 0.05
SCHWARZSCHILD_POINT = (2.0, 0.0, 0.0)
CORRECTOR_MODEL = {"kind": "synthetic", "ric": [0.2, 0.3, 0.5]}


class CheckResult(BaseModel):
    """One pass/fail item of summary.json."""

    name: str
    passed: bool
    value: Optional[float] = None
    target: Optional[float] = None
    error: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    class Config:
        frozen = True
        extra = "forbid"


def _relative_error(value: float, target: float) -> float:
    return abs(value - target) / abs(target) if target != 0.0 else abs(value)


def check_value(
    name: str, value: float, target: float, tolerance: float, relative: bool = True, detail: str = ""
) -> CheckResult:
    error = _relative_error(value, target) if relative else abs(value - target)
    return CheckResult(
        name=name,
        passed=bool(error <= tolerance),
        value=float(value),
        target=float(target),
        error=float(error),
        tolerance=float(tolerance),
        detail=detail,
    )


def check_flag(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(ok), detail=detail)


@dataclass
class StageOutput:
    checks: List[CheckResult] = field(default_factory=list)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    records: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunContext:
    """Validated config plus the objects every stage needs."""

    config: ExperimentConfig
    model: AmbientModel

    @cached_property
    def workers(self) -> int:
        return self.config.workers or numerics().workers

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.config.seed + offset)

    def map(self, fn: Callable, items: Sequence) -> list:
        """Ordered parallel map on the bounded worker pool."""
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=min(self.workers, len(items))) as pool:
            return list(pool.map(fn, items))


class WarningCollector(logging.Handler):
    """Collects package warnings raised during a run for summary.json."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.records: List[Dict[str, Any]] = []
        self._seen: set[int] = set()

    def emit(self, record: logging.LogRecord) -> None:
        if id(record) in self._seen:
            return
        self._seen.add(id(record))
        self.records.append(
            {
                "logger": record.name,
                "level": record.levelname,
                "event": getattr(record, "event", None),
                "message": record.getMessage(),
            }
        )

    @contextmanager
    def attached(self, names: Sequence[str] = ("willmore_tori", "willmore_tori.cli_reports")) -> Iterator["WarningCollector"]:
        loggers = [logging.getLogger(name) for name in names]
        for lg in loggers:
            lg.addHandler(self)
        try:
            yield self
        finally:
            for lg in loggers:
                lg.removeHandler(self)

    def sorted_records(self) -> List[Dict[str, Any]]:
        return sorted(self.records, key=lambda r: (r["logger"], r["event"] or "", r["message"]))


def _even(x: float) -> int:
    n = int(np.ceil(x))
    return n + (n % 2)


def _label(vector: Sequence[float]) -> str:
    return "(" + ",".join(f"{v:g}" for v in vector) + ")"


def _slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Exponent of a power law y ~ x^p by a log-log line fit."""
    floor = np.finfo(float).tiny
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.maximum(np.abs(y), floor)), 1)[0])


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def flat_suite(ctx: RunContext) -> StageOutput:
    """Energy, area and the three Clifford phi-integrals on the uniform grid."""
    tol = ctx.config.tolerances.flat
    n = ctx.config.resolution or 64
    grid = build_clifford_torus(n, n)
    forms = fundamental_forms(grid, EuclideanMetric())

    # dsigma = (sqrt2 + cos phi) dphi dtheta, so this isolates the phi-integral
    weight = 1.0 / (2.0 * np.pi * (SQRT2 + np.cos(grid.phi)) ** 2)
    pi = np.pi
    items = [
        ("flat.willmore_energy", willmore_energy(forms), CLIFFORD_ENERGY),
        ("flat.area", area(forms), CLIFFORD_AREA),
        ("flat.integral_inverse", integrate(weight, forms), 2.0 * pi),
        ("flat.integral_cos", integrate(np.cos(grid.phi) * weight, forms), 2.0 * pi - 2.0 * SQRT2 * pi),
        ("flat.integral_cos2", integrate(np.cos(grid.phi) ** 2 * weight, forms), 4.0 * pi - 2.0 * SQRT2 * pi),
    ]
    checks = [check_value(name, value, target, tol) for name, value, target in items]
    table = pd.DataFrame(
        [(c.name, c.value, c.target, c.error) for c in checks], columns=["check", "value", "target", "rel_error"]
    )
    return StageOutput(checks=checks, tables={"flat_invariants": table}, records={"resolution": n})


def conformal_suite(ctx: RunContext) -> StageOutput:
    """Euclidean W of randomly inverted tori and of family members at fixed |omega|."""
    tol = ctx.config.tolerances.conformal
    cfg = numerics().grid
    base_n = ctx.config.resolution or 96
    coarse = build_clifford_torus(64, 64)
    specs = random_inversions(ctx.rng(), ctx.config.samples)

    def inverted(spec) -> tuple[int, float]:
        ratio = distortion_ratio(spec, coarse)
        n = min(cfg.max_resolution, _even(max(base_n, cfg.distortion_base * np.sqrt(ratio))))
        grid = invert_grid(spec, build_clifford_torus(n, n))
        return n, willmore_energy(fundamental_forms(grid, EuclideanMetric()))

    def family(modulus: float) -> tuple[int, float]:
        grid, report = family_surface(MobiusParam(omega=(modulus, 0.0)), ctx.config.resolution)
        return report.n_phi, willmore_energy(fundamental_forms(grid, EuclideanMetric()))

    rows, checks = [], []
    for i, (spec, (n, energy)) in enumerate(zip(specs, ctx.map(inverted, specs))):
        checks.append(check_value(f"conformal.inversion[{i}]", energy, CLIFFORD_ENERGY, tol))
        rows.append(("inversion", *spec.center, spec.radius, np.nan, n, energy))
    for modulus, (n, energy) in zip(FAMILY_MODULI, ctx.map(family, FAMILY_MODULI)):
        checks.append(check_value(f"conformal.family[|omega|={modulus:g}]", energy, CLIFFORD_ENERGY, tol))
        rows.append(("family", np.nan, np.nan, np.nan, np.nan, modulus, n, energy))

    table = pd.DataFrame(
        rows, columns=["kind", "center_x", "center_y", "center_z", "radius", "modulus", "resolution", "energy"]
    )
    table["rel_error"] = (table["energy"] - CLIFFORD_ENERGY).abs() / CLIFFORD_ENERGY
    return StageOutput(checks=checks, tables={"conformal": table})


def oracle_suite(ctx: RunContext) -> StageOutput:
    """Quadrature of the three dW/dt step integrals against their closed forms."""
    tol = ctx.config.tolerances.oracle
    n = ctx.config.resolution or 64
    rng = ctx.rng()
    samples = []
    for _ in range(ctx.config.oracle_samples):
        a = rng.normal(size=(3, 3))
        q = rng.normal(size=4)
        samples.append((CurvatureData.from_ricci(0.5 * (a + a.T)), rotation_matrix(q / np.linalg.norm(q))))

    def compare(sample):
        curv, rotation = sample
        return wdot_quadrature_steps(curv, rotation, resolution=n), wdot_closed_form_steps(curv, rotation)

    rows = []
    for i, (quad, closed) in enumerate(ctx.map(compare, samples)):
        for part in ("normal", "divergence", "trace", "total"):
            rows.append((i, part, getattr(quad, part), getattr(closed, part)))
    table = pd.DataFrame(rows, columns=["sample", "part", "quadrature", "closed_form"])
    table["abs_error"] = (table["quadrature"] - table["closed_form"]).abs()

    checks = []
    for part, errors in table.groupby("part", sort=False)["abs_error"]:
        worst = float(errors.max())
        checks.append(check_value(f"oracle.{part}", worst, 0.0, tol, relative=False))
    return StageOutput(checks=checks, tables={"wdot_oracle": table})


def mobius_suite(ctx: RunContext) -> StageOutput:
    """Area-preserving offsets: monotonicity, the large-eta bound and the small-eta limit."""
    tol = ctx.config.tolerances.limit_ratio
    etas = ctx.config.eta_list
    xi = ctx.map(area_preserving_offset, etas)
    xi_tilde = ctx.map(small_radius_offset, etas)

    table = pd.DataFrame({"eta": etas, "xi": xi, "xi_tilde": xi_tilde})
    table["xi_over_eta"] = table["xi"] / table["eta"]
    table["bound"] = (table["xi_over_eta"] - 1.0).abs() * table["eta"] ** 2
    table["limit_ratio"] = table["eta"] ** 2 / table["xi_tilde"]
    table["limit_rel_error"] = (table["limit_ratio"] - SMALL_RADIUS_LIMIT).abs() / SMALL_RADIUS_LIMIT

    checks = []
    if len(etas) > 1:
        checks.append(check_flag("mobius.xi_increasing", bool(np.all(np.diff(xi) > 0.0))))
    large = table[table["eta"] >= LARGE_ETA]["bound"].to_numpy()
    if large.size > 1:
        checks.append(
            check_flag(
                "mobius.large_eta_bound",
                bool(np.all(np.isfinite(large)) and large.max() <= 2.0 * large[0] + 1e-12),
                detail=f"|xi/eta - 1| eta^2 = {large.tolist()}",
            )
        )
    small = table[table["eta"] <= SMALL_ETA]
    if len(small):
        row = small.iloc[-1]
        checks.append(
            check_value(
                f"mobius.limit_ratio[eta={row['eta']:g}]", float(row["limit_ratio"]), SMALL_RADIUS_LIMIT, tol
            )
        )
    return StageOutput(checks=checks, tables={"mobius_offsets": table})


def spectrum_suite(ctx: RunContext) -> StageOutput:
    """Near-kernel count, gap ratio and Jacobi field residuals at each omega."""
    tol = ctx.config.tolerances
    checks, spectrum_rows, residual_rows, summaries = [], [], [], {}
    for omega in ctx.config.omega_grid:
        param = MobiusParam(omega=tuple(omega))
        tag = _label(omega)
        report = near_kernel(assemble_flat_operator(param, truncation=ctx.config.truncation))
        summaries[tag] = report.summary()
        checks.append(
            check_value(f"spectrum.kernel_count[omega={tag}]", report.near_kernel_count, KERNEL_DIMENSION, 0.0)
        )
        checks.append(check_flag(f"spectrum.gap_ratio[omega={tag}]", report.gap_ratio >= tol.gap_ratio,
                                 detail=f"gap ratio {report.gap_ratio:.3g}"))
        smallest = np.sort(np.abs(report.eigenvalues))[:16]
        ordered = report.eigenvalues[np.argsort(np.abs(report.eigenvalues))][:16]
        spectrum_rows += [(*omega, k, float(ordered[k]), float(smallest[k])) for k in range(len(smallest))]

        residuals = jacobi_residuals(param, resolution=ctx.config.resolution or JACOBI_RESOLUTION)
        residual_rows += [(*omega, label, value, label in DERIVED_LABELS) for label, value in residuals.items()]
        checks.append(
            check_value(f"spectrum.jacobi_residual[omega={tag}]", max(residuals.values()), 0.0,
                        tol.jacobi_residual, relative=False)
        )

    tables = {
        "spectrum": pd.DataFrame(spectrum_rows, columns=["omega_x", "omega_y", "rank", "eigenvalue", "magnitude"]),
        "jacobi_residuals": pd.DataFrame(
            residual_rows, columns=["omega_x", "omega_y", "field", "residual", "finite_difference"]
        ),
    }
    return StageOutput(checks=checks, tables=tables, records={"spectra": summaries})


def corrector_suite(ctx: RunContext) -> StageOutput:
    """Scaling of the corrector and of its energy change with eps, and the side constraints."""
    tol = ctx.config.tolerances
    model = ctx.model
    if isinstance(model, EuclideanMetric):
        model = create_metric(CORRECTOR_MODEL)
    P = np.asarray(ctx.config.points[0], dtype=float)
    eps_list = ctx.config.eps_list

    def solve(eps: float):
        return corrector_solve(
            model, eps, P, MobiusParam(), truncation=ctx.config.truncation, mode=ctx.config.placement
        )

    results = ctx.map(solve, eps_list)
    rows = []
    for eps, res in zip(eps_list, results):
        rows.append(
            {
                "epsilon": eps,
                "phi_sup": res.phi_sup,
                "energy": res.energy,
                "energy_uncorrected": res.energy_uncorrected,
                "energy_gap": abs(res.energy - res.energy_uncorrected),
                "area_error": res.area_error,
                "orthogonality_max": float(np.abs(res.orthogonality).max()),
                "iterations": res.iterations,
                "jacobian_refreshes": res.jacobian_refreshes,
                **{f"beta_{k}": float(b) for k, b in enumerate(res.beta)},
            }
        )
    table = pd.DataFrame(rows)
    phi_slope = _slope(table["epsilon"], table["phi_sup"])
    gap_slope = _slope(table["epsilon"], table["energy_gap"])
    constraint = float(max(table["area_error"].abs().max(), table["orthogonality_max"].max()))
    checks = [
        check_value("corrector.phi_exponent", phi_slope, 2.0, tol.phi_exponent, relative=False),
        check_value("corrector.energy_exponent", gap_slope, 4.0, tol.energy_exponent, relative=False),
        check_value("corrector.constraints", constraint, 0.0, tol.corrector, relative=False),
    ]
    return StageOutput(checks=checks, tables={"corrector": table}, records={"model": repr(model)})


SUITES: Dict[Suite, Callable[[RunContext], StageOutput]] = {
    Suite.FLAT: flat_suite,
    Suite.CONFORMAL: conformal_suite,
    Suite.ORACLE: oracle_suite,
    Suite.MOBIUS: mobius_suite,
    Suite.SPECTRUM: spectrum_suite,
    Suite.CORRECTOR: corrector_suite,
}


# ---------------------------------------------------------------------------
# experiment commands
# ---------------------------------------------------------------------------


def _fit_row(fit, P, axis) -> Dict[str, Any]:
    return {
        "kind": fit.kind,
        "P_x": P[0],
        "P_y": P[1],
        "P_z": P[2],
        "axis_x": axis[0],
        "axis_y": axis[1],
        "axis_z": axis[2],
        "c0": fit.c0,
        "c_lead": fit.c_lead,
        "c_lead_plain": fit.c_lead_plain,
        "target": fit.target,
        "rel_error": fit.rel_error,
        "residual_norm": fit.residual_norm,
        "flagged": fit.flagged,
        "monotone": fit.monotone,
    }


def expand_stage(ctx: RunContext) -> StageOutput:
    """Symmetric, sphere and degenerate expansion fits at every configured point and axis."""
    cfg = ctx.config
    tol = cfg.tolerances
    ez = (0.0, 0.0, 1.0)
    tasks = []
    for P in cfg.points:
        if "symmetric" in cfg.expansions:
            tasks += [("symmetric", P, axis) for axis in cfg.axes]
        if "sphere" in cfg.expansions:
            tasks.append(("sphere", P, ez))
        if "degenerate" in cfg.expansions:
            tasks.append(("degenerate", P, ez))

    def fit(task):
        kind, P, axis = task
        if kind == "symmetric":
            return symmetric_expansion_fit(
                ctx.model, P, tuple(axis_quaternion(axis)), cfg.eps_list, mode=cfg.placement, resolution=cfg.resolution
            )
        if kind == "sphere":
            return sphere_expansion_fit(ctx.model, P, cfg.sphere_radii, direction=axis)
        return degenerate_expansion_fit(ctx.model, P, omega_moduli=cfg.omega_moduli, epsilon=cfg.epsilon,
                                        mode=cfg.placement)

    thresholds = {"symmetric": tol.symmetric, "sphere": tol.sphere, "degenerate": tol.degenerate}
    rows, checks = [], []
    for (kind, P, axis), result in zip(tasks, ctx.map(fit, tasks)):
        rows.append(_fit_row(result, P, axis))
        name = f"expand.{kind}[P={_label(P)},axis={_label(axis)}]"
        checks.append(check_value(name, result.c_lead, result.target, thresholds[kind]))
        if kind == "degenerate" and len(result.abscissae) > 1:
            checks.append(check_flag(f"{name}.monotone", bool(result.monotone)))
    return StageOutput(checks=checks, tables={"expansions": pd.DataFrame(rows)})


def _extremize_rows(results) -> pd.DataFrame:
    rows = []
    for res in results:
        p = res.point
        rows.append(
            {
                "mode": res.mode,
                "epsilon": res.epsilon,
                "P_x": p.P[0],
                "P_y": p.P[1],
                "P_z": p.P[2],
                "axis_x": p.axis[0],
                "axis_y": p.axis[1],
                "axis_z": p.axis[2],
                "omega_x": p.omega[0],
                "omega_y": p.omega[1],
                "energy": p.energy,
                "boundary_extreme": res.boundary_extreme,
                "margin": res.margin,
                "interior": res.interior,
                "evaluations": res.evaluations,
            }
        )
    return pd.DataFrame(rows)


def landscape_stage(ctx: RunContext) -> StageOutput:
    """Energy table over points x axes x omegas plus the curvature conditions at the points."""
    cfg = ctx.config
    table = landscape(
        ctx.model,
        cfg.epsilon,
        cfg.points,
        [tuple(axis_quaternion(axis)) for axis in cfg.axes],
        cfg.omega_grid,
        corrected=cfg.corrected,
        mode=cfg.placement,
        resolution=cfg.resolution,
        workers=ctx.workers,
    )
    conditions = condition_check(ctx.model, cfg.points)
    return StageOutput(
        tables={"landscape": table.to_frame()},
        records={"conditions": conditions.model_dump(mode="json")},
    )


def extremize_stage(ctx: RunContext) -> StageOutput:
    cfg = ctx.config
    results = [
        extremize(ctx.model, cfg.epsilon, mode=mode, r_boundary=cfg.r_boundary, P0=cfg.points[0],
                  resolution=cfg.resolution)
        for mode in cfg.extremize
    ]
    checks = [
        check_flag(f"extremize.{res.mode}.interior", res.interior, detail=f"margin {res.margin:.3e}")
        for res in results
    ]
    return StageOutput(checks=checks, tables={"extremize": _extremize_rows(results)})


def schwarzschild_stage(ctx: RunContext) -> StageOutput:
    """Axis sign flip of the eps^2 coefficient, asymptotic flatness and an interior extremum."""
    cfg = ctx.config
    P = np.asarray(cfg.points[0], dtype=float)
    if not np.any(P):
        P = np.asarray(SCHWARZSCHILD_POINT)
    signs = schwarzschild_axis_signs(ctx.model, P, cfg.eps_list, mode=cfg.placement)
    ale = ale_check(ctx.model, seed=cfg.seed)
    modes = cfg.extremize or ["min"]
    results = [
        extremize(ctx.model, cfg.epsilon, mode=mode, r_boundary=cfg.r_boundary, P0=P, resolution=cfg.resolution)
        for mode in modes
    ]

    axes = pd.DataFrame(
        [
            {"axis": label, "c0": fit.c0, "c_lead": fit.c_lead, "target": fit.target, "rel_error": fit.rel_error}
            for label, fit in (("radial", signs.radial), ("tangential", signs.tangential))
        ]
    )
    checks = [
        check_flag("schwarzschild.sign_flip", signs.sign_flip,
                   detail=f"radial {signs.radial.c_lead:.6g}, tangential {signs.tangential.c_lead:.6g}"),
        check_flag("schwarzschild.asymptotically_flat", ale.asymptotically_flat,
                   detail=f"decay exponent {ale.decay_exponent:.3f}"),
    ]
    checks += [
        check_flag(f"schwarzschild.{res.mode}.interior", res.interior, detail=f"margin {res.margin:.3e}")
        for res in results
    ]
    tables = {
        "schwarzschild_axes": axes,
        "ale": pd.DataFrame({"radius": ale.radii, "deviation": ale.deviations}),
        "extremize": _extremize_rows(results),
    }
    return StageOutput(checks=checks, tables=tables, records={"ale": ale.model_dump(mode="json")})


Stage = tuple[str, Callable[[RunContext], StageOutput]]


def stages_for(config: ExperimentConfig) -> List[Stage]:
    command = config.command
    if command is Command.VERIFY:
        return [(f"verify.{suite.value}", SUITES[suite]) for suite in config.suite.expand()]
    if command is Command.EXPAND:
        return [("expand", expand_stage)]
    if command is Command.LANDSCAPE:
        stages: List[Stage] = [("landscape", landscape_stage)]
        if config.extremize:
            stages.append(("extremize", extremize_stage))
        return stages
    if command is Command.SPECTRUM:
        return [("spectrum", spectrum_suite)]
    if command is Command.MOBIUS:
        return [("mobius", mobius_suite)]
    return [("schwarzschild", schwarzschild_stage)]


def prepare(config: ExperimentConfig) -> RunContext:
    """
    Build the ambient model and reject command/model combinations before any work.

    Raises:
        ValueError: (DomainError included) for configurations that cannot run.
    """
    metric_config = config.metric_config()
    if config.command is Command.SCHWARZSCHILD and metric_config.kind is not MetricKind.SCHWARZSCHILD:
        raise ValueError(f"schwarzschild needs a schwarzschild model, got kind {metric_config.kind.value}")
    return RunContext(config=config, model=create_metric(metric_config))


def run(config: ExperimentConfig, out_dir: Path, context: Optional[RunContext] = None) -> int:
    """
    Run every stage of the command, write CSVs and summary.json, return the exit code.

    A stage that raises a package error counts as one failed check named after it.
    """
    ctx = context or prepare(config)
    writer = ReportWriter(out_dir, config)
    collector = WarningCollector()
    checks: List[CheckResult] = []
    records: Dict[str, Any] = {}

    with collector.attached():
        for name, stage in stages_for(config):
            logger.info(f"Running {name}", extra={"event": "stage_start", "stage": name})
            try:
                output = stage(ctx)
            except WillmoreToriError as e:
                logger.error(
                    f"Stage {name} failed: {e}", exc_info=True, extra={"event": "stage_failed", "stage": name}
                )
                checks.append(check_flag(name, False, detail=f"{type(e).__name__}: {e}"))
                records[name] = {"error": str(e), "diagnostics": getattr(e, "diagnostics", {})}
                continue
            checks.extend(output.checks)
            for table_name, frame in output.tables.items():
                writer.write_csv(table_name, frame)
            if output.records:
                records[name] = output.records

    failed = [c.name for c in checks if not c.passed]
    for name in failed:
        logger.error(f"Check failed: {name}", extra={"event": "check_failed", "check": name})
    writer.write_summary(
        {
            "command": config.command.value,
            "passed": not failed,
            "failed": failed,
            "checks": [c.model_dump(mode="json") for c in checks],
            "warnings": collector.sorted_records(),
            "records": records,
        }
    )
    logger.info(
        f"{config.command.value}: {len(checks) - len(failed)}/{len(checks)} checks passed",
        extra={"event": "run_finished", "passed": not failed},
    )
    return 0 if not failed else 1
