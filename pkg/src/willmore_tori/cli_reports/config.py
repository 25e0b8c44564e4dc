"""Experiment configuration read from a JSON file and overridden by CLI flags."""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from willmore_tori.ambient_metrics.config import BaseMetricConfig, parse_metric_config


class Command(Enum):
    """CLI subcommands."""

    VERIFY = "verify"
    EXPAND = "expand"
    LANDSCAPE = "landscape"
    SPECTRUM = "spectrum"
    MOBIUS = "mobius"
    SCHWARZSCHILD = "schwarzschild"

    @classmethod
    def get_all_commands(cls) -> list[str]:
        return [command.value for command in cls]

    @classmethod
    def from_string(cls, command_str: str) -> "Command":
        for command in cls:
            if command.value == command_str:
                return command
        raise ValueError(f"Unknown command: {command_str}. Available: {cls.get_all_commands()}")


class Suite(Enum):
    """Check suites run by ``verify``."""

    FLAT = "flat"
    CONFORMAL = "conformal"
    ORACLE = "oracle"
    MOBIUS = "mobius"
    SPECTRUM = "spectrum"
    CORRECTOR = "corrector"
    ALL = "all"

    @classmethod
    def get_all_suites(cls) -> list[str]:
        return [suite.value for suite in cls]

    @classmethod
    def from_string(cls, suite_str: str) -> "Suite":
        for suite in cls:
            if suite.value == suite_str:
                return suite
        raise ValueError(f"Unknown suite: {suite_str}. Available: {cls.get_all_suites()}")

    def expand(self) -> list["Suite"]:
        if self is Suite.ALL:
            return [suite for suite in Suite if suite is not Suite.ALL]
        return [self]


class Tolerances(BaseModel):
    """Pass/fail thresholds of the checks."""

    flat: float = Field(default=1e-10, gt=0.0, description="Relative, flat torus invariants")
    conformal: float = Field(default=1e-6, gt=0.0, description="Relative, Euclidean W of inverted tori")
    oracle: float = Field(default=1e-8, gt=0.0, description="Absolute, quadrature vs closed-form dW/dt")
    symmetric: float = Field(default=0.01, gt=0.0, description="Relative, eps^2 coefficient")
    sphere: float = Field(default=0.02, gt=0.0, description="Relative, r^2 coefficient")
    degenerate: float = Field(default=0.10, gt=0.0, description="Relative, degenerate limit coefficient")
    limit_ratio: float = Field(default=0.03, gt=0.0, description="Relative, eta^2 / xi_tilde limit")
    jacobi_residual: float = Field(default=1e-6, gt=0.0, description="Relative L0~ residual of every Jacobi field")
    gap_ratio: float = Field(default=10.0, gt=1.0)
    corrector: float = Field(default=1e-8, gt=0.0, description="Constraint residuals")
    phi_exponent: float = Field(default=0.2, gt=0.0, description="Half-width around exponent 2")
    energy_exponent: float = Field(default=0.5, gt=0.0, description="Half-width around exponent 4")

    class Config:
        frozen = True
        extra = "forbid"


class ExperimentConfig(BaseModel):
    """One CLI run; the canonical JSON of this model is what the config hash covers."""

    command: Command
    model: Dict[str, Any] = Field(default_factory=lambda: {"kind": "euclidean"})
    suite: Suite = Field(default=Suite.ALL)
    eps_list: List[float] = Field(default_factory=lambda: [0.025, 0.05, 0.075, 0.1])
    epsilon: float = Field(default=0.05, gt=0.0, le=0.2, description="Scale of landscape and degenerate runs")
    resolution: Optional[int] = Field(default=None, ge=8)
    truncation: Optional[int] = Field(default=None, ge=1)
    points: List[List[float]] = Field(default_factory=lambda: [[0.0, 0.0, 0.0]])
    axes: List[List[float]] = Field(
        default_factory=lambda: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    omega_grid: List[List[float]] = Field(default_factory=lambda: [[0.0, 0.0], [0.4, 0.0]])
    omega_moduli: List[float] = Field(default_factory=lambda: [0.9, 0.95, 0.99])
    sphere_radii: Optional[List[float]] = None
    eta_list: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.5, 1.0, 8.0, 16.0, 32.0])
    expansions: List[str] = Field(default_factory=lambda: ["symmetric", "sphere"])
    extremize: List[str] = Field(default_factory=list, description="Subset of min, max")
    r_boundary: float = Field(default=0.9, gt=0.0, lt=1.0)
    placement: str = Field(default="exact")
    corrected: bool = False
    tolerances: Tolerances = Field(default_factory=Tolerances)
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=20, ge=1, description="Random inversions in the conformal suite")
    oracle_samples: int = Field(default=25, ge=1, description="Random (curvature, rotation) pairs")
    workers: Optional[int] = Field(default=None, ge=1)
    output_dir: Optional[str] = None

    @field_validator("model")
    def validate_model(cls, v):
        parse_metric_config(v)
        return v

    @field_validator("eps_list")
    def validate_eps(cls, v):
        if not v or min(v) <= 0.0 or max(v) > 0.2:
            raise ValueError("eps_list values must lie in (0, 0.2]")
        return sorted(v)

    @field_validator("points", "axes")
    def validate_triples(cls, v):
        if any(len(p) != 3 for p in v):
            raise ValueError("expected 3 coordinates per entry")
        return v

    @field_validator("omega_grid")
    def validate_omegas(cls, v):
        for w in v:
            if len(w) != 2:
                raise ValueError("omega entries need 2 coordinates")
            if w[0] ** 2 + w[1] ** 2 >= 1.0:
                raise ValueError(f"omega {w} is not in the open unit disk")
        return v

    @field_validator("eta_list")
    def validate_eta(cls, v):
        if not v or min(v) <= 0.0:
            raise ValueError("eta values must be positive")
        return sorted(v)

    @field_validator("expansions")
    def validate_expansions(cls, v):
        unknown = set(v) - {"symmetric", "sphere", "degenerate"}
        if unknown:
            raise ValueError(f"Unknown expansion kinds: {sorted(unknown)}")
        return v

    @field_validator("extremize")
    def validate_extremize(cls, v):
        if set(v) - {"min", "max"}:
            raise ValueError("extremize accepts 'min' and 'max'")
        return v

    @field_validator("placement")
    def validate_placement(cls, v):
        if v not in ("exact", "local"):
            raise ValueError("placement must be 'exact' or 'local'")
        return v

    @model_validator(mode="after")
    def validate_suite_command(self):
        if self.suite is not Suite.ALL and self.command is not Command.VERIFY:
            raise ValueError("suite only applies to the verify command")
        return self

    def metric_config(self) -> BaseMetricConfig:
        return parse_metric_config(self.model)

    class Config:
        frozen = True
        extra = "forbid"


def load_experiment_config(
    command: str,
    config_path: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Read the JSON config (if any), apply non-None flag overrides and validate.

    Raises:
        ValueError: unreadable JSON or a non-object root.
        pydantic.ValidationError: schema violations.
    """
    data: Dict[str, Any] = {}
    if config_path is not None:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError(f"Config root must be a JSON object: {config_path}")
    data["command"] = Command.from_string(command).value
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return ExperimentConfig(**data)
