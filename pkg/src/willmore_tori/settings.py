"""Global numerical and logging settings loaded from config.yaml."""

from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, field_validator


class GridSettings(BaseModel):
    """Resolution rules for surface grids."""

    base_resolution: int = Field(default=64, ge=8, description="Default nodes per direction")
    distortion_base: int = Field(
        default=16, ge=8, description="Base multiplied by the conformal distortion ratio"
    )
    min_graded_resolution: int = Field(
        default=64, ge=8, description="Floor for graded grids of inverted tori"
    )
    max_resolution: int = Field(default=512, ge=8, description="Resolution cap")

    class Config:
        frozen = True
        extra = "forbid"


class MobiusSettings(BaseModel):
    """Inversion family, offsets and Jacobi field parameters."""

    chart_exponent: float = Field(
        default=1.0 / 3.0, gt=0.0, description="p in eta(|w|) = ((1 - |w|^2) / 2)^p / |w|"
    )
    chart_switch: float = Field(
        default=0.05, gt=0.0, lt=1.0, description="|w| below which cartesian Jacobi fields are used"
    )
    fd_step: float = Field(default=1e-4, gt=0.0, description="Centered difference step in |w|")
    richardson_tol: float = Field(default=1e-6, gt=0.0)
    offset_xtol: float = Field(default=1e-14, gt=0.0, description="Brent absolute tolerance on xi")
    quadrature_rtol: float = Field(default=1e-10, gt=0.0)
    quadrature_min_nodes: int = Field(default=64, ge=8)
    quadrature_max_nodes: int = Field(default=65536, ge=8)

    class Config:
        frozen = True
        extra = "forbid"


class GeodesicSettings(BaseModel):
    """Fixed-step RK4 exponential map."""

    tol: float = Field(default=1e-10, gt=0.0)
    min_steps: int = Field(default=16, ge=1)
    max_steps: int = Field(default=4096, ge=1)

    class Config:
        frozen = True
        extra = "forbid"


class SpectralSettings(BaseModel):
    """Galerkin assembly of the flat Jacobi operator."""

    truncation: int = Field(default=20, ge=1, description="Max Fourier degree per variable")
    quadrature_resolution: int = Field(default=96, ge=8)
    kernel_window: int = Field(default=16, ge=2, description="Smallest |eigenvalues| scanned for a gap")

    @field_validator("quadrature_resolution")
    def validate_even(cls, v):
        if v % 2:
            raise ValueError("quadrature_resolution must be even")
        return v

    class Config:
        frozen = True
        extra = "forbid"


class CorrectorSettings(BaseModel):
    """Bordered Newton solve for the normal-graph corrector."""

    truncation: int = Field(default=8, ge=1)
    resolution: int = Field(default=64, ge=8)
    tol: float = Field(default=1e-9, gt=0.0)
    max_iter: int = Field(default=30, ge=1)
    max_halvings: int = Field(default=8, ge=0)

    class Config:
        frozen = True
        extra = "forbid"


class ExpansionSettings(BaseModel):
    """Abscissae for the energy expansion fits."""

    eps_list: List[float] = Field(default_factory=lambda: [0.025, 0.05, 0.075, 0.1])
    remainder_power: Optional[int] = Field(
        default=3,
        description="Extra power absorbing the remainder; bumped to the next even power when W is even in the scale",
    )
    sphere_radii: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.15, 0.2])

    class Config:
        frozen = True
        extra = "forbid"


class NumericsSettings(BaseModel):
    """All numerical defaults."""

    grid: GridSettings = Field(default_factory=GridSettings)
    mobius: MobiusSettings = Field(default_factory=MobiusSettings)
    geodesic: GeodesicSettings = Field(default_factory=GeodesicSettings)
    spectral: SpectralSettings = Field(default_factory=SpectralSettings)
    corrector: CorrectorSettings = Field(default_factory=CorrectorSettings)
    expansion: ExpansionSettings = Field(default_factory=ExpansionSettings)
    workers: int = Field(default=4, ge=1, description="Bounded worker pool size")

    class Config:
        frozen = True
        extra = "forbid"


class LoggingSettings(BaseModel):
    """Logging levels and rotation."""

    level: str = Field(default="INFO")
    console_level: str = Field(default="INFO")
    file_level: str = Field(default="DEBUG")
    max_file_size: int = Field(default=10485760, gt=0)
    backup_count: int = Field(default=5, ge=0)
    loggers: Dict[str, str] = Field(default_factory=dict)

    class Config:
        frozen = True
        extra = "forbid"


class Settings(BaseModel):
    """Global settings."""

    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    @classmethod
    def from_config_file(cls, config_path: Optional[Path] = None) -> "Settings":
        """Load settings from config.yaml, falling back to built-in defaults."""
        if config_path is None:
            project_root = Path(__file__).resolve().parent.parent.parent
            config_path = project_root / "config.yaml"

        config_data: Dict[str, Any] = {}
        if config_path.exists():
            with open(config_path, "r") as f:
                config_data = yaml.safe_load(f) or {}

        return cls._parse_config(config_data)

    @classmethod
    def _parse_config(cls, config_data: Dict[str, Any]) -> "Settings":
        """Parse configuration data into Settings object."""
        return cls(
            numerics=NumericsSettings(**(config_data.get("numerics") or {})),
            logging=LoggingSettings(**(config_data.get("logging") or {})),
        )

    class Config:
        extra = "forbid"


# Global settings instance
_settings: Optional[Settings] = None


def get_settings(config_path: Optional[Path] = None) -> Settings:
    """Get global settings instance."""
    global _settings
    if _settings is None or config_path is not None:
        _settings = Settings.from_config_file(config_path)
    return _settings


def reload_settings(config_path: Optional[Path] = None) -> Settings:
    """Reload settings from configuration file."""
    global _settings
    _settings = None
    return get_settings(config_path)


def numerics() -> NumericsSettings:
    """Shortcut for the numerical defaults."""
    return get_settings().numerics
