"""Metric model configurations, one pydantic class per MetricKind."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Type, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from willmore_tori.ambient_metrics.curvature import CurvatureData, synthetic_curvature
from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import (
    ConstantCurvatureMetric,
    EuclideanMetric,
    MetricModel,
    NormalExpansionMetric,
    ScaledMetric,
    SchwarzschildMetric,
)
from willmore_tori.ambient_metrics.rotations import rotation_matrix
from willmore_tori.ambient_metrics.types import METRIC_CONFIG_REGISTRY, MetricKind


class BaseMetricConfig(BaseModel, ABC):
    """Base configuration class for all metric models."""

    epsilon_scale: float = Field(default=1.0, gt=0.0, description="Rescaling g_eps = g / eps^2")

    @abstractmethod
    def build_unscaled(self) -> Union[MetricModel, CurvatureField]:
        """Build the model at epsilon_scale = 1."""

    def build(self) -> Union[MetricModel, CurvatureField]:
        model = self.build_unscaled()
        if self.epsilon_scale != 1.0 and isinstance(model, MetricModel):
            return ScaledMetric(model, self.epsilon_scale)
        return model

    class Config:
        frozen = True
        extra = "forbid"


class EuclideanConfig(BaseMetricConfig):
    """Flat space."""

    kind: MetricKind = Field(default=MetricKind.EUCLIDEAN)

    def build_unscaled(self) -> MetricModel:
        return EuclideanMetric()


class SyntheticConfig(BaseMetricConfig):
    """Normal-coordinate expansion from prescribed Ricci eigenvalues."""

    kind: MetricKind = Field(default=MetricKind.SYNTHETIC)
    ric: List[float] = Field(..., description="Ricci eigenvalues (3 reals)")
    basis_rotation: Optional[List[float]] = Field(
        default=None, description="Unit quaternion (x, y, z, w) rotating the eigenbasis"
    )
    rho0: float = Field(default=10.0, gt=0.0, description="Validity radius")

    @field_validator("ric")
    def validate_ric(cls, v):
        if len(v) != 3:
            raise ValueError("ric must have exactly 3 entries")
        return v

    def curvature(self) -> CurvatureData:
        rotation = (
            rotation_matrix(self.basis_rotation) if self.basis_rotation else None
        )
        return synthetic_curvature(self.ric, rotation)

    def build_unscaled(self) -> MetricModel:
        return NormalExpansionMetric(self.curvature(), self.rho0)


class NormalExpansionConfig(BaseMetricConfig):
    """Normal-coordinate expansion from a full symmetric Ricci matrix."""

    kind: MetricKind = Field(default=MetricKind.NORMAL_EXPANSION)
    ricci: List[List[float]] = Field(..., description="Symmetric 3x3 Ricci tensor")
    rho0: float = Field(default=10.0, gt=0.0)

    @field_validator("ricci")
    def validate_ricci(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.shape != (3, 3):
            raise ValueError("ricci must be a 3x3 matrix")
        if not np.allclose(arr, arr.T):
            raise ValueError("ricci must be symmetric")
        return v

    def build_unscaled(self) -> MetricModel:
        return NormalExpansionMetric(CurvatureData.from_ricci(np.asarray(self.ricci)), self.rho0)


class SchwarzschildConfig(BaseMetricConfig):
    """Spatial Schwarzschild metric."""

    kind: MetricKind = Field(default=MetricKind.SCHWARZSCHILD)
    m: float = Field(..., gt=0.0, description="Mass parameter")

    def build_unscaled(self) -> MetricModel:
        return SchwarzschildMetric(self.m)


class ConstantCurvatureConfig(BaseMetricConfig):
    """Conformally flat space form."""

    kind: MetricKind = Field(default=MetricKind.CONSTANT_CURVATURE)
    K: float = Field(..., description="Sectional curvature")

    def build_unscaled(self) -> MetricModel:
        return ConstantCurvatureMetric(self.K)


class CurvatureFieldConfig(BaseMetricConfig):
    """Periodic synthetic Ricci field (compact-manifold stand-in)."""

    kind: MetricKind = Field(default=MetricKind.CURVATURE_FIELD)
    base: List[float] = Field(..., description="Mean Ricci eigenvalues")
    amplitude: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    period: float = Field(default=2.0 * np.pi, gt=0.0)
    rho0: float = Field(default=10.0, gt=0.0)

    @field_validator("base", "amplitude")
    def validate_three(cls, v):
        if len(v) != 3:
            raise ValueError("expected exactly 3 entries")
        return v

    def build_unscaled(self) -> CurvatureField:
        return CurvatureField(
            base=np.asarray(self.base),
            amplitude=np.asarray(self.amplitude),
            period=self.period,
            rho0=self.rho0,
        )


METRIC_CONFIG_REGISTRY[MetricKind.EUCLIDEAN] = EuclideanConfig
METRIC_CONFIG_REGISTRY[MetricKind.SYNTHETIC] = SyntheticConfig
METRIC_CONFIG_REGISTRY[MetricKind.NORMAL_EXPANSION] = NormalExpansionConfig
METRIC_CONFIG_REGISTRY[MetricKind.SCHWARZSCHILD] = SchwarzschildConfig
METRIC_CONFIG_REGISTRY[MetricKind.CONSTANT_CURVATURE] = ConstantCurvatureConfig
METRIC_CONFIG_REGISTRY[MetricKind.CURVATURE_FIELD] = CurvatureFieldConfig

MetricConfig = Union[
    EuclideanConfig,
    SyntheticConfig,
    NormalExpansionConfig,
    SchwarzschildConfig,
    ConstantCurvatureConfig,
    CurvatureFieldConfig,
]


def get_metric_config_class(kind: MetricKind) -> Type[BaseMetricConfig]:
    """Get configuration class for a metric kind."""
    if kind not in METRIC_CONFIG_REGISTRY:
        raise ValueError(f"No configuration class registered for metric kind: {kind}")
    return METRIC_CONFIG_REGISTRY[kind]


def parse_metric_config(spec: Dict[str, Any]) -> BaseMetricConfig:
    """Validate a JSON-style model description such as {"kind": "schwarzschild", "m": 2.0}."""
    if "kind" not in spec:
        raise ValueError(f"Metric spec needs a 'kind'. Available: {MetricKind.get_all_kinds()}")
    kind = MetricKind.from_string(spec["kind"])
    data = {k: v for k, v in spec.items() if k != "kind"}
    return get_metric_config_class(kind)(**data)
