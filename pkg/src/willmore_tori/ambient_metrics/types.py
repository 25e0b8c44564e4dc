from enum import Enum
from typing import Any, Dict, Type


class MetricKind(Enum):
    """Supported ambient metric models."""

    EUCLIDEAN = "euclidean"
    SYNTHETIC = "synthetic"
    NORMAL_EXPANSION = "normal_expansion"
    SCHWARZSCHILD = "schwarzschild"
    CONSTANT_CURVATURE = "constant_curvature"
    CURVATURE_FIELD = "curvature_field"

    @classmethod
    def get_all_kinds(cls) -> list[str]:
        """Get all available metric kind names."""
        return [kind.value for kind in cls]

    @classmethod
    def from_string(cls, kind_str: str) -> "MetricKind":
        """Create kind enum from string, with validation."""
        for kind in cls:
            if kind.value == kind_str:
                return kind
        raise ValueError(f"Unknown metric kind: {kind_str}. Available: {cls.get_all_kinds()}")


# Registry for metric configuration classes, filled by ambient_metrics.config
METRIC_CONFIG_REGISTRY: Dict[MetricKind, Type[Any]] = {}
