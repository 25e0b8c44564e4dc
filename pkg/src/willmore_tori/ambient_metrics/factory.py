"""Metric factory building and caching ambient models from JSON-style specs."""

import json
from threading import Lock
from typing import Any, Dict, Optional, Union

from willmore_tori.ambient_metrics.config import BaseMetricConfig, parse_metric_config
from willmore_tori.ambient_metrics.fields import CurvatureField
from willmore_tori.ambient_metrics.models import MetricModel
from willmore_tori.ambient_metrics.types import METRIC_CONFIG_REGISTRY, MetricKind
from willmore_tori.logging_config import get_logger

logger = get_logger(__name__)

AmbientModel = Union[MetricModel, CurvatureField]


class MetricFactory:
    """Singleton factory for ambient metric models."""

    _instance: Optional["MetricFactory"] = None
    _lock = Lock()

    def __new__(cls) -> "MetricFactory":
        """Ensure singleton pattern."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """Initialize the factory if not already done."""
        if not getattr(self, "_initialized", False):
            self._models: Dict[str, AmbientModel] = {}
            self._cache_lock = Lock()
            self._initialized = True

    def create(self, spec: Union[Dict[str, Any], BaseMetricConfig]) -> AmbientModel:
        """
        Build (or fetch the cached) model for a spec.

        Args:
            spec: Either a validated config or a dict such as {"kind": "schwarzschild", "m": 2.0}.

        Returns:
            A MetricModel, or a CurvatureField for kind "curvature_field".

        Raises:
            ValueError: If the kind is unknown or the parameters are invalid.
        """
        config = spec if isinstance(spec, BaseMetricConfig) else parse_metric_config(spec)
        key = self._cache_key(config)
        with self._cache_lock:
            if key not in self._models:
                model = config.build()
                logger.debug(f"Built metric model {model!r}")
                self._models[key] = model
            return self._models[key]

    @staticmethod
    def _cache_key(config: BaseMetricConfig) -> str:
        payload = config.model_dump(mode="json")
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def get_supported_kinds(self) -> list[MetricKind]:
        return list(METRIC_CONFIG_REGISTRY.keys())

    def clear_cache(self) -> None:
        with self._cache_lock:
            self._models.clear()


# Global factory instance
_factory: Optional[MetricFactory] = None


def get_metric_factory() -> MetricFactory:
    """Get global metric factory instance."""
    global _factory
    if _factory is None:
        _factory = MetricFactory()
    return _factory


def create_metric(spec: Union[Dict[str, Any], BaseMetricConfig]) -> AmbientModel:
    """Convenience function building a model through the global factory."""
    return get_metric_factory().create(spec)
