import pytest
from pydantic import ValidationError

from willmore_tori.ambient_metrics import (
    CurvatureField,
    EuclideanMetric,
    MetricKind,
    NormalExpansionMetric,
    ScaledMetric,
    SchwarzschildMetric,
    create_metric,
    get_metric_factory,
)
from willmore_tori.ambient_metrics.config import SchwarzschildConfig, parse_metric_config
from willmore_tori.ambient_metrics.factory import MetricFactory


def test_factory_is_singleton():
    assert MetricFactory() is MetricFactory()
    assert get_metric_factory() is get_metric_factory()


def test_supported_kinds_cover_every_kind():
    assert set(get_metric_factory().get_supported_kinds()) == set(MetricKind)


def test_create_schwarzschild():
    model = create_metric({"kind": "schwarzschild", "m": 2.0})
    assert isinstance(model, SchwarzschildMetric)
    assert model.mass == 2.0
    assert model.horizon_radius == 1.0


def test_models_are_cached_per_spec():
    a = create_metric({"kind": "synthetic", "ric": [1.0, 2.0, 3.0]})
    b = create_metric({"kind": "synthetic", "ric": [1.0, 2.0, 3.0]})
    c = create_metric({"kind": "synthetic", "ric": [1.0, 2.0, 4.0]})
    assert a is b
    assert a is not c
    assert isinstance(a, NormalExpansionMetric)


def test_validated_config_accepted():
    model = create_metric(SchwarzschildConfig(m=0.5))
    assert isinstance(model, SchwarzschildMetric)
    assert model.mass == 0.5


def test_epsilon_scale_wraps_model():
    model = create_metric({"kind": "euclidean", "epsilon_scale": 0.1})
    assert isinstance(model, ScaledMetric)
    assert isinstance(model.base, EuclideanMetric)
    assert model.epsilon == 0.1


def test_curvature_field_kind():
    field = create_metric({"kind": "curvature_field", "base": [1.0, 1.0, 1.0], "amplitude": [0.5, 0.0, 0.0]})
    assert isinstance(field, CurvatureField)


def test_unknown_kind_lists_available():
    with pytest.raises(ValueError, match="Available"):
        create_metric({"kind": "kerr"})


def test_missing_kind():
    with pytest.raises(ValueError, match="kind"):
        parse_metric_config({"m": 1.0})


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "synthetic", "ric": [1.0, 2.0]},
        {"kind": "schwarzschild", "m": -1.0},
        {"kind": "schwarzschild", "m": 1.0, "charge": 0.1},
        {"kind": "normal_expansion", "ricci": [[1, 2, 0], [0, 1, 0], [0, 0, 1]]},
    ],
)
def test_invalid_parameters(spec):
    with pytest.raises(ValidationError):
        parse_metric_config(spec)


def test_kind_from_string():
    assert MetricKind.from_string("constant_curvature") is MetricKind.CONSTANT_CURVATURE
    with pytest.raises(ValueError):
        MetricKind.from_string("hyperbolic")
