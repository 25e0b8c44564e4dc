import numpy as np
import pytest
from scipy.optimize import brentq

from willmore_tori.ambient_metrics import (
    ConstantCurvatureMetric,
    CurvatureData,
    EuclideanMetric,
    NormalExpansionMetric,
    SchwarzschildMetric,
    default_frame,
    exp_map,
)
from willmore_tori.exceptions import DomainError


def test_euclidean_exp_map_is_translation():
    P = np.array([1.0, -2.0, 0.5])
    v = np.array([[0.1, 0.2, 0.3], [-1.0, 0.0, 2.0]])
    np.testing.assert_allclose(exp_map(EuclideanMetric(), P, v=v), P + v)


def test_normal_expansion_base_point_is_straight():
    model = NormalExpansionMetric(CurvatureData.from_ricci(np.diag([1.0, 2.0, 3.0])))
    v = np.array([0.3, -0.4, 1.2])
    np.testing.assert_allclose(exp_map(model, np.zeros(3), v=v), v)


def test_sphere_radial_geodesic():
    """Radial geodesics of the K = 1 conformal chart reach chart radius 2 tan(s / 2) at length s."""
    model = ConstantCurvatureMetric(1.0)
    s = 0.5
    direction = np.array([0.6, 0.0, 0.8])
    x = exp_map(model, np.zeros(3), v=s * direction)
    np.testing.assert_allclose(x, 2.0 * np.tan(s / 2.0) * direction, atol=1e-8)


def test_frame_is_orthonormal_for_metric():
    model = SchwarzschildMetric(1.0)
    P = np.array([2.0, 1.0, 0.0])
    frame = default_frame(model, P)
    g = model.sample(P).g
    np.testing.assert_allclose(frame.T @ g @ frame, np.eye(3), atol=1e-12)


def test_schwarzschild_geodesic_length_is_preserved():
    """A short geodesic leaves P with unit g-speed; its endpoint lies at roughly that distance."""
    model = SchwarzschildMetric(1.0)
    P = np.array([3.0, 0.0, 0.0])
    frame = default_frame(model, P)
    x = exp_map(model, P, frame, np.array([0.0, 0.01, 0.0]))
    g = model.sample(P).g
    step = x - P
    assert np.sqrt(step @ g @ step) == pytest.approx(0.01, rel=1e-3)


def test_budget_exceeded():
    model = NormalExpansionMetric(CurvatureData.flat(), rho0=10.0)
    with pytest.raises(DomainError):
        exp_map(model, np.zeros(3), v=np.array([6.0, 0.0, 0.0]))


def _radial_distance(r, mass: float = 1.0):
    """Arc length of (1 + m / 2r)^2 dr."""
    return r + mass * np.log(r) - mass**2 / (4.0 * r)


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_schwarzschild_radial_geodesic_length(sign):
    model = SchwarzschildMetric(1.0)
    P = np.array([3.0, 0.0, 0.0])
    x = exp_map(model, P, v=np.array([sign * 0.5, 0.0, 0.0]))
    target = _radial_distance(3.0) + sign * 0.5
    r = brentq(lambda s: _radial_distance(s) - target, 0.6, 10.0, xtol=1e-14)
    np.testing.assert_allclose(x, [r, 0.0, 0.0], atol=1e-8)


def test_schwarzschild_tangential_geodesics_are_mirror_images():
    model = SchwarzschildMetric(1.0)
    P = np.array([3.0, 0.0, 0.0])
    up = exp_map(model, P, v=np.array([0.0, 0.4, 0.0]))
    down = exp_map(model, P, v=np.array([0.0, -0.4, 0.0]))
    np.testing.assert_allclose(down, up * np.array([1.0, -1.0, 1.0]), atol=1e-10)
    assert up[1] > 0.25


def test_schwarzschild_geodesic_retraces_itself():
    model = SchwarzschildMetric(1.0)
    P = np.array([3.0, 0.0, 0.0])
    v = np.array([0.2, 0.5, -0.3])
    h = 1e-3
    x = exp_map(model, P, v=v)
    # coordinate velocity at the endpoint: d/dt exp_P(t v) at t = 1
    velocity = (exp_map(model, P, v=(1.0 + h) * v) - exp_map(model, P, v=(1.0 - h) * v)) / (2.0 * h)
    back = exp_map(model, x, frame=np.eye(3), v=-velocity)
    np.testing.assert_allclose(back, P, atol=1e-5)
