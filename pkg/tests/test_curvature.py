import numpy as np
import pytest

from willmore_tori.ambient_metrics import (
    ConstantCurvatureMetric,
    CurvatureData,
    CurvatureField,
    EuclideanMetric,
    MetricModel,
    NormalExpansionMetric,
    ScaledMetric,
    SchwarzschildMetric,
    curvature_at,
    h_bounds,
    h_gradient,
    h_tensor,
    riemann_from_ricci,
    synthetic_curvature,
)
from willmore_tori.ambient_metrics.curvature import christoffel_symbols, h_hessian
from willmore_tori.ambient_metrics.rotations import quaternion_from_rotvec, rotation_matrix
from willmore_tori.exceptions import DomainError


def _random_ricci(seed: int) -> np.ndarray:
    a = np.random.default_rng(seed).normal(size=(3, 3))
    return a + a.T


def test_riemann_contracts_to_ricci():
    ric = _random_ricci(0)
    riem = riemann_from_ricci(ric)
    np.testing.assert_allclose(np.einsum("amab->mb", riem), ric, atol=1e-12)


def test_constant_curvature_sectional():
    curv = CurvatureData.from_ricci(2.0 * np.eye(3))
    e = np.eye(3)
    assert curv.sectional(e[0], e[1]) == pytest.approx(1.0)
    assert curv.sectional(e[0] + e[2], e[1]) == pytest.approx(1.0)


def test_sectional_identity():
    """Sc - Ric(n, n) = Sc / 2 + K(n-perp) for any unit n."""
    curv = CurvatureData.from_ricci(_random_ricci(1))
    for n in np.random.default_rng(2).normal(size=(5, 3)):
        n = n / np.linalg.norm(n)
        lhs = curv.sc - curv.ricci(n, n)
        rhs = 0.5 * curv.sc + curv.sectional_orthogonal_to(n)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_asymmetric_ricci_rejected():
    with pytest.raises(DomainError):
        CurvatureData.from_ricci(np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))


def test_synthetic_curvature_rotation():
    q = rotation_matrix(quaternion_from_rotvec([0.3, -0.2, 0.5]))
    curv = synthetic_curvature([1.0, 2.0, 3.0], q)
    np.testing.assert_allclose(curv.ric, q @ np.diag([1.0, 2.0, 3.0]) @ q.T, atol=1e-14)
    lmin, lmax, vmin, vmax = curv.eigen_extremes()
    assert lmin == pytest.approx(1.0)
    assert lmax == pytest.approx(3.0)
    assert curv.ricci(vmax, vmax) == pytest.approx(3.0)
    assert curv.sc == pytest.approx(6.0)


def test_h_tensor_matches_riemann_contraction():
    curv = CurvatureData.from_ricci(_random_ricci(3))
    x = np.array([0.3, -1.1, 0.7])
    expected = np.einsum("amnb,m,n->ab", curv.riem, x, x) / 3.0
    np.testing.assert_allclose(h_tensor(curv, x), expected, atol=1e-12)


def test_h_derivatives_by_central_differences():
    curv = CurvatureData.from_ricci(_random_ricci(4))
    x = np.array([0.4, 0.2, -0.9])
    step = 1e-3
    grad = h_gradient(curv, x)
    hess = h_hessian(curv)
    for c in range(3):
        e = np.zeros(3)
        e[c] = step
        fd = (h_tensor(curv, x + e) - h_tensor(curv, x - e)) / (2 * step)
        np.testing.assert_allclose(grad[c], fd, atol=1e-9)
        fd2 = (h_gradient(curv, x + e) - h_gradient(curv, x - e)) / (2 * step)
        np.testing.assert_allclose(hess[:, c], fd2, atol=1e-9)


def test_h_bounds_enclose_the_perturbation():
    curv = CurvatureData.from_ricci(_random_ricci(5))
    y = np.random.default_rng(6).normal(size=(200, 3)) * np.array([0.5, 1.0, 2.0])
    c0, c1 = h_bounds(curv, y)
    size = np.sqrt(np.sum(h_tensor(curv, y) ** 2, axis=(-2, -1)))
    slope = np.sqrt(np.sum(h_gradient(curv, y) ** 2, axis=(-3, -2, -1)))
    assert np.all(size <= c0 * (1.0 + 1e-12))
    assert np.all(slope <= c1 * (1.0 + 1e-12))
    # the bounds are not vacuous
    assert np.max(size / c0) > 0.1


def _central_dg(model: MetricModel, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    dg = np.empty((3, 3, 3))
    for c in range(3):
        e = np.zeros(3)
        e[c] = step
        dg[c] = (model.sample(x + e).g - model.sample(x - e).g) / (2 * step)
    return dg


def test_christoffel_symbols_match_finite_differences():
    model = SchwarzschildMetric(1.0)
    x = np.array([1.3, -0.4, 0.7])
    g = model.sample(x).g
    numeric = christoffel_symbols(np.linalg.inv(g), _central_dg(model, x))
    np.testing.assert_allclose(numeric, model.christoffel(x), atol=1e-8)


def test_christoffel_symbols_are_metric_compatible():
    """d_c g_ab = g_ad Gamma^d_cb + g_bd Gamma^d_ca."""
    model = NormalExpansionMetric(CurvatureData.from_ricci(_random_ricci(7)))
    x = np.array([0.2, 0.5, -0.3])
    g = model.sample(x).g
    dg = _central_dg(model, x)
    gamma = christoffel_symbols(np.linalg.inv(g), dg)
    np.testing.assert_allclose(gamma, np.swapaxes(gamma, -1, -2), atol=1e-12)
    rebuilt = np.einsum("ad,dcb->cab", g, gamma) + np.einsum("bd,dca->cab", g, gamma)
    np.testing.assert_allclose(rebuilt, dg, atol=1e-9)


def test_normal_expansion_ricci_at_base_point():
    ric = _random_ricci(5)
    model = NormalExpansionMetric(CurvatureData.from_ricci(ric))
    np.testing.assert_allclose(model.ricci_tensor(np.zeros(3)), ric, atol=1e-10)
    np.testing.assert_allclose(model.sample(np.zeros(3)).g, np.eye(3))


def test_normal_expansion_domain():
    model = NormalExpansionMetric(CurvatureData.flat(), rho0=2.0)
    with pytest.raises(DomainError):
        model.sample([[0.0, 0.0, 2.5]])


def test_schwarzschild_ricci_matches_generic_assembly():
    model = SchwarzschildMetric(1.0)
    x = np.array([[2.0, 0.3, -0.5], [0.0, 3.0, 1.0]])
    analytic = model.ricci_tensor(x)
    generic = MetricModel.ricci_tensor(model, x)
    np.testing.assert_allclose(analytic, generic, atol=1e-10)


def test_schwarzschild_is_scalar_flat():
    model = SchwarzschildMetric(1.0)
    x = np.array([[2.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.0, -4.0, 0.5]])
    g_inv = np.linalg.inv(model.sample(x).g)
    sc = np.einsum("...ab,...ab->...", g_inv, model.ricci_tensor(x))
    np.testing.assert_allclose(sc, 0.0, atol=1e-10)


def test_schwarzschild_radial_and_tangential_ricci_signs():
    curv = curvature_at(SchwarzschildMetric(1.0), [2.0, 0.0, 0.0])
    e = np.eye(3)
    assert curv.ricci(e[0], e[0]) < 0.0
    assert curv.ricci(e[1], e[1]) > 0.0
    assert curv.ricci(e[1], e[1]) == pytest.approx(curv.ricci(e[2], e[2]))
    assert curv.sc == pytest.approx(0.0, abs=1e-10)


def test_schwarzschild_domain():
    with pytest.raises(DomainError):
        SchwarzschildMetric(1.0).sample(np.zeros(3))
    with pytest.raises(DomainError):
        SchwarzschildMetric(0.0)


@pytest.mark.parametrize("K", [1.0, -0.5])
def test_space_form_is_einstein(K):
    model = ConstantCurvatureMetric(K)
    x = np.array([0.3, -0.2, 0.4])
    np.testing.assert_allclose(model.ricci_tensor(x), 2.0 * K * model.sample(x).g, atol=1e-12)
    curv = curvature_at(model, [0.1, 0.2, 0.0])
    np.testing.assert_allclose(curv.ric, 2.0 * K * np.eye(3), atol=1e-12)


def test_hyperbolic_chart_radius():
    model = ConstantCurvatureMetric(-1.0)
    assert model.domain_radius == pytest.approx(2.0)
    with pytest.raises(DomainError):
        model.sample([2.5, 0.0, 0.0])


def test_scaled_metric_curvature_scales_with_eps_squared():
    base = NormalExpansionMetric(CurvatureData.from_ricci(np.diag([1.0, 2.0, 3.0])))
    scaled = ScaledMetric(base, 0.1)
    y = np.array([1.0, 0.5, -0.2])
    np.testing.assert_allclose(scaled.ricci_tensor(y), 0.01 * base.ricci_tensor(0.1 * y), atol=1e-14)
    np.testing.assert_allclose(scaled.sample(y).g, base.sample(0.1 * y).g)


def test_euclidean_is_flat():
    model = EuclideanMetric()
    assert model.is_flat
    assert not np.any(model.ricci_tensor(np.ones((4, 3))))
    assert curvature_at(model, [1.0, 2.0, 3.0]).sc == 0.0


def test_curvature_field_is_periodic():
    field = CurvatureField(base=[1.0, 2.0, 3.0], amplitude=[0.5, 0.25, 0.0], period=2.0)
    a = field.at([0.3, 0.1, 0.0])
    b = field.at([2.3, -1.9, 4.0])
    np.testing.assert_allclose(a.ric, b.ric, atol=1e-12)
    assert field.at([0.0, 0.0, 0.0]).sc == pytest.approx(6.75)
    assert field.sample_points(3).shape == (27, 3)
    assert isinstance(field.chart([0.0, 0.0, 0.0]), NormalExpansionMetric)
