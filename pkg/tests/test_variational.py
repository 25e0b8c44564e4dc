import numpy as np
import pytest

from willmore_tori.ambient_metrics import (
    CurvatureData,
    EuclideanMetric,
    NormalExpansionMetric,
    create_metric,
)
from willmore_tori.ambient_metrics.rotations import rotation_matrix
from willmore_tori.exceptions import GridError, ThresholdError
from willmore_tori.mobius_family import MobiusParam, family_surface
from willmore_tori.surface_kernel import (
    CLIFFORD_AREA,
    CLIFFORD_ENERGY,
    build_clifford_torus,
    fundamental_forms,
    integrate,
)
from willmore_tori.variational import (
    FourierBasis,
    GalerkinBasis,
    OperatorMatrix,
    assemble_flat_operator,
    corrector_solve,
    energy_derivative_check,
    first_variation_density,
    jacobi_residuals,
    linearization_discrepancy,
    near_kernel,
    perturbed,
    rayleigh_quotient,
    ricci_normal,
    wdot_closed_form,
    wdot_closed_form_steps,
    wdot_finite_difference,
    wdot_quadrature,
    wdot_quadrature_steps,
)
from willmore_tori.variational.spectrum import gap_threshold


def _random_curvature(seed: int) -> tuple[CurvatureData, np.ndarray]:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    q = rng.normal(size=4)
    return CurvatureData.from_ricci(0.5 * (a + a.T)), rotation_matrix(q / np.linalg.norm(q))


@pytest.fixture(scope="module")
def torus_forms():
    return fundamental_forms(build_clifford_torus(32, 32), EuclideanMetric())


def test_fourier_basis_layout():
    basis = FourierBasis(3)
    assert basis.size == 49
    assert basis.modes[0] == (0, 0, 0)
    assert [parity for _, _, parity in basis.modes[1:5]] == [0, 1, 0, 1]
    # lower truncations are prefixes
    assert FourierBasis(2).modes == basis.modes[: FourierBasis(2).size]
    with pytest.raises(GridError):
        FourierBasis(0)


def test_galerkin_basis_is_orthonormal(torus_forms):
    basis = GalerkinBasis(FourierBasis(3), torus_forms.grid, torus_forms.dsigma)
    assert basis.gram_error() < 1e-12


def test_galerkin_projection_recovers_coefficients(torus_forms):
    basis = GalerkinBasis(FourierBasis(4), torus_forms.grid, torus_forms.dsigma)
    coeffs = np.random.default_rng(0).normal(size=basis.size)
    np.testing.assert_allclose(basis.project(basis.synthesize(coeffs)), coeffs, atol=1e-12)
    with pytest.raises(GridError):
        basis.synthesize(coeffs[:-1])


def test_galerkin_degree_must_not_alias(torus_forms):
    with pytest.raises(GridError):
        GalerkinBasis(FourierBasis(8), torus_forms.grid, torus_forms.dsigma)


def test_clifford_torus_is_willmore():
    forms = fundamental_forms(build_clifford_torus(64, 64), EuclideanMetric())
    assert np.abs(first_variation_density(forms).values).max() < 1e-8


def test_ricci_normal_vanishes_in_flat_space(torus_forms):
    assert not np.any(ricci_normal(torus_forms))


def test_first_variation_matches_energy_derivative():
    grid = build_clifford_torus(48, 48).scaled(0.3)
    metric = NormalExpansionMetric(CurvatureData.from_ricci(np.diag([1.0, 2.0, 3.0])))
    phi = np.cos(grid.phi) + 0.5 * np.sin(grid.theta)
    fd, predicted = energy_derivative_check(grid, metric, phi)
    assert fd == pytest.approx(predicted, rel=1e-5, abs=1e-8)


@pytest.mark.slow
def test_first_variation_on_inverted_torus_scales_with_eps_squared():
    """An inverted torus is Willmore in flat space; the curved chart moves it at order eps^2."""
    base, _ = family_surface(MobiusParam(omega=(0.4, 0.0)), resolution=64)
    curved = NormalExpansionMetric(CurvatureData.from_ricci(np.diag([1.0, 2.0, 3.0])))
    psi = 1.0 + np.cos(base.phi) + 0.5 * np.sin(base.theta)

    def rate(eps: float) -> float:
        grid = base.scaled(eps)
        values = []
        for metric in (curved, EuclideanMetric()):
            forms = fundamental_forms(grid, metric)
            values.append(2.0 * integrate(first_variation_density(forms, metric).values * eps * psi, forms))
        return values[0] - values[1]

    coarse, fine = rate(0.02), rate(0.01)
    assert abs(coarse) > 1e-6
    assert coarse / fine == pytest.approx(4.0, rel=0.05)

    fd, predicted = energy_derivative_check(base.scaled(0.1), curved, 0.1 * psi)
    assert fd == pytest.approx(predicted, rel=1e-3, abs=1e-7)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_wdot_quadrature_matches_closed_form(seed):
    curv, rotation = _random_curvature(seed)
    quad = wdot_quadrature_steps(curv, rotation)
    closed = wdot_closed_form_steps(curv, rotation)
    for part in ("normal", "divergence", "trace"):
        assert getattr(quad, part) == pytest.approx(getattr(closed, part), rel=1e-8, abs=1e-8)
    assert closed.total == pytest.approx(wdot_closed_form(curv, rotation), rel=1e-12)
    assert wdot_quadrature(curv, rotation) == pytest.approx(closed.total, rel=1e-8, abs=1e-8)


def test_wdot_closed_form_vanishes_for_axis_only_curvature():
    """Sc = Ric(e_z, e_z) when only the axial Ricci eigenvalue is nonzero."""
    curv = CurvatureData.from_ricci(np.diag([0.0, 0.0, 2.0]))
    assert wdot_closed_form(curv) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_wdot_finite_difference_matches_closed_form():
    curv, rotation = _random_curvature(3)
    fd = wdot_finite_difference(curv, rotation)
    assert fd == pytest.approx(wdot_closed_form(curv, rotation), rel=1e-4)


def test_jacobi_residuals_at_clifford_torus():
    residuals = jacobi_residuals(MobiusParam(), resolution=96)
    assert len(residuals) == 8
    for label, value in residuals.items():
        assert value < 1e-6, label


def test_linearization_in_flat_space(torus_forms):
    grid = torus_forms.grid
    phi = np.cos(grid.phi) + 0.5 * np.sin(grid.theta)
    result = linearization_discrepancy(grid, EuclideanMetric(), phi)
    assert result["curved"] == pytest.approx(result["flat"], abs=1e-12)
    assert result["flat"] < 1e-4


def test_gap_threshold_splits_at_largest_ratio():
    magnitudes = np.array([2.0, 1e-10, 1.0, 2e-10, 1e-9])
    count, threshold = gap_threshold(magnitudes, 5)
    assert count == 3
    assert threshold == pytest.approx(np.sqrt(1e-9))


def _diagonal_operator(values) -> OperatorMatrix:
    return OperatorMatrix(np.diag(values), MobiusParam(), 1, 0, 0.0, 0.0)


def test_near_kernel_on_diagonal_matrix():
    op = _diagonal_operator([1e-12, -1e-11, 3.0, -4.0, 5.0])
    report = near_kernel(op)
    assert report.near_kernel_count == 2
    assert report.gap == pytest.approx(3.0)
    assert report.valid
    assert report.kernel_vectors.shape == (5, 2)
    assert report.summary()["near_kernel_count"] == 2
    assert rayleigh_quotient(op, np.eye(5)[2]) == pytest.approx(3.0)


def test_near_kernel_explicit_delta():
    op = _diagonal_operator([1e-12, -1e-11, 3.0, -4.0, 5.0])
    assert near_kernel(op, delta=1e-6).near_kernel_count == 2
    with pytest.raises(ThresholdError):
        near_kernel(op, delta=10.0)


@pytest.mark.slow
def test_near_kernel_dimension_at_clifford_torus():
    op = assemble_flat_operator(MobiusParam(), truncation=10)
    assert op.size == 441
    assert op.asymmetry < 1e-6
    report = near_kernel(op)
    assert report.near_kernel_count == 8
    assert report.valid

    noisy = perturbed(op, 0.1 * report.threshold, seed=1)
    assert near_kernel(noisy, delta=report.threshold).near_kernel_count == 8


@pytest.mark.slow
def test_near_kernel_dimension_off_center():
    # the kernel of an inverted torus needs the default truncation; 10 resolves only one mode
    op = assemble_flat_operator(MobiusParam(omega=(0.4, 0.0)), truncation=20)
    report = near_kernel(op)
    assert report.near_kernel_count == 8
    assert report.gap_ratio >= 10.0
    assert report.valid


@pytest.mark.slow
def test_corrector_vanishes_in_flat_space():
    result = corrector_solve(EuclideanMetric(), 0.1, np.zeros(3), MobiusParam(), tol=1e-7)
    assert result.phi_sup < 1e-6
    assert result.energy == pytest.approx(CLIFFORD_ENERGY, rel=1e-8)
    assert len(result.labels) == 7


@pytest.mark.slow
def test_corrector_scaling_in_curved_chart():
    model = create_metric({"kind": "synthetic", "ric": [0.2, 0.3, 0.5]})
    coarse = corrector_solve(model, 0.1, np.zeros(3), MobiusParam())
    fine = corrector_solve(model, 0.05, np.zeros(3), MobiusParam())
    for result in (coarse, fine):
        assert result.area_error < 1e-8 * CLIFFORD_AREA
        assert np.abs(result.orthogonality).max() < 1e-8
        assert result.residual_history[-1] < result.residual_history[0]
    # phi = O(eps^2)
    assert 3.0 < coarse.phi_sup / fine.phi_sup < 5.0
