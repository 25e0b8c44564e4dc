import numpy as np
import pytest

from willmore_tori.ambient_metrics import ConstantCurvatureMetric, EuclideanMetric, SchwarzschildMetric
from willmore_tori.exceptions import DegenerateSurfaceError, DomainError, GridError
from willmore_tori.surface_kernel import (
    CLIFFORD_AREA,
    CLIFFORD_ENERGY,
    SPHERE_ENERGY,
    FourierAxis,
    LegendreAxis,
    ScalarField,
    SurfaceCalculus,
    area,
    build_clifford_torus,
    build_round_sphere,
    conformal_willmore_energy,
    fundamental_forms,
    graded_torus,
    hawking_mass,
    integrate,
    laplace_beltrami,
    read_grid_csv,
    spectral_gradient,
    willmore_energy,
    write_grid_csv,
)
from willmore_tori.surface_kernel.grid import graded_angle

SQRT2 = np.sqrt(2.0)


@pytest.fixture(scope="module")
def torus_forms():
    return fundamental_forms(build_clifford_torus(64, 64), EuclideanMetric())


def test_fourier_axis_derivatives():
    axis = FourierAxis(32)
    s = axis.nodes
    np.testing.assert_allclose(axis.diff(np.sin(s), axis=0), np.cos(s), atol=1e-12)
    np.testing.assert_allclose(axis.diff(np.cos(3 * s), axis=0, order=2), -9 * np.cos(3 * s), atol=1e-10)
    assert axis.weights.sum() == pytest.approx(2 * np.pi)


def _trig_field(phi, theta):
    value = np.sin(2 * phi) * np.cos(theta) + np.cos(3 * theta)
    d_phi = 2 * np.cos(2 * phi) * np.cos(theta)
    d_theta = -np.sin(2 * phi) * np.sin(theta) - 3 * np.sin(3 * theta)
    return value, d_phi, d_theta


def test_spectral_gradient_of_trig_polynomial():
    grid = build_clifford_torus(32, 24)
    value, d_phi, d_theta = _trig_field(grid.phi, grid.theta)
    g_phi, g_theta = spectral_gradient(ScalarField(value, grid))
    np.testing.assert_allclose(g_phi.values, d_phi, atol=1e-11)
    np.testing.assert_allclose(g_theta.values, d_theta, atol=1e-11)


def test_spectral_gradient_on_graded_grid_uses_node_parameter():
    grid = graded_torus(64, 64, 0.5, 0.7)
    value, d_phi, d_theta = _trig_field(grid.phi, grid.theta)
    s_phi, s_theta = np.meshgrid(grid.axes[0].nodes, grid.axes[1].nodes, indexing="ij")
    _, speed_phi = graded_angle(s_phi, 0.5)
    _, speed_theta = graded_angle(s_theta, 0.7)
    g_phi, g_theta = spectral_gradient(ScalarField(value, grid))
    np.testing.assert_allclose(g_phi.values, d_phi * speed_phi, atol=1e-8)
    np.testing.assert_allclose(g_theta.values, d_theta * speed_theta, atol=1e-8)


def test_fourier_axis_needs_even_size():
    with pytest.raises(GridError):
        FourierAxis(31)


def test_legendre_axis_differentiates_polynomials():
    axis = LegendreAxis(24)
    x = axis.nodes
    values = np.sin(x) ** 3
    np.testing.assert_allclose(axis.diff(values, axis=0), 3 * np.sin(x) ** 2 * np.cos(x), atol=1e-9)


def test_clifford_nodes():
    grid = build_clifford_torus(16, 16)
    np.testing.assert_allclose(grid.positions[0, 0], [SQRT2 + 1, 0.0, 0.0])
    np.testing.assert_allclose(grid.positions[8, 0], [SQRT2 - 1, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(grid.positions[4, 4], [0.0, SQRT2, 1.0], atol=1e-15)


def test_clifford_energy_and_area(torus_forms):
    assert willmore_energy(torus_forms) == pytest.approx(CLIFFORD_ENERGY, rel=1e-10)
    assert area(torus_forms) == pytest.approx(CLIFFORD_AREA, rel=1e-10)


def test_clifford_mean_curvature(torus_forms):
    phi = torus_forms.grid.phi
    expected = (SQRT2 + 2 * np.cos(phi)) / (SQRT2 + np.cos(phi))
    np.testing.assert_allclose(torus_forms.H, expected, atol=1e-8)
    trace_error, traceless_error = torus_forms.trace_errors()
    assert trace_error < 1e-12
    assert traceless_error < 1e-12


def test_measure_matches_parametrization(torus_forms):
    phi = torus_forms.grid.phi
    np.testing.assert_allclose(torus_forms.dsigma, SQRT2 + np.cos(phi), atol=1e-10)


@pytest.mark.parametrize(
    "density, expected",
    [
        (lambda phi: 1.0 / (SQRT2 + np.cos(phi)), 1.0),
        (lambda phi: np.cos(phi) / (SQRT2 + np.cos(phi)), 1.0 - SQRT2),
        (lambda phi: np.cos(phi) ** 2 / (SQRT2 + np.cos(phi)), 2.0 - SQRT2),
    ],
)
def test_phi_integrals(torus_forms, density, expected):
    """Means over phi of 1/rho, cos/rho and cos^2/rho, rho = sqrt 2 + cos(phi)."""
    phi = torus_forms.grid.phi
    weight = 1.0 / (4 * np.pi**2 * (SQRT2 + np.cos(phi)))
    assert integrate(density(phi) * weight, torus_forms) == pytest.approx(expected, rel=1e-10)


def test_reversed_parametrization_keeps_outward_normal(torus_forms):
    grid = torus_forms.grid
    flipped = grid.with_positions(grid.positions[:, ::-1])
    forms = fundamental_forms(flipped, EuclideanMetric())
    np.testing.assert_allclose(forms.H, torus_forms.H[:, ::-1], atol=1e-10)


def test_round_sphere():
    forms = fundamental_forms(build_round_sphere(32, 32, center=(1.0, 0.0, 0.0), radius=2.0), EuclideanMetric())
    np.testing.assert_allclose(forms.H, 1.0, atol=1e-7)
    assert np.abs(forms.Aring_norm2).max() < 1e-10
    assert willmore_energy(forms) == pytest.approx(SPHERE_ENERGY, rel=1e-8)
    assert area(forms) == pytest.approx(16 * np.pi, rel=1e-10)


def test_hawking_mass_of_round_sphere_vanishes():
    forms = fundamental_forms(build_round_sphere(24, 48, radius=1.5), EuclideanMetric())
    assert hawking_mass(forms) == pytest.approx(0.0, abs=1e-8)


def test_laplacian_of_coordinates_on_unit_sphere():
    grid = build_round_sphere(32, 32)
    forms = fundamental_forms(grid, EuclideanMetric())
    z = ScalarField(grid.positions[..., 2], grid)
    np.testing.assert_allclose(laplace_beltrami(z, forms).values, -2.0 * z.values, atol=1e-7)


def test_gradient_of_height_on_torus(torus_forms):
    """|grad z|^2 = cos^2(phi) for the height z = sin(phi) (unit tube radius)."""
    calc = SurfaceCalculus(torus_forms)
    z = torus_forms.grid.positions[..., 2]
    grad = calc.gradient(z)
    np.testing.assert_allclose(calc.norm2(grad), np.cos(torus_forms.grid.phi) ** 2, atol=1e-10)


def test_graded_torus_energy():
    forms = fundamental_forms(graded_torus(96, 96, 0.5, 0.7), EuclideanMetric())
    assert willmore_energy(forms) == pytest.approx(CLIFFORD_ENERGY, rel=1e-6)
    assert area(forms) == pytest.approx(CLIFFORD_AREA, rel=1e-6)


def test_graded_torus_rejects_bad_factor():
    with pytest.raises(GridError):
        graded_torus(16, 16, 0.0, 1.0)


def test_energy_is_scale_and_rotation_invariant():
    grid = build_clifford_torus(64, 64)
    c, s = np.cos(0.7), np.sin(0.7)
    rotation = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    moved = grid.scaled(0.3).rotated(rotation).translated([1.0, 2.0, -1.0])
    forms = fundamental_forms(moved, EuclideanMetric())
    assert willmore_energy(forms) == pytest.approx(CLIFFORD_ENERGY, rel=1e-10)
    assert area(forms) == pytest.approx(0.09 * CLIFFORD_AREA, rel=1e-10)


@pytest.mark.parametrize("K", [1.0, -1.0])
def test_conformal_energy_of_spheres_in_space_forms(K):
    forms = fundamental_forms(build_round_sphere(24, 48, center=(0.3, 0.0, 0.0), radius=0.5), ConstantCurvatureMetric(K))
    assert conformal_willmore_energy(forms) == pytest.approx(SPHERE_ENERGY, rel=1e-8)


def test_conformal_energy_of_torus_in_space_form():
    grid = build_clifford_torus(64, 64).scaled(0.3)
    forms = fundamental_forms(grid, ConstantCurvatureMetric(1.0))
    assert conformal_willmore_energy(forms) == pytest.approx(CLIFFORD_ENERGY, rel=1e-8)


def test_conformal_energy_needs_space_form():
    grid = build_clifford_torus(16, 16).translated([5.0, 0.0, 0.0])
    forms = fundamental_forms(grid, SchwarzschildMetric(1.0))
    with pytest.raises(DomainError):
        conformal_willmore_energy(forms)


def test_collapsed_grid_is_degenerate():
    grid = build_clifford_torus(16, 16)
    collapsed = grid.with_positions(np.zeros_like(grid.positions))
    with pytest.raises(DegenerateSurfaceError):
        fundamental_forms(collapsed, EuclideanMetric())


def test_scalar_field_shape_checked():
    grid = build_clifford_torus(16, 16)
    with pytest.raises(GridError):
        ScalarField(np.zeros((16, 8)), grid)
    with pytest.raises(GridError):
        ScalarField(np.full((16, 16), np.nan), grid)


def test_grid_csv_round_trip(tmp_path):
    grid = build_clifford_torus(8, 12)
    path = write_grid_csv(grid, tmp_path / "torus.csv")
    assert path.read_text().splitlines()[0] == "i,j,x,y,z"
    loaded = read_grid_csv(path)
    assert loaded.shape == (8, 12)
    np.testing.assert_allclose(loaded.positions, grid.positions, rtol=1e-15, atol=1e-15)


def test_grid_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,x,y,z\n0,0,1,0,0\n")
    with pytest.raises(GridError):
        read_grid_csv(path)
