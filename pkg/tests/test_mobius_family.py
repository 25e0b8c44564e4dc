import numpy as np
import pytest

from willmore_tori.ambient_metrics import (
    CurvatureData,
    EuclideanMetric,
    NormalExpansionMetric,
    ScaledMetric,
    SchwarzschildMetric,
    default_frame,
)
from willmore_tori.ambient_metrics.rotations import quaternion_from_rotvec
from willmore_tori.exceptions import DomainError
from willmore_tori.mobius_family import (
    LIMIT_RADIUS,
    SMALL_RADIUS_LIMIT,
    InversionSpec,
    MobiusParam,
    area_functional,
    area_preserving_offset,
    degeneration_sphere,
    distortion_ratio,
    family_map,
    family_surface,
    family_torus,
    hausdorff_to_sphere,
    invert,
    invert_grid,
    jacobi_fields,
    local_chart,
    modulus_from_eta,
    omega_chart,
    place_torus,
    random_inversions,
    resolution_for,
    small_radius_offset,
)
from willmore_tori.mobius_family.inversion import distance_to_clifford
from willmore_tori.mobius_family.jacobi import (
    CARTESIAN_LABELS,
    POLAR_LABELS,
    conformal_fields,
    conformal_projection,
    omega_derivative,
    preimage_points,
)
from willmore_tori.surface_kernel import (
    CLIFFORD_AREA,
    CLIFFORD_ENERGY,
    area,
    build_clifford_torus,
    fundamental_forms,
    willmore_energy,
)


def test_limit_constants():
    assert SMALL_RADIUS_LIMIT == pytest.approx(2.0 * LIMIT_RADIUS)
    assert 4.0 * np.pi * LIMIT_RADIUS**2 == pytest.approx(CLIFFORD_AREA)


def test_omega_chart_inverse():
    for m in (0.01, 0.4, 0.9, 0.999):
        assert modulus_from_eta(omega_chart(m)) == pytest.approx(m, rel=1e-12)
    with pytest.raises(DomainError):
        omega_chart(0.0)
    with pytest.raises(DomainError):
        omega_chart(1.0)


def test_omega_chart_is_decreasing():
    etas = [omega_chart(m) for m in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert all(a > b for a, b in zip(etas, etas[1:]))


def test_omega_chart_is_smooth_through_the_origin():
    """1/eta is odd in the modulus: no |omega|^2 term."""
    m = 1e-3
    inverse = {h: 1.0 / omega_chart(h) for h in (m, 2 * m)}
    assert abs(inverse[2 * m] - 2 * inverse[m]) < 1e-7
    assert inverse[m] == pytest.approx(2.0 ** (1.0 / 3.0) * m, rel=1e-5)


def test_mobius_param_validation():
    with pytest.raises(DomainError):
        MobiusParam(omega=(0.8, 0.6))
    with pytest.raises(DomainError):
        MobiusParam(rotation=(0.0, 0.0, 0.0, 2.0))
    param = MobiusParam(omega=(0.0, -0.5))
    assert param.modulus == pytest.approx(0.5)
    assert param.azimuth == pytest.approx(-np.pi / 2)
    np.testing.assert_allclose(param.axis, [0.0, 0.0, 1.0])


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
def test_offset_preserves_area(eta):
    xi_tilde = small_radius_offset(eta)
    assert xi_tilde > 0.0
    assert area_functional(xi_tilde, eta) == pytest.approx(CLIFFORD_AREA, rel=1e-9)


def test_offset_increases_with_eta():
    offsets = [area_preserving_offset(eta) for eta in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(b > a for a, b in zip(offsets, offsets[1:]))
    assert offsets[0] > np.sqrt(2.0) + 1.0


def test_small_radius_limit():
    eta = 0.05
    ratio = eta**2 / small_radius_offset(eta)
    assert ratio == pytest.approx(SMALL_RADIUS_LIMIT, rel=0.03)


def test_offset_rejects_bad_arguments():
    with pytest.raises(DomainError):
        small_radius_offset(0.0)
    with pytest.raises(DomainError):
        area_functional(-1.0, 1.0)


def test_inversion_is_involution():
    spec = InversionSpec((0.0, 0.0, 4.0), 2.0)
    points = np.random.default_rng(0).normal(size=(10, 3))
    np.testing.assert_allclose(invert(spec, invert(spec, points)), points, atol=1e-12)
    with pytest.raises(DomainError):
        invert(spec, np.array([0.0, 0.0, 4.0]))
    with pytest.raises(DomainError):
        InversionSpec((0.0, 0.0, 0.0), 0.0)


def test_inverted_torus_keeps_energy():
    spec = InversionSpec((0.0, 0.0, 4.0), 2.0)
    grid = invert_grid(spec, build_clifford_torus(64, 64))
    assert distortion_ratio(spec, build_clifford_torus(64, 64)) > 1.0
    assert willmore_energy(fundamental_forms(grid, EuclideanMetric())) == pytest.approx(CLIFFORD_ENERGY, rel=1e-8)


def test_random_inversions_respect_distance():
    specs = random_inversions(np.random.default_rng(7), 12)
    assert len(specs) == 12
    for spec in specs:
        assert distance_to_clifford(np.asarray(spec.center)) >= 1.0
        assert np.linalg.norm(spec.center) <= 4.0
        assert 0.5 <= spec.radius <= 3.0
    again = random_inversions(np.random.default_rng(7), 12)
    assert [s.center for s in again] == [s.center for s in specs]


def test_family_at_origin_is_clifford_torus():
    grid = build_clifford_torus(16, 16)
    np.testing.assert_allclose(family_torus(MobiusParam(), grid).positions, grid.positions)


def test_family_rotation():
    q = tuple(quaternion_from_rotvec([0.0, np.pi / 2, 0.0]))
    points = build_clifford_torus(8, 8).positions
    rotated = family_map(MobiusParam(rotation=q), points)
    np.testing.assert_allclose(rotated[..., 0], points[..., 2], atol=1e-12)


@pytest.mark.parametrize("omega", [(0.3, 0.2), (-0.5, 0.0)])
def test_family_members_keep_area_and_energy(omega):
    grid, report = family_surface(MobiusParam(omega=omega))
    assert not report.capped
    forms = fundamental_forms(grid, EuclideanMetric())
    assert area(forms) == pytest.approx(CLIFFORD_AREA, rel=1e-6)
    assert willmore_energy(forms) == pytest.approx(CLIFFORD_ENERGY, rel=1e-6)


def test_resolution_grows_toward_the_boundary():
    assert resolution_for(MobiusParam()).n_phi == 64
    assert resolution_for(MobiusParam(), 80).n_phi == 80
    small = resolution_for(MobiusParam(omega=(0.5, 0.0)))
    large = resolution_for(MobiusParam(omega=(0.95, 0.0)))
    assert large.n_phi >= small.n_phi
    assert large.distortion > small.distortion
    assert large.kappa_phi <= small.kappa_phi
    assert large.n_phi % 2 == 0


def test_degeneration_sphere():
    center, radius = degeneration_sphere((0.0, 1.0))
    np.testing.assert_allclose(center, [0.0, LIMIT_RADIUS, 0.0])
    assert radius == pytest.approx(LIMIT_RADIUS)
    with pytest.raises(DomainError):
        degeneration_sphere((1.0, 1.0))


def test_hausdorff_of_sphere_samples():
    rng = np.random.default_rng(1)
    dirs = rng.normal(size=(20000, 3))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    assert hausdorff_to_sphere(2.0 * dirs, np.zeros(3), 2.0) < 0.15
    assert hausdorff_to_sphere(2.0 * dirs, np.zeros(3), 1.0) == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
def test_family_approaches_limit_sphere():
    center, radius = degeneration_sphere((1.0, 0.0))
    distances = []
    for m in (0.9, 0.99):
        grid, _ = family_surface(MobiusParam(omega=(m, 0.0)))
        distances.append(hausdorff_to_sphere(grid.positions, center, radius))
    assert distances[1] < distances[0]


def test_jacobi_fields_at_origin():
    grid, _ = family_surface(MobiusParam())
    basis = jacobi_fields(MobiusParam(), grid)
    assert basis.chart == "cartesian"
    assert basis.labels == CARTESIAN_LABELS
    assert not any(basis.trivial)
    assert basis.richardson_error < 1e-6
    # y . n = sqrt 2 cos(phi) + 1 on the Clifford torus
    np.testing.assert_allclose(basis["dilation"].values, np.sqrt(2.0) * np.cos(grid.phi) + 1.0, atol=1e-10)


def test_jacobi_fields_polar_chart():
    param = MobiusParam(omega=(0.4, 0.0))
    grid, _ = family_surface(param)
    basis = jacobi_fields(param, grid)
    assert basis.chart == "polar"
    assert basis.labels == POLAR_LABELS
    assert basis.stack().shape == (8,) + grid.shape


def test_jacobi_fields_need_matching_grid():
    grid, _ = family_surface(MobiusParam(omega=(0.3, 0.0)))
    with pytest.raises(DomainError):
        jacobi_fields(MobiusParam(omega=(0.5, 0.0)), grid)


def test_conformal_projection_keeps_killing_fields():
    y = build_clifford_torus(32, 32).positions
    rng = np.random.default_rng(3)
    clean = np.tensordot(rng.normal(size=10), conformal_fields(y), axes=1)
    fitted, misfit = conformal_projection(y, clean)
    np.testing.assert_allclose(fitted, clean, atol=1e-10)
    assert misfit < 1e-10

    fitted, misfit = conformal_projection(y, clean + 1e-9 * rng.normal(size=clean.shape))
    assert np.abs(fitted - clean).max() < 1e-8
    assert misfit < 1e-8

    _, misfit = conformal_projection(y, y**2)
    assert misfit > 1e-3


def test_omega_velocity_is_a_conformal_field():
    param = MobiusParam(omega=(0.4, 0.0))
    grid, _ = family_surface(param)
    raw, discrepancy = omega_derivative(param, preimage_points(grid), [1.0, 0.0])
    assert discrepancy < 1e-6
    _, misfit = conformal_projection(grid.positions, raw)
    assert misfit < 1e-6


def test_place_torus_in_euclidean_space():
    placed = place_torus(EuclideanMetric(), 0.1, [1.0, 2.0, 3.0], MobiusParam())
    assert isinstance(placed.metric, ScaledMetric)
    assert placed.mode == "exact"
    energy = willmore_energy(fundamental_forms(placed.grid, placed.metric))
    assert energy == pytest.approx(CLIFFORD_ENERGY, rel=1e-10)


def test_place_torus_local_mode_uses_normal_chart():
    placed = place_torus(SchwarzschildMetric(1.0), 0.05, [2.0, 0.0, 0.0], MobiusParam(), mode="local")
    assert placed.mode == "local"
    assert isinstance(placed.metric.base, NormalExpansionMetric)
    assert isinstance(local_chart(SchwarzschildMetric(1.0), [2.0, 0.0, 0.0]), NormalExpansionMetric)


def test_place_torus_exact_mode_follows_geodesics():
    model = SchwarzschildMetric(1.0)
    placed = place_torus(model, 0.05, [3.0, 0.0, 0.0], MobiusParam(), resolution=32)
    framed = build_clifford_torus(32, 32).positions @ default_frame(model, [3.0, 0.0, 0.0]).T
    assert placed.mode == "exact"
    assert np.abs(placed.grid.positions - framed).max() < 0.1


def test_place_torus_rejects_nonpositive_eps():
    model = NormalExpansionMetric(CurvatureData.flat())
    with pytest.raises(DomainError):
        place_torus(model, 0.0, np.zeros(3), MobiusParam())
