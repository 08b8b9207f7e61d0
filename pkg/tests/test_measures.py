import numpy as np
import pytest

from conftest import UNIT_SQUARE, random_polygon
from src.errors import GeometryError, IndexOutOfRangeError, MeasureError, RadiiMismatchError
from src.experiments import generate_pair
from src.flat import bounded_lipschitz_distance, coarsen
from src.geometry import Ball, Parallel, Polytope, hausdorff_distance, rotation_matrix
from src.measures import (
    DiscreteMeasure,
    ShellSampler,
    area_measure,
    coupling_terms,
    curvature_measure,
    exact_support_measure,
    extract_support_measures,
    face_decomposition,
    intrinsic_volume,
    intrinsic_volumes,
    kappa,
    mc_local_parallel_measure,
    parallel_volume,
    projection_term_bound,
    shell_box,
    shell_volume,
    steiner_closure,
    support_measures,
    symmetric_difference_bound,
    theta_from_lambda,
    total_variation,
    vandermonde_coefficients,
)


def _mc_lambdas(body, samples, seed=0, box_with=None):
    system = vandermonde_coefficients(body.dim)
    mus, errs = [], []
    for rho in system.radii:
        box = shell_box(body, box_with, rho=float(rho)) if box_with is not None else None
        mu, err = ShellSampler(body, float(rho), seed, samples, box=box).sample()
        mus.append(mu)
        errs.append(err)
    return extract_support_measures(mus, system), np.abs(system.coefficients) @ np.array(errs)


# ---- 面分解与闭式 ----

def test_face_decomposition_square(unit_square):
    cells = face_decomposition(unit_square)
    vertices = [c for c in cells if c.face_dim == 0]
    edges = [c for c in cells if c.face_dim == 1]
    assert len(vertices) == 4 and len(edges) == 4
    for c in vertices:
        assert c.normal_measure == pytest.approx(np.pi / 2)
    for c in edges:
        assert c.face_measure == pytest.approx(1.0)


def test_face_decomposition_triangle_angles_sum():
    cells = face_decomposition(Polytope([[0, 0], [1, 0], [0, 1]]))
    assert sum(c.normal_measure for c in cells if c.face_dim == 0) == pytest.approx(2 * np.pi)


def test_face_decomposition_cube(unit_cube):
    vertices = [c for c in face_decomposition(unit_cube) if c.face_dim == 0]
    assert len(vertices) == 8
    for c in vertices:
        assert c.normal_measure == pytest.approx(4 * np.pi / 8)


def test_intrinsic_volumes_closed_form(unit_square, unit_cube):
    assert [intrinsic_volume(unit_square, i) for i in range(2)] == pytest.approx([1.0, 2.0])
    assert [intrinsic_volume(unit_cube, i) for i in range(3)] == pytest.approx([1.0, 3.0, 3.0])
    tiny = Polytope(1e-6 * np.array([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert intrinsic_volume(tiny, 0) == pytest.approx(1.0, abs=1e-9)


def test_intrinsic_volume_index_out_of_range(unit_square):
    with pytest.raises(IndexOutOfRangeError):
        intrinsic_volume(unit_square, 2)
    with pytest.raises(IndexOutOfRangeError):
        exact_support_measure(unit_square, -1, 0.1)


def test_intrinsic_volumes_ball_and_parallel(unit_square, unit_disk):
    np.testing.assert_allclose(intrinsic_volumes(unit_disk), [1.0, np.pi, np.pi])
    np.testing.assert_allclose(intrinsic_volumes(Ball([0, 0, 0], 1.0)), [1.0, 4.0, 2 * np.pi, 4 * np.pi / 3])
    # 正方形 ⊕ 0.5B：面积 1 + 4·0.5 + π/4，半周长 2 + π/2
    np.testing.assert_allclose(intrinsic_volumes(Parallel(unit_square, 0.5)), [1.0, 2 + np.pi / 2, 3 + np.pi / 4])


@pytest.mark.parametrize("rho", [0.1, 0.25, 0.5, 1.0])
def test_steiner_consistency(unit_square, unit_cube, rho):
    square_shell = 4 * rho + np.pi * rho ** 2
    cube_shell = 6 * rho + 3 * np.pi * rho ** 2 + 4 / 3 * np.pi * rho ** 3
    for body, shell in ((unit_square, square_shell), (unit_cube, cube_shell)):
        n = body.dim
        totals = [intrinsic_volume(body, i) for i in range(n)]
        assert steiner_closure(totals, rho, n) == pytest.approx(shell, rel=1e-9)
        assert parallel_volume(body, rho) - 1.0 == pytest.approx(shell, rel=1e-9)


def test_kappa_values():
    assert kappa(1) == 2.0
    assert kappa(2) == pytest.approx(np.pi)
    assert kappa(3) == pytest.approx(4 * np.pi / 3)
    assert kappa(5) == pytest.approx(8 * np.pi ** 2 / 15)


# ---- 精确离散化 ----

def test_exact_support_measure_square(unit_square):
    q1 = exact_support_measure(unit_square, 1, 0.05)
    assert q1.measure.total_mass == pytest.approx(2.0)
    assert q1.bound == pytest.approx(0.05 * 2.0)

    q0 = exact_support_measure(unit_square, 0, 0.05)
    assert q0.measure.total_mass == pytest.approx(1.0)
    marginal = q0.measure.x_marginal()
    assert len(marginal) == 4
    np.testing.assert_allclose(marginal.weights, 0.25)
    np.testing.assert_allclose(np.sort(marginal.points, axis=0), np.sort(unit_square.points, axis=0))


def test_exact_support_measure_marginal_identity(unit_square):
    lam = exact_support_measure(unit_square, 1, 0.05).measure
    right = lam.restricted(np.linalg.norm(lam.u - [1, 0], axis=1) < 1e-9)
    assert right.total_mass == pytest.approx(0.5)
    area = area_measure(lam)
    facing = np.linalg.norm(area.points - [1, 0], axis=1) < 1e-9
    assert area.weights[facing].sum() == pytest.approx(1.0)


def test_exact_support_measure_cube(unit_cube):
    masses = [q.measure.total_mass for q in support_measures(unit_cube, 0.2)]
    np.testing.assert_allclose(masses, [1.0, 3.0, 3.0], rtol=1e-9)


def test_exact_atoms_lie_on_normal_bundle(unit_cube):
    for q in support_measures(unit_cube, 0.2):
        support_gap, dist_gap = q.measure.nor_residuals(unit_cube)
        assert support_gap.max() <= 1e-9
        assert dist_gap.max() <= 1e-9


def test_exact_support_measure_rigid_motion(unit_square):
    R = rotation_matrix(0.7)
    moved = unit_square.rotated(R).translated([2.0, -1.0])
    for i in range(2):
        a = exact_support_measure(unit_square, i, 0.05).measure.total_mass
        b = exact_support_measure(moved, i, 0.05).measure.total_mass
        assert b == pytest.approx(a, abs=1e-12)


def test_exact_coarsening_bound_honored(unit_square):
    h = 0.2
    for i in range(2):
        coarse = exact_support_measure(unit_square, i, h).measure
        fine = exact_support_measure(unit_square, i, h / 2).measure
        cert = bounded_lipschitz_distance(coarse, fine)
        assert cert.value <= 1.5 * h * coarse.total_mass


def test_exact_support_measure_rejects_nonpositive_mesh(unit_square):
    with pytest.raises(GeometryError):
        exact_support_measure(unit_square, 1, 0.0)


def test_theta_conversion(unit_square):
    lam = exact_support_measure(unit_square, 1, 0.1).measure
    # n κ_{n-i} Λ_i = C(n, i) Θ_i，n = 2, i = 1
    assert theta_from_lambda(lam, 2, 1).total_mass == pytest.approx(2 * 2 * 2.0 / 2)


# ---- 离散测度 ----

def test_discrete_measure_validation():
    with pytest.raises(MeasureError):
        DiscreteMeasure([[0, 0]], [[2, 0]], [1.0])
    with pytest.raises(MeasureError):
        DiscreteMeasure([[0, 0]], [[1, 0]], [-1.0])
    signed = DiscreteMeasure([[0, 0]], [[1, 0]], [-1.0], signed=True)
    assert signed.variation_mass == 1.0


def test_discrete_measure_json(tmp_path):
    mu = DiscreteMeasure([[0, 0], [1, 0]], [[1, 0], [0, 1]], [0.5, 1.5], rho=0.5)
    path = tmp_path / "mu.json"
    mu.dump(str(path))
    back = DiscreteMeasure.load(str(path))
    np.testing.assert_array_equal(back.points, mu.points)
    np.testing.assert_array_equal(back.w, mu.w)
    assert back.rho == 0.5


def test_total_variation_ignores_nearby_atoms():
    a = DiscreteMeasure([[0, 0]], [[1, 0]], [1.0]).u_marginal()
    b = DiscreteMeasure([[0, 0]], [[np.cos(1e-3), np.sin(1e-3)]], [1.0]).u_marginal()
    assert total_variation(a, b) == pytest.approx(2.0)
    assert total_variation(a, a) == 0.0


# ---- Monte Carlo ----

def test_mc_total_mass_square(unit_square):
    mu, err = mc_local_parallel_measure(ShellSampler(unit_square, 1.0, seed=0, samples=200_000))
    assert abs(mu.total_mass - (4 + np.pi)) <= err


def test_mc_total_mass_disk(unit_disk):
    mu, err = mc_local_parallel_measure(ShellSampler(unit_disk, 0.5, seed=1, samples=200_000))
    assert abs(mu.total_mass - 1.25 * np.pi) <= err


def test_mc_atoms_on_normal_bundle(unit_square, unit_cube):
    for body in (unit_square, unit_cube):
        mu, _ = ShellSampler(body, 0.5, seed=2, samples=20_000).sample()
        support_gap, dist_gap = mu.nor_residuals(body)
        assert support_gap.max() <= 1e-8
        assert dist_gap.max() <= 1e-8


def test_mc_deterministic_across_workers(unit_square):
    a, ea = ShellSampler(unit_square, 0.5, seed=9, samples=30_000, shard_size=4096).sample()
    b, eb = ShellSampler(unit_square, 0.5, seed=9, samples=30_000, shard_size=4096, workers=4).sample()
    np.testing.assert_array_equal(a.points, b.points)
    np.testing.assert_array_equal(a.w, b.w)
    assert ea == eb


def test_sampler_validation(unit_square):
    with pytest.raises(MeasureError):
        ShellSampler(unit_square, 0.5, seed=0, samples=10)
    with pytest.raises(MeasureError):
        ShellSampler(unit_square, 0.0, seed=0, samples=10_000)
    with pytest.raises(MeasureError):
        ShellSampler(unit_square, 0.5, seed=-3, samples=10_000)


# ---- Vandermonde ----

def test_vandermonde_n2():
    system = vandermonde_coefficients(2)
    np.testing.assert_allclose(system.radii, [0.5, 1.0])
    np.testing.assert_allclose(system.coefficients, [[-4 / np.pi, 2 / np.pi], [2.0, -0.5]], atol=1e-12)
    # 点状凸体：μ_{1/2} = π/4，μ_1 = π
    np.testing.assert_allclose(system.coefficients @ [np.pi / 4, np.pi], [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_vandermonde_inverse_identity(n):
    assert vandermonde_coefficients(n).residual() <= 1e-12


def test_vandermonde_rejects_dimension():
    with pytest.raises(GeometryError):
        vandermonde_coefficients(4)


def test_extract_radii_mismatch(unit_square):
    system = vandermonde_coefficients(2)
    mu, _ = ShellSampler(unit_square, 0.75, seed=0, samples=5000).sample()
    with pytest.raises(RadiiMismatchError):
        extract_support_measures([mu, mu], system)
    with pytest.raises(RadiiMismatchError):
        extract_support_measures([mu], system)


@pytest.mark.slow
def test_extracted_masses_square(unit_square):
    lambdas, errs = _mc_lambdas(unit_square, 1_000_000)
    assert all(lam.signed for lam in lambdas)
    assert lambdas[0].total_mass == pytest.approx(1.0, abs=0.02)
    assert lambdas[1].total_mass == pytest.approx(2.0, abs=0.02)
    # 留出半径 ρ = 0.75 的 Steiner 闭合
    held, held_err = ShellSampler(unit_square, 0.75, seed=5, samples=1_000_000).sample()
    totals = [lam.total_mass for lam in lambdas]
    closure = steiner_closure(totals, 0.75, 2)
    slack = held_err + 0.75 ** 2 * np.pi * errs[0] + 0.75 * 2 * errs[1]
    assert abs(closure - held.total_mass) <= slack


@pytest.mark.slow
def test_extracted_masses_disk(unit_disk):
    lambdas, _ = _mc_lambdas(unit_disk, 1_000_000)
    assert lambdas[0].total_mass == pytest.approx(1.0, abs=0.02)
    assert lambdas[1].total_mass == pytest.approx(np.pi, abs=0.02)


@pytest.mark.slow
def test_extracted_masses_cube(unit_cube):
    lambdas, _ = _mc_lambdas(unit_cube, 1_000_000)
    assert lambdas[0].total_mass == pytest.approx(1.0, abs=0.02)
    assert lambdas[1].total_mass == pytest.approx(3.0, abs=0.05)
    assert lambdas[2].total_mass == pytest.approx(3.0, abs=0.05)


# ---- 三项上界 ----

def test_coupling_identical_bodies(unit_square):
    terms = coupling_terms(unit_square, Polytope(unit_square.points), 1.0, 20_000, seed=0)
    assert (terms.term_p, terms.term_u, terms.term_sym) == (0.0, 0.0, 0.0)


def test_coupling_concentric_balls():
    K, L = Ball([0, 0], 1.0), Ball([0, 0], 1.05)
    terms = coupling_terms(K, L, 1.0, 400_000, seed=3)
    # (1 < r <= 2) △ (1.05 < r <= 2.05)
    expected = np.pi * (1.05 ** 2 - 1.0) + np.pi * (2.05 ** 2 - 2.0 ** 2)
    assert abs(terms.term_sym - expected) <= terms.err_sym + 1e-12
    assert terms.term_sym <= symmetric_difference_bound(K, L, 1.0, 0.05) + terms.err_sym


def test_coupling_projection_term_bound(unit_square):
    L = unit_square.translated([0.01, 0])
    terms = coupling_terms(unit_square, L, 1.0, 200_000, seed=4)
    bound = projection_term_bound(unit_square, L, 1.0, 0.01, terms.intersection_volume)
    assert terms.term_p <= bound + terms.err_p


def test_coupling_requires_samples(unit_square):
    with pytest.raises(MeasureError):
        coupling_terms(unit_square, unit_square, 1.0, 1000, seed=0)


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.5, 1.0])
@pytest.mark.parametrize("seed", range(20))
def test_coupling_inequality_random_pairs(seed, rho):
    K = random_polygon(seed)
    target = float(np.geomspace(0.012, 0.18, 20)[seed])
    pair = generate_pair("vertex-perturb", K, target, seed=seed)
    L = pair.L
    d_h = hausdorff_distance(K, L, tol=1e-6)
    assert 0.01 - d_h.error_bound <= d_h.value <= 0.2 + d_h.error_bound
    samples, h = 40_000, 0.05
    box = shell_box(K, L, rho=rho)
    mu_K, err_K = ShellSampler(K, rho, seed, samples, box=box).sample()
    mu_L, err_L = ShellSampler(L, rho, seed, samples, box=box).sample()
    cK, bK = coarsen(mu_K, h)
    cL, bL = coarsen(mu_L, h)
    dbl = bounded_lipschitz_distance(cK, cL).value
    terms = coupling_terms(K, L, rho, samples, seed)
    assert dbl <= terms.total + terms.total_error + bK + bL


def test_curvature_measure_sits_on_vertices(unit_square):
    lam0 = exact_support_measure(unit_square, 0, 0.1).measure
    curvature = curvature_measure(lam0)
    assert curvature.weights.sum() == pytest.approx(1.0)
    corners = np.array(UNIT_SQUARE, dtype=float)
    gaps = np.min(np.linalg.norm(curvature.points[:, None, :] - corners[None], axis=2), axis=1)
    assert gaps.max() <= 1e-12


def test_atoms_iterate_as_support_elements(unit_square):
    lam1 = exact_support_measure(unit_square, 1, 0.25).measure
    element, weight = next(lam1.atoms())
    assert np.linalg.norm(element.u) == pytest.approx(1.0)
    assert weight > 0


def test_shell_volume(unit_square, unit_disk):
    assert shell_volume(unit_square, 1.0) == pytest.approx(4 + np.pi)
    assert shell_volume(unit_disk, 0.5) == pytest.approx(1.25 * np.pi)
