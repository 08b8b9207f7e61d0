import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_polygon
from src.errors import (
    ConfigError,
    DegenerateBodyError,
    DimensionMismatchError,
    GeometryError,
    NotOnBoundaryError,
    PreconditionError,
)
from src.geometry import (
    Ball,
    BodyPairContext,
    Parallel,
    Polytope,
    body_from_dict,
    boundary_projection_map,
    chart_lipschitz_probe,
    distance_and_direction,
    dump_body,
    hausdorff_distance,
    inverse_boundary_map,
    load_body,
    map_G,
    metric_projection,
    normal_bundle_chart,
    on_boundary,
    rotation_matrix,
    run_lipschitz_probes,
    sample_boundary,
    signed_boundary_distance,
    spherical_image,
    support_function,
)
from src.settings import resolve_path

POINT = Polytope([[0.0, 0.0]])


# ---- 凸体与支撑函数 ----

def test_support_function_examples(unit_square):
    assert support_function(unit_square, [1, 0]) == pytest.approx(1.0)
    assert support_function(Ball([1, 2], 3), [0, 1]) == pytest.approx(5.0)
    assert support_function(Parallel(unit_square, 0.5), [0, -1]) == pytest.approx(0.5)


def test_support_function_rejects_non_unit(unit_square):
    with pytest.raises(DimensionMismatchError):
        support_function(unit_square, [2, 0])


def test_metric_projection_examples(unit_square, unit_disk):
    np.testing.assert_allclose(metric_projection(unit_disk, [2, 0]), [1, 0])
    np.testing.assert_allclose(metric_projection(unit_square, [2, 2]), [1, 1])
    np.testing.assert_allclose(metric_projection(unit_square, [0.5, 2]), [0.5, 1])


def test_distance_and_direction(unit_square, unit_disk):
    d, u = distance_and_direction(unit_disk, [2, 0])
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(u, [1, 0])
    assert distance_and_direction(unit_disk, [0, 0]) == (0.0, None)
    d, u = distance_and_direction(unit_square, [3, 1])
    assert d == pytest.approx(2.0)
    np.testing.assert_allclose(u, [1, 0])


def test_signed_boundary_distance(unit_square, unit_disk):
    assert signed_boundary_distance(unit_disk, [0, 0]) == pytest.approx(-1.0)
    assert signed_boundary_distance(unit_disk, [2, 0]) == pytest.approx(1.0)
    assert signed_boundary_distance(unit_square, [0.5, 0.5]) == pytest.approx(-0.5)
    assert on_boundary(unit_square, [1.0, 0.3])


def test_cube_projection_onto_facet_and_edge(unit_cube):
    np.testing.assert_allclose(metric_projection(unit_cube, [0.5, 0.5, 2.0]), [0.5, 0.5, 1.0])
    np.testing.assert_allclose(metric_projection(unit_cube, [2.0, 2.0, 0.5]), [1.0, 1.0, 0.5])
    assert signed_boundary_distance(unit_cube, [0.5, 0.5, 0.5]) == pytest.approx(-0.5)


def test_polytope_validation():
    with pytest.raises(DimensionMismatchError):
        Polytope([[0, 0, 0, 0]])
    with pytest.raises(GeometryError):
        Polytope([])
    assert len(Polytope([[0, 0], [1, 0], [0, 0], [0, 1]]).points) == 3


def test_lower_dimensional_polytope_has_no_signed_distance():
    segment = Polytope([[0, 0], [1, 0]])
    assert not segment.is_full_dimensional
    assert segment.distance([0.5, 2.0]) == pytest.approx(2.0)
    with pytest.raises(DegenerateBodyError):
        segment.signed_distance([0.5, 2.0])


@given(
    seed=st.integers(min_value=0, max_value=10_000),
    angle=st.floats(min_value=-np.pi, max_value=np.pi),
    shift=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
)
@settings(max_examples=30, deadline=None)
def test_support_function_rigid_motion(seed, angle, shift):
    K = random_polygon(seed)
    R = rotation_matrix(angle)
    moved = K.rotated(R).translated(shift)
    dirs = np.column_stack([np.cos(np.linspace(0, 2 * np.pi, 17)), np.sin(np.linspace(0, 2 * np.pi, 17))])
    expected = np.asarray(K.support(dirs @ R)) + dirs @ np.asarray(shift)
    np.testing.assert_allclose(moved.support(dirs), expected, atol=1e-12)


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_projection_is_nearest_and_idempotent(seed):
    K = random_polygon(seed)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, size=(50, 2))
    p = K.project(x)
    np.testing.assert_allclose(K.project(p), p, atol=1e-12)
    # 最近点满足变分不等式 (x - p)·(y - p) <= 0
    gaps = np.einsum("ij,kj->ik", x - p, K.vertices) - np.einsum("ij,ij->i", x - p, p)[:, None]
    assert gaps.max() <= 1e-9


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_projection_is_contraction(seed):
    K = random_polygon(seed)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, size=(50, 2))
    y = rng.uniform(-3, 3, size=(50, 2))
    moved = np.linalg.norm(metric_projection(K, x) - metric_projection(K, y), axis=1)
    assert np.all(moved <= np.linalg.norm(x - y, axis=1) + 1e-12)


# ---- Hausdorff 距离 ----

def test_hausdorff_translation(unit_square):
    result = hausdorff_distance(unit_square, unit_square.translated([0.25, 0]), tol=1e-6)
    assert result.value == pytest.approx(0.25, abs=1e-6)
    assert result.error_bound <= 1e-6


def test_hausdorff_concentric_balls():
    result = hausdorff_distance(Ball([0, 0], 1.0), Ball([0, 0], 1.3), tol=1e-6)
    assert result.value == pytest.approx(0.3, abs=1e-6)


def test_hausdorff_square_vs_disk(unit_disk):
    square = Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    result = hausdorff_distance(square, unit_disk, tol=1e-6)
    assert result.value == pytest.approx(np.sqrt(2) - 1, abs=1e-6)


def test_hausdorff_3d_translation(unit_cube):
    result = hausdorff_distance(unit_cube, unit_cube.translated([0, 0.1, 0]), tol=1e-5)
    assert result.value == pytest.approx(0.1, abs=1e-5)


def test_hausdorff_identical_is_zero(unit_square):
    assert hausdorff_distance(unit_square, Polytope(unit_square.points)).value == 0.0


def test_hausdorff_dimension_mismatch(unit_square, unit_cube):
    with pytest.raises(DimensionMismatchError):
        hausdorff_distance(unit_square, unit_cube)


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=20, deadline=None)
def test_hausdorff_dominates_grid_maximum(seed):
    K, L = random_polygon(seed), random_polygon(seed + 1)
    result = hausdorff_distance(K, L, tol=1e-6)
    theta = np.linspace(0, 2 * np.pi, 2001)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    grid = np.max(np.abs(np.asarray(K.support(dirs)) - np.asarray(L.support(dirs))))
    assert grid <= result.value + result.error_bound + 1e-12
    assert result.value <= grid + 1e-3


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=20, deadline=None)
def test_hausdorff_is_symmetric(seed):
    K, L = random_polygon(seed), random_polygon(seed + 1)
    forward = hausdorff_distance(K, L, tol=1e-6)
    backward = hausdorff_distance(L, K, tol=1e-6)
    assert abs(forward.value - backward.value) <= forward.error_bound + backward.error_bound + 1e-12


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=20, deadline=None)
def test_hausdorff_triangle_inequality(seed):
    A, B, C = random_polygon(seed), random_polygon(seed + 1), random_polygon(seed + 2)
    ab = hausdorff_distance(A, B, tol=1e-6)
    bc = hausdorff_distance(B, C, tol=1e-6)
    ac = hausdorff_distance(A, C, tol=1e-6)
    slack = ab.error_bound + bc.error_bound + ac.error_bound + 1e-12
    assert ac.value <= ab.value + bc.value + slack


# ---- 边界映射 ----

def test_boundary_projection_concentric_balls():
    K, L = Parallel(POINT, 1.0), Parallel(Ball([0, 0], 0.01), 1.0)
    ctx = BodyPairContext(K, L, epsilon=1.0, delta=0.01)
    np.testing.assert_allclose(boundary_projection_map(ctx, [1, 0]), [1.01, 0], atol=1e-12)


def test_boundary_projection_translated_ball():
    K, L = Parallel(POINT, 1.0), Parallel(Polytope([[0.01, 0.0]]), 1.0)
    ctx = BodyPairContext(K, L, epsilon=1.0, delta=0.01)
    np.testing.assert_allclose(boundary_projection_map(ctx, [-1, 0]), [-0.99, 0], atol=1e-12)


def test_boundary_projection_flat_part(smooth_square):
    L = smooth_square.translated([0.01, 0])
    ctx = BodyPairContext(smooth_square, L, epsilon=1.0, delta=0.01)
    x = np.array([[0.5, 2.0], [2.0, 0.5], [-1.0, 0.5]])
    expected = np.array([[0.5, 2.0], [2.01, 0.5], [-0.99, 0.5]])
    np.testing.assert_allclose(boundary_projection_map(ctx, x), expected, atol=1e-12)
    # 与边界网格上的稠密最近点搜索一致
    mesh, _ = sample_boundary(L, 20_000, seed=3)
    for point, image in zip(x, boundary_projection_map(ctx, x)):
        nearest = mesh[np.argmin(np.linalg.norm(mesh - point, axis=1))]
        assert np.linalg.norm(nearest - image) < 0.05


def test_boundary_projection_requires_regime(smooth_square):
    ctx = BodyPairContext(smooth_square, smooth_square.translated([0.6, 0]), epsilon=1.0, delta=0.6)
    with pytest.raises(PreconditionError):
        boundary_projection_map(ctx, [0.5, 2.0])


def test_boundary_projection_rejects_interior_point(smooth_square):
    ctx = BodyPairContext(smooth_square, smooth_square, epsilon=1.0, delta=0.0)
    with pytest.raises(NotOnBoundaryError):
        boundary_projection_map(ctx, [0.5, 0.5])


def test_inverse_boundary_map(smooth_square):
    L = smooth_square.rotated(rotation_matrix(0.01), [0.5, 0.5])
    ctx = BodyPairContext.measure(smooth_square, L)
    x, _ = sample_boundary(smooth_square, 200, seed=1)
    back = inverse_boundary_map(ctx, boundary_projection_map(ctx, x))
    np.testing.assert_allclose(back, x, atol=1e-9)


def test_spherical_image_examples(smooth_square):
    assert np.allclose(spherical_image(Parallel(Ball([0, 0], 1), 1), [2, 0]), [1, 0])
    np.testing.assert_allclose(spherical_image(smooth_square, [0.5, 2]), [0, 1], atol=1e-12)
    c = np.cos(np.pi / 4)
    np.testing.assert_allclose(spherical_image(smooth_square, [1 + c, 1 + c]), [c, c], atol=1e-12)


def test_spherical_image_requires_smooth_body(unit_square):
    with pytest.raises(GeometryError):
        spherical_image(unit_square, [1, 0.5])


def test_map_G_concentric_balls():
    ctx = BodyPairContext(Parallel(POINT, 1.0), Parallel(Ball([0, 0], 0.01), 1.0), epsilon=1.0, delta=0.01)
    z, v = map_G(ctx, [1, 0], [1, 0])
    np.testing.assert_allclose(z, [1.01, 0], atol=1e-12)
    np.testing.assert_allclose(v, [1, 0], atol=1e-12)
    assert np.linalg.norm(z - [1, 0]) <= 0.01 + 2 * np.sqrt(0.01)


def test_map_G_identity(smooth_square):
    ctx = BodyPairContext(smooth_square, smooth_square, epsilon=1.0, delta=0.0)
    x, u = sample_boundary(smooth_square, 500, seed=2)
    z, v = map_G(ctx, x, u)
    np.testing.assert_allclose(z, x, atol=1e-12)
    np.testing.assert_allclose(v, u, atol=1e-12)


def test_map_G_orientation_regime(smooth_square):
    ctx = BodyPairContext(smooth_square, smooth_square.translated([0.2, 0]), epsilon=1.0, delta=0.2)
    with pytest.raises(PreconditionError):
        map_G(ctx, [0.5, 2.0], [0, 1])


def test_context_requires_matching_epsilon(smooth_square):
    with pytest.raises(GeometryError):
        BodyPairContext(smooth_square, Parallel(smooth_square.inner, 0.5), epsilon=1.0, delta=0.0)


def test_sample_boundary_lies_on_boundary(smooth_square, unit_cube):
    for body in (smooth_square, Parallel(unit_cube, 0.5), Parallel(Ball([0, 0, 0], 1.0), 0.5)):
        x, u = sample_boundary(body, 2000, seed=0)
        assert np.all(on_boundary(body, x))
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(body.support(u), np.einsum("ij,ij->i", x, u), atol=1e-9)


def test_normal_bundle_chart(unit_square):
    x, u = normal_bundle_chart(unit_square, [0.5, 2.0])
    np.testing.assert_allclose(x, [0.5, 1.0])
    np.testing.assert_allclose(u, [0, 1])
    with pytest.raises(NotOnBoundaryError):
        normal_bundle_chart(unit_square, [0.5, 1.5])


def test_lipschitz_probes_rotated_squares(smooth_square):
    L = smooth_square.rotated(rotation_matrix(np.deg2rad(0.5)), [0.5, 0.5])
    ctx = BodyPairContext.measure(smooth_square, L)
    results = run_lipschitz_probes(ctx, samples=2000, seed=0)
    assert [r.name for r in results] == ["lip_p", "lip_spherical_image", "lip_G", "displacement_G", "angle"]
    for r in results:
        assert r.passed, r.to_dict()


def test_chart_lipschitz_probe(unit_square):
    # p 与 z - p 都是 1-Lipschitz
    result = chart_lipschitz_probe(unit_square, 2000, seed=5)
    assert result.samples > 0
    assert 0 < result.observed <= np.sqrt(2) + 1e-6


@pytest.mark.slow
def test_lipschitz_bounds_large_sample(smooth_square):
    L = smooth_square.rotated(rotation_matrix(np.deg2rad(0.5)), [0.5, 0.5])
    ctx = BodyPairContext.measure(smooth_square, L)
    # 重合点对会被丢弃，多采一些
    for r in run_lipschitz_probes(ctx, samples=12_000, seed=1):
        assert r.samples >= 10_000, r.to_dict()
        assert r.passed, r.to_dict()


@pytest.mark.slow
def test_displacement_probe_large_sample(smooth_square):
    L = smooth_square.rotated(rotation_matrix(np.deg2rad(0.5)), [0.5, 0.5])
    ctx = BodyPairContext.measure(smooth_square, L)
    from src.geometry.boundary_maps import displacement_probe_G

    result = displacement_probe_G(ctx, samples=10_000, seed=4)
    assert result.passed
    assert result.observed <= ctx.delta + 2 * np.sqrt(ctx.delta)


# ---- 凸体文件 ----

def test_body_files_load():
    assert load_body(resolve_path("config/bodies/unit_square.json")).dim == 2
    assert load_body(resolve_path("config/bodies/unit_cube.json")).dim == 3
    assert isinstance(load_body(resolve_path("config/bodies/unit_disk.json")), Ball)


def test_body_dump_and_load(tmp_path, smooth_square):
    path = tmp_path / "body.json"
    dump_body(smooth_square, str(path))
    assert load_body(str(path)) == smooth_square


def test_body_from_dict_errors():
    with pytest.raises(ConfigError):
        body_from_dict({"type": "cylinder"})
    with pytest.raises(ConfigError):
        body_from_dict({"type": "ball", "center": [0, 0]})
    with pytest.raises(GeometryError):
        body_from_dict({"type": "polytope", "dim": 3, "vertices": [[0, 0], [1, 0], [0, 1]]})


def test_load_body_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_body(str(path))
    path.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_body(str(path))
