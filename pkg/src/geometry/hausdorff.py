"""Hausdorff 距离 - 球面上的带证书分支定界

d_H(K, L) = sup_{|u|=1} |h_K(u) - h_L(u)|。把两个凸体平移到公共中心 c 后，
支撑函数差在球面上是 (R_K + R_L)-Lipschitz 的，于是每个球面单元的上界为
“顶点处最大值 + L·单元半径”，上界不超过当前最优值 + tol 的单元即可丢弃。
"""

from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull

from ..errors import DimensionMismatchError, GeometryError, ToleranceUnachievableError
from .bodies import ConvexBody

_INITIAL_ARCS = 64
_ICOSAHEDRON_SUBDIVISIONS = 2


class HausdorffResult(NamedTuple):
    value: float
    error_bound: float
    evaluations: int


def support_gap(K: ConvexBody, L: ConvexBody, dirs: np.ndarray) -> np.ndarray:
    """|h_K(u) - h_L(u)|，dirs 为 (m, n) 单位向量"""
    return np.abs(np.asarray(K.support(dirs)) - np.asarray(L.support(dirs)))


def hausdorff_distance(
    K: ConvexBody,
    L: ConvexBody,
    tol: float = 1e-4,
    max_evaluations: int = 2_000_000,
) -> HausdorffResult:
    """
    计算 Hausdorff 距离及其误差界

    Args:
        K, L: 同维凸体
        tol: 要求的误差界
        max_evaluations: 支撑函数差的评估次数上限

    Returns:
        HausdorffResult，满足 |value - d_H(K, L)| <= error_bound <= tol

    Raises:
        ToleranceUnachievableError: 预算内无法达到 tol
    """
    if not tol > 0:
        raise GeometryError(f"tol 必须为正，收到 {tol}")
    if K.dim != L.dim:
        raise DimensionMismatchError(f"维度不一致: {K.dim} vs {L.dim}")
    if K is L or K == L:
        return HausdorffResult(0.0, 0.0, 0)

    lo_k, hi_k = K.bounding_box()
    lo_l, hi_l = L.bounding_box()
    center = 0.5 * (np.minimum(lo_k, lo_l) + np.maximum(hi_k, hi_l))
    lip = K.circumradius(center) + L.circumradius(center)

    if K.dim == 2:
        return _branch_and_bound_circle(K, L, lip, tol, max_evaluations)
    return _branch_and_bound_sphere(K, L, lip, tol, max_evaluations)


def _branch_and_bound_circle(K, L, lip, tol, budget) -> HausdorffResult:
    step = 2 * np.pi / _INITIAL_ARCS
    starts = np.arange(_INITIAL_ARCS) * step
    ends = starts + step
    grid_values = support_gap(K, L, _circle(starts))
    f_a = grid_values
    f_b = np.roll(grid_values, -1)
    evaluations = _INITIAL_ARCS
    best = float(grid_values.max())
    discarded = -np.inf

    while True:
        # 单元内任一点到最近端点的弧长 <= 半弧长
        ub = np.maximum(f_a, f_b) + lip * 0.5 * (ends - starts)
        active = ub > best + tol
        if (~active).any():
            discarded = max(discarded, float(ub[~active].max()))
        if not active.any():
            break
        starts, ends, f_a, f_b = starts[active], ends[active], f_a[active], f_b[active]
        mids = 0.5 * (starts + ends)
        f_m = support_gap(K, L, _circle(mids))
        evaluations += len(mids)
        if evaluations > budget:
            raise ToleranceUnachievableError(
                f"Hausdorff 距离在 {budget} 次评估内未达到 tol={tol:g}"
            )
        best = max(best, float(f_m.max()))
        starts = np.concatenate([starts, mids])
        ends = np.concatenate([mids, ends])
        f_a, f_b = np.concatenate([f_a, f_m]), np.concatenate([f_m, f_b])

    return HausdorffResult(best, max(discarded - best, 0.0), evaluations)


def _branch_and_bound_sphere(K, L, lip, tol, budget) -> HausdorffResult:
    tris = icosphere_triangles(_ICOSAHEDRON_SUBDIVISIONS)
    flat = tris.reshape(-1, 3)
    values = support_gap(K, L, flat).reshape(-1, 3)
    evaluations = len(flat)
    best = float(values.max())
    discarded = -np.inf

    while True:
        # 球面三角形内任一点到最近顶点的测地距离 <= 最长边
        ub = values.max(axis=1) + lip * _longest_edge(tris)
        active = ub > best + tol
        if (~active).any():
            discarded = max(discarded, float(ub[~active].max()))
        if not active.any():
            break
        tris, values = tris[active], values[active]
        children = _split_triangles(tris)
        mids = children[:, 0, :, :].reshape(-1, 3)
        mid_values = support_gap(K, L, mids).reshape(-1, 3)
        evaluations += len(mids)
        if evaluations > budget:
            raise ToleranceUnachievableError(
                f"Hausdorff 距离在 {budget} 次评估内未达到 tol={tol:g}"
            )
        best = max(best, float(mid_values.max()))
        tris = children.reshape(-1, 3, 3)
        values = _child_values(values, mid_values).reshape(-1, 3)

    return HausdorffResult(best, max(discarded - best, 0.0), evaluations)


def _circle(angles: np.ndarray) -> np.ndarray:
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _longest_edge(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    edges = [np.einsum("ij,ij->i", p, q) for p, q in ((a, b), (b, c), (c, a))]
    return np.arccos(np.clip(np.min(edges, axis=0), -1.0, 1.0))


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _split_triangles(tris: np.ndarray) -> np.ndarray:
    """
    每个球面三角形分成 4 个

    Returns:
        (m, 4, 3, 3)；第 0 个子三角形的顶点正好是三条边的中点 (ab, bc, ca)
    """
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = _normalize(a + b), _normalize(b + c), _normalize(c + a)
    return np.stack([
        np.stack([ab, bc, ca], axis=1),
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
    ], axis=1)


def _child_values(values: np.ndarray, mid_values: np.ndarray) -> np.ndarray:
    fa, fb, fc = values[:, 0], values[:, 1], values[:, 2]
    fab, fbc, fca = mid_values[:, 0], mid_values[:, 1], mid_values[:, 2]
    return np.stack([
        np.stack([fab, fbc, fca], axis=1),
        np.stack([fa, fab, fca], axis=1),
        np.stack([fab, fb, fbc], axis=1),
        np.stack([fca, fbc, fc], axis=1),
    ], axis=1)


def icosphere_triangles(subdivisions: int) -> np.ndarray:
    """正二十面体细分得到的球面三角形网格，(m, 3, 3)"""
    phi = (1 + np.sqrt(5)) / 2
    verts = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            verts += [(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)]
    verts = _normalize(np.array(verts, dtype=float))
    tris = verts[ConvexHull(verts).simplices]
    for _ in range(subdivisions):
        tris = _split_triangles(tris).reshape(-1, 3, 3)
    return tris
