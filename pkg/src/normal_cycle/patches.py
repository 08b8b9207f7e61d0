"""Nor K 的参数化分片

多胞形 P 与平行体 P ⊕ εB 的法丛共用同一组分片：每个分片是面 × 法锥单元，
底面沿 u 偏移 ε，即 (x, u) ↦ (x + εu, u)。球视为单点核心加满法锥。

分片由若干单元（cell）组成：多边形面按扇形剖分成三角形，顶点的球面多边形
法锥同样按扇形剖分。每个单元给出图册 chart(params, cell) -> (z, 切标架)，
符号 signs[cell] 让 sign·J_1∧…∧J_{n-1} 满足定向规则 det[(Π_1+ϱΠ_2)a, u] > 0。
"""

from abc import ABC, abstractmethod
from functools import cached_property
from typing import List, Tuple

import numpy as np

from ..errors import DegenerateBodyError, GeometryError
from ..geometry.bodies import ConvexBody, core_polytope
from .multivector import orientation_determinant, wedge_frames

_CENTERS = {
    "interval": np.array([0.5]),
    "square": np.array([0.5, 0.5]),
    "triangle": np.array([1 / 3, 1 / 3]),
}


class NormalBundlePatch(ABC):
    """
    Nor K 的一个乘积单元

    Attributes:
        kind: vertex | edge | facet
        domain: 参数域 interval | square | triangle
        base: 底面顶点（点、线段或多边形）
        fiber: 法锥单元（单个法向、弧端点或球面三角形）
        epsilon: 底面偏移量
    """

    kind: str
    domain: str

    def __init__(self, base: np.ndarray, fiber: np.ndarray, epsilon: float):
        self.base = np.asarray(base, dtype=float)
        self.fiber = np.asarray(fiber, dtype=float)
        self.epsilon = float(epsilon)
        self.n = self.base.shape[-1]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(cells={self.cells}, epsilon={self.epsilon:g})"

    @property
    def cells(self) -> int:
        return 1

    @abstractmethod
    def chart(self, params: np.ndarray, cell: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            params: (q, n-1) 参数
            cell: 单元编号

        Returns:
            (z, frames)：z 为 (q, 2n) 的 (x, u)，frames 为 (q, n-1, 2n) 的偏导数
        """

    @cached_property
    def signs(self) -> Tuple[int, ...]:
        out = []
        for cell in range(self.cells):
            z, frames = self.chart(_CENTERS[self.domain][None, :], cell)
            det = orientation_determinant(frames, z[:, self.n:], 1.0)[0]
            if det == 0:
                raise GeometryError(f"{self!r} 第 {cell} 个单元的切标架退化")
            out.append(1 if det > 0 else -1)
        return tuple(out)

    def tangent(self, params: np.ndarray, cell: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """(z, a_K·Jacobian)：定向后的切 (n-1)-向量"""
        z, frames = self.chart(params, cell)
        return z, self.signs[cell] * wedge_frames(frames)


def _offset(x: np.ndarray, u: np.ndarray, eps: float) -> np.ndarray:
    return np.hstack([x + eps * u, u])


class EdgePatch2D(NormalBundlePatch):
    """2 维：边 × 单个外法向"""

    kind = "edge"
    domain = "interval"

    def chart(self, params, cell=0):
        s = params[:, :1]
        a, b = self.base
        u = np.broadcast_to(self.fiber[0], (len(s), 2))
        frames = np.zeros((len(s), 1, 4))
        frames[:, 0, :2] = b - a
        return _offset(a + s * (b - a), u, self.epsilon), frames


class ArcPatch2D(NormalBundlePatch):
    """2 维：顶点 × 法向圆弧（从 fiber[0] 逆时针转 angle）"""

    kind = "vertex"
    domain = "interval"

    def __init__(self, base, fiber, epsilon, angle: float):
        super().__init__(base, fiber, epsilon)
        self.start = float(np.arctan2(self.fiber[0, 1], self.fiber[0, 0]))
        self.angle = float(angle)

    def chart(self, params, cell=0):
        theta = self.start + params[:, 0] * self.angle
        u = np.column_stack([np.cos(theta), np.sin(theta)])
        du = self.angle * np.column_stack([-np.sin(theta), np.cos(theta)])
        x = np.broadcast_to(self.base[0], u.shape)
        frames = np.zeros((len(u), 1, 4))
        frames[:, 0, :2] = self.epsilon * du
        frames[:, 0, 2:] = du
        return _offset(x, u, self.epsilon), frames


class FacetPatch3D(NormalBundlePatch):
    """3 维：多边形面 × 单个外法向，面按扇形剖分"""

    kind = "facet"
    domain = "triangle"

    @property
    def cells(self) -> int:
        return len(self.base) - 2

    def chart(self, params, cell=0):
        a, b, c = self.base[0], self.base[cell + 1], self.base[cell + 2]
        s, t = params[:, :1], params[:, 1:2]
        x = a + s * (b - a) + t * (c - a)
        u = np.broadcast_to(self.fiber[0], x.shape)
        frames = np.zeros((len(x), 2, 6))
        frames[:, 0, :3] = b - a
        frames[:, 1, :3] = c - a
        return _offset(x, u, self.epsilon), frames


class EdgePatch3D(NormalBundlePatch):
    """3 维：棱 × 两面法向之间的大圆弧"""

    kind = "edge"
    domain = "square"

    def __init__(self, base, fiber, epsilon):
        super().__init__(base, fiber, epsilon)
        self.angle = float(np.arccos(np.clip(self.fiber[0] @ self.fiber[1], -1.0, 1.0)))
        if self.angle <= 0:
            raise DegenerateBodyError("棱两侧的面法向重合")
        w = self.fiber[1] - np.cos(self.angle) * self.fiber[0]
        self._ortho = w / np.linalg.norm(w)

    def chart(self, params, cell=0):
        a, b = self.base
        s, theta = params[:, :1], params[:, 1] * self.angle
        u = np.outer(np.cos(theta), self.fiber[0]) + np.outer(np.sin(theta), self._ortho)
        du = self.angle * (np.outer(-np.sin(theta), self.fiber[0]) + np.outer(np.cos(theta), self._ortho))
        frames = np.zeros((len(u), 2, 6))
        frames[:, 0, :3] = b - a
        frames[:, 1, :3] = self.epsilon * du
        frames[:, 1, 3:] = du
        return _offset(a + s * (b - a), u, self.epsilon), frames


class VertexPatch3D(NormalBundlePatch):
    """3 维：顶点 × 球面多边形，fiber 为 (k, 3, 3) 的球面三角形（平面三角形的中心投影）"""

    kind = "vertex"
    domain = "triangle"

    @property
    def cells(self) -> int:
        return len(self.fiber)

    def chart(self, params, cell=0):
        n0, n1, n2 = self.fiber[cell]
        e1, e2 = n1 - n0, n2 - n0
        s, t = params[:, :1], params[:, 1:2]
        w = n0 + s * e1 + t * e2
        r = np.linalg.norm(w, axis=1, keepdims=True)
        u = w / r
        du_s = (e1 - u * (u @ e1)[:, None]) / r
        du_t = (e2 - u * (u @ e2)[:, None]) / r
        x = np.broadcast_to(self.base[0], u.shape)
        frames = np.zeros((len(u), 2, 6))
        frames[:, 0, :3] = self.epsilon * du_s
        frames[:, 0, 3:] = du_s
        frames[:, 1, :3] = self.epsilon * du_t
        frames[:, 1, 3:] = du_t
        return _offset(x, u, self.epsilon), frames


def _octahedron_triangles() -> np.ndarray:
    tris = []
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            for sz in (1.0, -1.0):
                tris.append([[sx, 0, 0], [0, sy, 0], [0, 0, sz]])
    return np.array(tris)


def normal_bundle(body: ConvexBody) -> List[NormalBundlePatch]:
    """
    Nor K 的完整分片列表

    Args:
        body: 满维多胞形、球，或它们的平行体

    Returns:
        按 顶点、棱、面 顺序排列的分片

    Raises:
        DegenerateBodyError: 核心多胞形不满维
    """
    poly, points, eps = core_polytope(body)
    n = body.dim
    if poly is not None and poly.frame.rank == 0:
        poly, points = None, poly.points

    if poly is None:
        center = points[:1]
        if n == 2:
            return [ArcPatch2D(center, np.array([[1.0, 0.0]]), eps, 2 * np.pi)]
        return [VertexPatch3D(center, _octahedron_triangles(), eps)]

    if not poly.is_full_dimensional:
        raise DegenerateBodyError("法丛分片要求满维多胞形")
    hull = poly.hull
    verts, normals = hull.vertices, hull.normals
    patches: List[NormalBundlePatch] = []

    if n == 2:
        for k, (prev_edge, next_edge) in enumerate(hull.vertex_facets):
            n0, n1 = normals[prev_edge], normals[next_edge]
            angle = float(np.arccos(np.clip(n0 @ n1, -1.0, 1.0)))
            patches.append(ArcPatch2D(verts[[k]], n0[None], eps, angle))
        for k, (a, b, _, _) in enumerate(hull.edges):
            patches.append(EdgePatch2D(verts[[a, b]], normals[[k]], eps))
        return patches

    for v, incident in enumerate(hull.vertex_facets):
        cone = normals[incident]
        fan = np.array([cone[[0, j, j + 1]] for j in range(1, len(cone) - 1)])
        patches.append(VertexPatch3D(verts[[v]], fan, eps))
    for a, b, f1, f2 in hull.edges:
        patches.append(EdgePatch3D(verts[[a, b]], normals[[f1, f2]], eps))
    for k, facet in enumerate(hull.facets):
        patches.append(FacetPatch3D(verts[facet], normals[[k]], eps))
    return patches
