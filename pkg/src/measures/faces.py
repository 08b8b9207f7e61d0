"""Face decomposition - 多胞形的面及其法锥（与单位球面的交）"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from ..errors import DegenerateBodyError
from ..geometry.bodies import Polytope
from ..geometry.hull import HullData


@dataclass(frozen=True, eq=False)
class FaceCell:
    """
    一个面 F 与其法锥 N(P, F) ∩ S^{n-1}

    normals 描述法锥：单点（n-1 维面）、弧的两端（2 维顶点、3 维棱）或
    按循环顺序排列的球面多边形顶点（3 维顶点）。
    """

    face_dim: int
    vertices: np.ndarray
    normals: np.ndarray
    face_measure: float
    normal_measure: float


def face_decomposition(poly: Polytope) -> List[FaceCell]:
    """
    满维多胞形的完整面分解

    Raises:
        DegenerateBodyError: 多胞形不满维
    """
    if not poly.is_full_dimensional:
        raise DegenerateBodyError("面分解要求满维多胞形")
    return list(_cells_for_hull(poly.hull))


@lru_cache(maxsize=128)
def _cells_for_hull(hull: HullData) -> Tuple[FaceCell, ...]:
    if hull.dim == 2:
        return tuple(_polygon_cells(hull))
    return tuple(_polyhedron_cells(hull))


def arc_angle(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))


def _polygon_cells(hull: HullData) -> List[FaceCell]:
    cells = []
    verts, normals = hull.vertices, hull.normals
    for k, (prev_edge, next_edge) in enumerate(hull.vertex_facets):
        arc = np.array([normals[prev_edge], normals[next_edge]])
        cells.append(FaceCell(0, verts[[k]], arc, 0.0, arc_angle(arc[0], arc[1])))
    for k, (a, b, _, _) in enumerate(hull.edges):
        seg = verts[[a, b]]
        cells.append(FaceCell(1, seg, normals[[k]], float(np.linalg.norm(seg[1] - seg[0])), 1.0))
    return cells


def spherical_polygon_area(normals: np.ndarray) -> float:
    """凸球面多边形面积 = 内角和 - (k-2)π"""
    k = len(normals)
    total = 0.0
    for j in range(k):
        c = normals[j]
        t1 = normals[j - 1] - (normals[j - 1] @ c) * c
        t2 = normals[(j + 1) % k] - (normals[(j + 1) % k] @ c) * c
        total += arc_angle(t1 / np.linalg.norm(t1), t2 / np.linalg.norm(t2))
    return float(total - (k - 2) * np.pi)


def polygon_area(points: np.ndarray) -> float:
    """3 维中平面凸多边形的面积（扇形三角剖分）"""
    cross = np.cross(points[1:-1] - points[0], points[2:] - points[0])
    return float(0.5 * np.linalg.norm(cross, axis=1).sum())


def _polyhedron_cells(hull: HullData) -> List[FaceCell]:
    cells = []
    verts, normals = hull.vertices, hull.normals
    for v, incident in enumerate(hull.vertex_facets):
        cone = normals[incident]
        cells.append(FaceCell(0, verts[[v]], cone, 0.0, spherical_polygon_area(cone)))
    for a, b, f1, f2 in hull.edges:
        seg = verts[[a, b]]
        arc = normals[[f1, f2]]
        cells.append(FaceCell(1, seg, arc, float(np.linalg.norm(seg[1] - seg[0])), arc_angle(arc[0], arc[1])))
    for k, facet in enumerate(hull.facets):
        pts = verts[facet]
        cells.append(FaceCell(2, pts, normals[[k]], polygon_area(pts), 1.0))
    return cells
