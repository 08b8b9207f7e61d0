"""Hull - 顶点表示到半空间表示的转换与面格（2 维、3 维）"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import DegenerateBodyError

_COPLANAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AffineFrame:
    """顶点集合的仿射包：origin + span(basis)"""

    origin: np.ndarray
    basis: np.ndarray  # (k, n)，行正交

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return (points - self.origin) @ self.basis.T

    def to_global(self, coords: np.ndarray) -> np.ndarray:
        return self.origin + coords @ self.basis


@dataclass(frozen=True, eq=False)
class HullData:
    """
    满维多胞形的面格

    vertices 为极点；2 维时按逆时针排序。facets[k] 为第 k 个面的顶点下标
    （2 维为 (k, k+1)，3 维为绕外法向逆时针的多边形）。
    """

    dim: int
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facets: List[np.ndarray]
    # 3 维：(a, b, 左侧面, 右侧面)；2 维与 facets 重合
    edges: List[Tuple[int, int, int, int]]
    # 每个顶点关联的面，按法锥内的循环顺序排列
    vertex_facets: List[List[int]]

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.vertices))) + 1.0

    def facet_values(self, points: np.ndarray) -> np.ndarray:
        """返回 A x - b，非正表示在对应半空间内"""
        return points @ self.normals.T - self.offsets


def affine_frame(points: np.ndarray) -> AffineFrame:
    """
    计算点集的仿射包

    Args:
        points: (m, n) 点集

    Returns:
        AffineFrame，rank 为仿射维数
    """
    origin = points.mean(axis=0)
    centered = points - origin
    if len(points) == 1:
        return AffineFrame(origin=origin, basis=np.zeros((0, points.shape[1])))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(points))))
    rank = int(np.sum(s > 1e-12 * scale * max(1, len(points))))
    return AffineFrame(origin=origin, basis=vt[:rank])


def build_hull(points: np.ndarray) -> HullData:
    """
    由顶点集合构造满维多胞形的面格

    Args:
        points: (m, n) 顶点，n ∈ {2, 3}

    Returns:
        HullData

    Raises:
        DegenerateBodyError: 点集不满维或 qhull 失败
    """
    dim = points.shape[1]
    if dim not in (2, 3):
        raise DegenerateBodyError(f"仅支持 2 维和 3 维，收到 {dim} 维")
    if affine_frame(points).rank < dim:
        raise DegenerateBodyError("顶点集合不满维")
    try:
        hull = ConvexHull(points)
    except QhullError as e:
        raise DegenerateBodyError(f"凸包构造失败: {e}") from e

    if dim == 2:
        return _polygon_lattice(points[hull.vertices])
    return _polyhedron_lattice(points, hull)


def _polygon_lattice(ccw: np.ndarray) -> HullData:
    """2 维：逆时针顶点 → 边、外法向、顶点法弧"""
    ccw = _drop_collinear(ccw)
    m = len(ccw)
    nxt = np.roll(ccw, -1, axis=0)
    d = nxt - ccw
    lengths = np.linalg.norm(d, axis=1)
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, ccw)
    facets = [np.array([k, (k + 1) % m]) for k in range(m)]
    edges = [(k, (k + 1) % m, k, k) for k in range(m)]
    # 顶点 k 的法锥由边 k-1 与边 k 的外法向张成
    vertex_facets = [[(k - 1) % m, k] for k in range(m)]
    return HullData(2, ccw, normals, offsets, facets, edges, vertex_facets)


def _drop_collinear(ccw: np.ndarray) -> np.ndarray:
    """去除共线的中间顶点"""
    keep = []
    m = len(ccw)
    for k in range(m):
        a, b, c = ccw[k - 1], ccw[k], ccw[(k + 1) % m]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) > _COPLANAR_TOL * (1.0 + np.max(np.abs(ccw))) ** 2:
            keep.append(k)
    return ccw[keep]


def _polyhedron_lattice(points: np.ndarray, hull: ConvexHull) -> HullData:
    """3 维：合并共面三角形为面，提取棱与顶点的面循环"""
    scale = 1.0 + float(np.max(np.abs(points)))
    groups: List[Tuple[np.ndarray, float, set]] = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        normal, offset = eq[:3], -eq[3]
        for g_normal, g_offset, members in groups:
            if normal @ g_normal > 1 - _COPLANAR_TOL and abs(offset - g_offset) < _COPLANAR_TOL * scale:
                members.update(simplex.tolist())
                break
        else:
            groups.append((normal, offset, set(simplex.tolist())))

    # 每个面内按角度排序并去除共线点
    raw_facets = []
    for normal, offset, members in groups:
        idx = np.array(sorted(members))
        raw_facets.append((normal, offset, _order_in_plane(points, idx, normal)))

    used = sorted({i for _, _, f in raw_facets for i in f.tolist()})
    remap = {old: new for new, old in enumerate(used)}
    vertices = points[used]
    normals = np.array([f[0] for f in raw_facets])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    facets = [np.array([remap[i] for i in f[2]]) for f in raw_facets]
    offsets = np.array([normals[k] @ vertices[facets[k][0]] for k in range(len(facets))])

    edge_faces: Dict[Tuple[int, int], List[int]] = {}
    for k, facet in enumerate(facets):
        for a, b in zip(facet, np.roll(facet, -1)):
            edge_faces.setdefault((min(a, b), max(a, b)), []).append(k)
    edges = []
    for (a, b), faces in sorted(edge_faces.items()):
        if len(faces) != 2:
            raise DegenerateBodyError(f"棱 ({a}, {b}) 关联 {len(faces)} 个面")
        edges.append((int(a), int(b), faces[0], faces[1]))

    vertex_facets = []
    for v in range(len(vertices)):
        incident = [k for k, f in enumerate(facets) if v in f]
        axis = normals[incident].sum(axis=0)
        axis /= np.linalg.norm(axis)
        vertex_facets.append(_order_around_axis(normals, incident, axis))

    return HullData(3, vertices, normals, offsets, facets, edges, vertex_facets)


def _plane_basis(normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """与 normal 构成右手系的平面正交基 (e1, e2)，e1 × e2 = normal"""
    helper = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, normal)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return e1, e2


def _order_in_plane(points: np.ndarray, idx: np.ndarray, normal: np.ndarray) -> np.ndarray:
    e1, e2 = _plane_basis(normal)
    local = points[idx] - points[idx].mean(axis=0)
    angles = np.arctan2(local @ e2, local @ e1)
    ordered = idx[np.argsort(angles)]
    # 去掉面内共线点
    pts = points[ordered]
    keep = []
    m = len(ordered)
    for k in range(m):
        a, b, c = pts[k - 1], pts[k], pts[(k + 1) % m]
        if np.linalg.norm(np.cross(b - a, c - b)) > _COPLANAR_TOL * (1.0 + np.max(np.abs(pts))) ** 2:
            keep.append(k)
    return ordered[keep]


def _order_around_axis(normals: np.ndarray, incident: List[int], axis: np.ndarray) -> List[int]:
    e1, e2 = _plane_basis(axis)
    angles = [np.arctan2(normals[k] @ e2, normals[k] @ e1) for k in incident]
    return [incident[i] for i in np.argsort(angles)]
