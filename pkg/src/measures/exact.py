"""多胞形支撑测度的精确离散化

Λ_i(P, β×ω) = Σ_{F ∈ F_i} H^i(F∩β)·H^{n-1-i}(N(P,F)∩S^{n-1}∩ω) / ((n-i)κ_{n-i})

每个 i 维面及其法锥被剖分成直径 <= h/√2 的小块，乘积小块直径 <= h，
原子放在小块质心对上，因此离散化的 d_bL 误差不超过 h·总质量。
"""

from typing import List, NamedTuple, Tuple

import numpy as np

from ..errors import GeometryError, IndexOutOfRangeError
from ..geometry.bodies import Polytope
from .discrete import DiscreteMeasure
from .faces import FaceCell, face_decomposition
from .steiner import kappa


class QuadratureMeasure(NamedTuple):
    measure: DiscreteMeasure
    bound: float


def _check_index(n: int, i: int) -> None:
    if not 0 <= i <= n - 1:
        raise IndexOutOfRangeError(f"i 必须在 0..{n - 1} 内，收到 {i}")


def face_intrinsic_volumes(poly: Polytope) -> np.ndarray:
    """(Λ_0(P,Σ), ..., Λ_{n-1}(P,Σ))"""
    n = poly.dim
    out = np.zeros(n)
    for cell in face_decomposition(poly):
        i = cell.face_dim
        measure = cell.face_measure if i > 0 else 1.0
        out[i] += measure * cell.normal_measure / ((n - i) * kappa(n - i))
    return out


def intrinsic_volume(poly: Polytope, i: int) -> float:
    """Λ_i(P, Σ) = V_i(P)"""
    _check_index(poly.dim, i)
    return float(face_intrinsic_volumes(poly)[i])


def exact_support_measure(poly: Polytope, i: int, mesh: float) -> QuadratureMeasure:
    """
    Λ_i(P, ·) 的求积离散化

    Args:
        poly: 满维多胞形
        i: 支撑测度下标，0 <= i <= n-1
        mesh: 小块直径上界 h

    Returns:
        QuadratureMeasure(measure, bound)，bound = h·总质量
    """
    n = poly.dim
    _check_index(n, i)
    if not mesh > 0:
        raise GeometryError(f"网格尺寸必须为正，收到 {mesh}")
    piece = mesh / np.sqrt(2.0)
    norm = (n - i) * kappa(n - i)

    xs, us, ws = [], [], []
    for cell in face_decomposition(poly):
        if cell.face_dim != i:
            continue
        fx, fw = _mesh_face(cell, piece)
        nu, nw = _mesh_normal_cone(cell, piece)
        xs.append(np.repeat(fx, len(nu), axis=0))
        us.append(np.tile(nu, (len(fx), 1)))
        ws.append(np.outer(fw, nw).reshape(-1) / norm)

    measure = DiscreteMeasure(np.vstack(xs), np.vstack(us), np.concatenate(ws))
    return QuadratureMeasure(measure, mesh * measure.total_mass)


def _mesh_face(cell: FaceCell, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    verts = cell.vertices
    if cell.face_dim == 0:
        return verts.copy(), np.ones(1)
    if cell.face_dim == 1:
        return mesh_segment(verts[0], verts[1], piece)
    return mesh_polygon(verts, piece)


def _mesh_normal_cone(cell: FaceCell, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    normals = cell.normals
    if len(normals) == 1:
        return normals.copy(), np.ones(1)
    if len(normals) == 2:
        return mesh_arc(normals[0], normals[1], piece)
    return mesh_spherical_polygon(normals, piece)


def mesh_segment(a: np.ndarray, b: np.ndarray, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    length = float(np.linalg.norm(b - a))
    m = max(1, int(np.ceil(length / piece)))
    t = (np.arange(m) + 0.5) / m
    return a + t[:, None] * (b - a), np.full(m, length / m)


def mesh_polygon(verts: np.ndarray, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    """扇形三角剖分后每个三角形均匀细分为 s^2 个小三角形"""
    centers, areas = [], []
    for k in range(1, len(verts) - 1):
        a, b, c = verts[0], verts[k], verts[k + 1]
        longest = max(np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c))
        s = max(1, int(np.ceil(longest / piece)))
        area = 0.5 * np.linalg.norm(np.cross(b - a, c - a)) / s ** 2
        e1, e2 = (b - a) / s, (c - a) / s
        # 正立小三角形 (i, j)，i + j <= s-1；倒立小三角形 i + j <= s-2
        ii, jj = np.meshgrid(np.arange(s), np.arange(s), indexing="ij")
        up = (ii + jj) <= s - 1
        down = (ii + jj) <= s - 2
        up_c = a + (ii[up] + 1 / 3)[:, None] * e1 + (jj[up] + 1 / 3)[:, None] * e2
        down_c = a + (ii[down] + 2 / 3)[:, None] * e1 + (jj[down] + 2 / 3)[:, None] * e2
        centers += [up_c, down_c]
        areas.append(np.full(len(up_c) + len(down_c), area))
    return np.vstack(centers), np.concatenate(areas)


def mesh_arc(a: np.ndarray, b: np.ndarray, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    """大圆弧按角度均匀剖分，原子位于小弧中点"""
    angle = float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
    m = max(1, int(np.ceil(angle / piece)))
    s = (np.arange(m) + 0.5) / m
    if angle < 1e-15:
        return np.repeat(a[None], m, axis=0), np.full(m, angle / m)
    w1 = np.sin((1 - s) * angle) / np.sin(angle)
    w2 = np.sin(s * angle) / np.sin(angle)
    return w1[:, None] * a + w2[:, None] * b, np.full(m, angle / m)


def spherical_triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """tan(Ω/2) = |a·(b×c)| / (1 + a·b + b·c + c·a)，逐行计算"""
    triple = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    denom = 1 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    return 2 * np.arctan2(triple, denom)


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def mesh_spherical_polygon(normals: np.ndarray, piece: float) -> Tuple[np.ndarray, np.ndarray]:
    """扇形剖分为球面三角形，再用径向投影的中点细分到弦长 <= piece"""
    k = len(normals)
    tris = np.stack([
        np.repeat(normals[[0]], k - 2, axis=0),
        normals[1:-1],
        normals[2:],
    ], axis=1)
    while True:
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        longest = np.max([np.linalg.norm(b - a, axis=1), np.linalg.norm(c - b, axis=1),
                          np.linalg.norm(a - c, axis=1)], axis=0)
        if longest.max() <= piece:
            break
        ab, bc, ca = _normalize(a + b), _normalize(b + c), _normalize(c + a)
        tris = np.concatenate([
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ])
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    return _normalize(a + b + c), spherical_triangle_area(a, b, c)


def support_measures(poly: Polytope, mesh: float) -> List[QuadratureMeasure]:
    """全部 Λ_0..Λ_{n-1}"""
    return [exact_support_measure(poly, i, mesh) for i in range(poly.dim)]
