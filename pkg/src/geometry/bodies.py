"""Convex bodies - 顶点多胞形、球、平行体

每个凸体都可以写成 conv(points) ⊕ radius·B^n 的形式（skeleton），
支撑函数、包围盒与外接半径都由此得到；度量投影则逐类实现。
"""

from abc import ABC, abstractmethod
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import DegenerateBodyError, DimensionMismatchError, GeometryError
from .hull import AffineFrame, HullData, affine_frame, build_hull

ArrayLike = Union[np.ndarray, list, tuple]

# 3 维面投影需要 (m, F, F) 的中间数组，按块处理
_CHUNK_2D = 65536
_CHUNK_3D = 8192


def as_points(x: ArrayLike, dim: int) -> Tuple[np.ndarray, bool]:
    """
    将输入整理为 (m, dim) 数组

    Returns:
        (points, single)：single 表示输入是单个点
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != dim:
        raise DimensionMismatchError(f"期望 {dim} 维，收到形状 {arr.shape}")
    return arr, single


def _unwrap(values: np.ndarray, single: bool):
    if single:
        return values[0] if values.ndim > 1 else float(values[0])
    return values


class ConvexBody(ABC):
    """凸体基类：所有实现都是不可变的"""

    dim: int

    @abstractmethod
    def skeleton(self) -> Tuple[np.ndarray, float]:
        """返回 (points, radius)，使 K = conv(points) ⊕ radius·B^n"""

    @abstractmethod
    def _project(self, points: np.ndarray) -> np.ndarray:
        """(m, n) 点的最近点"""

    @abstractmethod
    def _signed_or_distance(self, points: np.ndarray) -> np.ndarray:
        """满维时为带符号距离，低维时为距离"""

    @property
    @abstractmethod
    def is_full_dimensional(self) -> bool:
        ...

    @abstractmethod
    def to_dict(self) -> dict:
        ...

    @abstractmethod
    def translated(self, t: ArrayLike) -> "ConvexBody":
        ...

    @abstractmethod
    def rotated(self, rotation: np.ndarray, center: Optional[ArrayLike] = None) -> "ConvexBody":
        ...

    # ---- 由 skeleton 导出的量 ----

    def support(self, u: ArrayLike):
        """支撑函数 h_K(u)，u 可为单个向量或 (m, n) 数组"""
        dirs, single = as_points(u, self.dim)
        points, radius = self.skeleton()
        values = (dirs @ points.T).max(axis=1) + radius * np.linalg.norm(dirs, axis=1)
        return _unwrap(values, single)

    def support_point(self, u: ArrayLike) -> np.ndarray:
        """K 中在方向 u 上取得支撑函数值的一个点（u 为单位向量）"""
        dirs, single = as_points(u, self.dim)
        points, radius = self.skeleton()
        best = points[np.argmax(dirs @ points.T, axis=1)] + radius * dirs
        return best[0] if single else best

    def circumradius(self, center: Optional[ArrayLike] = None) -> float:
        """max |y - center|，y ∈ K；center 缺省为原点"""
        points, radius = self.skeleton()
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        return float(np.max(np.linalg.norm(points - c, axis=1)) + radius)

    def bounding_box(self, pad: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """轴对齐包围盒，向外扩张 pad"""
        points, radius = self.skeleton()
        return points.min(axis=0) - radius - pad, points.max(axis=0) + radius + pad

    def boundary_tol(self, tol: float = 1e-9) -> float:
        """边界判定容差 tol·(1 + 外接半径)"""
        return tol * (1.0 + self.circumradius())

    # ---- 投影与距离 ----

    def project(self, x: ArrayLike):
        points, single = as_points(x, self.dim)
        return _unwrap(self._project(points), single)

    def distance(self, x: ArrayLike):
        points, single = as_points(x, self.dim)
        d = np.linalg.norm(points - self._project(points), axis=1)
        return _unwrap(d, single)

    def signed_distance(self, x: ArrayLike):
        if not self.is_full_dimensional:
            raise DegenerateBodyError("低维凸体没有带符号边界距离")
        points, single = as_points(x, self.dim)
        return _unwrap(self._signed_or_distance(points), single)

    def contains(self, x: ArrayLike, tol: float = 0.0):
        points, single = as_points(x, self.dim)
        inside = self._signed_or_distance(points) <= tol
        return bool(inside[0]) if single else inside


class Polytope(ConvexBody):
    """顶点表示的多胞形；满维时惰性构造面格"""

    def __init__(self, vertices: ArrayLike):
        """
        Args:
            vertices: (m, n) 顶点列表，n ∈ {2, 3}；重复点会被去除
        """
        arr = np.asarray(vertices, dtype=float)
        if arr.ndim != 2 or len(arr) == 0:
            raise GeometryError("顶点列表必须是非空的 (m, n) 数组")
        if arr.shape[1] not in (2, 3):
            raise DimensionMismatchError(f"仅支持 2 维和 3 维，收到 {arr.shape[1]} 维")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("顶点坐标必须有限")
        _, first = np.unique(arr, axis=0, return_index=True)
        arr = arr[np.sort(first)]
        arr.setflags(write=False)
        self.points = arr
        self.dim = arr.shape[1]

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, vertices={len(self.points)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Polytope) and np.array_equal(self.points, other.points)

    __hash__ = None

    @cached_property
    def frame(self) -> AffineFrame:
        return affine_frame(self.points)

    @property
    def is_full_dimensional(self) -> bool:
        return self.frame.rank == self.dim

    @cached_property
    def hull(self) -> HullData:
        """面格；非满维时抛出 DegenerateBodyError"""
        return build_hull(self.points)

    @cached_property
    def _local_polygon(self) -> Optional["Polytope"]:
        """3 维中的平面多边形，在其仿射包坐标下的 2 维多胞形"""
        if self.dim == 3 and self.frame.rank == 2:
            return Polytope(self.frame.to_local(self.points))
        return None

    @property
    def vertices(self) -> np.ndarray:
        """极点（满维时）或原始点集"""
        if self.is_full_dimensional:
            return self.hull.vertices
        return self.points

    def skeleton(self) -> Tuple[np.ndarray, float]:
        return self.points, 0.0

    def to_dict(self) -> dict:
        return {"dim": self.dim, "type": "polytope", "vertices": self.points.tolist()}

    def translated(self, t: ArrayLike) -> "Polytope":
        return Polytope(self.points + np.asarray(t, dtype=float))

    def rotated(self, rotation: np.ndarray, center: Optional[ArrayLike] = None) -> "Polytope":
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        return Polytope((self.points - c) @ np.asarray(rotation).T + c)

    def _project(self, points: np.ndarray) -> np.ndarray:
        rank = self.frame.rank
        if rank == self.dim:
            return _project_full(self.hull, points)
        local = self.frame.to_local(points)
        if rank == 0:
            return np.broadcast_to(self.frame.origin, points.shape).copy()
        if rank == 1:
            coords = self.frame.to_local(self.points)[:, 0]
            clipped = np.clip(local[:, 0], coords.min(), coords.max())
            return self.frame.to_global(clipped[:, None])
        return self.frame.to_global(self._local_polygon._project(local))

    def _signed_or_distance(self, points: np.ndarray) -> np.ndarray:
        if not self.is_full_dimensional:
            return np.linalg.norm(points - self._project(points), axis=1)
        out = np.empty(len(points))
        chunk = _CHUNK_2D if self.dim == 2 else _CHUNK_3D
        for start in range(0, len(points), chunk):
            blk = points[start:start + chunk]
            inner = self.hull.facet_values(blk).max(axis=1)
            outside = inner > 0
            if outside.any():
                proj = _project_full(self.hull, blk[outside])
                inner[outside] = np.linalg.norm(blk[outside] - proj, axis=1)
            out[start:start + chunk] = inner
        return out


class Ball(ConvexBody):
    """欧氏球 B(center, radius)"""

    def __init__(self, center: ArrayLike, radius: float):
        c = np.asarray(center, dtype=float)
        if c.ndim != 1 or c.shape[0] not in (2, 3):
            raise DimensionMismatchError(f"球心必须是 2 维或 3 维向量，收到 {c.shape}")
        if not radius > 0:
            raise GeometryError(f"球半径必须为正，收到 {radius}")
        c.setflags(write=False)
        self.center = c
        self.radius = float(radius)
        self.dim = c.shape[0]

    def __repr__(self) -> str:
        return f"Ball(center={self.center.tolist()}, radius={self.radius:g})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Ball) and np.array_equal(self.center, other.center)
                and self.radius == other.radius)

    __hash__ = None

    @property
    def is_full_dimensional(self) -> bool:
        return True

    def skeleton(self) -> Tuple[np.ndarray, float]:
        return self.center[None, :], self.radius

    def to_dict(self) -> dict:
        return {"dim": self.dim, "type": "ball", "center": self.center.tolist(), "radius": self.radius}

    def translated(self, t: ArrayLike) -> "Ball":
        return Ball(self.center + np.asarray(t, dtype=float), self.radius)

    def rotated(self, rotation: np.ndarray, center: Optional[ArrayLike] = None) -> "Ball":
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        return Ball(np.asarray(rotation) @ (self.center - c) + c, self.radius)

    def _project(self, points: np.ndarray) -> np.ndarray:
        diff = points - self.center
        d = np.linalg.norm(diff, axis=1)
        out = points.copy()
        outside = d > self.radius
        out[outside] = self.center + self.radius * diff[outside] / d[outside, None]
        return out

    def _signed_or_distance(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points - self.center, axis=1) - self.radius


class Parallel(ConvexBody):
    """平行体 inner ⊕ rho·B^n；ε-光滑凸体总是以这种结构表示"""

    def __init__(self, inner: ConvexBody, rho: float):
        if not rho > 0:
            raise GeometryError(f"平行体半径必须为正，收到 {rho}")
        self.inner = inner
        self.rho = float(rho)
        self.dim = inner.dim

    def __repr__(self) -> str:
        return f"Parallel({self.inner!r}, rho={self.rho:g})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Parallel) and self.rho == other.rho and self.inner == other.inner

    __hash__ = None

    @property
    def is_full_dimensional(self) -> bool:
        return True

    def skeleton(self) -> Tuple[np.ndarray, float]:
        points, radius = self.inner.skeleton()
        return points, radius + self.rho

    def to_dict(self) -> dict:
        return {"dim": self.dim, "type": "parallel", "inner": self.inner.to_dict(), "rho": self.rho}

    def translated(self, t: ArrayLike) -> "Parallel":
        return Parallel(self.inner.translated(t), self.rho)

    def rotated(self, rotation: np.ndarray, center: Optional[ArrayLike] = None) -> "Parallel":
        return Parallel(self.inner.rotated(rotation, center), self.rho)

    def _project(self, points: np.ndarray) -> np.ndarray:
        p = self.inner._project(points)
        diff = points - p
        d = np.linalg.norm(diff, axis=1)
        out = points.copy()
        outside = d > self.rho
        out[outside] = p[outside] + self.rho * diff[outside] / d[outside, None]
        return out

    def _signed_or_distance(self, points: np.ndarray) -> np.ndarray:
        # d*(M ⊕ ρB, x) = d*(M, x) - ρ；M 低维时 d*(M, ·) 取距离
        return self.inner._signed_or_distance(points) - self.rho


def core_polytope(body: ConvexBody) -> Tuple[Optional[Polytope], np.ndarray, float]:
    """
    将凸体拆成 (核心多胞形, 核心点集, 总半径)

    球的核心为单点，此时多胞形为 None。
    """
    if isinstance(body, Parallel):
        poly, points, radius = core_polytope(body.inner)
        return poly, points, radius + body.rho
    if isinstance(body, Ball):
        return None, body.center[None, :], body.radius
    if isinstance(body, Polytope):
        return body, body.points, 0.0
    raise GeometryError(f"未知凸体类型: {type(body).__name__}")


def _project_full(hull: HullData, points: np.ndarray) -> np.ndarray:
    """满维多胞形的最近点：2 维比较各边，3 维比较各面与各棱"""
    out = points.copy()
    chunk = _CHUNK_2D if hull.dim == 2 else _CHUNK_3D
    seg_a = hull.vertices[[e[0] for e in hull.edges]]
    seg_b = hull.vertices[[e[1] for e in hull.edges]]
    tol = 1e-12 * hull.scale
    for start in range(0, len(points), chunk):
        blk = points[start:start + chunk]
        values = hull.facet_values(blk)
        outside = values.max(axis=1) > 0
        if not outside.any():
            continue
        y = blk[outside]
        best, best_d2 = _nearest_on_segments(seg_a, seg_b, y)
        if hull.dim == 3:
            t = values[outside]
            cand = y[:, None, :] - t[:, :, None] * hull.normals[None, :, :]
            ok = (t > 0) & np.all(cand @ hull.normals.T - hull.offsets <= tol, axis=2)
            d2 = np.where(ok, t * t, np.inf)
            k = np.argmin(d2, axis=1)
            rows = np.arange(len(y))
            better = d2[rows, k] < best_d2
            best[better] = cand[rows[better], k[better]]
        view = out[start:start + chunk]
        view[outside] = best
    return out


def _nearest_on_segments(a: np.ndarray, b: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    t = np.einsum("mej,ej->me", y[:, None, :] - a[None], d) / dd[None]
    t = np.clip(t, 0.0, 1.0)
    cand = a[None] + t[:, :, None] * d[None]
    d2 = np.sum((y[:, None, :] - cand) ** 2, axis=2)
    k = np.argmin(d2, axis=1)
    rows = np.arange(len(y))
    return cand[rows, k], d2[rows, k]


def rotation_matrix(angle: float, axis: Optional[ArrayLike] = None) -> np.ndarray:
    """
    旋转矩阵：2 维为逆时针角 angle；3 维绕 axis（Rodrigues 公式）

    Args:
        angle: 弧度
        axis: 3 维旋转轴，2 维时忽略
    """
    c, s = np.cos(angle), np.sin(angle)
    if axis is None:
        return np.array([[c, -s], [s, c]])
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * kx + (1 - c) * kx @ kx
