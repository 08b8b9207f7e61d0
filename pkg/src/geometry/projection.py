"""度量投影、距离与方向场的函数式接口"""

from typing import Optional, Tuple

import numpy as np

from ..errors import DimensionMismatchError
from .bodies import ArrayLike, ConvexBody, as_points


def support_function(body: ConvexBody, u: ArrayLike):
    """h_K(u)；u 为单位向量或 (m, n) 单位向量组"""
    dirs, _ = as_points(u, body.dim)
    if not np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-9):
        raise DimensionMismatchError("支撑函数方向必须是单位向量")
    return body.support(u)


def metric_projection(body: ConvexBody, x: ArrayLike):
    """p(K, x)：K 中离 x 最近的点；x ∈ K 时返回 x"""
    return body.project(x)


def distance_and_direction(body: ConvexBody, x: ArrayLike) -> Tuple[float, Optional[np.ndarray]]:
    """
    计算 d(K, x) 与 u(K, x)

    Returns:
        (d, u)：x ∈ K 时 u 为 None
    """
    point = np.asarray(x, dtype=float)
    p = body.project(point)
    diff = point - p
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        return 0.0, None
    return d, diff / d


def distances_and_directions(body: ConvexBody, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    批量版本

    Returns:
        (p, d, u)：d = 0 的行 u 为零向量
    """
    pts, _ = as_points(points, body.dim)
    p = body._project(pts)
    diff = pts - p
    d = np.linalg.norm(diff, axis=1)
    u = np.zeros_like(diff)
    nz = d > 0
    u[nz] = diff[nz] / d[nz, None]
    return p, d, u


def signed_boundary_distance(body: ConvexBody, x: ArrayLike):
    """d*(K, x)：内部为负、外部为正、边界为零"""
    return body.signed_distance(x)


def on_boundary(body: ConvexBody, x: ArrayLike, tol: float = 1e-9):
    """|d*(K, x)| <= tol·(1 + 外接半径)"""
    pts, single = as_points(x, body.dim)
    ok = np.abs(body._signed_or_distance(pts)) <= body.boundary_tol(tol)
    return bool(ok[0]) if single else ok
