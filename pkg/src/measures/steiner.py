"""Steiner 公式 - 单位球体积 κ_m、内蕴体积与平行体体积的闭式"""

from math import comb

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import gamma

from ..errors import GeometryError, IndexOutOfRangeError
from ..geometry.bodies import Ball, ConvexBody, Parallel, Polytope
from .discrete import DiscreteMeasure

# κ_m，m <= 4 取 50 位十进制常数
_KAPPA = {
    0: float("1"),
    1: float("2"),
    2: float("3.1415926535897932384626433832795028841971693993751"),
    3: float("4.1887902047863909846168578443726705122628925325001"),
    4: float("4.9348022005446793094172454999380755676568497036204"),
}


def kappa(m: int) -> float:
    """m 维单位球的体积"""
    if m < 0:
        raise IndexOutOfRangeError(f"κ_m 要求 m >= 0，收到 {m}")
    if m in _KAPPA:
        return _KAPPA[m]
    return float(np.pi ** (m / 2) / gamma(m / 2 + 1))


def intrinsic_volumes(body: ConvexBody) -> np.ndarray:
    """
    内蕴体积 (V_0, ..., V_n)

    多胞形由面分解闭式给出；球与平行体用 Steiner 公式换算。
    """
    n = body.dim
    if isinstance(body, Ball):
        r = body.radius
        return np.array([comb(n, i) * kappa(n) / kappa(n - i) * r ** i for i in range(n + 1)])
    if isinstance(body, Parallel):
        inner = intrinsic_volumes(body.inner)
        return _steiner_transfer(inner, body.rho, n)
    if isinstance(body, Polytope):
        return _polytope_intrinsic_volumes(body)
    raise GeometryError(f"未知凸体类型: {type(body).__name__}")


def _steiner_transfer(inner: np.ndarray, rho: float, n: int) -> np.ndarray:
    """V_j(K_ρ) = Σ_{i<=j} C(n-i, n-j) κ_{n-i}/κ_{n-j} ρ^{j-i} V_i(K)"""
    out = np.zeros(n + 1)
    for j in range(n + 1):
        for i in range(j + 1):
            out[j] += comb(n - i, n - j) * kappa(n - i) / kappa(n - j) * rho ** (j - i) * inner[i]
    return out


def _polytope_intrinsic_volumes(poly: Polytope) -> np.ndarray:
    n = poly.dim
    rank = poly.frame.rank
    out = np.zeros(n + 1)
    if rank == n:
        from .exact import face_intrinsic_volumes

        out[:n] = face_intrinsic_volumes(poly)
        out[n] = ConvexHull(poly.hull.vertices).volume
        return out
    # 低维多胞形：内蕴体积与嵌入维数无关
    out[0] = 1.0
    if rank == 1:
        coords = poly.frame.to_local(poly.points)[:, 0]
        out[1] = float(coords.max() - coords.min())
    elif rank == 2:
        out[:3] = _polytope_intrinsic_volumes(poly._local_polygon)
    return out


def volume(body: ConvexBody) -> float:
    return float(intrinsic_volumes(body)[body.dim])


def parallel_volume(body: ConvexBody, rho: float) -> float:
    """vol(K ⊕ ρB) = Σ_{i=0}^{n} ρ^{n-i} κ_{n-i} V_i(K)"""
    if rho < 0:
        raise GeometryError(f"ρ 必须非负，收到 {rho}")
    n = body.dim
    v = intrinsic_volumes(body)
    return float(sum(rho ** (n - i) * kappa(n - i) * v[i] for i in range(n + 1)))


def shell_volume(body: ConvexBody, rho: float) -> float:
    """vol(K_ρ ∖ K)"""
    return parallel_volume(body, rho) - volume(body)


def theta_from_lambda(measure: DiscreteMeasure, n: int, i: int) -> DiscreteMeasure:
    """n κ_{n-i} Λ_i = C(n, i) Θ_i"""
    if not 0 <= i <= n - 1:
        raise IndexOutOfRangeError(f"i 必须在 0..{n - 1} 内，收到 {i}")
    return measure.scaled(n * kappa(n - i) / comb(n, i))


def steiner_closure(totals, rho: float, n: int) -> float:
    """由 Λ_0..Λ_{n-1} 的总质量预测 μ_{K,ρ} 的总质量"""
    return float(sum(rho ** (n - i) * kappa(n - i) * totals[i] for i in range(n)))
