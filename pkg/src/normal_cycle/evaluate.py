"""T_K(φ) 的分片求积

T_K(φ) = ∫_{Nor K} ⟨a_K, φ⟩ dH^{n-1}，逐分片用复合 Gauss-Legendre 求积：
区间分成 2^level 段，正方形与三角形分成 4^level 块；三角形经 Duffy 映射
(ξ, η) ↦ (ξ, η(1-ξ)) 由正方形规则得到。误差估计取相邻两层之差。
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatchError, GeometryError, QuadratureNotConvergedError
from ..geometry.bodies import ConvexBody
from ..measures.sampling import run_shards
from .forms import DifferentialForm
from .multivector import orientation_determinant, wedge_frames
from .patches import NormalBundlePatch, normal_bundle

logger = logging.getLogger("NormalCycle")

ORIENTATION_RHOS = (0.1, 1.0, 10.0)


@lru_cache(maxsize=None)
def _gauss_unit(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _composite_interval(level: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_unit(order)
    pieces = 2 ** level
    starts = np.arange(pieces) / pieces
    nodes = (starts[:, None] + x[None, :] / pieces).reshape(-1)
    weights = np.tile(w / pieces, pieces)
    return nodes, weights


@lru_cache(maxsize=None)
def quadrature_rule(domain: str, level: int, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """
    参数域上的复合求积规则

    Args:
        domain: interval | square | triangle（单位单纯形 s, t >= 0, s + t <= 1）
        level: 细化层级
        order: 每段的 Gauss 点数

    Returns:
        (nodes (q, d), weights (q,))
    """
    if level < 0:
        raise GeometryError(f"细化层级必须非负，收到 {level}")
    x, w = _composite_interval(level, order)
    if domain == "interval":
        nodes, weights = x[:, None], w
    elif domain in ("square", "triangle"):
        xi, eta = np.meshgrid(x, x, indexing="ij")
        wx, wy = np.meshgrid(w, w, indexing="ij")
        xi, eta, weights = xi.reshape(-1), eta.reshape(-1), (wx * wy).reshape(-1)
        if domain == "triangle":
            eta = eta * (1.0 - xi)
            weights = weights * (1.0 - xi)
        nodes = np.column_stack([xi, eta])
    else:
        raise GeometryError(f"未知参数域: {domain}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def integrate_patch(patch: NormalBundlePatch, phi: DifferentialForm, level: int, order: int = 8) -> float:
    """单个分片上的 ∫⟨a_K, φ⟩"""
    nodes, weights = quadrature_rule(patch.domain, level, order)
    total = 0.0
    for cell in range(patch.cells):
        z, xi = patch.tangent(nodes, cell)
        total += float(weights @ np.einsum("ij,ij->i", xi, phi(z)))
    return total


def _sum_patches(patches: Sequence[NormalBundlePatch], phi: DifferentialForm, level: int,
                 order: int, workers: int) -> float:
    values = run_shards(lambda k: integrate_patch(patches[k], phi, level, order), len(patches), workers)
    # 按分片编号顺序累加
    return float(sum(values))


def evaluate_normal_cycle(
    K: ConvexBody,
    phi: DifferentialForm,
    level: int = 3,
    tol: float = 1e-8,
    order: int = 8,
    max_level: Optional[int] = None,
    workers: int = 1,
) -> Tuple[float, float]:
    """
    T_K(φ)

    从 level 开始比较相邻两层，误差超过 tol 时继续细化直到 max_level。

    Args:
        K: 满维多胞形、球或其平行体
        phi: (n-1)-形式
        level: 起始细化层级（>= 1）
        tol: 误差容差
        order: Gauss 点数
        max_level: 最高层级，默认 level + 3
        workers: 分片并行线程数

    Returns:
        (value, err_est)

    Raises:
        DimensionMismatchError: φ 的次数不是 n-1
        QuadratureNotConvergedError: 最高层级下误差仍超过 tol
    """
    if phi.n != K.dim:
        raise DimensionMismatchError(f"形式作用于 R^{2 * phi.n}，凸体在 R^{K.dim} 中")
    level = max(1, int(level))
    max_level = level + 3 if max_level is None else max(level, int(max_level))
    patches = normal_bundle(K)

    previous = _sum_patches(patches, phi, level - 1, order, workers)
    for current_level in range(level, max_level + 1):
        value = _sum_patches(patches, phi, current_level, order, workers)
        err = abs(value - previous)
        if err <= tol:
            logger.debug(f"{phi.name}: level={current_level}, T={value:.15g}, err={err:.2g}")
            return value, err
        previous = value

    raise QuadratureNotConvergedError(
        f"{phi.name} 在 level={max_level} 时误差 {err:.3g} 仍超过容差 {tol:.3g}"
    )


def orientation_positivity(
    K: ConvexBody, level: int = 2, order: int = 8, rhos: Sequence[float] = ORIENTATION_RHOS
) -> float:
    """
    全部求积节点上定向行列式的最小值（应为正）

    Returns:
        min det[(Π_1 + ϱΠ_2)a_K, u]，遍历 ϱ ∈ rhos
    """
    lowest = np.inf
    for patch in normal_bundle(K):
        nodes, _ = quadrature_rule(patch.domain, level, order)
        for cell in range(patch.cells):
            z, frames = patch.chart(nodes, cell)
            # 符号只乘在第一个切向量上
            oriented = frames.copy()
            oriented[:, 0, :] *= patch.signs[cell]
            u = z[:, patch.n:]
            for rho in rhos:
                lowest = min(lowest, float(orientation_determinant(oriented, u, rho).min()))
    return lowest


def patch_measure(patch: NormalBundlePatch, level: int = 3, order: int = 8) -> List[float]:
    """各单元的 H^{n-1} 测度 ∫|J_1∧…∧J_{n-1}|"""
    nodes, weights = quadrature_rule(patch.domain, level, order)
    out = []
    for cell in range(patch.cells):
        _, frames = patch.chart(nodes, cell)
        out.append(float(weights @ np.linalg.norm(wedge_frames(frames), axis=1)))
    return out


def normal_bundle_mass(K: ConvexBody, level: int = 3, order: int = 8) -> float:
    """H^{n-1}(Nor K)"""
    return float(sum(sum(patch_measure(p, level, order)) for p in normal_bundle(K)))
