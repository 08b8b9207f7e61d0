"""Normal cycle 探针 - 平行体收敛速率、闭性、G 的定向保持"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import GeometryError, PreconditionError
from ..geometry.bodies import ConvexBody, Parallel, Polytope
from ..geometry.boundary_maps import BodyPairContext, map_G
from ..seeding import make_generator
from .evaluate import evaluate_normal_cycle, patch_measure
from .forms import DifferentialForm, Polynomial, exact_form
from .multivector import orientation_determinant
from .patches import NormalBundlePatch, normal_bundle

logger = logging.getLogger("Probe")

_STREAM_ORIENTATION = 31
_MAX_DRAW_ROUNDS = 50


def parallel_rate_probe(
    K: ConvexBody,
    phi: DifferentialForm,
    eps_grid: Sequence[float],
    level: int = 3,
    tol: float = 1e-8,
) -> List[Tuple[float, float]]:
    """
    |T_{K_ε}(φ) - T_K(φ)| 随 ε 的变化

    Args:
        K: 满维多胞形
        phi: (n-1)-形式
        eps_grid: ε ∈ (0, 1]

    Returns:
        [(ε, 差值)]，按输入顺序
    """
    if not isinstance(K, Polytope):
        raise GeometryError(f"速率探针要求多胞形，收到 {K!r}")
    for eps in eps_grid:
        if not 0 < eps <= 1:
            raise GeometryError(f"ε 必须在 (0, 1] 内，收到 {eps}")
    base, _ = evaluate_normal_cycle(K, phi, level=level, tol=tol)
    rows = []
    for eps in eps_grid:
        value, _ = evaluate_normal_cycle(Parallel(K, eps), phi, level=level, tol=tol)
        rows.append((float(eps), abs(value - base)))
    logger.info(f"{phi.name}: C = {rate_constant(rows):.6g}")
    return rows


def rate_constant(rows: Sequence[Tuple[float, float]]) -> float:
    """经验常数 C = max 差值/ε"""
    return max((diff / eps for eps, diff in rows), default=0.0)


def closedness_probe(K: ConvexBody, f: Polynomial, level: int = 3, tol: float = 1e-8) -> float:
    """T_K(df)，闭流上应为 0"""
    if K.dim != 2:
        raise GeometryError("闭性探针仅适用于 n = 2")
    value, _ = evaluate_normal_cycle(K, exact_form(f), level=level, tol=tol)
    return value


def holder_smoothing(delta: float, n: int) -> Tuple[float, float]:
    """
    平衡光滑化误差与 G 位移误差的 ε 选取

    Returns:
        (ε = δ^{1/(2n+1)}, ε + δ/ε^{n-1} + ε^{-(n-1)}·√(δ/ε))
    """
    if not delta > 0:
        raise GeometryError(f"δ 必须为正，收到 {delta}")
    eps = delta ** (1.0 / (2 * n + 1))
    bound = eps + delta / eps ** (n - 1) + eps ** (-(n - 1)) * np.sqrt(delta / eps)
    return float(eps), float(bound)


@dataclass(frozen=True)
class OrientationProbeResult:
    """accepted 个样本中定向一致的比例；rejected 为落在层边界附近被重抽的样本数"""

    fraction: float
    accepted: int
    rejected: int
    mismatched: int

    @property
    def passed(self) -> bool:
        return self.mismatched == 0

    def to_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "mismatched": self.mismatched,
            "passed": self.passed,
        }


def _draw_params(domain: str, rng: np.random.Generator, count: int) -> np.ndarray:
    if domain == "interval":
        return rng.random((count, 1))
    params = rng.random((count, 2))
    if domain == "triangle":
        flip = params.sum(axis=1) > 1
        params[flip] = 1.0 - params[flip]
    return params


def _boundary_gap(domain: str, params: np.ndarray) -> np.ndarray:
    """参数到参数域边界的距离"""
    if domain == "triangle":
        return np.minimum(params.min(axis=1), 1.0 - params.sum(axis=1))
    return np.minimum(params, 1.0 - params).min(axis=1)


def _pushed_frames(ctx: BodyPairContext, patch: NormalBundlePatch, cell: int,
                   params: np.ndarray, step: float) -> np.ndarray:
    """G 的中心差分微分作用在定向切标架上，返回 (q, n-1, 2n)"""
    n = ctx.dim
    out = np.empty((len(params), n - 1, 2 * n))
    for j in range(n - 1):
        hi, lo = params.copy(), params.copy()
        hi[:, j] += step
        lo[:, j] -= step
        z_hi, _ = patch.chart(hi, cell)
        z_lo, _ = patch.chart(lo, cell)
        g_hi = np.hstack(map_G(ctx, z_hi[:, :n], z_hi[:, n:]))
        g_lo = np.hstack(map_G(ctx, z_lo[:, :n], z_lo[:, n:]))
        out[:, j, :] = (g_hi - g_lo) / (2 * step)
    out[:, 0, :] *= patch.signs[cell]
    return out


def orientation_preservation_probe(
    ctx: BodyPairContext,
    samples: int,
    seed: int = 0,
    fd_step: float = 1e-5,
    margin: float = 1e-4,
) -> OrientationProbeResult:
    """
    G 是否把 a_K 推到与 a_L 同向的切向量

    在 Nor K 上按测度抽样，离层边界（弧长意义）不足 margin 的样本被丢弃重抽。

    Args:
        ctx: 满足 δ < ε/(4n) 的凸体对
        samples: 接受的样本数
        seed: 随机种子
        fd_step: 参数坐标中的差分步长
        margin: 层边界排除距离

    Returns:
        OrientationProbeResult

    Raises:
        PreconditionError: δ >= ε/(4n)，或在重抽预算内凑不齐样本
    """
    ctx.require_orientation_regime()
    n = ctx.dim
    rng = make_generator(seed, _STREAM_ORIENTATION)
    cells = [(p, c, m) for p in normal_bundle(ctx.K) for c, m in enumerate(patch_measure(p, level=2))]
    masses = np.array([m for _, _, m in cells])
    probs = masses / masses.sum()

    accepted = rejected = mismatched = 0
    for _ in range(_MAX_DRAW_ROUNDS):
        need = samples - accepted
        if need <= 0:
            break
        choice = rng.choice(len(cells), size=need, p=probs)
        for k in np.unique(choice):
            patch, cell, mass = cells[k]
            params = _draw_params(patch.domain, rng, int(np.sum(choice == k)))
            # 参数域边长约为 mass^{1/(n-1)}
            extent = mass ** (1.0 / (n - 1))
            ok = _boundary_gap(patch.domain, params) * extent >= max(margin, 2 * fd_step * extent)
            rejected += int(np.sum(~ok))
            params = params[ok]
            if len(params) == 0:
                continue
            frames = _pushed_frames(ctx, patch, cell, params, fd_step)
            z, _ = patch.chart(params, cell)
            _, v = map_G(ctx, z[:, :n], z[:, n:])
            det = orientation_determinant(frames, v, 1.0)
            mismatched += int(np.sum(det <= 0))
            accepted += len(params)
    else:
        if accepted < samples:
            raise PreconditionError(f"重抽 {_MAX_DRAW_ROUNDS} 轮后只接受了 {accepted}/{samples} 个样本")

    fraction = 1.0 - mismatched / accepted if accepted else 0.0
    logger.info(f"定向保持: {fraction:.6f}（接受 {accepted}，丢弃 {rejected}）")
    return OrientationProbeResult(fraction, accepted, rejected, mismatched)
