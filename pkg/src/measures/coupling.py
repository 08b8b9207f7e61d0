"""平行测度差的三项积分上界

d_bL(μ_{K,ρ}, μ_{L,ρ}) <= ∫_{K^ρ∩L^ρ} |p_K - p_L| + ∫_{K^ρ∩L^ρ} |u_K - u_L| + H^n(K^ρ △ L^ρ)

三项都在公共包围盒上用同一批样本估计，附带 3σ 误差条。
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import MeasureError
from ..geometry.bodies import ConvexBody
from ..geometry.projection import distances_and_directions
from ..seeding import validate_seed
from .sampling import box_volume, draw_box_points, run_shards, shard_sizes, shell_box
from .steiner import parallel_volume, volume

MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class CouplingTerms:
    term_p: float
    term_u: float
    term_sym: float
    err_p: float
    err_u: float
    err_sym: float
    intersection_volume: float
    samples: int

    @property
    def total(self) -> float:
        return self.term_p + self.term_u + self.term_sym

    @property
    def total_error(self) -> float:
        return self.err_p + self.err_u + self.err_sym

    def to_dict(self) -> dict:
        return asdict(self)


def coupling_terms(
    K: ConvexBody,
    L: ConvexBody,
    rho: float,
    samples: int,
    seed: int,
    shard_size: int = 65536,
    workers: int = 1,
) -> CouplingTerms:
    """
    三项的 Monte Carlo 估计

    Args:
        K, L: 同维凸体
        rho: 平行半径
        samples: 盒内样本数（>= 10^4）
        seed: 随机种子；与 ShellSampler 使用相同 seed 与盒时样本一致

    Returns:
        CouplingTerms
    """
    validate_seed(seed)
    if not rho > 0:
        raise MeasureError(f"ρ 必须为正，收到 {rho}")
    if samples < MIN_SAMPLES:
        raise MeasureError(f"样本数至少为 {MIN_SAMPLES}，收到 {samples}")

    box = shell_box(K, L, rho=rho)
    sizes = shard_sizes(samples, shard_size)

    def shard(k: int) -> np.ndarray:
        points = draw_box_points(box, seed, k, sizes[k])
        pk, dk, uk = distances_and_directions(K, points)
        pl, dl, ul = distances_and_directions(L, points)
        in_k = (dk > 0) & (dk <= rho)
        in_l = (dl > 0) & (dl <= rho)
        both = in_k & in_l
        fp = np.where(both, np.linalg.norm(pk - pl, axis=1), 0.0)
        fu = np.where(both, np.linalg.norm(uk - ul, axis=1), 0.0)
        fs = (in_k ^ in_l).astype(float)
        # 每个分片只回传一阶、二阶矩
        return np.array([
            fp.sum(), (fp ** 2).sum(),
            fu.sum(), (fu ** 2).sum(),
            fs.sum(),
            both.sum(),
        ])

    sums = np.sum(run_shards(shard, len(sizes), workers), axis=0)
    vol = box_volume(box)

    def estimate(first: float, second: float):
        mean = first / samples
        var = max(second / samples - mean ** 2, 0.0)
        return vol * mean, 3 * vol * np.sqrt(var / samples)

    term_p, err_p = estimate(sums[0], sums[1])
    term_u, err_u = estimate(sums[2], sums[3])
    term_sym, err_sym = estimate(sums[4], sums[4])
    return CouplingTerms(
        term_p=float(term_p),
        term_u=float(term_u),
        term_sym=float(term_sym),
        err_p=float(err_p),
        err_u=float(err_u),
        err_sym=float(err_sym),
        intersection_volume=float(vol * sums[5] / samples),
        samples=samples,
    )


def union_diameter(K: ConvexBody, L: ConvexBody, rho: float) -> float:
    """diam(K_ρ ∪ L_ρ)"""
    pk, rk = K.skeleton()
    pl, rl = L.skeleton()
    parts = [(pk, rk + rho), (pl, rl + rho)]
    best = 0.0
    for a, ra in parts:
        for b, rb in parts:
            best = max(best, float(cdist(a, b).max()) + ra + rb)
    return best


def projection_term_bound(K: ConvexBody, L: ConvexBody, rho: float, delta: float,
                          intersection_volume: float) -> float:
    """√(5D)·H^n(K^ρ∩L^ρ)·√δ，D = diam(K_ρ ∪ L_ρ)"""
    return float(np.sqrt(5 * union_diameter(K, L, rho)) * intersection_volume * np.sqrt(delta))


def symmetric_difference_bound(K: ConvexBody, L: ConvexBody, rho: float, delta: float) -> float:
    """
    K^ρ∖L^ρ ⊂ (K_δ∖K) ∪ (L_{ρ+δ}∖L_ρ)，对称地再交换 K 与 L

    要求 d_H(K, L) <= δ。
    """
    total = 0.0
    for A, B in ((K, L), (L, K)):
        total += parallel_volume(A, delta) - volume(A)
        total += parallel_volume(B, rho + delta) - parallel_volume(B, rho)
    return float(total)
