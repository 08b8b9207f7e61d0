"""d_bL 实例与证书

d_bL(μ, ν) = sup{ Σ w_k f_k : |f_k| <= 1, f_k - f_l <= d(s_k, s_l) }，
w_k = μ({s_k}) - ν({s_k})，d 为 R^{2n}（或边缘分布所在空间）中的欧氏距离。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import MeasureError
from ..measures.discrete import PointMeasure

# 约束剪枝：d >= 2 的 Lipschitz 约束被盒约束蕴含
PRUNE_DISTANCE = 2.0
_BLOCK_ENTRIES = 4_000_000


@dataclass(frozen=True, eq=False)
class DblInstance:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if len(self.points) < 1:
            raise MeasureError("d_bL 实例至少需要一个原子")
        if len(self.points) != len(self.weights):
            raise MeasureError("原子数与净权重数不一致")

    def __len__(self) -> int:
        return len(self.weights)

    @classmethod
    def from_measures(cls, mu: PointMeasure, nu: Optional[PointMeasure] = None) -> "DblInstance":
        """
        支撑并集上的净权重；nu 缺省时 mu 本身即为（带符号的）差

        Raises:
            MeasureError: 两个测度的原子维度不一致
        """
        if nu is None:
            combined = PointMeasure(mu.points, mu.weights, signed=True)
        else:
            if mu.points.shape[1] != nu.points.shape[1]:
                raise MeasureError(f"原子维度不一致: {mu.points.shape[1]} vs {nu.points.shape[1]}")
            combined = PointMeasure(
                np.vstack([mu.points, nu.points]),
                np.concatenate([mu.weights, -nu.weights]),
                signed=True,
            )
        merged = combined.merged()
        return cls(merged.points, merged.weights)

    def pairs_within(self, radius: float = PRUNE_DISTANCE):
        """d < radius 的无序对 (k, l, d)，k < l"""
        rows, cols, dists = [], [], []
        n = len(self)
        chunk = _rows_per_block(n)
        for start in range(0, n, chunk):
            block = cdist(self.points[start:start + chunk], self.points)
            k, l = np.nonzero(block < radius)
            k = k + start
            keep = k < l
            rows.append(k[keep])
            cols.append(l[keep])
            dists.append(block[k[keep] - start, l[keep]])
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(dists)


@dataclass(frozen=True, eq=False)
class DblCertificate:
    """
    最优值与见证函数

    gap 与 flow 只有流求解器给出。
    """

    value: float
    witness: np.ndarray
    box_residual: float
    lipschitz_residual: float
    objective_residual: float
    solver: str
    iterations: int = 1
    gap: Optional[float] = None
    flow: Optional[Dict[str, np.ndarray]] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "value": self.value,
            "witness": self.witness.tolist(),
            "box_residual": self.box_residual,
            "lipschitz_residual": self.lipschitz_residual,
            "objective_residual": self.objective_residual,
            "solver": self.solver,
            "iterations": self.iterations,
        }
        if self.gap is not None:
            data["gap"] = self.gap
        return data


def lipschitz_violations(points: np.ndarray, f: np.ndarray, tol: float = 0.0):
    """
    分块搜索违反 f_k - f_l <= d_kl + tol 的有序对

    Returns:
        (k, l, excess) 三个数组
    """
    ks, ls, excess = [], [], []
    chunk = _rows_per_block(len(points))
    for start in range(0, len(points), chunk):
        block = cdist(points[start:start + chunk], points)
        diff = f[start:start + chunk, None] - f[None, :] - block
        k, l = np.nonzero(diff > tol)
        ks.append(k + start)
        ls.append(l)
        excess.append(diff[k, l])
    return np.concatenate(ks), np.concatenate(ls), np.concatenate(excess)


def max_lipschitz_excess(points: np.ndarray, f: np.ndarray) -> float:
    worst = 0.0
    chunk = _rows_per_block(len(points))
    for start in range(0, len(points), chunk):
        block = cdist(points[start:start + chunk], points)
        diff = f[start:start + chunk, None] - f[None, :] - block
        worst = max(worst, float(diff.max()))
    return worst


def build_certificate(inst: DblInstance, witness: np.ndarray, solver: str, iterations: int = 1,
                      reported: Optional[float] = None, gap: Optional[float] = None,
                      flow: Optional[Dict[str, np.ndarray]] = None) -> DblCertificate:
    """对见证函数重新检验可行性与目标值"""
    value = float(inst.weights @ witness)
    box = float(max(np.max(np.abs(witness)) - 1.0, 0.0))
    lip = max_lipschitz_excess(inst.points, witness)
    objective = 0.0 if reported is None else abs(reported - value)
    return DblCertificate(
        value=value,
        witness=witness,
        box_residual=box,
        lipschitz_residual=lip,
        objective_residual=objective,
        solver=solver,
        iterations=iterations,
        gap=gap,
        flow=flow,
    )


def trivial_certificate(inst: DblInstance, solver: str) -> Optional[DblCertificate]:
    """单原子或零权重实例的闭式解"""
    if np.all(inst.weights == 0):
        return build_certificate(inst, np.zeros(len(inst)), solver, iterations=0, gap=0.0)
    if len(inst) == 1:
        return build_certificate(inst, np.sign(inst.weights), solver, iterations=0, gap=0.0)
    return None


def _rows_per_block(n: int) -> int:
    return max(1, _BLOCK_ENTRIES // max(n, 1))
