"""R^{2n} 上的 m-向量与 m-余向量（字典序基）

坐标顺序为 (x_1..x_n, u_1..u_n)；基 e_{i1}∧…∧e_{im} 按 itertools.combinations
的字典序排列。系数向量在该基下的欧氏内积即 m-向量的标准内积。
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Tuple

import numpy as np

from ..errors import DimensionMismatchError


@lru_cache(maxsize=None)
def basis(dim: int, degree: int) -> Tuple[Tuple[int, ...], ...]:
    """R^dim 中 degree-向量的字典序多重指标"""
    return tuple(combinations(range(dim), degree))


@lru_cache(maxsize=None)
def _index_of(dim: int, degree: int) -> dict:
    return {idx: k for k, idx in enumerate(basis(dim, degree))}


@dataclass(frozen=True, eq=False)
class MultiVector:
    """ambient 维空间中的 degree-向量"""

    ambient: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        expected = len(basis(self.ambient, self.degree))
        if self.coeffs.shape != (expected,):
            raise DimensionMismatchError(f"{self.degree}-向量需要 {expected} 个系数，收到 {self.coeffs.shape}")

    @classmethod
    def simple(cls, vectors: np.ndarray) -> "MultiVector":
        """v_1 ∧ … ∧ v_m"""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        return cls(vectors.shape[1], vectors.shape[0], wedge_frames(vectors[None])[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def wedge(self, other: "MultiVector") -> "MultiVector":
        if self.ambient != other.ambient:
            raise DimensionMismatchError("外积的两个因子必须在同一空间中")
        degree = self.degree + other.degree
        out = np.zeros(len(basis(self.ambient, degree)))
        index = _index_of(self.ambient, degree)
        for i, I in enumerate(basis(self.ambient, self.degree)):
            if self.coeffs[i] == 0:
                continue
            for j, J in enumerate(basis(self.ambient, other.degree)):
                if set(I) & set(J):
                    continue
                merged = I + J
                out[index[tuple(sorted(merged))]] += _permutation_sign(merged) * self.coeffs[i] * other.coeffs[j]
        return MultiVector(self.ambient, degree, out)


def _permutation_sign(seq: Tuple[int, ...]) -> int:
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inversions % 2 else 1


def pair(xi: MultiVector, phi: np.ndarray) -> float:
    """⟨ξ, Φ⟩：字典序对偶基下的双线性配对"""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != xi.coeffs.shape:
        raise DimensionMismatchError(f"次数不匹配: 向量 {xi.coeffs.shape}，余向量 {phi.shape}")
    return float(xi.coeffs @ phi)


def wedge_frames(frames: np.ndarray) -> np.ndarray:
    """
    批量计算 J_1 ∧ … ∧ J_m 的系数

    Args:
        frames: (q, m, dim)

    Returns:
        (q, C(dim, m))，每个系数是对应列的 m 阶子式
    """
    q, m, dim = frames.shape
    if m == 1:
        return frames[:, 0, :].copy()
    idx = basis(dim, m)
    if m == 2:
        a, b = frames[:, 0, :], frames[:, 1, :]
        i = np.array([I[0] for I in idx])
        j = np.array([I[1] for I in idx])
        return a[:, i] * b[:, j] - a[:, j] * b[:, i]
    return np.stack([np.linalg.det(frames[:, :, list(I)]) for I in idx], axis=1)


def compound_matrix(Q: np.ndarray, degree: int) -> np.ndarray:
    """degree 阶复合矩阵 C[I, J] = det Q[I, J]，描述线性映射在 degree-向量上的作用"""
    idx = basis(Q.shape[0], degree)
    out = np.empty((len(idx), len(idx)))
    for r, I in enumerate(idx):
        for c, J in enumerate(idx):
            out[r, c] = np.linalg.det(Q[np.ix_(I, J)])
    return out


def orientation_determinant(frames: np.ndarray, u: np.ndarray, varrho: float) -> np.ndarray:
    """
    ⟨⋀(Π_1 + ϱΠ_2) J ∧ u, Ω_n⟩ = det[(J_1^x + ϱJ_1^u), …, u]

    Args:
        frames: (q, n-1, 2n) 切标架
        u: (q, n) 法向
        varrho: ϱ > 0
    """
    n = u.shape[1]
    projected = frames[:, :, :n] + varrho * frames[:, :, n:]
    return np.linalg.det(np.concatenate([projected, u[:, None, :]], axis=1))
