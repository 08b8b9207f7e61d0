"""Vandermonde extraction - 由 μ_{K,ρ_j}（ρ_j = j/n）反解 Λ_0..Λ_{n-1}"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..errors import DimensionMismatchError, RadiiMismatchError
from .discrete import DiscreteMeasure, concatenate
from .steiner import kappa

logger = logging.getLogger("Vandermonde")


@dataclass(frozen=True, eq=False)
class VandermondeSystem:
    """
    matrix[j, i] = ρ_j^{n-i} κ_{n-i}，coefficients = matrix^{-1}

    于是 Λ_i = Σ_j coefficients[i, j] μ_{K,ρ_j}。
    """

    n: int
    radii: np.ndarray
    matrix: np.ndarray
    coefficients: np.ndarray

    def residual(self) -> float:
        """|A·a - I| 的最大元"""
        return float(np.max(np.abs(self.matrix @ self.coefficients - np.eye(self.n))))


def vandermonde_coefficients(n: int) -> VandermondeSystem:
    if n not in (2, 3):
        raise DimensionMismatchError(f"仅支持 n ∈ {{2, 3}}，收到 {n}")
    radii = np.arange(1, n + 1) / n
    matrix = np.array([[rho ** (n - i) * kappa(n - i) for i in range(n)] for rho in radii])
    coefficients = np.linalg.solve(matrix, np.eye(n))
    return VandermondeSystem(n, radii, matrix, coefficients)


def extract_support_measures(mus: Sequence[DiscreteMeasure], system: VandermondeSystem) -> List[DiscreteMeasure]:
    """
    Λ_i(K, ·) = Σ_j a_{ij} μ_{K,ρ_j}

    Raises:
        RadiiMismatchError: 测度个数或半径与系统不一致
    """
    if len(mus) != system.n:
        raise RadiiMismatchError(f"需要 {system.n} 个平行测度，收到 {len(mus)}")
    for mu, rho in zip(mus, system.radii):
        if mu.rho is None or abs(mu.rho - rho) > 1e-12:
            raise RadiiMismatchError(f"平行测度半径 {mu.rho} 与系统半径 {rho:g} 不一致")
        if mu.dim != system.n:
            raise RadiiMismatchError(f"测度维度 {mu.dim} 与系统维度 {system.n} 不一致")

    out = []
    for i in range(system.n):
        parts = [mu.scaled(system.coefficients[i, j]) for j, mu in enumerate(mus)]
        out.append(concatenate(parts, signed=True))
        logger.debug(f"Λ_{i}: {len(out[-1])} 个原子，总质量 {out[-1].total_mass:.6g}")
    return out
