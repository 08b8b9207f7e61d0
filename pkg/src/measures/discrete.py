"""离散测度 - Σ = R^n × S^{n-1} 上的加权原子"""

import json
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np

from ..errors import MeasureError
from ..geometry.bodies import ConvexBody

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SupportElement:
    """支撑元 (x, u)：x ∈ R^n，u 为单位向量"""

    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        if abs(np.linalg.norm(self.u) - 1.0) > _UNIT_TOL:
            raise MeasureError(f"u 必须是单位向量，|u| = {np.linalg.norm(self.u)!r}")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.u])


class PointMeasure:
    """R^d 中的原子测度（边缘分布、flat 距离的通用输入）"""

    def __init__(self, points: np.ndarray, weights: np.ndarray, signed: bool = False):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if len(points) != len(weights):
            raise MeasureError(f"原子数 {len(points)} 与权重数 {len(weights)} 不一致")
        if not np.all(np.isfinite(weights)) or not np.all(np.isfinite(points)):
            raise MeasureError("原子坐标与权重必须有限")
        if not signed and np.any(weights < 0):
            raise MeasureError("无符号测度的权重必须非负")
        self.points = points
        self.weights = weights
        self.signed = signed

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def variation_mass(self) -> float:
        return float(np.abs(self.weights).sum())

    def merged(self) -> "PointMeasure":
        """合并坐标完全相同的原子"""
        if len(self) == 0:
            return self
        uniq, inverse = np.unique(self.points, axis=0, return_inverse=True)
        weights = np.bincount(inverse.reshape(-1), weights=self.weights, minlength=len(uniq))
        return PointMeasure(uniq, weights, self.signed)


class DiscreteMeasure(PointMeasure):
    """
    Σ 上的离散测度

    原子存为 (x, u, w) 三个数组；points 为 R^{2n} 中的拼接坐标 (x, u)。
    rho 记录平行测度 μ_{K,ρ} 的半径（其他测度为 None）。
    """

    def __init__(
        self,
        x: np.ndarray,
        u: np.ndarray,
        w: np.ndarray,
        signed: bool = False,
        rho: Optional[float] = None,
    ):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if x.ndim != 2 or x.shape != u.shape or x.shape[1] not in (2, 3):
            raise MeasureError(f"x 与 u 必须是同形状的 (m, n) 数组，收到 {x.shape} 与 {u.shape}")
        if len(u) and np.max(np.abs(np.linalg.norm(u, axis=1) - 1.0)) > 1e-9:
            raise MeasureError("u 必须是单位向量")
        super().__init__(np.hstack([x, u]), w, signed)
        self.x = x
        self.u = u
        self.rho = rho

    @property
    def w(self) -> np.ndarray:
        return self.weights

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def __repr__(self) -> str:
        return (f"DiscreteMeasure(dim={self.dim}, atoms={len(self)}, mass={self.total_mass:.6g}, "
                f"signed={self.signed})")

    def atoms(self) -> Iterator[tuple]:
        for k in range(len(self)):
            yield SupportElement(self.x[k], self.u[k]), float(self.w[k])

    @classmethod
    def empty(cls, dim: int, signed: bool = False) -> "DiscreteMeasure":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)), np.zeros(0), signed)

    @classmethod
    def from_points(cls, points: np.ndarray, weights: np.ndarray, signed: bool = False,
                    rho: Optional[float] = None) -> "DiscreteMeasure":
        points = np.asarray(points, dtype=float)
        n = points.shape[1] // 2
        return cls(points[:, :n], points[:, n:], weights, signed, rho)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        signed = self.signed or factor < 0
        return DiscreteMeasure(self.x, self.u, self.w * factor, signed, self.rho)

    def merged(self) -> "DiscreteMeasure":
        merged = super().merged()
        return DiscreteMeasure.from_points(merged.points, merged.weights, self.signed, self.rho)

    def x_marginal(self) -> PointMeasure:
        return PointMeasure(self.x, self.w, self.signed).merged()

    def u_marginal(self) -> PointMeasure:
        return PointMeasure(self.u, self.w, self.signed).merged()

    def restricted(self, mask: np.ndarray) -> "DiscreteMeasure":
        return DiscreteMeasure(self.x[mask], self.u[mask], self.w[mask], self.signed, self.rho)

    def nor_residuals(self, body: ConvexBody, tau: float = 1e-3) -> tuple:
        """
        Nor K 成员检验的残差

        Returns:
            (|h_K(u) - x·u|, |d(K, x + τu) - τ|) 两个数组
        """
        support_gap = np.abs(np.asarray(body.support(self.u)) - np.einsum("ij,ij->i", self.x, self.u))
        dist_gap = np.abs(np.asarray(body.distance(self.x + tau * self.u)) - tau)
        return support_gap, dist_gap

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "atoms": [
                {"x": self.x[k].tolist(), "u": self.u[k].tolist(), "w": float(self.w[k])}
                for k in range(len(self))
            ],
            "signed": self.signed,
        }
        if self.rho is not None:
            data["rho"] = self.rho
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteMeasure":
        try:
            atoms = data["atoms"]
            if not atoms:
                raise MeasureError("测度文件没有原子，无法确定维度")
            x = np.array([a["x"] for a in atoms], dtype=float)
            u = np.array([a["u"] for a in atoms], dtype=float)
            w = np.array([a["w"] for a in atoms], dtype=float)
        except (KeyError, TypeError) as e:
            raise MeasureError(f"测度 JSON 格式错误: {e}") from e
        return cls(x, u, w, bool(data.get("signed", False)), data.get("rho"))

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)

    @classmethod
    def load(cls, path: str) -> "DiscreteMeasure":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def concatenate(measures: Sequence[DiscreteMeasure], signed: Optional[bool] = None) -> DiscreteMeasure:
    """原子并（不合并）"""
    if not measures:
        raise MeasureError("至少需要一个测度")
    if signed is None:
        signed = any(m.signed for m in measures)
    return DiscreteMeasure(
        np.vstack([m.x for m in measures]),
        np.vstack([m.u for m in measures]),
        np.concatenate([m.w for m in measures]),
        signed,
    )


def area_measure(lambda_top: DiscreteMeasure) -> PointMeasure:
    """S_{n-1}(K, ·) = 2·Λ_{n-1}(K, R^n × ·)"""
    marginal = lambda_top.u_marginal()
    return PointMeasure(marginal.points, 2.0 * marginal.weights, marginal.signed)


def curvature_measure(lambda_i: DiscreteMeasure) -> PointMeasure:
    """Λ_i(K, · × S^{n-1})"""
    return lambda_i.x_marginal()


def total_variation(mu: PointMeasure, nu: PointMeasure) -> float:
    """
    原子完全重合意义下的全变差距离 Σ|μ({s}) - ν({s})|

    旋转后面法向互不重合，因此面积测度的全变差不随旋转角变小。
    """
    points = np.vstack([mu.points, nu.points])
    weights = np.concatenate([mu.weights, -nu.weights])
    if len(points) == 0:
        return 0.0
    _, inverse = np.unique(points, axis=0, return_inverse=True)
    net = np.bincount(inverse.reshape(-1), weights=weights)
    return float(np.abs(net).sum())


def masses(measures: List[DiscreteMeasure]) -> np.ndarray:
    return np.array([m.total_mass for m in measures])
