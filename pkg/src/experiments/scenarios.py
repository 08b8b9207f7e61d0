"""Scenarios - 按目标 Hausdorff 距离构造凸体对"""

from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import BisectionError, ConfigError, GeometryError
from ..geometry.bodies import Ball, ConvexBody, Polytope, core_polytope, rotation_matrix
from ..geometry.hausdorff import hausdorff_distance
from ..seeding import make_generator

SCENARIOS = ("translate", "rotate", "vertex-perturb", "ball-vs-polygon")

_STREAM_SCENARIO = 41
# 二分时 Hausdorff 距离的相对精度
_RELATIVE_TOL = 1e-3
_SCAN_STEPS = 64


class GeneratedPair(NamedTuple):
    """K、L、实测 d_H 及其误差界；parameter 为平移量、旋转角、扰动幅度或多边形边数"""

    K: ConvexBody
    L: ConvexBody
    d_h: float
    error_bound: float
    parameter: float


def body_center(body: ConvexBody) -> np.ndarray:
    """核心点集的质心（旋转中心）"""
    _, points, _ = core_polytope(body)
    return points.mean(axis=0)


def _measured(K: ConvexBody, L: ConvexBody, delta: float) -> Tuple[float, float]:
    result = hausdorff_distance(K, L, tol=max(1e-9, _RELATIVE_TOL * delta))
    return result.value, result.error_bound


def _solve_magnitude(make: Callable[[float], ConvexBody], base: ConvexBody, delta: float, limit: float) -> float:
    """
    找 s 使 d_H(base, make(s)) = δ

    d_H 关于幅度未必单调（旋转有对称周期），因此在 (0, limit] 上等距扫描，
    取第一个越过 δ 的区间再 brentq。

    Raises:
        BisectionError: 在 limit 以内找不到包围区间
    """
    def gap(s: float) -> float:
        return _measured(base, make(s), delta)[0] - delta

    lo = 0.0
    for hi in limit * np.arange(1, _SCAN_STEPS + 1) / _SCAN_STEPS:
        if gap(hi) >= 0:
            break
        lo = hi
    else:
        raise BisectionError(f"d_H 在 [0, {limit:g}] 内达不到 δ={delta:g}", bracket=(0.0, limit))
    try:
        return float(brentq(gap, lo, hi, xtol=1e-12, rtol=1e-10))
    except ValueError as e:
        raise BisectionError(f"二分失败: {e}", bracket=(lo, hi)) from e


def _rotation_axis(base: ConvexBody, seed: int) -> Optional[np.ndarray]:
    if base.dim == 2:
        return None
    rng = make_generator(seed, _STREAM_SCENARIO)
    axis = rng.normal(size=3)
    return axis / np.linalg.norm(axis)


def regular_polygon(center: np.ndarray, radius: float, m: int, phase: float = 0.0) -> Polytope:
    """内接于 B(center, radius) 的正 m 边形"""
    theta = phase + 2 * np.pi * np.arange(m) / m
    return Polytope(center + radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def polygon_sides_for(delta: float, radius: float = 1.0) -> int:
    """使 r(1 - cos(π/m)) <= δ 的最小 m >= 3"""
    if delta >= radius * 0.5:
        return 3
    return max(3, int(np.ceil(np.pi / np.arccos(1.0 - delta / radius))))


def generate_pair(scenario: str, base: ConvexBody, delta: float, seed: int = 0) -> GeneratedPair:
    """
    构造 d_H 约为 δ 的凸体对

    translate 精确；rotate 与 vertex-perturb 对实测 d_H 二分；
    ball-vs-polygon 取内接正多边形，d_H = r(1 - cos(π/m))。

    Args:
        scenario: translate | rotate | vertex-perturb | ball-vs-polygon
        base: 基准凸体
        delta: 目标距离
        seed: 扰动方向与旋转轴的随机种子

    Returns:
        GeneratedPair，实测 d_H ∈ [δ/2, 2δ]

    Raises:
        BisectionError: 找不到满足要求的幅度
    """
    if not delta > 0:
        raise GeometryError(f"δ 必须为正，收到 {delta}")
    n = base.dim

    if scenario == "translate":
        shift = np.zeros(n)
        shift[0] = delta
        return GeneratedPair(base, base.translated(shift), float(delta), 0.0, float(delta))

    if scenario == "rotate":
        center = body_center(base)
        axis = _rotation_axis(base, seed)

        def make(angle: float) -> ConvexBody:
            return base.rotated(rotation_matrix(angle, axis), center)

        parameter = _solve_magnitude(make, base, delta, limit=np.pi)
        L = make(parameter)

    elif scenario == "vertex-perturb":
        if not isinstance(base, Polytope):
            raise ConfigError("vertex-perturb 场景要求多胞形基准体")
        rng = make_generator(seed, _STREAM_SCENARIO)
        directions = rng.normal(size=base.points.shape)
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)

        def make(scale: float) -> ConvexBody:
            return Polytope(base.points + scale * directions)

        parameter = _solve_magnitude(make, base, delta, limit=8 * delta)
        L = make(parameter)

    elif scenario == "ball-vs-polygon":
        if not isinstance(base, Ball) or n != 2:
            raise ConfigError("ball-vs-polygon 场景要求 2 维球基准体")
        m = polygon_sides_for(delta, base.radius)
        L = regular_polygon(base.center, base.radius, m)
        parameter = float(m)

    else:
        raise ConfigError(f"未知场景: {scenario!r}，可选 {SCENARIOS}")

    d_h, bound = _measured(base, L, delta)
    if not delta / 2 <= d_h <= 2 * delta:
        raise BisectionError(f"实测 d_H={d_h:g} 不在 [δ/2, 2δ] 内（δ={delta:g}）", bracket=(delta / 2, 2 * delta))
    return GeneratedPair(base, L, d_h, bound, parameter)
