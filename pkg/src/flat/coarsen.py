"""Coarsening - 把 Σ 上的原子吸附到网格并合并，附带 d_bL 误差界"""

import logging
from typing import Tuple

import numpy as np

from ..errors import MeasureError
from ..measures.discrete import DiscreteMeasure

logger = logging.getLogger("Coarsen")


def snap_positions(x: np.ndarray, h: float) -> np.ndarray:
    """x 吸附到边长 h 的盒网格中心"""
    return (np.floor(x / h) + 0.5) * h


def snap_directions(u: np.ndarray, h: float) -> np.ndarray:
    """
    u 吸附到角度网格

    2 维：步长 2π/ceil(2π/h) 的等角网格。
    3 维：极角分带（步长 π/ceil(π/h)），每带按 sin(带中心) 划分方位角。
    """
    if u.shape[1] == 2:
        step = 2 * np.pi / np.ceil(2 * np.pi / h)
        theta = np.round(np.arctan2(u[:, 1], u[:, 0]) / step) * step
        return np.column_stack([np.cos(theta), np.sin(theta)])

    polar_step = np.pi / np.ceil(np.pi / h)
    polar = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
    band = np.minimum(np.floor(polar / polar_step), np.ceil(np.pi / h) - 1)
    center = (band + 0.5) * polar_step
    slots = np.maximum(1.0, np.ceil(2 * np.pi * np.sin(center) / h))
    azimuth_step = 2 * np.pi / slots
    azimuth = np.round(np.arctan2(u[:, 1], u[:, 0]) / azimuth_step) * azimuth_step
    return np.column_stack([
        np.sin(center) * np.cos(azimuth),
        np.sin(center) * np.sin(azimuth),
        np.cos(center),
    ])


def coarsen(mu: DiscreteMeasure, h: float) -> Tuple[DiscreteMeasure, float]:
    """
    吸附并合并原子

    Args:
        mu: 输入测度
        h: 网格尺寸

    Returns:
        (coarse, bound)：bound = Σ|w_k|·|s_k - s'_k| >= d_bL(mu, coarse)
    """
    if not h > 0:
        raise MeasureError(f"网格尺寸必须为正，收到 {h}")
    if len(mu) == 0:
        return mu, 0.0
    x = snap_positions(mu.x, h)
    u = snap_directions(mu.u, h)
    displacement = np.linalg.norm(np.hstack([x - mu.x, u - mu.u]), axis=1)
    bound = float(np.abs(mu.w) @ displacement)
    coarse = DiscreteMeasure(x, u, mu.w, mu.signed, mu.rho).merged()
    logger.debug(f"h={h:g}: {len(mu)} → {len(coarse)} 个原子, 误差界 {bound:.3g}")
    return coarse, bound
