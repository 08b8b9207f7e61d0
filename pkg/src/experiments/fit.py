"""对数-对数最小二乘拟合"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy.stats import linregress

from ..errors import FitError

logger = logging.getLogger("Sweep")

MIN_FIT_ROWS = 3


@dataclass(frozen=True)
class LogLogFit:
    """
    log y = slope·log x + intercept

    Attributes:
        residuals: 参与拟合各行的对数残差
        excluded: 因非正值被剔除的行号
    """

    slope: float
    intercept: float
    max_residual: float
    residuals: List[float] = field(default_factory=list)
    excluded: List[int] = field(default_factory=list)

    def __iter__(self):
        return iter((self.slope, self.intercept, self.max_residual))

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "max_residual": self.max_residual,
            "excluded": list(self.excluded),
        }


def fit_loglog(x: Sequence[float], y: Sequence[float]) -> LogLogFit:
    """
    对 (log x, log y) 做普通最小二乘

    Args:
        x: 自变量（通常是 d_H）
        y: 因变量（距离或差值）

    Returns:
        LogLogFit；x 或 y 非正的行被剔除并记录在 excluded 中

    Raises:
        FitError: 有效行不足 3 行
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise FitError(f"x 与 y 长度不一致: {x.shape} vs {y.shape}")
    valid = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    excluded = np.flatnonzero(~valid).tolist()
    if excluded:
        logger.warning(f"拟合剔除 {len(excluded)} 个非正行: {excluded}")
    if valid.sum() < MIN_FIT_ROWS:
        raise FitError(f"有效行只有 {int(valid.sum())} 行，至少需要 {MIN_FIT_ROWS} 行")

    lx, ly = np.log(x[valid]), np.log(y[valid])
    result = linregress(lx, ly)
    residuals = ly - (result.slope * lx + result.intercept)
    return LogLogFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        max_residual=float(np.max(np.abs(residuals))),
        residuals=residuals.tolist(),
        excluded=excluded,
    )
