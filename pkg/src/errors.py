"""异常定义 - 几何、测度、求解器与实验各层共用"""


class HarnessError(Exception):
    """所有可预期错误的基类，main() 在最外层统一捕获"""


# ---- 几何 ----

class GeometryError(HarnessError, ValueError):
    """几何输入不满足前置条件"""


class DimensionMismatchError(GeometryError):
    """向量维度与凸体维度不一致"""


class DegenerateBodyError(GeometryError):
    """凸体退化（非满维、顶点共线/共面等）"""


class NotOnBoundaryError(GeometryError):
    """点不在边界 ∂K 上（超出容差）"""


class PreconditionError(GeometryError):
    """映射的适用条件不成立（例如 δ ≥ ε/(4n)）"""


class ToleranceUnachievableError(GeometryError):
    """在评估预算内无法达到要求的精度"""


# ---- 测度 ----

class MeasureError(HarnessError, ValueError):
    """测度构造或变换出错"""


class IndexOutOfRangeError(MeasureError):
    """支撑测度下标 i 不在 {0, ..., n-1} 内"""


class RadiiMismatchError(MeasureError):
    """平行测度的半径与 Vandermonde 系统不一致"""


class InvalidSeedError(MeasureError):
    """随机种子不是合法的 64 位非负整数"""


# ---- 求解器 ----

class SolverError(HarnessError, RuntimeError):
    """数值求解失败"""


class OracleCapExceededError(SolverError):
    """原子数超过 LP 精确求解上限，应改用 dbl_flow"""


class SolverNotConvergedError(SolverError):
    """迭代预算内未收敛"""


class QuadratureNotConvergedError(SolverError):
    """最高细化层级下求积误差仍超过容差"""


class BisectionError(SolverError):
    """二分搜索失败"""

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


# ---- 配置与实验 ----

class ConfigError(HarnessError, ValueError):
    """配置文件内容非法"""


class SweepRowError(HarnessError):
    """扫描中某一行失败，携带该行的 δ"""

    def __init__(self, message: str, delta: float):
        super().__init__(f"δ={delta:g}: {message}")
        self.delta = delta


class FitError(HarnessError, ValueError):
    """对数-对数拟合的有效行不足"""
