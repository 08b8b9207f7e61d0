"""d_bL 的精确 LP 预言机（HiGHS 对偶单纯形）"""

import logging

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..errors import OracleCapExceededError, SolverNotConvergedError
from .instance import DblCertificate, DblInstance, build_certificate, trivial_certificate

logger = logging.getLogger("LP")

DEFAULT_CAP = 400
_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def dbl_lp(inst: DblInstance, cap: int = DEFAULT_CAP, tol: float = 1e-9) -> DblCertificate:
    """
    maximize Σ w_k f_k  s.t.  -1 <= f_k <= 1,  |f_k - f_l| <= d_kl（仅 d_kl < 2）

    Args:
        inst: d_bL 实例
        cap: 原子数上限
        tol: 事后可行性与目标值复核容差

    Raises:
        OracleCapExceededError: 原子数超过 cap，应改用 dbl_flow
        SolverNotConvergedError: 求解失败或复核不通过
    """
    n = len(inst)
    if n > cap:
        raise OracleCapExceededError(f"原子数 {n} 超过 LP 上限 {cap}，请使用 dbl_flow")
    trivial = trivial_certificate(inst, "lp")
    if trivial is not None:
        return trivial

    k, l, d = inst.pairs_within()
    m = len(d)
    if m:
        # 第 2j 行 f_k - f_l <= d_j，第 2j+1 行 f_l - f_k <= d_j
        rows = np.repeat(np.arange(2 * m), 2)
        cols = np.column_stack([k, l, l, k]).reshape(-1)
        vals = np.tile([1.0, -1.0], 2 * m)
        A_ub = sparse.csr_matrix((vals, (rows, cols)), shape=(2 * m, n))
        b_ub = np.repeat(d, 2)
    else:
        A_ub, b_ub = None, None

    res = linprog(
        -inst.weights,
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=(-1.0, 1.0),
        method="highs-ds",
        options=_HIGHS_OPTIONS,
    )
    if res.status != 0:
        raise SolverNotConvergedError(f"LP 求解失败: {res.message}")

    cert = build_certificate(inst, np.asarray(res.x), "lp", iterations=int(res.nit), reported=-float(res.fun))
    if max(cert.box_residual, cert.lipschitz_residual, cert.objective_residual) > tol:
        raise SolverNotConvergedError(
            f"LP 解复核失败: box={cert.box_residual:.2g}, lip={cert.lipschitz_residual:.2g}, "
            f"obj={cert.objective_residual:.2g}"
        )
    logger.debug(f"N={n}, 约束 {2 * m} 条, 值 {cert.value:.12g}")
    return cert
