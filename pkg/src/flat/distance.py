"""两个离散测度之间的 d_bL"""

from typing import Optional

from ..measures.discrete import PointMeasure
from .flow import dbl_flow
from .instance import DblCertificate, DblInstance
from .lp import DEFAULT_CAP, dbl_lp


def bounded_lipschitz_distance(
    mu: PointMeasure,
    nu: Optional[PointMeasure] = None,
    oracle: bool = False,
    cap: int = DEFAULT_CAP,
    tol: float = 1e-9,
    neighbors: int = 8,
    max_rounds: int = 60,
) -> DblCertificate:
    """
    d_bL(μ, ν)；oracle=True 时用精确 LP（受 cap 限制），否则用流求解器

    nu 缺省时把 mu 视为带符号的差测度。
    """
    inst = DblInstance.from_measures(mu, nu)
    if oracle:
        return dbl_lp(inst, cap=cap, tol=tol)
    return dbl_flow(inst, neighbors=neighbors, max_rounds=max_rounds, tol=tol)
