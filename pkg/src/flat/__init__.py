from .coarsen import coarsen, snap_directions, snap_positions
from .distance import bounded_lipschitz_distance
from .flow import FlowSolver, dbl_flow
from .instance import DblCertificate, DblInstance, lipschitz_violations
from .lp import dbl_lp

__all__ = [
    "DblCertificate",
    "DblInstance",
    "FlowSolver",
    "bounded_lipschitz_distance",
    "coarsen",
    "dbl_flow",
    "dbl_lp",
    "lipschitz_violations",
    "snap_directions",
    "snap_positions",
]
