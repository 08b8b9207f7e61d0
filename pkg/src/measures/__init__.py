from .coupling import (
    CouplingTerms,
    coupling_terms,
    projection_term_bound,
    symmetric_difference_bound,
    union_diameter,
)
from .discrete import (
    DiscreteMeasure,
    PointMeasure,
    SupportElement,
    area_measure,
    concatenate,
    curvature_measure,
    total_variation,
)
from .exact import QuadratureMeasure, exact_support_measure, intrinsic_volume, support_measures
from .faces import FaceCell, face_decomposition
from .sampling import ShellSampler, mc_local_parallel_measure, shell_box
from .steiner import (
    intrinsic_volumes,
    kappa,
    parallel_volume,
    shell_volume,
    steiner_closure,
    theta_from_lambda,
    volume,
)
from .vandermonde import VandermondeSystem, extract_support_measures, vandermonde_coefficients

__all__ = [
    "CouplingTerms",
    "DiscreteMeasure",
    "FaceCell",
    "PointMeasure",
    "QuadratureMeasure",
    "ShellSampler",
    "SupportElement",
    "VandermondeSystem",
    "area_measure",
    "concatenate",
    "coupling_terms",
    "curvature_measure",
    "exact_support_measure",
    "extract_support_measures",
    "face_decomposition",
    "intrinsic_volume",
    "intrinsic_volumes",
    "kappa",
    "mc_local_parallel_measure",
    "parallel_volume",
    "projection_term_bound",
    "shell_box",
    "shell_volume",
    "steiner_closure",
    "support_measures",
    "symmetric_difference_bound",
    "theta_from_lambda",
    "total_variation",
    "union_diameter",
    "vandermonde_coefficients",
    "volume",
]
