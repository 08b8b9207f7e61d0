from .evaluate import (
    evaluate_normal_cycle,
    integrate_patch,
    normal_bundle_mass,
    orientation_positivity,
    patch_measure,
    quadrature_rule,
)
from .forms import (
    DifferentialForm,
    Polynomial,
    default_box,
    exact_form,
    form_by_name,
    perimeter_form,
    polynomial_form,
    pullback,
    random_polynomial_form,
    turning_form,
    zero_form,
)
from .multivector import MultiVector, basis, compound_matrix, orientation_determinant, pair, wedge_frames
from .patches import NormalBundlePatch, normal_bundle
from .probes import (
    OrientationProbeResult,
    closedness_probe,
    holder_smoothing,
    orientation_preservation_probe,
    parallel_rate_probe,
    rate_constant,
)

__all__ = [
    "DifferentialForm",
    "MultiVector",
    "NormalBundlePatch",
    "OrientationProbeResult",
    "Polynomial",
    "basis",
    "closedness_probe",
    "compound_matrix",
    "default_box",
    "evaluate_normal_cycle",
    "exact_form",
    "form_by_name",
    "holder_smoothing",
    "integrate_patch",
    "normal_bundle",
    "normal_bundle_mass",
    "orientation_determinant",
    "orientation_positivity",
    "pair",
    "parallel_rate_probe",
    "patch_measure",
    "perimeter_form",
    "polynomial_form",
    "pullback",
    "quadrature_rule",
    "random_polynomial_form",
    "rate_constant",
    "turning_form",
    "wedge_frames",
    "zero_form",
]
