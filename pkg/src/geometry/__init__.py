from .bodies import Ball, ConvexBody, Parallel, Polytope, core_polytope, rotation_matrix
from .boundary_maps import (
    BodyPairContext,
    ProbeResult,
    angle_probe,
    boundary_projection_map,
    chart_lipschitz_probe,
    displacement_probe_G,
    empirical_lipschitz,
    inverse_boundary_map,
    lipschitz_probe_G,
    lipschitz_probe_p,
    lipschitz_probe_spherical_image,
    map_G,
    nearest_boundary_point,
    normal_bundle_chart,
    run_lipschitz_probes,
    sample_boundary,
    spherical_image,
)
from .hausdorff import HausdorffResult, hausdorff_distance
from .io import body_from_dict, dump_body, load_body
from .projection import (
    distance_and_direction,
    metric_projection,
    on_boundary,
    signed_boundary_distance,
    support_function,
)

__all__ = [
    "Ball",
    "BodyPairContext",
    "ConvexBody",
    "HausdorffResult",
    "Parallel",
    "Polytope",
    "ProbeResult",
    "angle_probe",
    "body_from_dict",
    "boundary_projection_map",
    "chart_lipschitz_probe",
    "core_polytope",
    "displacement_probe_G",
    "distance_and_direction",
    "dump_body",
    "empirical_lipschitz",
    "hausdorff_distance",
    "inverse_boundary_map",
    "lipschitz_probe_G",
    "lipschitz_probe_p",
    "lipschitz_probe_spherical_image",
    "load_body",
    "map_G",
    "metric_projection",
    "nearest_boundary_point",
    "normal_bundle_chart",
    "on_boundary",
    "rotation_matrix",
    "run_lipschitz_probes",
    "sample_boundary",
    "signed_boundary_distance",
    "spherical_image",
    "support_function",
]
