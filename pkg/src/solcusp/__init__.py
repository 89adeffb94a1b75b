"""Finite-volume negatively curved cusp metrics over compact Sol 3-manifolds.

The library builds the cusp metric

    g = dt^2 + f(t)^2 dz^2 + e^(-2t) (e^(-2z) dx^2 + e^(2z) dy^2)

over a Sol mapping-torus cross section, verifies its curvature tensor by
two independent pipelines, validates the four warping-function conditions,
certifies pinched negative sectional curvature over all tangent 2-planes,
and computes the cusp volume with a certified truncation bound.
"""

from .certify import (
    CertificationReport,
    CurvatureBounds,
    PlaneChart,
    certify,
    extremize_k,
    extremize_point,
    rescale_to_pinching,
)
from .curvature import (
    DegeneratePlaneError,
    MatchReport,
    MetricPoint,
    RiemannTensor,
    christoffel,
    flat_metric_point,
    frame_plane_curvatures,
    hyperbolic_metric_point,
    match_component_table,
    metric_at,
    component_table,
    riemann_closed,
    riemann_fd,
    sectional_curvature,
    sol_product_metric_point,
)
from .lattice import (
    AffineMap3,
    AnosovMatrix,
    SolLattice,
    build_sol_lattice,
    cross_section_volume,
    verify_isometry,
)
from .volume import VolumeResult, adaptive_quad, cusp_volume
from .warp import (
    ConditionMargins,
    Interpolated,
    InterpolationError,
    PureExp,
    ShiftedExp,
    build_interpolation,
    check_conditions,
    condition_margins,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap3",
    "AnosovMatrix",
    "CertificationReport",
    "ConditionMargins",
    "CurvatureBounds",
    "DegeneratePlaneError",
    "Interpolated",
    "InterpolationError",
    "MatchReport",
    "MetricPoint",
    "PlaneChart",
    "PureExp",
    "RiemannTensor",
    "ShiftedExp",
    "SolLattice",
    "VolumeResult",
    "adaptive_quad",
    "build_interpolation",
    "build_sol_lattice",
    "certify",
    "check_conditions",
    "christoffel",
    "condition_margins",
    "cross_section_volume",
    "cusp_volume",
    "extremize_k",
    "extremize_point",
    "flat_metric_point",
    "frame_plane_curvatures",
    "hyperbolic_metric_point",
    "match_component_table",
    "metric_at",
    "component_table",
    "rescale_to_pinching",
    "riemann_closed",
    "riemann_fd",
    "sectional_curvature",
    "sol_product_metric_point",
    "verify_isometry",
]
