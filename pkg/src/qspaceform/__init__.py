"""Verification toolkit for the identity-map stability of quaternion space forms M^n(c)."""

from .checks import Check, CheckReport
from .curvature import (
    SpaceFormParams,
    check_symmetries,
    constant_curvature_reduction,
    curvature_term_operator,
    quaternion_sectional,
    riemann,
    sectional_curvature,
)
from .errors import QSFError
from .hessian_identity import (
    HessianBreakdown,
    co1_identity,
    co2_identity,
    cri1_density,
    cri2_density,
    hessian_closed_form,
    pointwise_stability_check,
    proof_chain_check,
    total_curvature_density,
)
from .quaternion_frame import (
    AdaptedFrame,
    QuaternionStructure,
    build_adapted_frame,
    build_standard_structure,
    conjugated_structure,
    verify_frame,
    verify_structure,
)
from .spectral_criterion import (
    Classification,
    SpectralData,
    StabilityReport,
    Verdict,
    classify,
    full_report,
    qps_constants,
    qps_margin,
    smith_verdict,
)

__version__ = "0.1.0"
