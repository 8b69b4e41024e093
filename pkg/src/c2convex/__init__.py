"""Convex C^2 Lusin approximation of convex piecewise polynomials.

Given a convex piecewise polynomial ``f``, a measure budget and an error
profile, :func:`approximate` returns a convex C^2 piecewise polynomial ``g``
that agrees with ``f`` outside a set of measure below the budget and stays
within the profile everywhere.
"""

from .bridge import (
    Bridge,
    BridgeKind,
    BumpDensity,
    EndpointData,
    Feasibility,
    InfeasibleReason,
    edge_ramped_density,
    endpoint_data,
    epsilon_bound,
    feasibility,
    glue,
    height_certificate,
    hermite_bridge,
    second_antiderivative,
    squeeze_check,
    triangle_bump,
)
from .errors import *  # noqa: F401,F403
from .oracle import OracleConfig, SampleReport, fd_check, quad_moments, sample_checks
from .piecewise import (
    ConvexFn,
    PiecewiseFn,
    Regularity,
    Scales,
    check_convex,
    disagreement_measure,
    lipschitz_const,
    scales,
    sup_abs_diff,
    tangent_gap,
)
from .pipeline import (
    ApproxReport,
    CorrectionInterval,
    ToleranceConfig,
    approximate,
    approximate_graded,
    profile_violation,
    verify,
)
from .regularize import KinkRecord, round_kinks

__version__ = "0.1.0"
