"""Minimal Lipschitz extensions on finite graphs.

The package computes the pointwise minimax value of labeled samples (the
smallest constant lam such that some point lies within lam times the query
distance of every sample value, together with the point achieving it),
solves the scalar extension problem on graphs exactly by the
connecting-path construction, iterates local replacements for the
vector-valued problem, and verifies the results.
"""

from .errors import (
    BadParams,
    BoundaryMismatch,
    BoundaryVertex,
    DegenerateSimplex,
    DimensionMismatch,
    InvalidPath,
    LipextError,
    MethodUnavailable,
    MultipleAttachments,
    NoCertifiedSubset,
    NotConverged,
    NotInAffineHull,
    ParseError,
    QueryCoincidesWithSample,
    UnknownVertex,
    ValidationError,
)
from .geometry import (
    Biquadratic,
    SquaredDistanceMatrix,
    barycentric_coordinates,
    biquadratic_coefficients,
    cayley_menger,
    cayley_menger_points,
    in_convex_hull,
    is_simplex,
    solve_biquadratic,
    solve_sphere_intersection,
)
from .graph import (
    Graph,
    VertexFunction,
    Violation,
    geodesic_distance,
    is_tighter,
    lipschitz_ratio,
    local_lipschitz,
    neighborhood,
    validate,
)
from .kpoint import (
    KPointResult,
    LabeledPointSet,
    certificate_check,
    kpoint_oracle,
    kpoint_scalar,
    kpoint_vector,
    lip_constant,
    pair_candidate,
)
from .scalar import (
    ConnectingPath,
    ExtensionResult,
    SubgraphState,
    VerifyReport,
    apply_path,
    finalize_components,
    find_max_slope_connecting_path,
    gauss_seidel_scalar,
    initial_state,
    solve_scalar,
    verify_extension,
)
from .vector import (
    IterationReport,
    boundary_hull_gap,
    iterate_tight,
    local_replacement_tightens,
    residual,
)

__version__ = "0.1.0"

__all__ = [
    "BadParams",
    "Biquadratic",
    "BoundaryMismatch",
    "BoundaryVertex",
    "ConnectingPath",
    "DegenerateSimplex",
    "DimensionMismatch",
    "ExtensionResult",
    "Graph",
    "InvalidPath",
    "IterationReport",
    "KPointResult",
    "LabeledPointSet",
    "LipextError",
    "MethodUnavailable",
    "MultipleAttachments",
    "NoCertifiedSubset",
    "NotConverged",
    "NotInAffineHull",
    "ParseError",
    "QueryCoincidesWithSample",
    "SquaredDistanceMatrix",
    "SubgraphState",
    "UnknownVertex",
    "ValidationError",
    "VertexFunction",
    "VerifyReport",
    "Violation",
    "apply_path",
    "barycentric_coordinates",
    "biquadratic_coefficients",
    "boundary_hull_gap",
    "cayley_menger",
    "cayley_menger_points",
    "certificate_check",
    "finalize_components",
    "find_max_slope_connecting_path",
    "gauss_seidel_scalar",
    "geodesic_distance",
    "in_convex_hull",
    "initial_state",
    "is_simplex",
    "is_tighter",
    "iterate_tight",
    "kpoint_oracle",
    "kpoint_scalar",
    "kpoint_vector",
    "lip_constant",
    "lipschitz_ratio",
    "local_lipschitz",
    "local_replacement_tightens",
    "neighborhood",
    "pair_candidate",
    "residual",
    "solve_biquadratic",
    "solve_scalar",
    "solve_sphere_intersection",
    "validate",
    "verify_extension",
    "__version__",
]
