"""Bilevel programs with a linear lower level under belief-weighted
follower reactions.

The library characterizes the follower's optimal-solution polytope as a
function of the leader's decision, estimates the leader's expected cost
under a belief (uniform or density-weighted) over that polytope by
Monte-Carlo sampling, verifies the estimates against exact low-dimensional
geometry, and minimizes the resulting value function with a differential
evolution metaheuristic.
"""

from .errors import BilevelError
from .lp import HPolytope, LpResult, LpStatus, chebyshev_center, is_feasible, solve_lp, support_value
from .geometry import (
    AffineChart,
    FaceDescription,
    affine_chart,
    affine_dimension,
    build_face,
    implicit_equalities,
    sample_uniform,
)
from .reaction import (
    LinearLowerLevel,
    argmin_face,
    domain_box,
    domain_contains,
    feasible_set,
    lower_value,
)
from .belief import BeliefSpec, MCEstimate, centroid_estimate, expected_value, support_check
from .exact import PolygonFace, enumerate_vertices_2d, exact_expectation, example22_closed_form
from .expressions import Expression, parse_expression
from .problems import BilevelProblem, LinearTheta, builtin, parse_problem, serialize_problem
from .evolution import DEConfig, SolveReport, de_minimize, fixed_seed_stream

__version__ = "0.1.0"

__all__ = [
    "AffineChart",
    "BeliefSpec",
    "BilevelError",
    "BilevelProblem",
    "DEConfig",
    "Expression",
    "FaceDescription",
    "HPolytope",
    "LinearLowerLevel",
    "LinearTheta",
    "LpResult",
    "LpStatus",
    "MCEstimate",
    "PolygonFace",
    "SolveReport",
    "affine_chart",
    "affine_dimension",
    "argmin_face",
    "build_face",
    "builtin",
    "centroid_estimate",
    "chebyshev_center",
    "de_minimize",
    "domain_box",
    "domain_contains",
    "enumerate_vertices_2d",
    "exact_expectation",
    "example22_closed_form",
    "expected_value",
    "feasible_set",
    "fixed_seed_stream",
    "implicit_equalities",
    "is_feasible",
    "lower_value",
    "parse_expression",
    "parse_problem",
    "sample_uniform",
    "serialize_problem",
    "solve_lp",
    "support_check",
    "support_value",
    "__version__",
]
