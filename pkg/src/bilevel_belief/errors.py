"""Exception hierarchy for the bilevel_belief library.

Every error raised by the library derives from :class:`BilevelError`, so
callers can catch one base class. The CLI maps subfamilies to exit codes:
input/parse problems -> 2, infeasible/unbounded/out-of-domain -> 3,
numerical breakdown -> 4.
"""


class BilevelError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------------------
# Input and parsing errors (CLI exit code 2)

class InputError(BilevelError):
    """Malformed input: bad file, bad expression, bad dimensions."""


class ProblemSyntaxError(InputError):
    """Unparseable problem file or expression. Carries line/column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class DimensionMismatch(InputError):
    """Vector/matrix dimensions do not agree."""


class UnknownVariable(InputError):
    """An expression references a variable outside the declared dimensions."""


class UnknownBuiltin(InputError):
    """No built-in problem with the requested name."""


class ConfigInvalid(InputError):
    """A solver configuration violates its invariants."""


# ---------------------------------------------------------------------------
# Geometry / feasibility errors (CLI exit code 3)

class GeometryError(BilevelError):
    """Infeasible, unbounded, or degenerate geometric situation."""


class EmptyPolytope(GeometryError):
    """Operation requires a nonempty polytope."""


class UnboundedPolytope(GeometryError):
    """Operation requires a bounded polytope."""


class UnboundedFeasibleRegion(UnboundedPolytope):
    """The joint constraint polytope of a problem is unbounded."""


class EmptyJointPolytope(GeometryError):
    """The joint constraint polytope of a problem is empty."""


class EmptyFeasibleSet(GeometryError):
    """The follower's feasible set at the queried leader decision is empty."""


class EmptyDomain(GeometryError):
    """The leader's domain is empty."""


class OutsideDomain(GeometryError):
    """The queried leader decision is outside the leader's domain."""


class OutsideSimplex(GeometryError):
    """The queried point is outside the closed-form formula's simplex."""


class DegenerateFace(GeometryError):
    """A face advertised as 2-dimensional has (numerically) zero area."""


class UnsupportedDimension(BilevelError):
    """Exact evaluation is only available for faces of dimension <= 2."""


# ---------------------------------------------------------------------------
# Numerical errors (CLI exit code 4)

class NumericalFailure(BilevelError):
    """Pivot breakdown, unstable rank decision, or similar numeric trouble."""


class RejectionBudgetExhausted(NumericalFailure):
    """Rejection sampling ran out of budget and hit-and-run could not start."""


class ZeroDensityMass(NumericalFailure):
    """A conditional belief's density sums to zero over the sample batch."""


class ExpressionEvalError(NumericalFailure):
    """Expression evaluation produced a non-finite value (division by zero,
    log of a non-positive number, ...)."""
