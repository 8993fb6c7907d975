"""The parametric lower level: feasible set, value function, optimal face,
and the leader's domain.

The follower solves  min <c, y>  s.t.  B(x) y <= b - A x  for a leader
decision x. In the plain linear class B(x) = B is constant; the parametric
extension B(x) = B + sum_i x_i * B_i allows rows whose y-coefficients are
affine in x (needed for reaction maps like {y : y1 <= x*y2}). All
operations instantiate B at a fixed x, so they work identically for both
classes; only the joint (x, y) polytope is restricted to the plain class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyFeasibleSet,
    EmptyJointPolytope,
    UnboundedFeasibleRegion,
    UnboundedPolytope,
)
from .geometry import FaceDescription, build_face
from .lp import OPT_TOL, HPolytope, LpStatus, is_feasible, solve_lp, support_value


@dataclass
class LinearLowerLevel:
    """Follower data (A, B, b, c) with optional parametric terms.

    parametric is a tuple of (leader index i, matrix B_i) pairs, each B_i
    of shape (k, p), contributing x_i * B_i to the instantiated B(x).
    """

    A: np.ndarray
    B: np.ndarray
    b: np.ndarray
    c: np.ndarray
    parametric: tuple = field(default_factory=tuple)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.c = np.asarray(self.c, dtype=float).ravel()
        k, d = self.A.shape
        kb, p = self.B.shape
        if kb != k or self.b.shape[0] != k:
            raise DimensionMismatch(
                f"A has {k} rows but B has {kb} and b has {self.b.shape[0]}")
        if self.c.shape[0] != p:
            raise DimensionMismatch(f"c has length {self.c.shape[0]}, expected {p}")
        terms = []
        for idx, Bi in self.parametric:
            Bi = np.atleast_2d(np.asarray(Bi, dtype=float))
            if Bi.shape != (k, p):
                raise DimensionMismatch(
                    f"parametric matrix for x{idx} has shape {Bi.shape}, expected {(k, p)}")
            if not (1 <= idx <= d):
                raise DimensionMismatch(f"parametric index {idx} outside 1..{d}")
            if not np.isfinite(Bi).all():
                raise ValueError("lower-level data must be finite")
            terms.append((int(idx), Bi))
        self.parametric = tuple(terms)
        for arr in (self.A, self.B, self.b, self.c):
            if not np.isfinite(arr).all():
                raise ValueError("lower-level data must be finite")

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        return self.B.shape[1]

    @property
    def is_parametric(self) -> bool:
        return bool(self.parametric)

    def B_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        B = self.B
        for idx, Bi in self.parametric:
            B = B + x[idx - 1] * Bi
        return B

    def joint_polytope(self) -> HPolytope:
        """{(x, y) : Ax + By <= b}; only defined for the plain linear class."""
        if self.is_parametric:
            raise ValueError("the joint (x, y) set of a parametric problem is not a polytope")
        return HPolytope(np.hstack([self.A, self.B]), self.b)

    def leader_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows constraining x alone (zero B row and zero parametric rows)."""
        pure = np.abs(self.B).max(axis=1) <= 0.0
        for _, Bi in self.parametric:
            pure &= np.abs(Bi).max(axis=1) <= 0.0
        return self.A[pure], self.b[pure]


def feasible_set(lower: LinearLowerLevel, x) -> HPolytope:
    """K(x) = {y : B(x) y <= b - A x}; may be empty."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != lower.d:
        raise DimensionMismatch(f"x has length {x.shape[0]}, expected {lower.d}")
    return HPolytope(lower.B_at(x), lower.b - lower.A @ x)


def domain_contains(lower: LinearLowerLevel, x) -> bool:
    """True iff the follower has a feasible reaction at x."""
    return is_feasible(feasible_set(lower, x))


def lower_value(lower: LinearLowerLevel, x) -> float:
    """Optimal value of the follower's problem at x."""
    res = solve_lp(lower.c, feasible_set(lower, x))
    if res.status is LpStatus.INFEASIBLE:
        raise EmptyFeasibleSet(f"follower infeasible at x={np.asarray(x).tolist()}")
    if res.status is LpStatus.UNBOUNDED:
        raise UnboundedPolytope("follower problem is unbounded; the joint region is not a polytope")
    return res.value


def argmin_face(lower: LinearLowerLevel, x, epsilon: float = 0.0) -> FaceDescription:
    """Face description of the follower's (epsilon-)optimal set at x.

    For epsilon = 0 the optimality cut is <c, y> <= value + eps_face with
    eps_face = max(OPT_TOL, 1e-9 * (1 + |value|)); an exact equality cut
    would make the face empty under floating-point noise. For epsilon > 0
    the cut uses value + epsilon verbatim. A zero follower objective needs
    no cut: the optimal set is all of K(x).
    """
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    K = feasible_set(lower, x)
    if np.abs(lower.c).max() <= 0.0:
        if not is_feasible(K):
            raise EmptyFeasibleSet(f"follower infeasible at x={np.asarray(x).tolist()}")
        return build_face(K)
    value = lower_value(lower, x)
    slack = epsilon if epsilon > 0.0 else max(OPT_TOL, 1e-9 * (1.0 + abs(value)))
    G = np.vstack([K.G, lower.c])
    h = np.concatenate([K.h, [value + slack]])
    return build_face(HPolytope(G, h))


def domain_box(lower: LinearLowerLevel) -> np.ndarray:
    """Axis-aligned bounding box (d, 2) of the leader's domain X = dom K.

    Plain class: support values of the joint polytope along the x axes.
    Parametric class: the joint set is not a polytope, so the box comes
    from the rows that constrain x alone, which must bound x.
    """
    d = lower.d
    box = np.empty((d, 2))
    if not lower.is_parametric:
        joint = lower.joint_polytope()
        if not is_feasible(joint):
            raise EmptyJointPolytope("the constraint system has no feasible (x, y)")
        for i in range(d):
            direction = np.zeros(d + lower.p)
            direction[i] = 1.0
            hi = support_value(direction, joint)
            lo = -support_value(-direction, joint)
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise UnboundedPolytope("leader domain is unbounded")
            box[i] = (lo, hi)
        return box
    AL, bL = lower.leader_rows()
    if AL.shape[0] == 0:
        raise UnboundedPolytope(
            "parametric problems need pure leader rows to bound the domain")
    leader = HPolytope(AL, bL)
    if not is_feasible(leader):
        raise EmptyJointPolytope("leader rows are infeasible")
    for i in range(d):
        direction = np.zeros(d)
        direction[i] = 1.0
        hi = support_value(direction, leader)
        lo = -support_value(-direction, leader)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise UnboundedPolytope("leader rows do not bound the domain")
        box[i] = (lo, hi)
    return box


def validate_bounded(lower: LinearLowerLevel) -> None:
    """Verify at load time that the constraint region behaves like a polytope.

    Plain class: the joint polytope must be nonempty and bounded (2(d+p)
    support values). Parametric class: the leader rows must bound x and the
    instantiated follower sets are probed for boundedness at the box center
    and corners; genuinely unbounded instantiations also fail loudly later,
    at solve time.
    """
    if not lower.is_parametric:
        joint = lower.joint_polytope()
        if not is_feasible(joint):
            raise EmptyJointPolytope("the constraint system has no feasible (x, y)")
        n = lower.d + lower.p
        for i in range(n):
            direction = np.zeros(n)
            direction[i] = 1.0
            if not (np.isfinite(support_value(direction, joint))
                    and np.isfinite(support_value(-direction, joint))):
                raise UnboundedFeasibleRegion(
                    "the joint constraint polytope is unbounded")
        return
    box = domain_box(lower)
    probes = [box.mean(axis=1)]
    if lower.d <= 4:
        grids = np.meshgrid(*[box[i] for i in range(lower.d)], indexing="ij")
        probes.extend(np.stack([g.ravel() for g in grids], axis=1))
    for x in probes:
        K = feasible_set(lower, x)
        if not is_feasible(K):
            continue
        for j in range(lower.p):
            direction = np.zeros(lower.p)
            direction[j] = 1.0
            if not (np.isfinite(support_value(direction, K))
                    and np.isfinite(support_value(-direction, K))):
                raise UnboundedFeasibleRegion(
                    f"follower set unbounded at probe x={x.tolist()}")
