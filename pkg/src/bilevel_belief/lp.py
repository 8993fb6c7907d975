"""Dense linear programming over H-polytopes.

The engine is a two-phase primal simplex on the slack form with free
variables split into positive/negative parts. Dantzig pricing is used until
3m consecutive degenerate pivots occur, after which Bland's rule takes over
so cycling cannot happen. All operations are pure functions of their inputs.

Tolerances (double precision, small dense instances):
    FEAS_TOL  feasibility slack allowed on returned points,
    OPT_TOL   accuracy of optimal values,
    PIVOT_TOL entries at or below this are not eligible pivots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyPolytope,
    NumericalFailure,
    UnboundedPolytope,
)

FEAS_TOL = 1e-8
OPT_TOL = 1e-7
PIVOT_TOL = 1e-10
_RC_TOL = 1e-9


class HPolytope:
    """A polytope {z : Gz <= h} with m rows in R^n, m >= 1 and n >= 1.

    Rows are normalized at construction: each row of G is divided by its
    infinity norm (rows with a zero normal are divided by max(|h_i|, 1)).
    This leaves the feasible set unchanged and makes the feasibility and
    tightness tolerances uniform across rows. Emptiness is a queryable
    state, not an invariant.
    """

    __slots__ = ("G", "h")

    def __init__(self, G, h):
        G = np.array(G, dtype=float, copy=True)
        if G.ndim == 1:
            G = G.reshape(1, -1)
        h = np.array(h, dtype=float, copy=True).ravel()
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
            raise DimensionMismatch(f"constraint matrix must be m x n with m,n >= 1, got {G.shape}")
        if h.shape[0] != G.shape[0]:
            raise DimensionMismatch(f"h has length {h.shape[0]}, expected {G.shape[0]}")
        if not (np.isfinite(G).all() and np.isfinite(h).all()):
            raise ValueError("polytope data must be finite")
        scale = np.abs(G).max(axis=1)
        zero = scale <= 0.0
        scale[zero] = np.maximum(np.abs(h[zero]), 1.0)
        G /= scale[:, None]
        h /= scale
        G.setflags(write=False)
        h.setflags(write=False)
        self.G = G
        self.h = h

    @property
    def m(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]

    def residuals(self, z) -> np.ndarray:
        """Gz - h; nonpositive entries (within FEAS_TOL) mean feasible."""
        return self.G @ np.asarray(z, dtype=float) - self.h

    def contains(self, z, tol: float = FEAS_TOL) -> bool:
        return bool(self.residuals(z).max() <= tol)

    def __repr__(self) -> str:
        return f"HPolytope(m={self.m}, n={self.n})"


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: LpStatus
    point: np.ndarray | None = None
    value: float | None = None
    ray: np.ndarray | None = None   # certificate direction when UNBOUNDED


class _Unbounded(Exception):
    def __init__(self, column):
        self.column = column


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    piv = T[row] / T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, piv)
    T[row] = piv
    T[:, col] = 0.0
    T[row, col] = 1.0


def _run_simplex(T: np.ndarray, basis: np.ndarray, ncols: int, rc_tol: float) -> None:
    """Iterate the tableau T (cost row last, RHS column last) to optimality.

    Raises _Unbounded with the offending column, or NumericalFailure if the
    iteration cap is hit even after Bland's rule engaged.
    """
    m = T.shape[0] - 1
    bland_after = 3 * m
    degenerate_streak = 0
    use_bland = False
    max_iter = 1000 + 100 * (T.shape[1] + m)
    for _ in range(max_iter):
        cost = T[-1, :ncols]
        if use_bland:
            neg = np.nonzero(cost < -rc_tol)[0]
            if neg.size == 0:
                return
            col = int(neg[0])
        else:
            col = int(np.argmin(cost))
            if cost[col] >= -rc_tol:
                return
        column = T[:-1, col]
        eligible = column > PIVOT_TOL
        if not eligible.any():
            raise _Unbounded(col)
        ratios = np.full(m, np.inf)
        ratios[eligible] = T[:-1, -1][eligible] / column[eligible]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + 1e-12 + 1e-9 * abs(best))[0]
        if use_bland:
            row = int(ties[np.argmin(basis[ties])])
        else:
            row = int(ties[0])
        if best <= 1e-12:
            degenerate_streak += 1
            if degenerate_streak >= bland_after:
                use_bland = True
        else:
            degenerate_streak = 0
        _pivot(T, row, col)
        basis[row] = col
    raise NumericalFailure("simplex did not converge within the pivot budget")


def _nullspace(M: np.ndarray, n: int, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (n x k) of the null space of M (rows in R^n)."""
    if M.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    tol = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return vt[rank:].T


def _purify_to_vertex(G: np.ndarray, h: np.ndarray, c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Walk z along optimality-preserving null directions until the active
    rows have full rank. On polyhedra containing lines there may be no
    vertex; the walk then stops at the current (still optimal) point."""
    n = G.shape[1]
    for _ in range(n + 1):
        slack = h - G @ z
        active = G[slack <= 1e-7]
        if active.shape[0] >= n:
            _, s, _ = np.linalg.svd(active)
            if int(np.sum(s > 1e-9 * s[0])) >= n:
                return z
        ns = _nullspace(np.vstack([active, c[None, :]]) if active.size else c[None, :], n)
        if ns.shape[1] == 0:
            return z
        u = ns[:, 0]
        gu = G @ u
        moved = False
        for direction in (u, -u):
            step = gu if direction is u else -gu
            blocking = step > 1e-12
            if blocking.any():
                t = float(np.min(slack[blocking] / step[blocking]))
                z = z + max(t, 0.0) * direction
                moved = True
                break
        if not moved:
            return z     # free line: no vertex exists in this direction
    return z


def _solve_split(G: np.ndarray, h: np.ndarray, c: np.ndarray,
                 feasibility_only: bool = False):
    """Two-phase simplex for min c.z s.t. Gz <= h with z free.

    Returns (status, z, phase1_value). When feasibility_only is set, phase 2
    is skipped and z is any feasible point (or None).
    """
    m, n = G.shape
    nvar = 2 * n + m
    A = np.hstack([G, -G, np.eye(m)])
    rhs = h.copy()
    neg_rows = rhs < 0.0
    A[neg_rows] *= -1.0
    rhs[neg_rows] *= -1.0
    art_rows = np.nonzero(neg_rows)[0]
    nart = art_rows.size

    basis = np.empty(m, dtype=int)
    basis[~neg_rows] = 2 * n + np.nonzero(~neg_rows)[0]

    if nart:
        art_cols = np.zeros((m, nart))
        art_cols[art_rows, np.arange(nart)] = 1.0
        A_full = np.hstack([A, art_cols])
        basis[art_rows] = nvar + np.arange(nart)
        T = np.zeros((m + 1, nvar + nart + 1))
        T[:m, :-1] = A_full
        T[:m, -1] = rhs
        T[-1, nvar:nvar + nart] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        try:
            _run_simplex(T, basis, nvar, _RC_TOL)   # artificials never priced in
        except _Unbounded as exc:                    # impossible for a sum of artificials
            raise NumericalFailure("phase 1 reported unbounded") from exc
        phase1 = -T[-1, -1]
        if phase1 > FEAS_TOL:
            return LpStatus.INFEASIBLE, None, phase1
        # Drive leftover artificials out of the basis; rows that cannot
        # pivot are redundant and get dropped.
        drop = []
        for i in range(m):
            if basis[i] >= nvar:
                entries = np.abs(T[i, :nvar])
                j = int(np.argmax(entries))
                if entries[j] > PIVOT_TOL:
                    _pivot(T, i, j)
                    basis[i] = j
                else:
                    drop.append(i)
        if drop:
            keep = np.setdiff1d(np.arange(m), drop)
            T = np.vstack([T[keep], T[-1][None, :]])
            basis = basis[keep]
            m = keep.size
        T = np.hstack([T[:, :nvar], T[:, -1:]])
    else:
        T = np.zeros((m + 1, nvar + 1))
        T[:m, :-1] = A
        T[:m, -1] = rhs
        phase1 = 0.0

    def extract(T, basis):
        x = np.zeros(nvar)
        x[basis] = T[:-1, -1]
        return x[:n] - x[n:2 * n]

    if feasibility_only:
        return LpStatus.OPTIMAL, extract(T, basis), phase1

    cost = np.concatenate([c, -c, np.zeros(m)])
    T[-1, :-1] = cost
    T[-1, -1] = 0.0
    for i in range(m):
        if abs(cost[basis[i]]) > 0.0:
            T[-1] -= cost[basis[i]] * T[i]
    rc_tol = _RC_TOL * max(1.0, float(np.abs(c).max(initial=0.0)))
    try:
        _run_simplex(T, basis, nvar, rc_tol)
    except _Unbounded as ub:
        direction = np.zeros(nvar)
        direction[ub.column] = 1.0
        direction[basis] = -T[:-1, ub.column]
        ray = direction[:n] - direction[n:2 * n]
        return LpStatus.UNBOUNDED, ray, phase1
    return LpStatus.OPTIMAL, extract(T, basis), phase1


def solve_lp(objective, polytope: HPolytope) -> LpResult:
    """Minimize <objective, z> over the polytope.

    The returned point is feasible within FEAS_TOL, the value is accurate to
    OPT_TOL and, on pointed polyhedra, the point is a vertex (basic feasible
    solution). Deterministic: identical inputs give bit-identical outputs.
    """
    c = np.asarray(objective, dtype=float).ravel()
    if c.shape[0] != polytope.n:
        raise DimensionMismatch(
            f"objective has length {c.shape[0]}, polytope lives in R^{polytope.n}")
    if not np.isfinite(c).all():
        raise ValueError("objective must be finite")
    G, h = polytope.G, polytope.h
    status, z, _ = _solve_split(G, h, c)
    if status is LpStatus.INFEASIBLE:
        return LpResult(LpStatus.INFEASIBLE)
    if status is LpStatus.UNBOUNDED:
        ray = z
        if (G @ ray).max() > OPT_TOL or c @ ray >= -0.0:
            raise NumericalFailure("unbounded status without a valid ray certificate")
        return LpResult(LpStatus.UNBOUNDED, ray=ray)
    z = _purify_to_vertex(G, h, c, z)
    if polytope.residuals(z).max() > FEAS_TOL:
        raise NumericalFailure("simplex returned an infeasible point")
    return LpResult(LpStatus.OPTIMAL, point=z, value=float(c @ z))


def is_feasible(polytope: HPolytope) -> bool:
    """True iff some z satisfies Gz <= h + FEAS_TOL (phase 1 only)."""
    status, _, _ = _solve_split(polytope.G, polytope.h,
                                np.zeros(polytope.n), feasibility_only=True)
    return status is LpStatus.OPTIMAL


def support_value(direction, polytope: HPolytope) -> float:
    """max <direction, z> over the polytope; +inf when unbounded that way."""
    d = np.asarray(direction, dtype=float).ravel()
    res = solve_lp(-d, polytope)
    if res.status is LpStatus.INFEASIBLE:
        raise EmptyPolytope("support value of an empty polytope")
    if res.status is LpStatus.UNBOUNDED:
        return float("inf")
    return -res.value


def chebyshev_center(polytope: HPolytope) -> tuple[np.ndarray, float]:
    """Center and radius of a largest inscribed ball.

    Radius 0 signals an empty relative interior in the ambient space (the
    polytope is a lower-dimensional face). Raises EmptyPolytope on empty
    input and UnboundedPolytope when the inradius is unbounded.
    """
    G, h = polytope.G, polytope.h
    norms = np.linalg.norm(G, axis=1)
    ext = np.hstack([G, norms[:, None]])
    ext = np.vstack([ext, np.concatenate([np.zeros(polytope.n), [-1.0]])])
    ext_h = np.concatenate([h, [0.0]])
    obj = np.zeros(polytope.n + 1)
    obj[-1] = -1.0
    res = solve_lp(obj, HPolytope(ext, ext_h))
    if res.status is LpStatus.INFEASIBLE:
        raise EmptyPolytope("Chebyshev center of an empty polytope")
    if res.status is LpStatus.UNBOUNDED:
        raise UnboundedPolytope("polytope admits arbitrarily large inscribed balls")
    center = res.point[:-1]
    radius = max(float(res.point[-1]), 0.0)
    return center, radius
