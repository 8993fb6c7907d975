"""Geometry of possibly lower-dimensional polytope faces.

A face of {z : Gz <= h} is described by its implicit equalities (rows tight
on the whole polytope), an affine chart (origin plus orthonormal basis of
the affine hull), the polytope re-expressed in chart coordinates, and a
tight axis-aligned bounding box there. Uniform sampling proposes points in
the box and rejects, falling back to hit-and-run when the face is too thin
for rejection to pay off.

Sampling uses numpy's Philox counter-based generator keyed by the caller's
64-bit seed, so streams are reproducible across platforms and independent
seeds give independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyPolytope,
    NumericalFailure,
    RejectionBudgetExhausted,
    UnboundedPolytope,
)
from .lp import FEAS_TOL, HPolytope, LpStatus, chebyshev_center, solve_lp, support_value

TIGHT_TOL = 1e-7        # implicit-equality detection; must dominate the LP value tolerance
_GS_DROP = 1e-9         # Gram-Schmidt residual drop threshold (relative)


@dataclass
class AffineChart:
    """Parametrization z = origin + basis @ w of an affine subspace.

    basis has orthonormal columns (basis.T @ basis = I_dim within 1e-9) and
    origin lies in the affine hull by construction.
    """

    origin: np.ndarray
    basis: np.ndarray
    dim: int

    def embed(self, points: np.ndarray) -> np.ndarray:
        """Ambient points (…, n) -> chart coordinates (…, dim)."""
        return (np.asarray(points, dtype=float) - self.origin) @ self.basis

    def unembed(self, coords: np.ndarray) -> np.ndarray:
        """Chart coordinates (…, dim) -> ambient points (…, n)."""
        return self.origin + np.asarray(coords, dtype=float) @ self.basis.T


@dataclass
class FaceDescription:
    """A face with its chart, chart-coordinate polytope, and bounding box.

    embedded is None exactly when dim == 0 (a single point; there is
    nothing left to sample). box has shape (dim, 2) with columns (lo, hi).
    """

    ambient: HPolytope
    equalities: tuple[int, ...]
    chart: AffineChart
    embedded: HPolytope | None
    box: np.ndarray

    @property
    def dim(self) -> int:
        return self.chart.dim


@dataclass
class SampleStats:
    proposals: int
    accepted: int
    method: str     # "rejection", "hit-and-run", or "singleton"

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 1.0


def _orthonormalize(rows, n: int, seed_basis=()) -> list[np.ndarray]:
    """Gram-Schmidt with re-orthogonalization; vectors whose residual norm
    falls below _GS_DROP times their input norm are dropped as dependent."""
    basis = list(seed_basis)
    out = []
    for row in rows:
        nrm_in = float(np.linalg.norm(row))
        if nrm_in <= 0.0:
            continue
        r = row.astype(float, copy=True)
        for _ in range(2):
            for b in basis + out:
                r -= (r @ b) * b
        nrm = float(np.linalg.norm(r))
        if nrm >= _GS_DROP * nrm_in:
            out.append(r / nrm)
    return out


def _feasible_point(polytope: HPolytope) -> np.ndarray:
    """Some feasible point, preferring the Chebyshev center."""
    try:
        center, _ = chebyshev_center(polytope)
        return center
    except UnboundedPolytope:
        res = solve_lp(np.zeros(polytope.n), polytope)
        if res.status is not LpStatus.OPTIMAL:
            raise EmptyPolytope("polytope is empty")
        return res.point


def implicit_equalities(polytope: HPolytope, tol: float = TIGHT_TOL) -> tuple[int, ...]:
    """Indices of rows tight on the entire polytope.

    Row i qualifies iff min{G_i z : z in polytope} >= h_i - tol. Rows with
    slack above tol at one feasible point are screened out without an LP.
    """
    point = _feasible_point(polytope)   # raises EmptyPolytope when empty
    slack = polytope.h - polytope.G @ point
    tight = []
    for i in np.nonzero(slack <= tol + FEAS_TOL)[0]:
        row_min = -support_value(-polytope.G[i], polytope)
        if row_min >= polytope.h[i] - tol:
            tight.append(int(i))
    return tuple(tight)


def _hull_basis(polytope: HPolytope, equalities) -> tuple[list[np.ndarray], np.ndarray]:
    """Orthonormal basis of the equality rows' span and the null-space
    complement (columns of the chart basis)."""
    n = polytope.n
    rows = [polytope.G[i] for i in equalities]
    row_basis = _orthonormalize(rows, n)
    dim = n - len(row_basis)
    cols = _orthonormalize(np.eye(n), n, seed_basis=row_basis)
    if len(cols) != dim:
        raise NumericalFailure(
            f"rank decision unstable: expected chart dimension {dim}, built {len(cols)}")
    basis = np.column_stack(cols) if cols else np.zeros((n, 0))
    return row_basis, basis


def affine_chart(polytope: HPolytope, equalities) -> AffineChart:
    """Chart of the affine hull determined by the implicit equalities.

    The basis spans the null space of the equality normals; the origin is
    the Chebyshev center of the polytope expressed in that chart.
    """
    eqs = tuple(equalities)
    _, basis = _hull_basis(polytope, eqs)
    dim = basis.shape[1]
    n = polytope.n
    if eqs:
        E = polytope.G[list(eqs)]
        hE = polytope.h[list(eqs)]
        z0, *_ = np.linalg.lstsq(E, hE, rcond=None)
    else:
        z0 = np.zeros(n)
    if dim == 0:
        origin = z0
    else:
        Ge, he, _ = _embed_rows(polytope, z0, basis)
        center, _ = chebyshev_center(HPolytope(Ge, he))
        origin = z0 + basis @ center
    origin.setflags(write=False)
    basis.setflags(write=False)
    return AffineChart(origin=origin, basis=basis, dim=dim)


def _embed_rows(polytope: HPolytope, origin: np.ndarray, basis: np.ndarray):
    """Rows of the polytope in chart coordinates, with rows parallel to the
    hull (zero projected normal) dropped. Returns (Ge, he, kept_indices)."""
    Ge = polytope.G @ basis
    he = polytope.h - polytope.G @ origin
    norms = np.abs(Ge).max(axis=1) if Ge.shape[1] else np.zeros(polytope.m)
    keep = norms > _GS_DROP
    dropped_bad = (~keep) & (he < -2 * FEAS_TOL)
    if dropped_bad.any():
        raise NumericalFailure(
            "a constraint parallel to the affine hull is violated; "
            "implicit-equality detection is inconsistent")
    if not keep.any():
        raise NumericalFailure("no constraints left after embedding a positive-dimension face")
    return Ge[keep], he[keep], np.nonzero(keep)[0]


def affine_dimension(polytope: HPolytope) -> int:
    """Dimension of the affine hull of the polytope."""
    eqs = implicit_equalities(polytope)
    row_basis, _ = _hull_basis(polytope, eqs)
    return polytope.n - len(row_basis)


def build_face(polytope: HPolytope) -> FaceDescription:
    """Full face description: equalities, chart, embedded polytope, box.

    Requires a nonempty bounded polytope; the box bounds are attained
    support values along the chart axes.
    """
    eqs = implicit_equalities(polytope)
    chart = affine_chart(polytope, eqs)
    if chart.dim == 0:
        return FaceDescription(ambient=polytope, equalities=eqs, chart=chart,
                               embedded=None, box=np.zeros((0, 2)))
    Ge, he, _ = _embed_rows(polytope, chart.origin, chart.basis)
    embedded = HPolytope(Ge, he)
    box = np.empty((chart.dim, 2))
    for j in range(chart.dim):
        axis = np.zeros(chart.dim)
        axis[j] = 1.0
        hi = support_value(axis, embedded)
        lo = -support_value(-axis, embedded)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise UnboundedPolytope("face is unbounded along a chart axis")
        box[j] = (lo, hi)
    box.setflags(write=False)
    return FaceDescription(ambient=polytope, equalities=eqs, chart=chart,
                           embedded=embedded, box=box)


def _hit_and_run(embedded: HPolytope, count: int, dim: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Hit-and-run chain from the chart origin (the Chebyshev center maps
    to w = 0), with burn-in 100*dim and thinning 2*dim."""
    G, h = embedded.G, embedded.h
    if h.min() <= 1e-12:
        raise RejectionBudgetExhausted(
            "rejection budget exhausted and the face has empty relative "
            "interior in its chart; tolerances upstream are inconsistent")
    w = np.zeros(dim)
    burn = 100 * dim
    thin = 2 * dim
    out = np.empty((count, dim))
    kept = 0
    step = 0
    total = burn + thin * count
    while kept < count:
        d = rng.standard_normal(dim)
        nrm = np.linalg.norm(d)
        if nrm <= 0.0:
            continue
        d /= nrm
        gd = G @ d
        slack = h - G @ w
        pos = gd > 1e-14
        neg = gd < -1e-14
        t_hi = np.min(slack[pos] / gd[pos]) if pos.any() else 0.0
        t_lo = np.max(slack[neg] / gd[neg]) if neg.any() else 0.0
        if t_hi > t_lo:
            w = w + rng.uniform(t_lo, t_hi) * d
        step += 1
        if step > burn and (step - burn) % thin == 0:
            out[kept] = w
            kept += 1
        if step > 10 * total:
            raise NumericalFailure("hit-and-run failed to mix")
    return out


def sample_uniform(face: FaceDescription, count: int, seed: int) -> tuple[np.ndarray, SampleStats]:
    """count i.i.d.-uniform points on the face, in ambient coordinates.

    Rejection sampling in the chart box with a budget of 100*count
    proposals; on exhaustion a hit-and-run chain started at the chart
    origin takes over. Zero-dimensional faces return the single point
    repeated. Deterministic given the seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    chart = face.chart
    if chart.dim == 0:
        pts = np.tile(chart.origin, (count, 1))
        return pts, SampleStats(proposals=0, accepted=0, method="singleton")
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    lo = face.box[:, 0]
    span = face.box[:, 1] - lo
    G, h = face.embedded.G, face.embedded.h
    budget = 100 * count
    proposals = 0
    accepted_chunks: list[np.ndarray] = []
    accepted = 0
    while accepted < count and proposals < budget:
        chunk = int(min(budget - proposals, max(1024, 2 * (count - accepted))))
        W = lo + rng.random((chunk, chart.dim)) * span
        ok = (W @ G.T - h <= FEAS_TOL).all(axis=1)
        proposals += chunk
        if ok.any():
            accepted_chunks.append(W[ok])
            accepted += int(ok.sum())
    if accepted >= count:
        W = np.concatenate(accepted_chunks)[:count]
        stats = SampleStats(proposals=proposals, accepted=accepted, method="rejection")
    else:
        W = _hit_and_run(face.embedded, count, chart.dim, rng)
        stats = SampleStats(proposals=proposals, accepted=accepted, method="hit-and-run")
    return chart.unembed(W), stats
