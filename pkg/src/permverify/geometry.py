"""Affine regions, convex polytopes and the affine maps acting on them.

Vectors are rows: a layer maps ``x`` to ``x @ W + b`` with ``W`` of shape
``(d_in, d_out)``.

An affine region is the image of the unit cube ``{alpha @ B + c : |alpha|_inf <= 1}``
with ``B`` of shape ``(k, d)``.  A convex polytope is ``{x : x @ L <= u}`` where
each column of ``L`` is one constraint normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DimensionError, NumericalError, PreconditionError

SVD_CUTOFF = 1e-9
MEMBERSHIP_TOL = 1e-6


def _as_matrix(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def _as_vector(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class AffineMap:
    """One layer's affine part, ``x -> x @ weights + bias``."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = _as_matrix(self.weights, "weights")
        b = _as_vector(self.bias, "bias")
        if b.shape[0] != w.shape[1]:
            raise DimensionError(
                f"bias has {b.shape[0]} entries but weights have {w.shape[1]} columns"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def d_in(self):
        return self.weights.shape[0]

    @property
    def d_out(self):
        return self.weights.shape[1]

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.weights + self.bias


@dataclass(frozen=True)
class AffineRegion:
    """Parallelotope-like set ``{alpha @ basis + center : |alpha|_inf <= 1}``.

    ``basis`` may have zero rows, in which case the region is the single
    point ``center``.
    """

    basis: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        c = _as_vector(self.center, "center")
        b = np.asarray(self.basis, dtype=float)
        if b.size == 0:
            b = np.zeros((0, c.shape[0]))
        b = _as_matrix(b, "basis")
        if b.shape[1] != c.shape[0]:
            raise DimensionError(
                f"basis has {b.shape[1]} columns but center has {c.shape[0]} entries"
            )
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "center", c)

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def rank(self):
        return self.basis.shape[0]

    def point(self, alpha):
        return np.asarray(alpha, dtype=float) @ self.basis + self.center


@dataclass(frozen=True)
class ConvexPolytope:
    """``{x : x @ lhs <= ub}``; one constraint per column of ``lhs``."""

    lhs: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        lhs = _as_matrix(self.lhs, "lhs")
        ub = _as_vector(self.ub, "ub")
        if lhs.shape[1] != ub.shape[0]:
            raise DimensionError(
                f"lhs has {lhs.shape[1]} constraints but ub has {ub.shape[0]} entries"
            )
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "ub", ub)

    @property
    def dim(self):
        return self.lhs.shape[0]

    @property
    def n_constraints(self):
        return self.lhs.shape[1]

    def contains(self, x, tol=MEMBERSHIP_TOL):
        """Membership test; ``x`` may be a single point or a stack of rows."""
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.lhs <= self.ub + tol, axis=-1)

    def intersect(self, other: "ConvexPolytope") -> "ConvexPolytope":
        if other.dim != self.dim:
            raise DimensionError("polytopes live in different spaces")
        return ConvexPolytope(np.hstack([self.lhs, other.lhs]), np.concatenate([self.ub, other.ub]))


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericalError("non-finite value during propagation")


def pushforward(region: AffineRegion, layer: AffineMap) -> AffineRegion:
    """Exact image of a region under the affine part of a layer."""
    if region.dim != layer.d_in:
        raise DimensionError(f"region has dimension {region.dim}, layer expects {layer.d_in}")
    basis = region.basis @ layer.weights
    center = region.center @ layer.weights + layer.bias
    _check_finite(basis, center)
    return AffineRegion(basis, center)


def pullback(poly: ConvexPolytope, layer: AffineMap) -> ConvexPolytope:
    """Exact preimage ``{x : layer(x) in poly}``."""
    if poly.dim != layer.d_out:
        raise DimensionError(f"polytope has dimension {poly.dim}, layer outputs {layer.d_out}")
    lhs = layer.weights @ poly.lhs
    ub = poly.ub - layer.bias @ poly.lhs
    _check_finite(lhs, ub)
    return ConvexPolytope(lhs, ub)


def component_bounds(region: AffineRegion):
    """Tight per-coordinate bounds ``(lo, hi)`` of a region."""
    radius = np.abs(region.basis).sum(axis=0)
    return region.center - radius, region.center + radius


def _row_blocks(basis):
    """Group rows that are linked through shared nonzero columns."""
    k, d = basis.shape
    rows, cols = np.nonzero(basis)
    # bipartite graph: rows are nodes 0..k-1, columns are nodes k..k+d-1
    graph = coo_matrix((np.ones(rows.size), (rows, cols + k)), shape=(k + d, k + d))
    _, labels = connected_components(graph, directed=False)
    blocks = {}
    for r in range(k):
        blocks.setdefault(labels[r], []).append(r)
    return [np.array(rs) for rs in blocks.values()]


def reduce_basis(region: AffineRegion, tol: float = SVD_CUTOFF) -> AffineRegion:
    """Replace the basis by an orthogonal one whose region contains the input.

    With ``B = U S V^T`` every ``alpha @ B`` equals ``beta @ (S V^T)`` where
    ``|beta_i| <= sum_r |U_ri|``, so scaling each right singular vector by that
    column sum gives a covering basis.  Singular values at or below
    ``tol * max`` are dropped.

    The SVD is taken block by block over groups of rows that share no columns
    with the rest. This is still an SVD of the whole basis, but it keeps
    unrelated directions from being mixed when singular values coincide.
    """
    basis, center = region.basis, region.center
    nz = np.any(basis != 0, axis=1)
    basis = basis[nz]
    if basis.shape[0] == 0:
        return AffineRegion(np.zeros((0, region.dim)), center.copy())
    pieces = []
    for rows in _row_blocks(basis):
        sub = basis[rows]
        cols = np.flatnonzero(np.any(sub != 0, axis=0))
        u, s, vt = np.linalg.svd(sub[:, cols], full_matrices=False)
        pieces.append((cols, u, s, vt))
    smax = max(p[2][0] for p in pieces)
    out = []
    for cols, u, s, vt in pieces:
        keep = s > tol * smax
        scale = np.abs(u[:, keep]).sum(axis=0) * s[keep]
        rows = np.zeros((int(keep.sum()), region.dim))
        rows[:, cols] = scale[:, None] * vt[keep]
        out.append(rows)
    reduced = np.vstack(out)
    _check_finite(reduced)
    return AffineRegion(reduced, center.copy())


def region_contains(region: AffineRegion, x, tol: float = MEMBERSHIP_TOL):
    """Whether ``x`` (a point or a stack of points) lies in the region.

    The basis must have nonzero, mutually orthogonal rows, as produced by
    :func:`reduce_basis`; then the coefficients are recovered by projection.
    """
    basis = region.basis
    gram = basis @ basis.T
    norms = np.sqrt(np.diag(gram))
    if np.any(norms == 0):
        raise PreconditionError("basis has zero rows; reduce it first")
    off = gram - np.diag(np.diag(gram))
    if np.any(np.abs(off) > 1e-8 * np.outer(norms, norms)):
        raise PreconditionError("basis rows are not orthogonal; reduce it first")
    x = np.asarray(x, dtype=float)
    diff = x - region.center
    alpha = (diff @ basis.T) / norms**2
    resid = np.linalg.norm(diff - alpha @ basis, axis=-1)
    inside_span = resid <= tol
    inside_box = np.max(np.abs(alpha), axis=-1, initial=0.0) <= 1.0 + tol
    return inside_span & inside_box


def sample_region(region: AffineRegion, count: int, seed=None):
    """Uniform coefficients in the cube mapped through the region."""
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(-1.0, 1.0, size=(count, region.rank))
    return region.point(alpha)
