"""Backward under-approximation of safe sets through ReLU layers.

A safe set at a cut is a union of a positive polytope (``P`` intersected
with the nonnegative orthant) and an optional negative part.  Every point
``x`` of the union satisfies ``relu(x) in P``; since true activations are
fixed points of ReLU this makes it usable directly against the forward
over-approximation at that cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InapplicableError
from .geometry import AffineMap, ConvexPolytope, pullback

INTERIOR_TOL = 1e-9


@dataclass(frozen=True)
class BoxPart:
    """``{x : x <= eta}``; infinite entries leave that coordinate free."""

    eta: np.ndarray

    def contains(self, x, tol=0.0):
        return np.all(np.asarray(x) <= self.eta + tol, axis=-1)


@dataclass(frozen=True)
class QuadrantPart:
    """A polytope confined to one orthant.

    ``zeroed`` marks coordinates that are non-positive in the orthant; the
    others are non-negative.  ``polytope`` already includes the orthant
    constraints.
    """

    zeroed: np.ndarray
    polytope: ConvexPolytope

    def contains(self, x, tol=1e-6):
        return self.polytope.contains(x, tol)


@dataclass(frozen=True)
class SafeSet:
    positive: ConvexPolytope
    negative: BoxPart | QuadrantPart | None = None

    def contains(self, x, tol=1e-6):
        inside = self.positive.contains(x, tol)
        if self.negative is not None:
            inside = inside | self.negative.contains(x, tol)
        return inside


def eta_for_constraint(w, u: float) -> np.ndarray:
    """Largest-volume box ``[0, eta]`` fitting under ``x . w <= u``.

    Maximizing the product of the finite sides under ``eta . w = u`` puts an
    equal share ``u / m`` of the budget on each of the ``m`` positive weights.
    Coordinates with non-positive weight never tighten the constraint on the
    nonnegative orthant and get ``inf``.
    """
    w = np.asarray(w, dtype=float)
    if u <= 0:
        raise InapplicableError("origin is not strictly inside the constraint")
    eta = np.full(w.shape, np.inf)
    pos = w > 0
    m = int(pos.sum())
    if m:
        eta[pos] = u / (m * w[pos])
    return eta


def backprop_around_zero(poly: ConvexPolytope, tol=INTERIOR_TOL) -> BoxPart:
    """Box ``x <= eta`` whose ReLU image stays inside ``poly``."""
    if np.any(poly.ub <= tol):
        raise InapplicableError("origin is not in the interior of the polytope")
    eta = np.full(poly.dim, np.inf)
    for t in range(poly.n_constraints):
        eta = np.minimum(eta, eta_for_constraint(poly.lhs[:, t], poly.ub[t]))
    return BoxPart(eta)


def backprop_quadrant(poly: ConvexPolytope, center_hint) -> QuadrantPart:
    """Restrict to the orthant picked by the signs of ``center_hint``.

    In that orthant ReLU is the diagonal projection zeroing the negative
    coordinates, so the pulled-back constraints are the rows of ``lhs`` with
    those coordinates cleared.
    """
    center_hint = np.asarray(center_hint, dtype=float)
    if center_hint.shape != (poly.dim,):
        raise DimensionError("center hint does not match the polytope dimension")
    zeroed = center_hint < 0
    if not zeroed.any():
        raise InapplicableError("every coordinate is kept; no negative part")
    lhs = poly.lhs.copy()
    lhs[zeroed] = 0.0
    # x_i <= 0 on zeroed coordinates, -x_i <= 0 on kept ones
    orthant = np.diag(np.where(zeroed, 1.0, -1.0))
    return QuadrantPart(
        zeroed,
        ConvexPolytope(np.hstack([lhs, orthant]), np.concatenate([poly.ub, np.zeros(poly.dim)])),
    )


def nonnegative(poly: ConvexPolytope) -> ConvexPolytope:
    d = poly.dim
    return poly.intersect(ConvexPolytope(-np.eye(d), np.zeros(d)))


def backward_propagate(next_safe: SafeSet, layer: AffineMap, center_hint) -> SafeSet:
    """Safe set at the input cut of ``layer`` from the one at its output cut.

    ``center_hint`` is the center of the forward region at this cut before
    its ReLU; it chooses the orthant when the box method does not apply.
    """
    pre = pullback(next_safe.positive, layer)
    try:
        negative = backprop_around_zero(pre)
    except InapplicableError:
        try:
            negative = backprop_quadrant(pre, center_hint)
        except InapplicableError:
            negative = None
    return SafeSet(nonnegative(pre), negative)
