"""Decide whether an affine region lies inside a safe set.

Everything reduces to one kind of linear program over the unit cube,
``max d.alpha  s.t.  |alpha|_inf <= 1, a.alpha >= g``, which is a
fractional knapsack and is solved greedily.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backward import BoxPart, QuadrantPart, SafeSet
from .errors import DimensionError
from .geometry import AffineRegion, ConvexPolytope

INCLUSION_TOL = 1e-7


@dataclass(frozen=True)
class Witness:
    """A point of the region that escapes the safe set."""

    alpha: np.ndarray
    point: np.ndarray
    column: int
    excess: float


def _solve_batch(objectives, a, g):
    """Greedy solution of the cube LP for each row of ``objectives``.

    Start at the unconstrained optimum ``sign(d)``.  If the gate fails, move
    coordinates toward ``sign(a)`` in increasing order of objective lost per
    unit of gate gained, ``|d_i| / |a_i|``; at most one coordinate ends up
    fractional.  Returns ``(values, alphas)`` or ``None`` when infeasible.
    """
    objectives = np.atleast_2d(np.asarray(objectives, dtype=float))
    a = np.asarray(a, dtype=float)
    m, k = objectives.shape
    if np.abs(a).sum() < g:
        return None
    alpha = np.sign(objectives)
    need = g - alpha @ a
    short = need > 0
    if short.any():
        rows = np.flatnonzero(short)
        al = alpha[rows]
        target = np.broadcast_to(np.sign(a), al.shape)
        step = target - al
        gain = np.abs(a) * np.abs(step)
        movable = gain > 0
        rate = np.where(movable, np.abs(objectives[rows]) / np.where(a == 0, 1.0, np.abs(a)), np.inf)
        order = np.argsort(rate, axis=1, kind="stable")
        gain_sorted = np.take_along_axis(gain, order, axis=1)
        cum = np.cumsum(gain_sorted, axis=1)
        nd = need[rows]
        # first sorted position whose cumulative gain covers the shortfall
        pos = np.minimum((cum < nd[:, None]).sum(axis=1), k - 1)
        before = np.where(pos > 0, np.take_along_axis(cum, np.maximum(pos - 1, 0)[:, None], 1)[:, 0], 0.0)
        last_gain = np.take_along_axis(gain_sorted, pos[:, None], 1)[:, 0]
        frac = np.clip((nd - before) / np.where(last_gain > 0, last_gain, 1.0), 0.0, 1.0)
        rank = np.empty_like(order)
        np.put_along_axis(rank, order, np.arange(k)[None, :].repeat(len(rows), 0), axis=1)
        weight = np.where(rank < pos[:, None], 1.0, np.where(rank == pos[:, None], frac[:, None], 0.0))
        alpha[rows] = al + weight * step
    values = np.einsum("ij,ij->i", objectives, alpha)
    return values, alpha


def solve_box_lp(d, a, g: float):
    """Maximize ``d . alpha`` over the unit cube subject to ``a . alpha >= g``.

    Returns ``(value, alpha)``, or ``None`` if the gate cannot be met.
    """
    d = np.asarray(d, dtype=float)
    a = np.asarray(a, dtype=float)
    if d.shape != a.shape or d.ndim != 1:
        raise DimensionError("objective and gate must be vectors of equal length")
    res = _solve_batch(d[None, :], a, g)
    if res is None:
        return None
    values, alphas = res
    return float(values[0]), alphas[0]


class _Target:
    """Per-polytope quantities shared by every gate checked against it."""

    def __init__(self, region: AffineRegion, poly: ConvexPolytope):
        if poly.dim != region.dim:
            raise DimensionError("region and polytope live in different spaces")
        self.objectives = (region.basis @ poly.lhs).T
        self.bounds = poly.ub - region.center @ poly.lhs


def _check_gate(region, target, gate_v, gate_k, tol):
    a = region.basis @ gate_v
    g = gate_k - region.center @ gate_v
    res = _solve_batch(target.objectives, a, g)
    if res is None:
        return None
    values, alphas = res
    excess = values - target.bounds
    bad = np.flatnonzero(excess > tol)
    if bad.size == 0:
        return None
    t = int(bad[0])
    return Witness(alphas[t], region.point(alphas[t]), t, float(excess[t]))


def check_halfspace_inclusion(region: AffineRegion, gate_v, gate_k: float,
                              poly: ConvexPolytope, tol: float = INCLUSION_TOL):
    """Is ``{x in region : x . gate_v >= gate_k}`` inside ``poly``?

    Returns ``None`` when it is, otherwise the witness maximizing the first
    violated constraint.
    """
    gate_v = np.asarray(gate_v, dtype=float)
    return _check_gate(region, _Target(region, poly), gate_v, gate_k, tol)


def check_inclusion(region: AffineRegion, safe: SafeSet, tol: float = INCLUSION_TOL):
    """Is ``region`` inside the union described by ``safe``?

    The region is split by halfspaces whose pieces each have to fall into
    one part of the union: on one side of an orthant boundary for a
    quadrant part, or outside one face of the box for a box part.
    Returns ``None`` when included, otherwise a :class:`Witness`.
    """
    d = region.dim
    positive = _Target(region, safe.positive)
    neg = safe.negative
    if neg is None:
        return _check_gate(region, positive, np.zeros(d), 0.0, tol)
    if isinstance(neg, QuadrantPart):
        e = int(np.flatnonzero(neg.zeroed)[0])
        unit = np.zeros(d)
        unit[e] = 1.0
        hit = _check_gate(region, positive, unit, 0.0, tol)
        if hit is not None:
            return hit
        return _check_gate(region, _Target(region, neg.polytope), -unit, 0.0, tol)
    if isinstance(neg, BoxPart):
        for i in np.flatnonzero(np.isfinite(neg.eta)):
            unit = np.zeros(d)
            unit[i] = 1.0
            hit = _check_gate(region, positive, unit, float(neg.eta[i]), tol)
            if hit is not None:
                return hit
        return None
    raise TypeError(f"unknown negative part {type(neg).__name__}")
