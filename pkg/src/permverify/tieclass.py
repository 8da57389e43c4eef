"""Partition the coordinates of a region into classes that share their ReLU sign.

Two coordinates are tied when, over the whole region, both are positive or
both are non-positive at every point.  The syntactic test used here is
sufficient: both always positive, both always negative, or the augmented
columns ``[B[:, i], c_i]`` are positive multiples of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import AffineRegion, component_bounds

PARALLEL_TOL = 1e-7


class SignHint(Enum):
    NON_NEGATIVE = "always_non_negative"
    NON_POSITIVE = "always_non_positive"
    MIXED = "mixed"


@dataclass(frozen=True)
class TieClass:
    indices: np.ndarray
    sign: SignHint


def default_tol(region: AffineRegion) -> float:
    return 1e-7 * (1.0 + np.abs(region.center).max(initial=0.0))


def _augmented(region):
    # one row per coordinate: its column of the basis followed by its offset
    return np.hstack([region.basis.T, region.center[:, None]])


def _parallel(cols, rel_tol):
    """Pairwise positive-parallel test on the rows of ``cols``.

    Uses the Lagrange identity: the sum of squared 2x2 minors of two vectors
    equals ``|u|^2 |v|^2 - (u.v)^2``, so no component is ever divided by.
    """
    gram = cols @ cols.T
    sq = np.diag(gram)
    norms2 = np.outer(sq, sq)
    minors2 = np.maximum(norms2 - gram**2, 0.0)
    return (minors2 <= rel_tol**2 * norms2) & (gram > 0)


def tied_matrix(region: AffineRegion, tol=None, rel_tol=PARALLEL_TOL):
    """Boolean ``(d, d)`` matrix of the tie relation (reflexive).

    All-zero coordinates are tied only to each other.
    """
    if tol is None:
        tol = default_tol(region)
    lo, hi = component_bounds(region)
    pos = lo > tol
    neg = hi < -tol
    cols = _augmented(region)
    zero = ~np.any(cols != 0, axis=1)
    tied = _parallel(cols, rel_tol)
    tied |= np.outer(pos, pos) | np.outer(neg, neg)
    tied &= ~(zero[:, None] ^ zero[None, :])
    tied |= np.outer(zero, zero)
    return tied


def are_tied(region: AffineRegion, i1: int, i2: int, tol=None, rel_tol=PARALLEL_TOL) -> bool:
    """Sufficient condition for coordinates ``i1`` and ``i2`` to share a ReLU sign."""
    if tol is None:
        tol = default_tol(region)
    sub = AffineRegion(region.basis[:, [i1, i2]], region.center[[i1, i2]])
    return bool(tied_matrix(sub, tol, rel_tol)[0, 1])


def _components(tied):
    d = tied.shape[0]
    parent = list(range(d))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in zip(*np.nonzero(np.triu(tied, 1))):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def compute_tie_classes(region: AffineRegion, tol=None, rel_tol=PARALLEL_TOL):
    """Partition ``range(region.dim)`` into tie classes with a sign hint each.

    Classes come from union-find over tied pairs.  The tolerance makes the
    relation only approximately transitive; a merged group that is not
    pairwise tied is split back into singletons, which are always sound.
    """
    if tol is None:
        tol = default_tol(region)
    lo, hi = component_bounds(region)
    tied = tied_matrix(region, tol, rel_tol)
    classes = []
    for group in _components(tied):
        if len(group) > 2 and not tied[np.ix_(group, group)].all():
            parts = [np.array([i]) for i in group]
        else:
            parts = [group]
        for idx in parts:
            if np.all(hi[idx] <= tol):
                sign = SignHint.NON_POSITIVE
            elif np.all(lo[idx] >= -tol):
                sign = SignHint.NON_NEGATIVE
            else:
                sign = SignHint.MIXED
            classes.append(TieClass(idx, sign))
    return classes
