"""Forward over-approximation of a ReLU layer on affine regions."""

from __future__ import annotations

import numpy as np

from .geometry import AffineMap, AffineRegion, pushforward, reduce_basis, SVD_CUTOFF
from .tieclass import SignHint, TieClass, compute_tie_classes


def relu_over_approx(region: AffineRegion, classes: list[TieClass]) -> AffineRegion:
    """Region containing ``relu(x)`` for every ``x`` in ``region``.

    Inside one tie class ReLU either passes every coordinate or zeroes every
    coordinate, so each basis row restricted to the class can be scaled by a
    single coefficient in [-1, 1].  Classes that are never positive collapse
    to zero.
    """
    d = region.dim
    center = np.maximum(region.center, 0.0)
    rows = []
    for cls in classes:
        if cls.sign is SignHint.NON_POSITIVE:
            center[cls.indices] = 0.0
            continue
        sub = region.basis[:, cls.indices]
        live = np.any(sub != 0, axis=1)
        if not live.any():
            continue
        block = np.zeros((int(live.sum()), d))
        block[:, cls.indices] = sub[live]
        rows.append(block)
    basis = np.vstack(rows) if rows else np.zeros((0, d))
    return AffineRegion(basis, center)


def forward_propagate(region: AffineRegion, layer: AffineMap, tol=None,
                      svd_cutoff=SVD_CUTOFF) -> AffineRegion:
    """One layer: affine image, tie classes, ReLU over-approximation, basis reduction."""
    pre = pushforward(region, layer)
    classes = compute_tie_classes(pre, tol)
    return reduce_basis(relu_over_approx(pre, classes), svd_cutoff)
