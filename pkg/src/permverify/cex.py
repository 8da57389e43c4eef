"""Search for concrete counterexamples behind a failed inclusion check.

A witness point at some cut is pulled back one layer at a time: candidate
points are sampled in the forward region of the previous cut, nudged by a
least-squares step so that their image under the layer approaches the
target, and kept if the image is close enough.  Inputs reached this way are
validated by plain simulation, so the search can only miss
counterexamples, never invent them.
"""

from __future__ import annotations

import logging

import numpy as np

from .geometry import AffineMap, AffineRegion
from .problem import simulate_layer

log = logging.getLogger(__name__)

CANDIDATE_LIMIT = 256
_CHUNK_ELEMS = 4_000_000


def _solve_ls(A, r):
    """Batched ``argmin_alpha |alpha @ A - r|`` with a tiny ridge term."""
    s, k, m = A.shape
    if k <= m:
        gram = A @ A.transpose(0, 2, 1)
        rhs = np.einsum("skm,sm->sk", A, r)
        ridge = 1e-10 * np.trace(gram, axis1=1, axis2=2) / k + 1e-300
        gram += ridge[:, None, None] * np.eye(k)
        return np.linalg.solve(gram, rhs[..., None])[..., 0]
    # more unknowns than equations: minimum-norm solution
    gram = A.transpose(0, 2, 1) @ A
    ridge = 1e-10 * np.trace(gram, axis1=1, axis2=2) / m + 1e-300
    gram += ridge[:, None, None] * np.eye(m)
    y = np.linalg.solve(gram, r[..., None])[..., 0]
    return np.einsum("skm,sm->sk", A, y)


def pull_back_candidates(target, region_prev: AffineRegion, layer: AffineMap,
                         samples: int, rng, rectified: bool = True):
    """Sampled points of ``region_prev`` and the distance of their image to ``target``.

    With ``rectified`` the points stand for ReLU outputs of an earlier
    layer, so negative coordinates act as zero when the layer is applied;
    the least-squares step linearizes that projection at each sample.
    Each sample contributes whichever of its raw and adjusted versions lands
    closer.  The center of the region is always the first sample.
    """
    target = np.asarray(target, dtype=float)
    B, c = region_prev.basis, region_prev.center
    W, b = layer.weights, layer.bias
    k, d = B.shape
    alpha0 = rng.uniform(-1.0, 1.0, size=(samples, k))
    alpha0[0] = 0.0
    z0 = alpha0 @ B + c

    def image(z):
        return simulate_layer(np.maximum(z, 0.0) if rectified else z, layer)

    best_z = z0
    best_dist = np.linalg.norm(image(z0) - target, axis=1)
    if k == 0:
        return best_z, best_dist
    alpha1 = np.empty_like(alpha0)
    step = max(1, _CHUNK_ELEMS // max(1, k * max(d, W.shape[1])))
    for lo in range(0, samples, step):
        hi = min(samples, lo + step)
        mask = (z0[lo:hi] > 0) if rectified else np.ones((hi - lo, d), dtype=bool)
        masked = B[None, :, :] * mask[:, None, :]
        A = (masked.reshape(-1, d) @ W).reshape(hi - lo, k, -1)
        r = target - ((c * mask) @ W + b)
        alpha1[lo:hi] = _solve_ls(A, r)
    alpha1 = np.clip(alpha1, -1.0, 1.0)
    z1 = alpha1 @ B + c
    dist1 = np.linalg.norm(image(z1) - target, axis=1)
    better = dist1 < best_dist
    best_z = np.where(better[:, None], z1, z0)
    best_dist = np.where(better, dist1, best_dist)
    return best_z, best_dist


def pull_back_cex(target, region_prev: AffineRegion, layer: AffineMap, distance: float,
                  samples: int = 10_000, seed=None, rectified: bool = True,
                  limit: int = CANDIDATE_LIMIT):
    """Points of ``region_prev`` whose one-layer image is within ``distance`` of ``target``.

    Returns ``(points, distances)`` sorted by distance, at most ``limit`` rows.
    An empty result means the pullback failed.
    """
    rng = np.random.default_rng(seed)
    pts, dist = pull_back_candidates(target, region_prev, layer, samples, rng, rectified)
    keep = np.flatnonzero(dist <= distance)
    order = keep[np.argsort(dist[keep], kind="stable")][:limit]
    return pts[order], dist[order]


def spuriousness_check(witness, cut: int, regions, layers, is_counterexample, snap=None,
                       distance: float = 1.0, samples: int = 10_000, seed=0,
                       max_escalations: int = 8, limit: int = CANDIDATE_LIMIT):
    """Try to turn a witness at ``cut`` into a concrete input.

    ``regions[j]`` is the forward region at cut ``j`` and ``layers[j]`` maps
    cut ``j`` to cut ``j + 1``.  Each hop may move at most
    ``distance / len(layers)``; when no candidate qualifies the threshold is
    multiplied by ten, up to ``max_escalations`` times over the whole search.
    Targets at hidden cuts are ReLU outputs, so they are clipped at zero
    before being pulled back.

    ``snap`` maps candidate inputs onto the precondition and
    ``is_counterexample`` validates one input by simulation.  Returns the
    first validated input or ``None``.
    """
    rng = np.random.default_rng(seed)
    hop = distance / len(layers)
    escalations = 0
    targets = np.maximum(np.asarray(witness, dtype=float), 0.0)[None, :]
    for j in range(cut - 1, -1, -1):
        per_target = max(1, samples // len(targets))
        found = [pull_back_candidates(t, regions[j], layers[j], per_target, rng, rectified=j > 0)
                 for t in targets]
        pts = np.vstack([f[0] for f in found])
        dist = np.concatenate([f[1] for f in found])
        while dist.min() > hop and escalations < max_escalations:
            hop *= 10.0
            escalations += 1
        keep = np.flatnonzero(dist <= hop)
        log.debug("cut %d: %d of %d candidates within %.3g", j, keep.size, dist.size, hop)
        if keep.size == 0:
            return None
        order = keep[np.argsort(dist[keep], kind="stable")][:limit]
        targets = np.maximum(pts[order], 0.0) if j > 0 else pts[order]
    inputs = snap(targets) if snap is not None else targets
    for x in inputs:
        if is_counterexample(x):
            return x
    return None
