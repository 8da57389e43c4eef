"""End-to-end verification of a permutation-invariance property.

The network is run twice side by side (original input and permuted input)
as one product network.  Forward regions over-approximate what the product
can reach at each cut; backward safe sets under-approximate what is
guaranteed to end inside the output property.  One inclusion at any cut
proves the property.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import block_diag

from .backward import SafeSet, backward_propagate
from .cex import CANDIDATE_LIMIT, spuriousness_check
from .forward import forward_propagate
from .geometry import SVD_CUTOFF, AffineMap, AffineRegion, ConvexPolytope, pushforward
from .inclusion import INCLUSION_TOL, Witness, check_inclusion
from .problem import Network, PermutationProperty, permute


class Outcome(Enum):
    HOLDS = "holds"
    COUNTEREXAMPLE = "counterexample"
    INCONCLUSIVE = "inconclusive"


@dataclass
class VerifyConfig:
    tie_tol: float | None = None
    inclusion_tol: float = INCLUSION_TOL
    svd_cutoff: float = SVD_CUTOFF
    cex_distance: float = 1.0
    cex_samples: int = 10_000
    seed: int = 0
    max_escalations: int = 8
    candidate_limit: int = CANDIDATE_LIMIT


@dataclass
class Verdict:
    outcome: Outcome
    proved_at_cut: int | None = None
    counterexample: np.ndarray | None = None
    witness_cut: int | None = None
    timings: dict = field(default_factory=dict)
    reach: list = field(default_factory=list, repr=False)
    safe: dict = field(default_factory=dict, repr=False)

    def to_dict(self, timings=True):
        out = {
            "outcome": self.outcome.value,
            "proved_at_cut": self.proved_at_cut,
            "counterexample": None if self.counterexample is None else self.counterexample.tolist(),
            "witness_cut": self.witness_cut,
        }
        if timings:
            out["timings"] = dict(self.timings)
        return out


def build_product(network: Network) -> list[AffineMap]:
    """Two copies of the network acting on ``[x, x']`` independently."""
    return [
        AffineMap(block_diag(l.weights, l.weights), np.concatenate([l.bias, l.bias]))
        for l in network.layers
    ]


def init_pre(prop: PermutationProperty) -> AffineRegion:
    """Region of product inputs ``[x, permute(x, sigma_in)]`` with ``x`` in the bounds."""
    mid = 0.5 * (prop.lower + prop.upper)
    half = np.diag(0.5 * (prop.upper - prop.lower))
    basis = np.hstack([half, permute(half, prop.sigma_in)])
    return AffineRegion(basis, np.concatenate([mid, permute(mid, prop.sigma_in)]))


def init_post(prop: PermutationProperty) -> ConvexPolytope:
    """``|y'_t - y_{sigma_out[t]}| <= tolerance`` on product outputs ``[y, y']``."""
    n = prop.d_out
    diff = np.zeros((2 * n, n))
    diff[n + np.arange(n), np.arange(n)] = 1.0
    diff[prop.sigma_out, np.arange(n)] -= 1.0
    lhs = np.hstack([diff, -diff])
    return ConvexPolytope(lhs, np.full(2 * n, prop.tolerance))


def snap_to_pre(prop: PermutationProperty, points):
    """Project product inputs onto the precondition: clamp, then copy the permuted block."""
    n = prop.d_in
    x = np.clip(np.atleast_2d(points)[:, :n], prop.lower, prop.upper)
    return np.hstack([x, permute(x, prop.sigma_in)])


def verify(network: Network, prop: PermutationProperty, config: VerifyConfig | None = None) -> Verdict:
    config = config or VerifyConfig()
    prop.check_network(network)
    layers = build_product(network)
    n = len(layers)
    timings = {}

    t0 = time.perf_counter()
    reach = [init_pre(prop)]
    hints = []
    for layer in layers:
        hints.append(pushforward(reach[-1], layer).center)
        reach.append(forward_propagate(reach[-1], layer, config.tie_tol, config.svd_cutoff))
    timings["forward"] = time.perf_counter() - t0

    safe = {n: SafeSet(init_post(prop))}
    witnesses: dict[int, Witness] = {}
    t_back = t_incl = 0.0
    for cut in range(n, 0, -1):
        if cut not in safe:
            t0 = time.perf_counter()
            safe[cut] = backward_propagate(safe[cut + 1], layers[cut], hints[cut - 1])
            t_back += time.perf_counter() - t0
        t0 = time.perf_counter()
        hit = check_inclusion(reach[cut], safe[cut], config.inclusion_tol)
        t_incl += time.perf_counter() - t0
        if hit is None:
            timings.update(backward=t_back, inclusion=t_incl)
            return Verdict(Outcome.HOLDS, proved_at_cut=cut, timings=timings, reach=reach, safe=safe)
        witnesses[cut] = hit
    timings.update(backward=t_back, inclusion=t_incl)

    deepest = max(witnesses)
    t0 = time.perf_counter()
    found = spuriousness_check(
        witnesses[deepest].point, deepest, reach, layers,
        is_counterexample=lambda z: prop.violated_by(network, z[: prop.d_in]),
        snap=lambda pts: snap_to_pre(prop, pts),
        distance=config.cex_distance, samples=config.cex_samples, seed=config.seed,
        max_escalations=config.max_escalations, limit=config.candidate_limit,
    )
    timings["cex"] = time.perf_counter() - t0
    if found is None:
        return Verdict(Outcome.INCONCLUSIVE, witness_cut=deepest, timings=timings, reach=reach, safe=safe)
    return Verdict(Outcome.COUNTEREXAMPLE, counterexample=found[: prop.d_in].copy(),
                   witness_cut=deepest, timings=timings, reach=reach, safe=safe)
