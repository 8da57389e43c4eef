"""Shared builders for the tests: the running example, full chains, samplers."""

import numpy as np

from oracles import hit_and_run
from permverify.backward import BoxPart, QuadrantPart, SafeSet, backward_propagate
from permverify.driver import build_product, init_post, init_pre
from permverify.forward import forward_propagate
from permverify.geometry import AffineMap, pushforward
from permverify.problem import Network, PermutationProperty

GAIN = 1000.0


def running_network():
    w = np.array([[GAIN, -GAIN, GAIN, -GAIN], [-GAIN, GAIN, -GAIN, GAIN]])
    first = AffineMap(w, [0.0, 0.0, -1.0, -1.0])
    second = AffineMap([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0])
    return Network((first, second))


def running_property():
    return PermutationProperty([0.0, 0.0], [1.0, 1.0], [1, 0], [1, 0], 0.1)


def chains(network, prop):
    """Forward regions, pre-ReLU hints and the complete backward chain."""
    layers = build_product(network)
    reach, hints = [init_pre(prop)], []
    for layer in layers:
        hints.append(pushforward(reach[-1], layer).center)
        reach.append(forward_propagate(reach[-1], layer))
    n = len(layers)
    safe = {n: SafeSet(init_post(prop))}
    for cut in range(n - 1, 0, -1):
        safe[cut] = backward_propagate(safe[cut + 1], layers[cut], hints[cut - 1])
    return layers, reach, hints, safe


def run_from_cut(layers, cut, x):
    """Activations at the last cut, starting from values ``x`` at ``cut``.

    Values at a cut are read through ReLU first, so points of a negative
    part are handled like the activations they stand for.
    """
    y = np.maximum(np.asarray(x, dtype=float), 0.0)
    for layer in layers[cut:]:
        y = np.maximum(layer(y), 0.0)
    return y


def sample_box(part: BoxPart, count, rng, spread=5.0):
    eta = part.eta
    finite = np.isfinite(eta)
    x = rng.uniform(-spread, spread, size=(count, eta.size))
    below = eta - rng.exponential(spread / 4, size=(count, eta.size))
    x[:, finite] = below[:, finite]
    # exact corner and a few points on the faces
    x[: min(count, 4), finite] = eta[finite]
    return x


def sample_safe(safe: SafeSet, count, seed, box=50.0):
    """Points of every part of ``safe``: walks in polytopes, draws in boxes."""
    rng = np.random.default_rng(seed)
    parts = [hit_and_run(safe.positive.lhs, safe.positive.ub, count, seed, box=box)]
    if isinstance(safe.negative, BoxPart):
        parts.append(sample_box(safe.negative, count, rng))
    elif isinstance(safe.negative, QuadrantPart):
        p = safe.negative.polytope
        parts.append(hit_and_run(p.lhs, p.ub, count, seed + 1, box=box))
    return parts


def random_integer_region(rng, d_max=6, k_max=4):
    """Integer region with planted ties: scaled copies, sign flips, offsets, zeros."""
    k = int(rng.integers(1, k_max + 1))
    d = int(rng.integers(1, d_max + 1))
    cols, offs = [], []
    for _ in range(d):
        kind = rng.integers(0, 6)
        if cols and kind == 0:
            j = rng.integers(len(cols))
            s = int(rng.integers(1, 4))
            cols.append(s * cols[j]); offs.append(s * offs[j])
        elif cols and kind == 1:
            j = rng.integers(len(cols))
            cols.append(-cols[j]); offs.append(-offs[j])
        elif kind == 2:
            cols.append(np.zeros(k, dtype=int)); offs.append(0)
        elif kind == 3:
            v = rng.integers(-2, 3, size=k)
            cols.append(v); offs.append(int(np.abs(v).sum()) + int(rng.integers(1, 3)) * int(rng.choice([-1, 1])))
        else:
            cols.append(rng.integers(-3, 4, size=k)); offs.append(int(rng.integers(-3, 4)))
    return np.array(cols).T.reshape(k, d), np.array(offs)
