"""Hand-built argmax networks for scaling experiments.

For ``n`` inputs the network outputs, up to a small margin, the one-hot
indicator of the largest input:

* layer 1: ``p_ij = relu(1000 (x_i - x_j))`` and ``q_ij = relu(1000 (x_i - x_j) - 1)``
  for every ordered pair ``i != j`` in lexicographic order, all ``p`` first;
* layer 2: ``r_ij = relu(p_ij - q_ij)``, which is 1 once ``x_i`` leads ``x_j`` by 1e-3;
* layer 3: ``s_i = relu(2 sum_j r_ij - 2n + 3)``.

Argmax commutes with permutations, so shifting inputs and outputs by the same
cycle is invariant, while shifting only the inputs is not.
"""

from __future__ import annotations

import itertools

import numpy as np

from .geometry import AffineMap
from .problem import Network, PermutationProperty

GAIN = 1000.0


def argmax_network(n: int) -> Network:
    if n < 2:
        raise ValueError("need at least two inputs")
    pairs = list(itertools.permutations(range(n), 2))
    m = len(pairs)
    diff = np.zeros((n, m))
    for col, (i, j) in enumerate(pairs):
        diff[i, col] = GAIN
        diff[j, col] = -GAIN
    first = AffineMap(np.hstack([diff, diff]), np.concatenate([np.zeros(m), -np.ones(m)]))
    second = AffineMap(np.vstack([np.eye(m), -np.eye(m)]), np.zeros(m))
    gather = np.zeros((m, n))
    for col, (i, _) in enumerate(pairs):
        gather[col, i] = 2.0
    third = AffineMap(gather, np.full(n, 3.0 - 2.0 * n))
    return Network((first, second, third))


def cyclic_shift(n: int) -> np.ndarray:
    """Moves the value at position ``i`` to position ``i + 1`` (mod ``n``)."""
    return (np.arange(n) - 1) % n


def gen_benchmark(n: int, mode: str = "safe", epsilon: float = 0.1):
    """Network and property on ``[0, 1]^n`` with cyclically shifted inputs.

    ``safe`` shifts the outputs by the same cycle; ``unsafe`` leaves them
    in place.
    """
    if mode not in ("safe", "unsafe"):
        raise ValueError(f"mode must be 'safe' or 'unsafe', got {mode!r}")
    shift = cyclic_shift(n)
    prop = PermutationProperty(
        lower=np.zeros(n),
        upper=np.ones(n),
        sigma_in=shift,
        sigma_out=shift if mode == "safe" else np.arange(n),
        tolerance=epsilon,
    )
    return argmax_network(n), prop
