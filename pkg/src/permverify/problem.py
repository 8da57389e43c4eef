"""Networks and permutation-invariance properties."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import AffineMap


@dataclass(frozen=True)
class Network:
    """Feed-forward network; every layer is affine followed by ReLU."""

    layers: tuple[AffineMap, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise InputError("network has no layers")
        for i in range(1, len(layers)):
            if layers[i - 1].d_out != layers[i].d_in:
                raise InputError(
                    f"layer {i - 1} outputs {layers[i - 1].d_out} values "
                    f"but layer {i} expects {layers[i].d_in}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def d_in(self):
        return self.layers[0].d_in

    @property
    def d_out(self):
        return self.layers[-1].d_out

    def __len__(self):
        return len(self.layers)

    def __call__(self, x):
        return simulate(self.layers, x)

    def activations(self, x):
        """Values at every cut, input first, output last."""
        acts = [np.asarray(x, dtype=float)]
        for layer in self.layers:
            acts.append(simulate_layer(acts[-1], layer))
        return acts


def simulate_layer(x, layer: AffineMap):
    return np.maximum(layer(x), 0.0)


def simulate(layers, x):
    x = np.asarray(x, dtype=float)
    for layer in layers:
        x = simulate_layer(x, layer)
    return x


def _check_permutation(p, n, name):
    p = np.asarray(p)
    if p.shape != (n,) or not np.issubdtype(p.dtype, np.integer):
        raise InputError(f"{name} must be {n} integers")
    if sorted(p.tolist()) != list(range(n)):
        raise InputError(f"{name} is not a permutation of 0..{n - 1}")
    return p.astype(int)


def permute(x, sigma):
    """Reorder the last axis so that position ``t`` holds entry ``sigma[t]``."""
    return np.asarray(x)[..., np.asarray(sigma)]


@dataclass(frozen=True)
class PermutationProperty:
    """For every ``lower <= x <= upper``:
    ``|permute(N(x), sigma_out) - N(permute(x, sigma_in))|_inf <= tolerance``.
    """

    lower: np.ndarray
    upper: np.ndarray
    sigma_in: np.ndarray
    sigma_out: np.ndarray
    tolerance: float

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise InputError("lower and upper bounds must be vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InputError("bounds must be finite")
        if np.any(lo > hi):
            raise InputError("lower bound exceeds upper bound")
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        sin = _check_permutation(self.sigma_in, lo.shape[0], "sigma_in")
        sout = np.asarray(self.sigma_out)
        if sout.ndim != 1:
            raise InputError("sigma_out must be a vector")
        sout = _check_permutation(sout, sout.shape[0], "sigma_out")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "sigma_in", sin)
        object.__setattr__(self, "sigma_out", sout)
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def d_in(self):
        return self.lower.shape[0]

    @property
    def d_out(self):
        return self.sigma_out.shape[0]

    def check_network(self, network: Network):
        if network.d_in != self.d_in:
            raise InputError(f"property has {self.d_in} inputs, network has {network.d_in}")
        if network.d_out != self.d_out:
            raise InputError(f"property has {self.d_out} outputs, network has {network.d_out}")

    def gap(self, network: Network, x):
        """Largest output discrepancy at input ``x`` (or a stack of inputs)."""
        x = np.asarray(x, dtype=float)
        y = network(x)
        y_perm = network(permute(x, self.sigma_in))
        return np.max(np.abs(permute(y, self.sigma_out) - y_perm), axis=-1)

    def violated_by(self, network: Network, x) -> bool:
        x = np.asarray(x, dtype=float)
        inside = np.all((self.lower <= x) & (x <= self.upper))
        return bool(inside and self.gap(network, x) > self.tolerance)
