"""JSON files for networks, properties and dumped regions.

Network::

    {"layers": [{"weights": [[...d_out numbers...], ...d_in rows...],
                 "bias": [...d_out numbers...]}, ...]}

Property::

    {"lower": [...], "upper": [...], "sigma_in": [...], "sigma_out": [...],
     "tolerance": 0.1}

``sigma[t]`` is the index whose value lands at position ``t``.  Floats are
written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .backward import BoxPart, QuadrantPart
from .errors import InputError
from .geometry import AffineMap
from .problem import Network, PermutationProperty


def _read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _numbers(value, where, ndim):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: expected numbers") from exc
    if arr.ndim != ndim or (ndim == 2 and arr.shape[1] == 0) or arr.size == 0:
        kind = "a list" if ndim == 1 else "a non-ragged list of lists"
        raise InputError(f"{where}: expected {kind} of numbers")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: non-finite entry")
    return arr


def _field(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{where}: missing field '{key}'")
    return doc[key]


def network_from_dict(doc, where="network") -> Network:
    layers_doc = _field(doc, "layers", where)
    if not isinstance(layers_doc, list) or not layers_doc:
        raise InputError(f"{where}.layers: expected a non-empty list")
    layers = []
    for i, ld in enumerate(layers_doc):
        at = f"{where}.layers[{i}]"
        w = _numbers(_field(ld, "weights", at), f"{at}.weights", 2)
        b = _numbers(_field(ld, "bias", at), f"{at}.bias", 1)
        if b.shape[0] != w.shape[1]:
            raise InputError(f"{at}: bias has {b.shape[0]} entries, weights have {w.shape[1]} columns")
        layers.append(AffineMap(w, b))
    return Network(tuple(layers))


def network_to_dict(network: Network):
    return {"layers": [{"weights": l.weights.tolist(), "bias": l.bias.tolist()}
                       for l in network.layers]}


def _permutation(value, where):
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise InputError(f"{where}: expected a list of integers")
    return np.array(value, dtype=int)


def property_from_dict(doc, where="property") -> PermutationProperty:
    lo = _numbers(_field(doc, "lower", where), f"{where}.lower", 1)
    hi = _numbers(_field(doc, "upper", where), f"{where}.upper", 1)
    sin = _permutation(_field(doc, "sigma_in", where), f"{where}.sigma_in")
    sout = _permutation(_field(doc, "sigma_out", where), f"{where}.sigma_out")
    tol = _field(doc, "tolerance", where)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not math.isfinite(tol):
        raise InputError(f"{where}.tolerance: expected a finite number")
    try:
        return PermutationProperty(lo, hi, sin, sout, float(tol))
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from exc


def property_to_dict(prop: PermutationProperty):
    return {
        "lower": prop.lower.tolist(),
        "upper": prop.upper.tolist(),
        "sigma_in": prop.sigma_in.tolist(),
        "sigma_out": prop.sigma_out.tolist(),
        "tolerance": prop.tolerance,
    }


def load_network(path) -> Network:
    return network_from_dict(_read_json(path), str(path))


def load_property(path) -> PermutationProperty:
    return property_from_dict(_read_json(path), str(path))


def _write_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def save_network(network: Network, path):
    _write_json(network_to_dict(network), path)


def save_property(prop: PermutationProperty, path):
    _write_json(property_to_dict(prop), path)


def _finite_or_null(arr):
    return [None if not np.isfinite(v) else float(v) for v in arr]


def dump_analysis(verdict, directory):
    """Write the forward region and the safe set of every computed cut."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for i, region in enumerate(verdict.reach):
        _write_json({"cut": i, "basis": region.basis.tolist(), "center": region.center.tolist()},
                    out / f"reach_{i}.json")
    for i, safe in sorted(verdict.safe.items()):
        doc = {"cut": i, "positive": {"lhs": safe.positive.lhs.tolist(), "ub": safe.positive.ub.tolist()}}
        neg = safe.negative
        if isinstance(neg, BoxPart):
            doc["negative"] = {"kind": "box", "eta": _finite_or_null(neg.eta)}
        elif isinstance(neg, QuadrantPart):
            doc["negative"] = {"kind": "quadrant", "zeroed": neg.zeroed.tolist(),
                               "lhs": neg.polytope.lhs.tolist(), "ub": neg.polytope.ub.tolist()}
        else:
            doc["negative"] = None
        _write_json(doc, out / f"safe_{i}.json")
