"""Verifier for permutation invariance of ReLU feed-forward networks."""

from .driver import Outcome, Verdict, VerifyConfig, verify
from .geometry import AffineMap, AffineRegion, ConvexPolytope
from .problem import Network, PermutationProperty

__all__ = [
    "AffineMap",
    "AffineRegion",
    "ConvexPolytope",
    "Network",
    "Outcome",
    "PermutationProperty",
    "Verdict",
    "VerifyConfig",
    "verify",
]
