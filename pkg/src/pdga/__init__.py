"""Exact tools for oriented CDGAs: Hodge decompositions, small subalgebras,
extensions of Hodge type and Poincaré duality models."""

from .field import QQ, PrimeField, parse_field
from .linalg import Matrix
from .algebra import CDGA, Complex, CyclicPairing, FreePresentation, GradedLinearMap, Orientation

__all__ = [
    "QQ",
    "PrimeField",
    "parse_field",
    "Matrix",
    "CDGA",
    "Complex",
    "CyclicPairing",
    "FreePresentation",
    "GradedLinearMap",
    "Orientation",
]
