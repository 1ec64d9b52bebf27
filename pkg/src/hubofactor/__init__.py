"""Integer factorization through HUBO/QUBO models of (pq - N)**2."""

from .polycore import BinaryPolynomial, add_term, multiply, evaluate
from .modelgen import (FactorLayout, FactorModel, build_plain_hubo, build_range_hubo,
                       decode, expected_gme)

__all__ = [
    "BinaryPolynomial", "add_term", "multiply", "evaluate",
    "FactorLayout", "FactorModel", "build_plain_hubo", "build_range_hubo",
    "decode", "expected_gme",
]

__version__ = "0.1.0"
