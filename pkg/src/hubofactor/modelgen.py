"""Factorization HUBO construction.

Both factors are written as affine functions of binary variables,

    p = s_i + [fix_lsb] + sum_l 2**l * x_l
    q = s_j + [fix_lsb] + sum_l 2**l * x_{m+l}

and the model is the multilinear expansion of ``(p*q - N)**2``. The plain
model is the special case ``s_i = s_j = 0``.

Energy conventions: the *full* energy is the polynomial including its
constant, so a factorization has energy exactly 0. The offset-free energy
(``paper_energy``, ``paper_gme``) drops the constant, so a factorization sits
at ``-offset`` (``-N**2`` for the plain model, ``-(N - s_i*s_j)**2`` for a
range block).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

from .errors import AssignmentTooShort, InvalidLayout, NotOddCapable
from .polycore import BinaryPolynomial

__all__ = [
    "FactorLayout",
    "FactorModel",
    "factor_polynomial",
    "cost_polynomial",
    "build_plain_hubo",
    "build_range_hubo",
    "decode",
    "expected_gme",
    "default_bits",
]


@dataclass(frozen=True)
class FactorLayout:
    """Variable layout of a factorization model.

    ``n`` is the number of binary digits per factor. With ``fix_lsb`` the
    lowest digit is the constant 1, leaving ``n - 1`` free variables per
    factor. Variables ``0..m-1`` encode p and ``m..2m-1`` encode q, where
    ``m`` is :attr:`free_bits`.
    """

    n: int
    fix_lsb: bool = False
    s_i: int = 0
    s_j: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidLayout(f"need at least one bit per factor, got n={self.n}")
        if self.fix_lsb and self.n < 2:
            raise InvalidLayout("fix_lsb needs n >= 2")
        if self.s_i < 0 or self.s_j < 0:
            raise InvalidLayout("block offsets must be non-negative")

    @property
    def free_bits(self) -> int:
        return self.n - (1 if self.fix_lsb else 0)

    @property
    def num_vars(self) -> int:
        return 2 * self.free_bits

    @property
    def weights(self) -> Tuple[int, ...]:
        start = 1 if self.fix_lsb else 0
        return tuple(1 << l for l in range(start, self.n))

    @property
    def base_p(self) -> int:
        return self.s_i + (1 if self.fix_lsb else 0)

    @property
    def base_q(self) -> int:
        return self.s_j + (1 if self.fix_lsb else 0)

    def p_vars(self) -> range:
        return range(0, self.free_bits)

    def q_vars(self) -> range:
        return range(self.free_bits, 2 * self.free_bits)

    def max_p(self) -> int:
        return self.base_p + sum(self.weights)

    def max_q(self) -> int:
        return self.base_q + sum(self.weights)

    def can_represent(self, p: int, q: int) -> bool:
        """True when some assignment decodes to exactly (p, q)."""
        def fits(value, base):
            r = value - base
            if r < 0 or r > sum(self.weights):
                return False
            return not (self.fix_lsb and r % 2)
        return fits(p, self.base_p) and fits(q, self.base_q)

    def encode(self, p: int, q: int) -> Tuple[int, ...]:
        if not self.can_represent(p, q):
            raise ValueError(f"({p}, {q}) is not representable in {self}")
        rp, rq = p - self.base_p, q - self.base_q
        return tuple(1 if rp & w else 0 for w in self.weights) + \
            tuple(1 if rq & w else 0 for w in self.weights)


@dataclass(frozen=True)
class FactorModel:
    """A factorization polynomial together with the metadata to decode it.

    ``poly`` is in full convention. Quadratized models carry extra ancilla
    variables above ``layout.num_vars``; they never enter :func:`decode`.
    """

    big_n: int
    layout: FactorLayout
    poly: BinaryPolynomial
    num_ancillas: int = 0

    @property
    def paper_gme(self) -> int:
        return -self.poly.offset

    @property
    def num_vars(self) -> int:
        return max(self.layout.num_vars + self.num_ancillas, self.poly.width)

    @property
    def degree(self) -> int:
        return self.poly.degree

    def full_energy(self, bits: Sequence[int]) -> int:
        return self.poly.evaluate(bits)

    def paper_energy(self, bits: Sequence[int]) -> int:
        return self.poly.evaluate(bits) - self.poly.offset

    def decode(self, bits: Sequence[int]) -> Tuple[int, int]:
        return decode(self, bits)

    def with_poly(self, poly: BinaryPolynomial,
                  num_ancillas: Optional[int] = None) -> "FactorModel":
        if num_ancillas is None:
            num_ancillas = self.num_ancillas
        return replace(self, poly=poly, num_ancillas=num_ancillas)


def factor_polynomial(base: int, weights: Sequence[int], first_var: int) -> BinaryPolynomial:
    """``base + sum_k weights[k] * x_{first_var + k}`` as a polynomial."""
    return BinaryPolynomial({(first_var + k,): w for k, w in enumerate(weights)}, base)


def cost_polynomial(p: BinaryPolynomial, q: BinaryPolynomial, big_n: int) -> BinaryPolynomial:
    """Multilinear expansion of ``(p*q - N)**2`` for arbitrary factor encodings."""
    residual = p * q - big_n
    return residual * residual


def _check(big_n: int, layout: FactorLayout):
    if big_n < 1:
        raise ValueError(f"N must be positive, got {big_n}")
    if layout.fix_lsb and big_n % 2 == 0:
        raise NotOddCapable(f"N={big_n} is even; odd-encoded factors cannot multiply to it")


def build_range_hubo(big_n: int, layout: FactorLayout) -> FactorModel:
    """Range-dependent HUBO for the block starting at ``(s_i, s_j)``."""
    big_n = int(big_n)
    _check(big_n, layout)
    m = layout.free_bits
    p = factor_polynomial(layout.base_p, layout.weights, 0)
    q = factor_polynomial(layout.base_q, layout.weights, m)
    return FactorModel(big_n, layout, cost_polynomial(p, q, big_n))


def build_plain_hubo(big_n: int, layout: FactorLayout) -> FactorModel:
    """HUBO for ``(p*q - N)**2`` with both factors fully binary encoded."""
    if layout.s_i or layout.s_j:
        raise InvalidLayout("the plain model has no block offsets; use build_range_hubo")
    return build_range_hubo(big_n, layout)


def decode(model: FactorModel, bits: Sequence[int]) -> Tuple[int, int]:
    layout = model.layout
    m = layout.free_bits
    if len(bits) < 2 * m:
        raise AssignmentTooShort(f"assignment has {len(bits)} bits, layout needs {2 * m}")
    p = layout.base_p + sum(w for w, b in zip(layout.weights, bits[:m]) if b)
    q = layout.base_q + sum(w for w, b in zip(layout.weights, bits[m:2 * m]) if b)
    return p, q


def expected_gme(model: FactorModel) -> int:
    """Target offset-free minimum, certified when attained.

    For a HUBO this is ``-(N - base_p*base_q)**2``: ``-N**2`` for the plain
    model and ``-N**2 - s_i**2 s_j**2 + 2 N s_i s_j`` for a range block. For
    a quadratized model it also absorbs the gadget constants.
    """
    return model.paper_gme


def default_bits(big_n: int) -> int:
    """Bits per factor covering balanced pairs: one more than bit-length of isqrt(N)."""
    return max(1, math.isqrt(big_n).bit_length() + 1)
