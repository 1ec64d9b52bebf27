"""Multilinear pseudo-Boolean polynomials with exact integer coefficients.

A :class:`BinaryPolynomial` represents

    E(x) = offset + sum_k  c_k * prod_{i in vars_k} x_i,     x_i in {0, 1}

Because ``x**2 == x`` for binary variables, every monomial is reduced to a
sorted tuple of distinct variable indices. Coefficients and the offset are
Python ``int`` objects, so no energy is ever rounded regardless of magnitude.
"""

from __future__ import annotations

import numbers
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

from .errors import AssignmentTooShort

__all__ = [
    "Key",
    "BinaryPolynomial",
    "canonical_key",
    "add_term",
    "multiply",
    "evaluate",
    "degree",
    "variables",
    "spins_to_bits",
    "bits_to_spins",
    "assignment_from_int",
    "assignment_to_int",
]

Key = Tuple[int, ...]


def _as_int(value) -> int:
    # bool is an Integral too; reject it along with floats to keep the
    # "integers only" contract unambiguous
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"coefficients must be integers, got {type(value).__name__}")
    return int(value)


def canonical_key(vars: Iterable[int]) -> Key:
    """Sorted, de-duplicated variable tuple (applies ``x*x == x``)."""
    key = tuple(sorted(set(int(v) for v in vars)))
    if key and key[0] < 0:
        raise ValueError(f"variable indices must be non-negative, got {key[0]}")
    return key


def _merge(a: Key, b: Key) -> Key:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(set(a).union(b)))


class BinaryPolynomial:
    """Immutable multilinear polynomial over {0,1} variables.

    Args:
        terms: mapping (or iterable of pairs) from variable sequences to
            integer coefficients. Sequences may be unsorted and contain
            repeats; they are canonicalized. An empty sequence adds to the
            offset.
        offset: constant term.

    Examples:
        >>> p = BinaryPolynomial({(0,): 1, (1,): 2})
        >>> (p * p).terms == {(0,): 1, (1,): 4, (0, 1): 4}
        True
    """

    __slots__ = ("_terms", "_offset", "_hash")

    def __init__(self, terms: Union[Mapping[Sequence[int], int],
                                    Iterable[Tuple[Sequence[int], int]], None] = None,
                 offset: int = 0):
        acc: Dict[Key, int] = {}
        off = _as_int(offset)
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for vars, coeff in items:
                key = canonical_key(vars)
                c = _as_int(coeff)
                if key:
                    acc[key] = acc.get(key, 0) + c
                else:
                    off += c
        self._terms = {k: c for k, c in acc.items() if c}
        self._offset = off
        self._hash = None

    @classmethod
    def _from_canonical(cls, terms: Dict[Key, int], offset: int) -> "BinaryPolynomial":
        # trusted constructor: keys already canonical, caller gives up ownership
        self = cls.__new__(cls)
        self._terms = {k: c for k, c in terms.items() if c}
        self._offset = offset
        self._hash = None
        return self

    @classmethod
    def variable(cls, index: int, coeff: int = 1) -> "BinaryPolynomial":
        return cls({(index,): coeff})

    @classmethod
    def constant(cls, value: int) -> "BinaryPolynomial":
        return cls(offset=value)

    @classmethod
    def linear(cls, coeffs: Mapping[int, int], offset: int = 0) -> "BinaryPolynomial":
        return cls({(v,): c for v, c in coeffs.items()}, offset)

    # -- read access --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Key, int]:
        return MappingProxyType(self._terms)

    @property
    def offset(self) -> int:
        return self._offset

    @property
    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    @property
    def variables(self) -> frozenset:
        return frozenset(v for k in self._terms for v in k)

    @property
    def num_vars(self) -> int:
        """Number of distinct variables referenced by a term."""
        return len(self.variables)

    @property
    def width(self) -> int:
        """Minimum assignment length: highest referenced index plus one."""
        return max((k[-1] for k in self._terms), default=-1) + 1

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Key, int]]:
        return iter(sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0])))

    def coefficient(self, vars: Sequence[int]) -> int:
        key = canonical_key(vars)
        if not key:
            return self._offset
        return self._terms.get(key, 0)

    def terms_of_degree(self, d: int) -> Dict[Key, int]:
        return {k: c for k, c in self._terms.items() if len(k) == d}

    # -- algebra ------------------------------------------------------------

    def add_term(self, vars: Sequence[int], coeff: int) -> "BinaryPolynomial":
        return add_term(self, vars, coeff)

    def __add__(self, other):
        if isinstance(other, BinaryPolynomial):
            acc = dict(self._terms)
            for k, c in other._terms.items():
                acc[k] = acc.get(k, 0) + c
            return BinaryPolynomial._from_canonical(acc, self._offset + other._offset)
        if isinstance(other, numbers.Integral) and not isinstance(other, bool):
            return BinaryPolynomial._from_canonical(dict(self._terms), self._offset + int(other))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return BinaryPolynomial._from_canonical(
            {k: -c for k, c in self._terms.items()}, -self._offset)

    def __sub__(self, other):
        if isinstance(other, (BinaryPolynomial, numbers.Integral)) and not isinstance(other, bool):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BinaryPolynomial):
            return multiply(self, other)
        if isinstance(other, numbers.Integral) and not isinstance(other, bool):
            k = int(other)
            return BinaryPolynomial._from_canonical(
                {key: c * k for key, c in self._terms.items()}, self._offset * k)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = BinaryPolynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def restrict(self, fixed: Mapping[int, int]) -> "BinaryPolynomial":
        """Substitute fixed values for some variables."""
        acc: Dict[Key, int] = {}
        off = self._offset
        for key, c in self._terms.items():
            kept = []
            dead = False
            for v in key:
                if v in fixed:
                    if not fixed[v]:
                        dead = True
                        break
                else:
                    kept.append(v)
            if dead:
                continue
            if kept:
                k = tuple(kept)
                acc[k] = acc.get(k, 0) + c
            else:
                off += c
        return BinaryPolynomial._from_canonical(acc, off)

    def relabel(self, mapping: Mapping[int, int]) -> "BinaryPolynomial":
        return BinaryPolynomial(((tuple(mapping.get(v, v) for v in k), c)
                                 for k, c in self._terms.items()), self._offset)

    def evaluate(self, bits: Sequence[int]) -> int:
        return evaluate(self, bits)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, BinaryPolynomial):
            return NotImplemented
        return self._offset == other._offset and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._offset, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        parts = [f"{c}*" + "*".join(f"x{v}" for v in k) for k, c in self]
        if self._offset or not parts:
            parts.append(str(self._offset))
        return f"BinaryPolynomial({' + '.join(parts)})"


def add_term(poly: BinaryPolynomial, vars: Sequence[int], coeff: int) -> BinaryPolynomial:
    """Return ``poly`` with ``coeff * prod(vars)`` accumulated into it."""
    key = canonical_key(vars)
    c = _as_int(coeff)
    if not key:
        return BinaryPolynomial._from_canonical(dict(poly._terms), poly._offset + c)
    acc = dict(poly._terms)
    acc[key] = acc.get(key, 0) + c
    return BinaryPolynomial._from_canonical(acc, poly._offset)


def multiply(a: BinaryPolynomial, b: BinaryPolynomial) -> BinaryPolynomial:
    """Distributive product with multilinear reduction of every monomial."""
    left = list(a._terms.items())
    right = list(b._terms.items())
    if a._offset:
        left.append(((), a._offset))
    if b._offset:
        right.append(((), b._offset))
    acc: Dict[Key, int] = {}
    off = 0
    for ka, ca in left:
        for kb, cb in right:
            k = _merge(ka, kb)
            if k:
                acc[k] = acc.get(k, 0) + ca * cb
            else:
                off += ca * cb
    return BinaryPolynomial._from_canonical(acc, off)


def evaluate(poly: BinaryPolynomial, bits: Sequence[int]) -> int:
    """Exact energy of ``poly`` at a binary assignment."""
    if len(bits) < poly.width:
        raise AssignmentTooShort(
            f"assignment has {len(bits)} bits, polynomial needs {poly.width}")
    total = poly._offset
    for key, c in poly._terms.items():
        for v in key:
            if not bits[v]:
                break
        else:
            total += c
    return total


def degree(poly: BinaryPolynomial) -> int:
    return poly.degree


def variables(poly: BinaryPolynomial) -> frozenset:
    return poly.variables


def spins_to_bits(spins: Iterable[int]) -> Tuple[int, ...]:
    """Map Ising spins to binary values, q = (s + 1) / 2."""
    out = []
    for s in spins:
        if s not in (-1, 1):
            raise ValueError(f"spin values must be -1 or +1, got {s!r}")
        out.append((s + 1) // 2)
    return tuple(out)


def bits_to_spins(bits: Iterable[int]) -> Tuple[int, ...]:
    """Inverse of :func:`spins_to_bits`, s = 2q - 1."""
    out = []
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")
        out.append(2 * b - 1)
    return tuple(out)


def assignment_from_int(value: int, width: int) -> Tuple[int, ...]:
    """Bits of ``value`` with variable ``i`` at bit position ``i``."""
    return tuple((value >> i) & 1 for i in range(width))


def assignment_to_int(bits: Sequence[int]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)
