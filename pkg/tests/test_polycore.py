import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hubofactor.errors import AssignmentTooShort
from hubofactor.polycore import (BinaryPolynomial, add_term, assignment_from_int,
                                 assignment_to_int, bits_to_spins, degree, evaluate,
                                 multiply, spins_to_bits, variables)

from conftest import all_bits

EMPTY = BinaryPolynomial()


def x(i, c=1):
    return BinaryPolynomial.variable(i, c)


def test_add_term_applies_idempotence():
    assert add_term(EMPTY, [0, 0], 5).terms == {(0,): 5}


def test_add_term_cancels_to_empty():
    p = add_term(BinaryPolynomial({(0,): 3}), [0], -3)
    assert p == EMPTY
    assert len(p) == 0


def test_add_term_sorts_variables():
    assert add_term(EMPTY, [2, 1], 7).terms == {(1, 2): 7}


def test_add_term_empty_key_goes_to_offset():
    p = add_term(EMPTY, [], 4)
    assert p.offset == 4 and len(p) == 0


def test_multiply_idempotent_variable():
    assert multiply(x(0), x(0)) == x(0)


def test_multiply_square_of_two_bit_number():
    p = x(0) + x(1, 2)
    assert (p * p).terms == {(0,): 1, (1,): 4, (0, 1): 4}
    assert (p * p).offset == 0


def test_multiply_disjoint_factors():
    a = x(0) + x(1, 2)
    b = x(2) + x(3, 2)
    assert (a * b).terms == {(0, 2): 1, (0, 3): 2, (1, 2): 2, (1, 3): 4}


def test_multiply_with_offsets():
    a = x(0) + 3
    b = x(0) - 1
    # (x + 3)(x - 1) = x + 3x - x - 3 = 3x - 3 with x*x = x
    assert multiply(a, b) == BinaryPolynomial({(0,): 3}, -3)


def test_evaluate_examples():
    assert evaluate(EMPTY, [1, 0, 1]) == 0
    assert evaluate(BinaryPolynomial({(0, 1): 5}, -2), (1, 1)) == 3


def test_evaluate_short_assignment():
    with pytest.raises(AssignmentTooShort):
        evaluate(BinaryPolynomial({(0, 3): 1}), (1, 1, 1))


def test_degree_and_variables():
    assert degree(EMPTY) == 0
    p = BinaryPolynomial({(0, 4): 2, (1,): 1})
    assert degree(p) == 2
    assert variables(p) == {0, 1, 4}
    assert p.num_vars == 3
    assert p.width == 5


def test_spin_conversion():
    assert spins_to_bits([1]) == (1,)
    assert spins_to_bits([-1]) == (0,)
    s = (-1, 1, -1)
    assert bits_to_spins(spins_to_bits(s)) == s
    with pytest.raises(ValueError):
        spins_to_bits([0])


def test_assignment_int_roundtrip():
    for v in range(64):
        assert assignment_to_int(assignment_from_int(v, 6)) == v
    assert assignment_from_int(6, 3) == (0, 1, 1)


def test_rejects_float_coefficients():
    with pytest.raises(TypeError):
        BinaryPolynomial({(0,): 1.5})
    with pytest.raises(TypeError):
        add_term(EMPTY, [0], 2.0)
    with pytest.raises(TypeError):
        BinaryPolynomial(offset=1.0)


def test_huge_coefficients_stay_exact():
    big = 2 ** 130 + 1
    p = BinaryPolynomial({(0,): big, (0, 1): -big}, big * 3)
    sq = p * p
    for bits in all_bits(2):
        want = (big * bits[0] - big * bits[0] * bits[1] + 3 * big) ** 2
        got = sq.evaluate(bits)
        assert type(got) is int
        assert got == want
    assert all(type(c) is int for c in sq.terms.values())


def test_restrict_matches_evaluation():
    p = BinaryPolynomial({(0, 1, 2): 5, (1,): -3, (2, 3): 7}, 2)
    r = p.restrict({1: 1, 3: 0})
    for a, c in itertools.product((0, 1), repeat=2):
        assert r.evaluate((a, 0, c)) == p.evaluate((a, 1, c, 0))


# -- properties ---------------------------------------------------------------

coeffs = st.integers(min_value=-(2 ** 140), max_value=2 ** 140)
raw_terms = st.lists(
    st.tuples(st.lists(st.integers(0, 5), max_size=5), coeffs), max_size=12)


@st.composite
def polys(draw):
    return BinaryPolynomial(draw(raw_terms), draw(coeffs))


def naive(raw, offset, bits):
    total = offset
    for vars, c in raw:
        if all(bits[v] for v in vars):
            total += c
    return total


@settings(max_examples=60, deadline=None)
@given(raw_terms, coeffs)
def test_canonicalization_preserves_energy(raw, offset):
    p = BinaryPolynomial(raw, offset)
    for bits in all_bits(6):
        assert p.evaluate(bits) == naive(raw, offset, bits)


@settings(max_examples=60, deadline=None)
@given(polys())
def test_canonicalization_idempotent(p):
    again = BinaryPolynomial(dict(p.terms), p.offset)
    assert again == p
    assert all(c != 0 for c in p.terms.values())
    assert all(list(k) == sorted(set(k)) for k in p.terms)


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_sum_and_product_are_homomorphic(a, b):
    s, m = a + b, a * b
    for bits in all_bits(6):
        ea, eb = a.evaluate(bits), b.evaluate(bits)
        assert s.evaluate(bits) == ea + eb
        assert m.evaluate(bits) == ea * eb
