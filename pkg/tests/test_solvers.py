import numpy as np
import pytest

from hubofactor.errors import EmptyPolynomial, TooManyVariables
from hubofactor.modelgen import FactorLayout, build_plain_hubo
from hubofactor.polycore import BinaryPolynomial, assignment_to_int
from hubofactor.quadratize import quadratize_model
from hubofactor.solvers import (AnnealSchedule, Sample, energies_all, enumerate_exact,
                                histogram, int64_safe, minimizers, minimum, sample_sa)

from conftest import all_bits

FAST = AnnealSchedule(sweeps=200, restarts=8, seed=1)


def reference_energies(poly, v):
    # index i holds variable k at bit k of i
    out = []
    for i in range(1 << v):
        bits = tuple((i >> k) & 1 for k in range(v))
        out.append(poly.evaluate(bits))
    return out


POLYS = [
    BinaryPolynomial({(0,): 3, (1, 2): -4, (0, 1, 3): 5, (0, 1, 2, 3): 2}, 7),
    build_plain_hubo(35, FactorLayout(3)).poly,
    build_plain_hubo(15, FactorLayout(3, fix_lsb=True)).poly,
]


@pytest.mark.parametrize("poly", POLYS)
@pytest.mark.parametrize("backend", ["gray", "vector", "numba"])
def test_backends_agree_with_reference(poly, backend):
    v = poly.width
    got = [int(e) for e in energies_all(poly, v, backend)]
    assert got == reference_energies(poly, v)


def test_big_coefficients_use_python_ints():
    poly = BinaryPolynomial({(0, 1): 2 ** 80, (2,): -(2 ** 90), (0,): 1}, 2 ** 100)
    assert not int64_safe(poly)
    assert energies_all(poly) == reference_energies(poly, 3)
    with pytest.raises(OverflowError):
        energies_all(poly, backend="vector")
    best = enumerate_exact(poly)[0]
    assert best.assignment == (0, 0, 1)
    assert best.energy_full == 2 ** 100 - 2 ** 90
    assert isinstance(best.energy_full, int)


def test_padding_variables_widen_the_space():
    poly = BinaryPolynomial({(0,): -1})
    assert len(energies_all(poly, 3)) == 8
    assert len(minimizers(poly, num_vars=3)) == 4


@pytest.mark.parametrize("big_n,n,pairs", [
    (15, 3, {(3, 5), (5, 3)}),
    (21, 3, {(3, 7), (7, 3)}),
    (35, 3, {(5, 7), (7, 5)}),
    (49, 3, {(7, 7)}),
])
def test_minimizers_are_factor_pairs(big_n, n, pairs):
    model = build_plain_hubo(big_n, FactorLayout(n))
    ms = minimizers(model.poly)
    assert {model.decode(s.assignment) for s in ms} == pairs
    assert all(s.energy_full == 0 and s.energy_paper == -big_n ** 2 for s in ms)


def test_enumerate_sorted_with_integer_tiebreak():
    model = build_plain_hubo(15, FactorLayout(3))
    samples = enumerate_exact(model.poly)
    assert len(samples) == 64
    keys = [(s.energy_full, assignment_to_int(s.assignment)) for s in samples]
    assert keys == sorted(keys)
    assert [s.energy_full for s in samples] == sorted(reference_energies(model.poly, 6))
    assert len(enumerate_exact(model.poly, keep=5)) == 5
    assert enumerate_exact(model.poly, keep=5) == samples[:5]


def test_chunked_enumeration_matches_vector():
    poly = BinaryPolynomial({(k, k + 1): (-1) ** k * (k + 1) for k in range(20)}, 3)
    poly = poly + BinaryPolynomial({(0, 7, 20): 4, (3,): -2})
    top = enumerate_exact(poly, keep=10)
    e = energies_all(poly, 21, "vector")
    order = np.lexsort((np.arange(len(e)), e))[:10]
    assert [assignment_to_int(s.assignment) for s in top] == [int(i) for i in order]
    low = int(e.min())
    assert [assignment_to_int(s.assignment) for s in minimizers(poly)] == \
        [int(i) for i in np.flatnonzero(e == low)]


def test_constant_polynomial():
    poly = BinaryPolynomial.constant(9)
    samples = enumerate_exact(poly)
    assert samples == [Sample((), 9, 0)]
    assert minimum(poly) == 9


def test_too_many_variables():
    poly = BinaryPolynomial({(30,): 1})
    with pytest.raises(TooManyVariables):
        enumerate_exact(poly)
    with pytest.raises(TooManyVariables):
        minimizers(poly, 20)


def test_qubo_has_several_global_minima():
    model = build_plain_hubo(15, FactorLayout(3, fix_lsb=True))
    reduced, _ = quadratize_model(model)
    ms = minimizers(reduced.poly)
    assert len(ms) >= 2
    assert {reduced.decode(s.assignment) for s in ms} == {(3, 5), (5, 3)}
    assert all(s.energy_paper == -2756 for s in ms)


def test_sa_single_variable():
    poly = BinaryPolynomial({(0,): -3}, 1)
    samples = sample_sa(poly, FAST)
    assert samples == [Sample((1,), -2, -3, 8)]


def test_sa_deterministic_and_backends_agree():
    model = build_plain_hubo(143, FactorLayout(4))
    a = sample_sa(model.poly, FAST)
    b = sample_sa(model.poly, FAST)
    c = sample_sa(model.poly, FAST, backend="python")
    assert a == b == c
    assert sum(s.occurrences for s in a) == FAST.restarts


def test_sa_seed_changes_stream():
    model = build_plain_hubo(143, FactorLayout(4))
    a = sample_sa(model.poly, AnnealSchedule(sweeps=5, restarts=8, seed=1))
    b = sample_sa(model.poly, AnnealSchedule(sweeps=5, restarts=8, seed=2))
    assert a != b


@pytest.mark.parametrize("big_n", [15, 35, 143])
def test_sa_energies_exact_and_not_below_minimum(big_n):
    model = build_plain_hubo(big_n, FactorLayout(4, fix_lsb=True))
    reduced, _ = quadratize_model(model)
    low = minimum(model.poly)
    for poly in (model.poly, reduced.poly):
        for s in sample_sa(poly, FAST):
            assert s.energy_full == poly.evaluate(s.assignment)
            assert s.energy_paper == s.energy_full - poly.offset
            assert s.energy_full >= low


def test_sa_finds_small_factorization():
    model = build_plain_hubo(143, FactorLayout(4, fix_lsb=True))
    samples = sample_sa(model.poly, AnnealSchedule(sweeps=500, restarts=16, seed=0))
    assert samples[0].energy_full == 0
    assert model.decode(samples[0].assignment) in {(11, 13), (13, 11)}


def test_sa_python_backend_for_big_coefficients():
    poly = BinaryPolynomial({(0, 1): 2 ** 70, (0,): -(2 ** 69), (1,): -(2 ** 69)})
    samples = sample_sa(poly, FAST)
    assert samples[0].energy_full == -(2 ** 69)
    with pytest.raises(ValueError):
        sample_sa(poly, FAST, backend="numba")


def test_sa_empty_polynomial():
    with pytest.raises(EmptyPolynomial):
        sample_sa(BinaryPolynomial.constant(4), FAST)


@pytest.mark.parametrize("kwargs", [
    {"sweeps": 0}, {"restarts": 0}, {"beta_max": 0}, {"beta_min": -1.0},
    {"beta_min": 6.0, "beta_max": 5.0},
])
def test_schedule_validation(kwargs):
    with pytest.raises(ValueError):
        AnnealSchedule(**kwargs)


def test_schedule_betas():
    poly = BinaryPolynomial({(0, 1): -8, (1,): 4})
    betas = AnnealSchedule(sweeps=3).betas(poly)
    assert betas[0] == pytest.approx(1 / 8) and betas[-1] == pytest.approx(5)
    assert betas[1] == pytest.approx((5 / 8) ** 0.5)


def test_histogram():
    samples = [Sample((0,), 5, 1, 2), Sample((1,), 3, -1, 1), Sample((0, 1), 5, 1, 4)]
    h = histogram(samples)
    assert h == {-1: 1, 1: 6}
    assert list(h) == [-1, 1]
    assert histogram([]) == {}


def test_histogram_of_full_enumeration_counts_every_state():
    model = build_plain_hubo(15, FactorLayout(2))
    h = histogram(enumerate_exact(model.poly))
    assert sum(h.values()) == 16
    expected = {}
    for b in all_bits(4):
        e = model.paper_energy(b)
        expected[e] = expected.get(e, 0) + 1
    assert h == dict(sorted(expected.items()))


def test_streaming_minimizers_above_22_variables():
    poly = BinaryPolynomial({(k,): 1 for k in range(6)})
    poly = poly + BinaryPolynomial({(10, 11, 12): -2, (22,): -1, (12, 22): 1})
    ms = minimizers(poly, num_vars=23)
    e = energies_all(poly, 23, "vector")
    want = np.flatnonzero(e == e.min())
    assert len(want) > 4096
    assert [assignment_to_int(s.assignment) for s in ms] == [int(i) for i in want]
    assert {s.energy_full for s in ms} == {int(e.min())}
