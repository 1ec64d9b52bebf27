import itertools

import pytest


def is_prime(k):
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    f = 3
    while f * f <= k:
        if k % f == 0:
            return False
        f += 2
    return True


def primes_below(limit):
    return [k for k in range(2, limit) if is_prime(k)]


def semiprime_pairs(max_n, min_factor=2):
    """All (p, q) with p <= q prime, p >= min_factor and p*q <= max_n."""
    ps = primes_below(max_n // max(min_factor, 2) + 1)
    out = []
    for a, p in enumerate(ps):
        if p < min_factor or p * p > max_n:
            continue
        for q in ps[a:]:
            if p * q > max_n:
                break
            out.append((p, q))
    return out


def all_bits(v):
    return itertools.product((0, 1), repeat=v)


def bits_value(bits, weights, base=0):
    """Integer encoded by ``bits`` under ``weights``; written independently of
    the package's decode so it can serve as an oracle."""
    return base + sum(b * w for b, w in zip(bits, weights))


@pytest.fixture
def n15_model():
    from hubofactor.modelgen import FactorLayout, build_plain_hubo
    return build_plain_hubo(15, FactorLayout(3))
