"""Classical minimizers for binary polynomials.

Two engines are provided:

* :func:`enumerate_exact` visits every assignment. When the polynomial's
  coefficient mass fits comfortably in a signed 64-bit integer the energies
  come from a compiled ``int64`` Gray-code walk or vectorized numpy blocks,
  which is exact because no partial sum can overflow. Otherwise the same
  Gray-code walk with incremental deltas runs on Python integers.
* :func:`sample_sa` is a seeded single-flip Metropolis annealer working on
  the polynomial directly (any degree). It has a compiled ``int64`` kernel
  and a Python-integer kernel that consume identical random streams, so the
  two produce the same samples.

Energies handed back to callers are always Python ints recomputed from the
assignment.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import EmptyPolynomial, TooManyVariables
from .polycore import BinaryPolynomial, assignment_from_int, assignment_to_int

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

__all__ = [
    "Sample",
    "AnnealSchedule",
    "int64_safe",
    "energies_all",
    "enumerate_exact",
    "sample_sa",
    "histogram",
    "minimizers",
    "minimum",
]

INT64_BUDGET = 1 << 62
DEFAULT_VAR_LIMIT = 26


@dataclass(frozen=True)
class Sample:
    assignment: Tuple[int, ...]
    energy_full: int
    energy_paper: int
    occurrences: int = 1


def _sample(poly: BinaryPolynomial, bits: Sequence[int], occurrences: int = 1) -> Sample:
    bits = tuple(int(b) for b in bits)
    e = poly.evaluate(bits)
    return Sample(bits, e, e - poly.offset, occurrences)


def int64_safe(poly: BinaryPolynomial) -> bool:
    """True if every partial energy sum is guaranteed to fit in int64."""
    return abs(poly.offset) + sum(abs(c) for c in poly.terms.values()) < INT64_BUDGET


def _width(poly: BinaryPolynomial, num_vars: Optional[int]) -> int:
    if num_vars is None:
        return poly.width
    if num_vars < poly.width:
        raise ValueError(f"num_vars={num_vars} smaller than polynomial width {poly.width}")
    return num_vars


# -- exhaustive enumeration ---------------------------------------------------

_CHUNK_BITS = 16


def _vector_chunk(groups, offset: int, start: int, size: int, v: int) -> np.ndarray:
    idx = np.arange(start, start + size, dtype=np.int64)
    cols = np.empty((max(v, 1), size), dtype=bool)
    for i in range(v):
        cols[i] = (idx >> i) & 1
    energy = np.full(size, offset, dtype=np.int64)
    for keys, coeffs in groups:
        step = max(1, (1 << 21) // size)
        for lo in range(0, len(coeffs), step):
            k = keys[lo:lo + step]
            prod = cols[k[:, 0]].copy()
            for d in range(1, k.shape[1]):
                prod &= cols[k[:, d]]
            energy += coeffs[lo:lo + step] @ prod.astype(np.int64)
    return energy


def _vector_groups(poly: BinaryPolynomial):
    by_deg: Dict[int, List] = {}
    for key, c in poly.terms.items():
        by_deg.setdefault(len(key), []).append((key, c))
    groups = []
    for d in sorted(by_deg):
        items = by_deg[d]
        keys = np.array([k for k, _ in items], dtype=np.intp).reshape(len(items), d)
        coeffs = np.array([c for _, c in items], dtype=np.int64)
        groups.append((keys, coeffs))
    return groups


def _adjacency(poly: BinaryPolynomial, v: int):
    adj: List[List[Tuple[Tuple[int, ...], int]]] = [[] for _ in range(v)]
    for key, c in poly.terms.items():
        for u in key:
            adj[u].append((tuple(w for w in key if w != u), c))
    return adj


def _gray_energies(poly: BinaryPolynomial, v: int) -> List[int]:
    """Energies of all 2**v assignments, indexed by assignment integer."""
    adj = _adjacency(poly, v)
    x = [0] * v
    energies = [0] * (1 << v)
    e = poly.offset
    energies[0] = e
    g = 0
    for i in range(1, 1 << v):
        bit = (i & -i).bit_length() - 1
        field = 0
        for others, c in adj[bit]:
            for w in others:
                if not x[w]:
                    break
            else:
                field += c
        if x[bit]:
            e -= field
            x[bit] = 0
        else:
            e += field
            x[bit] = 1
        g ^= 1 << bit
        energies[g] = e
    return energies


def _auto_backend(poly: BinaryPolynomial, v: int) -> str:
    if not int64_safe(poly):
        return "gray"
    if numba is not None and v <= 22:
        return "numba"
    return "vector"


def energies_all(poly: BinaryPolynomial, num_vars: Optional[int] = None,
                 backend: str = "auto") -> Union[np.ndarray, List[int]]:
    """Exact energy of every assignment; index ``i`` is the assignment with
    variable ``k`` equal to bit ``k`` of ``i``.

    Backends: ``"gray"`` (Python ints, any magnitude), ``"numba"`` (compiled
    Gray-code walk) and ``"vector"`` (numpy blocks); the last two need
    :func:`int64_safe`.
    """
    v = _width(poly, num_vars)
    if backend == "auto":
        backend = _auto_backend(poly, v)
    if backend == "gray":
        return _gray_energies(poly, v)
    if backend == "numba":
        if numba is None or not int64_safe(poly):
            raise OverflowError("numba backend needs numba and int64-safe coefficients")
        k = _Kernel(poly, v)
        return _gray_numba(k.ptr, k.others, np.array(k.coeffs_py, dtype=np.int64),
                           v, np.int64(poly.offset))
    if backend != "vector":
        raise ValueError(f"unknown backend {backend!r}")
    if not int64_safe(poly):
        raise OverflowError("polynomial coefficients exceed the int64 budget")
    groups = _vector_groups(poly)
    total = 1 << v
    size = min(total, 1 << _CHUNK_BITS)
    return np.concatenate([_vector_chunk(groups, poly.offset, s, size, v)
                           for s in range(0, total, size)])


def _lowest(energies, keep: Optional[int]) -> List[int]:
    """Assignment indices ordered by (energy, index), truncated to ``keep``."""
    if isinstance(energies, np.ndarray):
        n = len(energies)
        if keep is not None and keep < n:
            cutoff = np.partition(energies, keep - 1)[keep - 1]
            cand = np.flatnonzero(energies <= cutoff)
        else:
            cand = np.arange(n)
        order = cand[np.lexsort((cand, energies[cand]))]
        if keep is not None:
            order = order[:keep]
        return [int(i) for i in order]
    order = sorted(range(len(energies)), key=lambda i: (energies[i], i))
    return order if keep is None else order[:keep]


def enumerate_exact(poly: BinaryPolynomial, var_limit: int = DEFAULT_VAR_LIMIT, *,
                    num_vars: Optional[int] = None, keep: Optional[int] = None,
                    backend: str = "auto") -> List[Sample]:
    """Exhaustively minimize ``poly``.

    Returns samples sorted by energy, ties broken by the assignment read as
    an unsigned integer (variable 0 least significant). ``keep`` truncates
    the list to the lowest entries; the default returns all ``2**v``.
    """
    v = _width(poly, num_vars)
    if v > var_limit:
        raise TooManyVariables(f"{v} variables exceed the enumeration limit {var_limit}")
    if backend == "auto" and v > 20 and int64_safe(poly):
        return _enumerate_chunked(poly, v, keep)
    energies = energies_all(poly, v, backend)
    out = []
    for i in _lowest(energies, keep):
        e = int(energies[i])
        out.append(Sample(assignment_from_int(i, v), e, e - poly.offset))
    return out


def _enumerate_chunked(poly: BinaryPolynomial, v: int, keep: Optional[int],
                       minimal: bool = False) -> List[Sample]:
    # the space is split by its high-order bits into 2**20-assignment chunks
    groups = _vector_groups(poly)
    size = 1 << 20
    best_e, best_i = [], []
    for s in range(0, 1 << v, size):
        e = _vector_chunk(groups, poly.offset, s, size, v)
        if minimal:
            local = np.flatnonzero(e == e.min())
        else:
            local = np.asarray(_lowest(e, keep), dtype=np.int64)
        best_e.append(e[local])
        best_i.append(local.astype(np.int64) + s)
    energies = np.concatenate(best_e)
    idx = np.concatenate(best_i)
    if minimal:
        keep_mask = energies == energies.min()
        energies, idx = energies[keep_mask], idx[keep_mask]
    order = np.lexsort((idx, energies))
    if keep is not None:
        order = order[:keep]
    return [Sample(assignment_from_int(int(idx[k]), v), int(energies[k]),
                   int(energies[k]) - poly.offset) for k in order]


def minimizers(poly: BinaryPolynomial, var_limit: int = DEFAULT_VAR_LIMIT, *,
               num_vars: Optional[int] = None) -> List[Sample]:
    """Every assignment attaining the exact minimum, in ascending order."""
    v = _width(poly, num_vars)
    if v > var_limit:
        raise TooManyVariables(f"{v} variables exceed the enumeration limit {var_limit}")
    if v > 22 and int64_safe(poly):
        if numba is None:
            return _enumerate_chunked(poly, v, None, minimal=True)
        k = _Kernel(poly, v)
        coeffs = np.array(k.coeffs_py, dtype=np.int64)
        cap = 4096
        while True:
            low, count, hits = _gray_min_numba(k.ptr, k.others, coeffs, v,
                                               np.int64(poly.offset), cap)
            if count <= cap:
                break
            cap = int(count)
        low = int(low)
        idx = sorted(int(i) for i in hits[:count])
        return [Sample(assignment_from_int(i, v), low, low - poly.offset) for i in idx]
    energies = energies_all(poly, v)
    if isinstance(energies, np.ndarray):
        low = int(energies.min())
        idx = [int(i) for i in np.flatnonzero(energies == low)]
    else:
        low = min(energies)
        idx = [i for i, e in enumerate(energies) if e == low]
    return [Sample(assignment_from_int(i, v), low, low - poly.offset) for i in idx]


def minimum(poly: BinaryPolynomial, num_vars: Optional[int] = None) -> int:
    """Exact minimum energy (full convention) by enumeration."""
    energies = energies_all(poly, num_vars)
    return int(min(energies))


# -- simulated annealing ------------------------------------------------------


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature schedule for :func:`sample_sa`.

    ``beta_min=None`` means ``1 / max|coeff|`` of the polynomial being solved.
    """

    sweeps: int = 10_000
    restarts: int = 64
    beta_min: Optional[Union[float, Fraction]] = None
    beta_max: Union[float, Fraction] = 5
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("sweeps and restarts must be >= 1")
        if self.beta_max <= 0 or (self.beta_min is not None and self.beta_min <= 0):
            raise ValueError("inverse temperatures must be positive")
        if self.beta_min is not None and not self.beta_min < self.beta_max:
            raise ValueError("beta_min must be below beta_max")

    def betas(self, poly: BinaryPolynomial) -> np.ndarray:
        lo = self.beta_min
        if lo is None:
            lo = Fraction(1, max((abs(c) for c in poly.terms.values()), default=1))
        hi = float(self.beta_max)
        lo = float(lo)
        if lo >= hi:
            lo = hi
        if self.sweeps == 1:
            return np.array([hi])
        return np.geomspace(lo, hi, self.sweeps)


class _Kernel:
    """Flattened term adjacency: for every (variable, term) incidence the
    other variables of the term (padded with -1) and the coefficient."""

    def __init__(self, poly: BinaryPolynomial, v: int):
        self.v = v
        width = max(poly.degree - 1, 1)
        ptr = [0]
        others: List[List[int]] = []
        coeffs: List[int] = []
        adj = _adjacency(poly, v)
        for u in range(v):
            for o, c in adj[u]:
                others.append(list(o) + [-1] * (width - len(o)))
                coeffs.append(c)
            ptr.append(len(coeffs))
        self.ptr = np.array(ptr, dtype=np.int64)
        self.others = np.array(others, dtype=np.int64).reshape(len(coeffs), width)
        self.coeffs_py = coeffs
        self.adj = adj


def _anneal_python(k: _Kernel, x: List[int], energy: int, betas, neglogu):
    v = k.v
    adj = k.adj
    best = energy
    best_x = list(x)
    r = 0
    for beta in betas:
        beta = float(beta)
        for u in range(v):
            field = 0
            for others, c in adj[u]:
                for w in others:
                    if not x[w]:
                        break
                else:
                    field += c
            delta = -field if x[u] else field
            if delta <= 0 or beta * float(delta) < neglogu[r]:
                x[u] ^= 1
                energy += delta
                if energy < best:
                    best = energy
                    best_x = list(x)
            r += 1
    return best_x, best


if numba is not None:
    @numba.njit(cache=True)
    def _anneal_numba(ptr, others, coeffs, x, energy, betas, neglogu):  # pragma: no cover
        v = x.shape[0]
        width = others.shape[1]
        best = energy
        best_x = x.copy()
        r = 0
        for s in range(betas.shape[0]):
            beta = betas[s]
            for u in range(v):
                field = 0
                for e in range(ptr[u], ptr[u + 1]):
                    ok = True
                    for d in range(width):
                        w = others[e, d]
                        if w < 0:
                            break
                        if x[w] == 0:
                            ok = False
                            break
                    if ok:
                        field += coeffs[e]
                delta = -field if x[u] == 1 else field
                if delta <= 0 or beta * float(delta) < neglogu[r]:
                    x[u] = 1 - x[u]
                    energy += delta
                    if energy < best:
                        best = energy
                        best_x[:] = x
                r += 1
        return best_x, best


if numba is not None:
    @numba.njit(cache=True)
    def _gray_numba(ptr, others, coeffs, v, offset):  # pragma: no cover
        width = others.shape[1]
        x = np.zeros(v, dtype=np.int64)
        energies = np.empty(1 << v, dtype=np.int64)
        e = offset
        energies[0] = e
        g = 0
        for i in range(1, 1 << v):
            bit = 0
            while not (i >> bit) & 1:
                bit += 1
            field = 0
            for t in range(ptr[bit], ptr[bit + 1]):
                ok = True
                for d in range(width):
                    w = others[t, d]
                    if w < 0:
                        break
                    if x[w] == 0:
                        ok = False
                        break
                if ok:
                    field += coeffs[t]
            if x[bit] == 1:
                e -= field
                x[bit] = 0
            else:
                e += field
                x[bit] = 1
            g ^= 1 << bit
            energies[g] = e
        return energies


if numba is not None:
    @numba.njit(cache=True)
    def _gray_min_numba(ptr, others, coeffs, v, offset, cap):  # pragma: no cover
        # streaming minimum: keeps at most ``cap`` minimizing indices
        width = others.shape[1]
        x = np.zeros(v, dtype=np.int64)
        hits = np.empty(cap, dtype=np.int64)
        e = offset
        low = e
        count = 1
        if cap > 0:
            hits[0] = 0
        g = 0
        for i in range(1, 1 << v):
            bit = 0
            while not (i >> bit) & 1:
                bit += 1
            field = 0
            for t in range(ptr[bit], ptr[bit + 1]):
                ok = True
                for d in range(width):
                    w = others[t, d]
                    if w < 0:
                        break
                    if x[w] == 0:
                        ok = False
                        break
                if ok:
                    field += coeffs[t]
            if x[bit] == 1:
                e -= field
                x[bit] = 0
            else:
                e += field
                x[bit] = 1
            g ^= 1 << bit
            if e < low:
                low = e
                count = 0
            if e == low:
                if count < cap:
                    hits[count] = g
                count += 1
        return low, count, hits


def _restart_stream(seed: int, restart: int, v: int, n_draws: int):
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, restart])
    init = rng.integers(0, 2, size=v, dtype=np.int8)
    neglogu = -np.log1p(-rng.random(n_draws))
    return init, neglogu


def sample_sa(poly: BinaryPolynomial, schedule: AnnealSchedule = AnnealSchedule(), *,
              num_vars: Optional[int] = None, backend: str = "auto") -> List[Sample]:
    """Seeded simulated annealing; one best-so-far sample per restart.

    Identical assignments found by several restarts are merged into one
    sample whose ``occurrences`` counts them. The list is sorted like
    :func:`enumerate_exact`'s output. Restart ``r`` draws from a generator
    seeded by ``(seed, r)``, so results do not depend on execution order.
    """
    v = _width(poly, num_vars)
    if v == 0:
        raise EmptyPolynomial("nothing to anneal: the polynomial has no variables")
    if backend == "auto":
        backend = "numba" if numba is not None and int64_safe(poly) else "python"
    if backend == "numba" and (numba is None or not int64_safe(poly)):
        raise ValueError("numba backend needs numba and an int64-safe polynomial")
    kernel = _Kernel(poly, v)
    betas = schedule.betas(poly)
    coeffs = np.array(kernel.coeffs_py, dtype=np.int64) if backend == "numba" else None
    found: Counter = Counter()
    for r in range(schedule.restarts):
        init, neglogu = _restart_stream(schedule.seed, r, v, len(betas) * v)
        e0 = poly.evaluate(init.tolist())
        if backend == "numba":
            bx, _ = _anneal_numba(kernel.ptr, kernel.others, coeffs, init.astype(np.int64),
                                  np.int64(e0), betas, neglogu)
            bits = tuple(int(b) for b in bx)
        else:
            bx, _ = _anneal_python(kernel, init.tolist(), e0, betas, neglogu)
            bits = tuple(bx)
        found[bits] += 1
    samples = [_sample(poly, bits, count) for bits, count in found.items()]
    samples.sort(key=lambda s: (s.energy_full, assignment_to_int(s.assignment)))
    return samples


def histogram(samples: Sequence[Sample]) -> Dict[int, int]:
    """Occurrence counts per offset-free energy, ordered by energy."""
    counts: Counter = Counter()
    for s in samples:
        counts[s.energy_paper] += s.occurrences
    return dict(sorted(counts.items()))
