"""Reduction of cubic and quartic terms to quadratic form.

Cubic terms use the standard substitution with one ancilla ``w``:

    c*x*y*z = min_w  c*w*(x + y + z - 2)                                  c < 0
    c*x*y*z = min_w  c*(w*(x + y + z - 1) + xy + yz + zx - x - y - z + 1)  c > 0

A positive quartic term ``c*a1*a2*b1*b2`` is handled by applying the positive
cubic rule to ``a2*b1*b2`` (ancilla x1), multiplying the result by ``a1`` and
reducing each of the six cubic monomials that appear with the positive rule
again (ancillas x2..x7).

The ``+c`` constants of the positive rule are accounted in the ledger as
``constant_shift`` and folded into the reduced polynomial's offset, so full
energies are preserved exactly while the offset-free target moves down
by the accumulated shift.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (NegativeQuarticCoefficient, NonPositiveCoefficient,
                     UnsupportedDegree, WrongArity, ZeroCoefficient)
from .modelgen import FactorModel
from .polycore import BinaryPolynomial, Key, assignment_from_int

__all__ = [
    "GadgetRecord",
    "ReductionLedger",
    "VerificationReport",
    "reduce_cubic",
    "reduce_quartic",
    "quadratize_model",
    "verify_reduction",
    "min_over_ancillas",
]

CUBIC_NEG = "cubic-neg"
CUBIC_POS = "cubic-pos"
QUARTIC_POS = "quartic-pos"


@dataclass(frozen=True)
class GadgetRecord:
    kind: str
    source_vars: Key
    coeff: int
    ancillas: Tuple[int, ...]
    constant_shift: int


@dataclass
class ReductionLedger:
    records: List[GadgetRecord] = field(default_factory=list)
    first_ancilla: int = 0
    total_shift: int = 0
    reduced_gme: int = 0

    @property
    def num_ancillas(self) -> int:
        return sum(len(r.ancillas) for r in self.records)

    def count(self, kind: str) -> int:
        return sum(len(r.ancillas) for r in self.records if r.kind == kind)


def _cubic_terms(vars: Key, coeff: int, w: int) -> Tuple[Dict[Key, int], int]:
    """Quadratic terms of the cubic gadget and the constant it drops."""
    if len(vars) != 3:
        raise WrongArity(f"cubic gadget needs 3 variables, got {len(vars)}")
    if coeff == 0:
        raise ZeroCoefficient("cannot reduce a zero cubic term")
    x, y, z = vars
    out: Dict[Key, int] = {}

    def put(key, c):
        key = tuple(sorted(key))
        out[key] = out.get(key, 0) + c

    if coeff < 0:
        for v in vars:
            put((w, v), coeff)
        put((w,), -2 * coeff)
        return out, 0
    for v in vars:
        put((w, v), coeff)
        put((v,), -coeff)
    put((w,), -coeff)
    for a, b in ((x, y), (y, z), (x, z)):
        put((a, b), coeff)
    return out, coeff


def reduce_cubic(vars: Sequence[int], coeff: int,
                 next_ancilla: int) -> Tuple[BinaryPolynomial, GadgetRecord]:
    """Replace ``coeff * x*y*z`` by a quadratic form in one new ancilla.

    The returned polynomial has no constant term; the constant ``+coeff`` of
    the positive case is reported as the record's ``constant_shift``.
    """
    key = tuple(vars)
    terms, shift = _cubic_terms(key, int(coeff), next_ancilla)
    kind = CUBIC_NEG if coeff < 0 else CUBIC_POS
    record = GadgetRecord(kind, key, int(coeff), (next_ancilla,), shift)
    return BinaryPolynomial._from_canonical(terms, 0), record


def reduce_quartic(vars: Sequence[int], coeff: int,
                   next_ancilla: int) -> Tuple[BinaryPolynomial, GadgetRecord]:
    """Replace ``coeff * a1*a2*b1*b2`` (coeff > 0) using seven ancillas."""
    if len(vars) != 4:
        raise WrongArity(f"quartic gadget needs 4 variables, got {len(vars)}")
    coeff = int(coeff)
    if coeff <= 0:
        raise NonPositiveCoefficient(f"quartic gadget needs a positive coefficient, got {coeff}")
    a1, a2, b1, b2 = vars
    x1 = next_ancilla
    # a1 * [x1(a2+b1+b2-1) + a2b1 + a2b2 + b1b2 - a2 - b1 - b2 + 1], times coeff
    acc: Dict[Key, int] = {}

    def put(key, c):
        key = tuple(sorted(key))
        acc[key] = acc.get(key, 0) + c

    cubics = [(x1, a1, a2), (x1, a1, b1), (x1, a1, b2),
              (a1, a2, b1), (a1, a2, b2), (a1, b1, b2)]
    put((x1, a1), -coeff)
    for v in (a2, b1, b2):
        put((a1, v), -coeff)
    put((a1,), coeff)
    shift = 0
    w = x1 + 1
    for triple in cubics:
        terms, s = _cubic_terms(triple, coeff, w)
        for k, c in terms.items():
            put(k, c)
        shift += s
        w += 1
    record = GadgetRecord(QUARTIC_POS, tuple(vars), coeff,
                          tuple(range(x1, x1 + 7)), shift)
    return BinaryPolynomial._from_canonical(acc, 0), record


def quadratize_model(model: FactorModel) -> Tuple[FactorModel, ReductionLedger]:
    """Reduce every cubic and quartic term of ``model`` to quadratic form.

    Ancillas are allocated contiguously after the highest variable in use,
    cubic terms first, then quartic terms, each group in sorted term order.
    """
    poly = model.poly
    if poly.degree > 4:
        raise UnsupportedDegree(f"can only reduce up to degree 4, got {poly.degree}")
    first = model.num_vars
    ledger = ReductionLedger(first_ancilla=first, reduced_gme=model.paper_gme)
    if poly.degree <= 2:
        return model, ledger

    acc: Dict[Key, int] = {k: c for k, c in poly.terms.items() if len(k) <= 2}
    cubic = sorted(k for k in poly.terms if len(k) == 3)
    quartic = sorted(k for k in poly.terms if len(k) == 4)
    for k in quartic:
        if poly.terms[k] < 0:
            raise NegativeQuarticCoefficient(f"term {k} has coefficient {poly.terms[k]}")

    nxt = first
    for k in cubic:
        reduced, rec = reduce_cubic(k, poly.terms[k], nxt)
        ledger.records.append(rec)
        nxt += len(rec.ancillas)
        for kk, c in reduced.terms.items():
            acc[kk] = acc.get(kk, 0) + c
    for k in quartic:
        reduced, rec = reduce_quartic(k, poly.terms[k], nxt)
        ledger.records.append(rec)
        nxt += len(rec.ancillas)
        for kk, c in reduced.terms.items():
            acc[kk] = acc.get(kk, 0) + c

    ledger.total_shift = sum(r.constant_shift for r in ledger.records)
    ledger.reduced_gme = model.paper_gme - ledger.total_shift
    new_poly = BinaryPolynomial._from_canonical(acc, poly.offset + ledger.total_shift)
    reduced = model.with_poly(new_poly, model.num_ancillas + (nxt - first))
    return reduced, ledger


# -- verification -------------------------------------------------------------


@dataclass
class VerificationReport:
    passed: bool
    mode: str
    checked: int
    counterexample: Optional[dict] = None

    def __bool__(self):
        return self.passed


def _components(poly: BinaryPolynomial) -> List[List[int]]:
    parent: Dict[int, int] = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for v in poly.variables:
        parent[v] = v
    for key in poly.terms:
        root = find(key[0])
        for v in key[1:]:
            r = find(v)
            if r != root:
                parent[r] = root
    groups: Dict[int, List[int]] = {}
    for v in sorted(parent):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def min_over_ancillas(poly: BinaryPolynomial, fixed: Dict[int, int],
                      component_limit: int = 20) -> int:
    """Exact minimum of ``poly`` over all variables not in ``fixed``.

    The restricted polynomial is split into connected components of its
    interaction graph; each component is enumerated on its own.
    """
    rest = poly.restrict(fixed)
    total = rest.offset
    by_root: Dict[int, Dict[Key, int]] = {}
    comps = _components(rest)
    owner = {v: i for i, comp in enumerate(comps) for v in comp}
    for key, c in rest.terms.items():
        by_root.setdefault(owner[key[0]], {})[key] = c
    for i, comp in enumerate(comps):
        if len(comp) > component_limit:
            raise ValueError(f"ancilla component of size {len(comp)} exceeds limit")
        index = {v: j for j, v in enumerate(comp)}
        terms = [(tuple(index[v] for v in k), c) for k, c in by_root[i].items()]
        best = None
        for x in range(1 << len(comp)):
            e = 0
            for k, c in terms:
                if all((x >> j) & 1 for j in k):
                    e += c
            if best is None or e < best:
                best = e
        total += best
    return total


def _exhaustive_minima(poly: BinaryPolynomial, num_vars: int, num_orig: int) -> Dict[int, int]:
    # local import: solvers depends on nothing here, keep module graph acyclic
    from .solvers import energies_all

    energies = energies_all(poly, num_vars)
    if not isinstance(energies, list):
        # index = ancilla bits above the original bits, so rows share ancillas
        col = energies.reshape(-1, 1 << num_orig).min(axis=0)
        return {o: int(e) for o, e in enumerate(col)}
    mask = (1 << num_orig) - 1
    minima: Dict[int, int] = {}
    for idx, e in enumerate(energies):
        o = idx & mask
        if o not in minima or e < minima[o]:
            minima[o] = e
    return minima


def verify_reduction(original: FactorModel, reduced: FactorModel, ledger: ReductionLedger,
                     exhaustive_limit: int = 20, samples: int = 256,
                     seed: int = 0) -> VerificationReport:
    """Certify min-over-ancilla equivalence of a reduction.

    For each checked assignment ``x`` of the original variables the minimum
    of the reduced model over its ancillas must equal the original energy at
    ``x``. When the reduced model has at most ``exhaustive_limit`` variables
    every joint assignment is enumerated. Otherwise the ancillas are
    minimized exactly per connected component, for all original assignments
    if there are at most ``2**exhaustive_limit`` of them and for ``samples``
    seeded random ones beyond that.
    """
    num_orig = original.num_vars
    num_total = reduced.num_vars
    if ledger.records and ledger.first_ancilla != num_orig:
        return VerificationReport(False, "ledger", 0, {
            "reason": f"first ancilla {ledger.first_ancilla} != original width {num_orig}"})
    if reduced.paper_gme != ledger.reduced_gme:
        return VerificationReport(False, "ledger", 0, {
            "reason": f"reduced target {reduced.paper_gme} != ledger {ledger.reduced_gme}"})

    def orig_bits(o):
        return assignment_from_int(o, num_orig)

    if num_total <= exhaustive_limit:
        minima = _exhaustive_minima(reduced.poly, num_total, num_orig)
        mode, keys = "exhaustive", range(1 << num_orig)
        get = minima.__getitem__
    else:
        if num_orig <= exhaustive_limit:
            mode, keys = "componentwise", range(1 << num_orig)
        else:
            rng = random.Random(seed)
            mode = "sampled"
            keys = [rng.getrandbits(num_orig) for _ in range(samples)]

        def get(o):
            bits = orig_bits(o)
            return min_over_ancillas(reduced.poly, {v: bits[v] for v in range(num_orig)})

    checked = 0
    for o in keys:
        bits = orig_bits(o)
        want = original.poly.evaluate(bits)
        got = get(o)
        checked += 1
        if got != want:
            return VerificationReport(False, mode, checked, {
                "assignment": list(bits), "expected": want, "reduced_min": got})
    return VerificationReport(True, mode, checked)
