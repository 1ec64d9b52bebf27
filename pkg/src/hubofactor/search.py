"""Factorization drivers: single-model solves, range-block search and
bit-by-bit qubit decomposition."""

from __future__ import annotations

import heapq
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import NoBlocksInPlan, StageMinimumAmbiguous
from .modelgen import (FactorLayout, FactorModel, build_plain_hubo, build_range_hubo,
                       cost_polynomial, default_bits, factor_polynomial)
from .polycore import BinaryPolynomial
from .quadratize import quadratize_model
from .solvers import AnnealSchedule, Sample, enumerate_exact, minimizers, sample_sa

__all__ = [
    "BlockCoord",
    "BlockResult",
    "DecompStage",
    "SolveReport",
    "METHODS",
    "solve_model",
    "factorize",
    "default_block_plan",
    "solve_block",
    "parallel_block_map",
    "range_search",
    "decompose_solve",
]

METHODS = ("exact", "sa", "range", "decomp", "qubo-exact", "qubo-sa")

@dataclass(frozen=True, order=True)
class BlockCoord:
    i: int
    j: int
    stride: int

    @property
    def s_i(self) -> int:
        return self.i * self.stride

    @property
    def s_j(self) -> int:
        return self.j * self.stride


@dataclass(frozen=True)
class DecompStage:
    level: int
    p_acc: int
    q_acc: int
    signed: bool
    p_step: int
    q_step: int


@dataclass
class SolveReport:
    big_n: int
    method: str
    found: bool
    p: Optional[int] = None
    q: Optional[int] = None
    bits: int = 0
    fix_lsb: bool = False
    energy_full: Optional[int] = None
    energy_paper: Optional[int] = None
    paper_gme: Optional[int] = None
    qubits: int = 0
    ancillas: int = 0
    multiplicity: int = 0
    block: Optional[BlockCoord] = None
    best_block: Optional[BlockCoord] = None
    best_excess: Optional[int] = None
    blocks_visited: int = 0
    trace: List[DecompStage] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    _BIG = ("big_n", "p", "q", "energy_full", "energy_paper", "paper_gme", "best_excess")

    def to_dict(self) -> dict:
        """JSON-ready dict; every arbitrary-size integer becomes a decimal string."""
        d = asdict(self)
        for k in self._BIG:
            if d[k] is not None:
                d[k] = str(d[k])
        for k in ("block", "best_block"):
            if d[k] is not None:
                d[k] = {"i": str(d[k]["i"]), "j": str(d[k]["j"]), "stride": str(d[k]["stride"])}
        d["trace"] = [{k: (v if isinstance(v, bool) else str(v)) for k, v in st.items()}
                      for st in d["trace"]]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        d = dict(d)
        for k in cls._BIG:
            if d.get(k) is not None:
                d[k] = int(d[k])
        for k in ("block", "best_block"):
            if d.get(k) is not None:
                d[k] = BlockCoord(*(int(d[k][f]) for f in ("i", "j", "stride")))
        d["trace"] = [DecompStage(**{k: (v if isinstance(v, bool) else int(v))
                                     for k, v in st.items()}) for st in d.get("trace", [])]
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


def _nontrivial(big_n: int, p: int, q: int) -> bool:
    return p > 1 and q > 1 and p * q == big_n


def _pick(model: FactorModel, samples: Sequence[Sample]):
    """Best sample plus the first non-trivial factor pair among minimizers."""
    best = samples[0]
    pair = None
    mult = 0
    for s in samples:
        if s.energy_full != best.energy_full:
            break
        p, q = model.decode(s.assignment)
        if pair is None and best.energy_full == 0 and _nontrivial(model.big_n, p, q):
            pair = (min(p, q), max(p, q))
        if pair is not None and sorted((p, q)) == list(pair):
            mult += s.occurrences
    return best, pair, mult


def solve_model(model: FactorModel, solver: str = "exact",
                schedule: Optional[AnnealSchedule] = None,
                method: Optional[str] = None) -> SolveReport:
    """Minimize one factorization model and decode its best sample."""
    if solver == "exact":
        samples = minimizers(model.poly, num_vars=model.num_vars)
        stats = {"solver": "exact", "assignments": 1 << model.num_vars}
    elif solver == "sa":
        schedule = schedule or AnnealSchedule()
        samples = sample_sa(model.poly, schedule, num_vars=model.num_vars)
        stats = {"solver": "sa", "sweeps": schedule.sweeps, "restarts": schedule.restarts,
                 "seed": schedule.seed}
    else:
        raise ValueError(f"unknown solver {solver!r}")
    best, pair, mult = _pick(model, samples)
    stats["best_decode"] = list(model.decode(best.assignment))
    return SolveReport(
        big_n=model.big_n, method=method or solver, found=pair is not None,
        p=pair[0] if pair else None, q=pair[1] if pair else None,
        bits=model.layout.n, fix_lsb=model.layout.fix_lsb,
        energy_full=best.energy_full, energy_paper=best.energy_paper,
        paper_gme=model.paper_gme, qubits=model.layout.num_vars,
        ancillas=model.num_ancillas, multiplicity=mult, stats=stats)


# -- range-dependent block search ---------------------------------------------


def _block_layout(n: int, fix_lsb: bool, coord: BlockCoord) -> FactorLayout:
    return FactorLayout(n, fix_lsb, coord.s_i, coord.s_j)


def default_block_plan(big_n: int, n: int, stride: Optional[int] = None,
                       fix_lsb: bool = False) -> Iterator[BlockCoord]:
    """Blocks ``(i, j)``, ``i <= j``, that can hold a factor pair, nearest first.

    A block spans ``p in [lo_p, hi_p]`` and ``q in [lo_q, hi_q]``; it is kept
    only if ``lo_p*lo_q <= N <= hi_p*hi_q``. Blocks are yielded lazily in
    ascending ``N - s_i*s_j``, ties by ``i`` then descending ``j``.
    """
    stride = (1 << n) if stride is None else int(stride)
    if stride < 1:
        raise ValueError("stride must be positive")
    probe = FactorLayout(n, fix_lsb)
    lo_off, span = probe.base_p, probe.max_p() - probe.base_p

    def row(i):
        lo_i = i * stride + lo_off
        hi_i = lo_i + span
        j_lo = max(i, -(-(-(-big_n // hi_i) - span - lo_off) // stride))
        if lo_i > 0:
            j_hi = (big_n // lo_i - lo_off) // stride
        else:
            j_hi = (big_n - lo_off) // stride
        for j in range(j_hi, j_lo - 1, -1):
            yield (big_n - i * stride * j * stride, i, -j)

    rows = [row(i) for i in range(math.isqrt(big_n) // stride + 1)]
    for _, i, neg_j in heapq.merge(*rows):
        yield BlockCoord(i, -neg_j, stride)


@dataclass(frozen=True)
class BlockResult:
    coord: BlockCoord
    hit: bool
    min_full: int
    min_paper: int
    gme: int
    p: Optional[int] = None
    q: Optional[int] = None
    multiplicity: int = 0


def solve_block(coord: BlockCoord, big_n: int, n: int, fix_lsb: bool = False,
                solver: str = "exact",
                schedule: Optional[AnnealSchedule] = None) -> BlockResult:
    """Build and minimize the range HUBO of one block.

    A hit means the block's minimum equals its closed-form target (full
    energy 0) and a non-trivial factor pair decodes from a minimizer.
    """
    model = build_range_hubo(big_n, _block_layout(n, fix_lsb, coord))
    rep = solve_model(model, solver, schedule)
    return BlockResult(coord, rep.found, rep.energy_full, rep.energy_paper,
                       model.paper_gme, rep.p, rep.q, rep.multiplicity)


def parallel_block_map(plan: Iterable[BlockCoord], worker_count: int,
                       task: Callable[[BlockCoord], BlockResult]) -> Iterator[BlockResult]:
    """Yield block results in plan order, stopping after the first hit.

    With several workers up to ``2 * worker_count`` blocks run ahead of the
    consumer; results are still released strictly in plan order, so the
    reported hit is the one sequential execution would report.
    """
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")
    if worker_count == 1:
        for coord in plan:
            r = task(coord)
            yield r
            if r.hit:
                return
        return
    it = iter(plan)
    with ProcessPoolExecutor(worker_count) as pool:
        window = deque()

        def top_up():
            while len(window) < 2 * worker_count:
                coord = next(it, None)
                if coord is None:
                    return
                window.append(pool.submit(task, coord))

        top_up()
        try:
            while window:
                r = window.popleft().result()
                yield r
                if r.hit:
                    return
                top_up()
        finally:
            for fut in window:
                fut.cancel()


def range_search(big_n: int, n: int, block_plan: Optional[Iterable[BlockCoord]] = None,
                 solver: str = "exact", *, stride: Optional[int] = None,
                 fix_lsb: bool = False, workers: int = 1, max_blocks: Optional[int] = None,
                 schedule: Optional[AnnealSchedule] = None) -> SolveReport:
    """Scan blocks until one attains its target energy with a real factor pair."""
    if block_plan is None:
        block_plan = default_block_plan(big_n, n, stride, fix_lsb)
    plan = iter(block_plan)
    first = next(plan, None)
    if first is None:
        raise NoBlocksInPlan(f"no candidate blocks for N={big_n}, n={n}")

    def chained():
        yield first
        count = 1
        for c in plan:
            if max_blocks is not None and count >= max_blocks:
                return
            count += 1
            yield c

    task = partial(solve_block, big_n=big_n, n=n, fix_lsb=fix_lsb, solver=solver,
                   schedule=schedule)
    visited = 0
    best: Optional[BlockResult] = None
    hit: Optional[BlockResult] = None
    for r in parallel_block_map(chained(), workers, task):
        visited += 1
        if best is None or r.min_full < best.min_full:
            best = r
        if r.hit:
            hit = r
            break
    layout = FactorLayout(n, fix_lsb)
    chosen = hit or best
    stats = {"solver": solver, "workers": workers}
    if schedule is not None and solver == "sa":
        stats.update(sweeps=schedule.sweeps, restarts=schedule.restarts, seed=schedule.seed)
    return SolveReport(
        big_n=big_n, method="range", found=hit is not None,
        p=hit.p if hit else None, q=hit.q if hit else None, bits=n, fix_lsb=fix_lsb,
        energy_full=chosen.min_full, energy_paper=chosen.min_paper, paper_gme=chosen.gme,
        qubits=layout.num_vars, multiplicity=hit.multiplicity if hit else 0,
        block=hit.coord if hit else None,
        best_block=None if hit else best.coord, best_excess=None if hit else best.min_full,
        blocks_visited=visited, stats=stats)


# -- qubit decomposition ------------------------------------------------------


def _stage_poly(big_n: int, level: int, p_acc: int, q_acc: int, signed: bool) -> BinaryPolynomial:
    w = 1 << level
    if not signed:
        p = factor_polynomial(p_acc, (w,), 0)
        q = factor_polynomial(q_acc, (w,), 1)
    else:
        p = factor_polynomial(p_acc, (w, -w), 0)
        q = factor_polynomial(q_acc, (w, -w), 2)
    return cost_polynomial(p, q, big_n)


def _stage_steps(bits: Sequence[int], level: int, signed: bool) -> Tuple[int, int]:
    w = 1 << level
    if not signed:
        return w * bits[0], w * bits[1]
    return w * (bits[0] - bits[1]), w * (bits[2] - bits[3])


def decompose_solve(big_n: int, n: int, solver: str = "exact", branch_budget: int = 16,
                    schedule: Optional[AnnealSchedule] = None) -> SolveReport:
    """Fix the factors one binary level at a time, highest level first.

    Stage 1 chooses ``P, Q in {0, 2**(n-1)}``; every later stage at level
    ``l`` adds a signed correction ``2**l * (u - v)`` to each factor. Each
    stage minimizes ``(P*Q - N)**2`` with the earlier stages folded into the
    constants. All distinct stage minimizers are explored breadth-first; the
    result is the first branch, in ascending order of stage corrections,
    that multiplies to ``N``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    branches: List[Tuple[int, int, List[DecompStage]]] = [(0, 0, [])]
    solved = 0
    for t in range(n):
        level = n - 1 - t
        signed = t > 0
        nxt = []
        for p_acc, q_acc, trace in branches:
            poly = _stage_poly(big_n, level, p_acc, q_acc, signed)
            if solver == "exact":
                samples = enumerate_exact(poly, num_vars=4 if signed else 2)
            else:
                samples = sample_sa(poly, schedule or AnnealSchedule(sweeps=200, restarts=8),
                                    num_vars=4 if signed else 2)
            solved += 1
            low = samples[0].energy_full
            steps = sorted({_stage_steps(s.assignment, level, signed)
                            for s in samples if s.energy_full == low})
            for dp, dq in steps:
                stage = DecompStage(level, p_acc + dp, q_acc + dq, signed, dp, dq)
                nxt.append((p_acc + dp, q_acc + dq, trace + [stage]))
        if len(nxt) > branch_budget:
            raise StageMinimumAmbiguous(
                f"{len(nxt)} tied branches at level {level} exceed budget {branch_budget}")
        branches = nxt

    def energy(b):
        return (b[0] * b[1] - big_n) ** 2

    chosen = next((b for b in branches if _nontrivial(big_n, b[0], b[1])), None)
    found = chosen is not None
    if chosen is None:
        chosen = min(branches, key=energy)
    p, q, trace = chosen
    e = energy(chosen)
    return SolveReport(
        big_n=big_n, method="decomp", found=found,
        p=min(p, q) if found else None, q=max(p, q) if found else None, bits=n,
        energy_full=e, energy_paper=e - big_n * big_n, paper_gme=-big_n * big_n,
        qubits=4, multiplicity=sum(1 for b in branches if _nontrivial(big_n, b[0], b[1])),
        trace=trace, stats={"solver": solver, "stage_solves": solved,
                            "leaves": len(branches), "best_decode": [p, q]})


# -- one-call entry point -----------------------------------------------------


def factorize(big_n: int, bits: Optional[int] = None, method: str = "exact", *,
              fix_lsb: bool = False, stride: Optional[int] = None, workers: int = 1,
              schedule: Optional[AnnealSchedule] = None,
              max_blocks: Optional[int] = None) -> SolveReport:
    """Factor ``big_n`` with one of :data:`METHODS`."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    n = bits if bits is not None else default_bits(big_n)
    if method == "range":
        return range_search(big_n, n, stride=stride, fix_lsb=fix_lsb, workers=workers,
                            max_blocks=max_blocks, schedule=schedule)
    if method == "decomp":
        return decompose_solve(big_n, n)
    model = build_plain_hubo(big_n, FactorLayout(n, fix_lsb))
    solver = "sa" if method.endswith("sa") else "exact"
    if method.startswith("qubo"):
        model, _ = quadratize_model(model)
    return solve_model(model, solver, schedule, method=method)
