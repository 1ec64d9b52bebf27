import pytest

from hubofactor.errors import NoBlocksInPlan, StageMinimumAmbiguous
from hubofactor.modelgen import FactorLayout, build_range_hubo
from hubofactor.search import (BlockCoord, DecompStage, SolveReport, decompose_solve,
                               default_block_plan, factorize, parallel_block_map,
                               range_search, solve_block)
from hubofactor.solvers import AnnealSchedule, minimum

from conftest import semiprime_pairs


def overlap_blocks(big_n, n, stride):
    """Every (i, j), i <= j, passing the overlap bound, by brute force.

    Factors are at least 1, so a block starting at 0 counts from 1."""
    span = (1 << n) - 1
    out = []
    top = big_n // stride + 1
    for i in range(top + 1):
        for j in range(i, top + 1):
            si, sj = i * stride, j * stride
            if max(si, 1) * max(sj, 1) <= big_n and (si + span) * (sj + span) >= big_n:
                out.append((i, j))
    return out


def test_plan_single_block():
    assert list(default_block_plan(15, 4, 16)) == [BlockCoord(0, 0, 16)]
    assert list(default_block_plan(15, 4)) == [BlockCoord(0, 0, 16)]


def test_plan_starts_at_unit_block():
    plan = default_block_plan(1_000_070_001_221, 6, 10 ** 6)
    assert next(plan) == BlockCoord(1, 1, 10 ** 6)


@pytest.mark.parametrize("big_n,n,stride", [
    (15, 2, 4), (143, 2, 4), (221, 3, 8), (899, 3, 5), (1000, 2, 3), (10403, 4, 16),
    (4, 1, 2), (9999, 3, 7),
])
def test_plan_matches_brute_force(big_n, n, stride):
    plan = [(c.i, c.j) for c in default_block_plan(big_n, n, stride)]
    assert sorted(plan) == overlap_blocks(big_n, n, stride)
    assert len(set(plan)) == len(plan)
    keys = [(big_n - i * stride * j * stride, i, -j) for i, j in plan]
    assert keys == sorted(keys)


def test_plan_is_lazy_within_rows():
    # 10**4 rows of up to 10**8 blocks each; only the row heads are touched
    big_n = 10 ** 16 + 7
    plan = default_block_plan(big_n, 4, 10 ** 4)
    first = [next(plan) for _ in range(3)]
    assert all(c.s_i * c.s_j <= big_n for c in first)


def test_plan_spiral_reaches_known_block():
    for pos, c in enumerate(default_block_plan(102_454_763, 6, 64)):
        if (c.i, c.j) == (157, 158):
            break
    else:
        pytest.fail("block (157, 158) missing from the plan")
    assert pos < 2000


@pytest.mark.parametrize("p,q,n,stride", [(11, 13, 2, 4), (23, 41, 3, 8), (89, 97, 3, 8),
                                          (101, 103, 3, 10)])
def test_block_holding_the_pair_hits(p, q, n, stride):
    big_n = p * q
    for c in default_block_plan(big_n, n, stride):
        r = solve_block(c, big_n, n)
        lo_i, lo_j = c.s_i, c.s_j
        holds = (lo_i <= p < lo_i + (1 << n) and lo_j <= q < lo_j + (1 << n)) or \
                (lo_i <= q < lo_i + (1 << n) and lo_j <= p < lo_j + (1 << n))
        assert r.hit == holds
        if r.hit:
            assert r.min_paper == r.gme == -(big_n - c.s_i * c.s_j) ** 2
            assert (r.p, r.q) == (p, q)
        # a zero minimum without a hit can only come from the 1 * N split
        span = range(1 << n)
        any_pair = any((c.s_i + a) * (c.s_j + b) == big_n for a in span for b in span)
        assert (r.min_full == 0) == any_pair
        if not holds:
            assert r.min_full > 0 or c.i == 0


def test_range_small():
    rep = range_search(15, 4)
    assert rep.found and (rep.p, rep.q) == (3, 5)
    assert rep.block == BlockCoord(0, 0, 16)
    assert rep.energy_paper == -225


def test_range_megablock():
    big_n = 1_000_070_001_221
    rep = range_search(big_n, 6, stride=10 ** 6)
    assert rep.found and (rep.p, rep.q) == (1_000_033, 1_000_037)
    assert rep.block == BlockCoord(1, 1, 10 ** 6)
    assert rep.energy_paper == rep.paper_gme == -4_900_170_941_490_841
    assert rep.blocks_visited == 1


def test_range_not_found_reports_best_block():
    rep = range_search(101 * 103, 2, stride=4, max_blocks=3)
    assert not rep.found and rep.blocks_visited == 3
    assert rep.best_block is not None and rep.best_excess > 0
    with pytest.raises(NoBlocksInPlan):
        range_search(15, 2, block_plan=[])


def test_range_prime_exhausts_plan():
    rep = range_search(97, 2, stride=4)
    assert not rep.found
    assert rep.blocks_visited == len(overlap_blocks(97, 2, 4))


def test_range_sa_solver():
    rep = range_search(89 * 97, 3, stride=8, solver="sa",
                       schedule=AnnealSchedule(sweeps=200, restarts=8))
    assert rep.found and (rep.p, rep.q) == (89, 97)


def _plain_task(c):
    return solve_block(c, 89 * 97, 3)


def test_parallel_matches_sequential():
    plan = list(default_block_plan(89 * 97, 3, 8))
    seq = list(parallel_block_map(plan, 1, _plain_task))
    par = list(parallel_block_map(plan, 2, _plain_task))
    assert seq == par
    assert seq[-1].hit and sum(r.hit for r in seq) == 1
    assert range_search(89 * 97, 3, stride=8, workers=2) == \
        range_search(89 * 97, 3, stride=8, workers=2)
    a = range_search(89 * 97, 3, stride=8, workers=1)
    b = range_search(89 * 97, 3, stride=8, workers=2)
    assert (a.block, a.p, a.q, a.blocks_visited) == (b.block, b.p, b.q, b.blocks_visited)
    with pytest.raises(ValueError):
        list(parallel_block_map(plan, 0, _plain_task))


def test_decomp_n15_trace():
    rep = decompose_solve(15, 3)
    assert [(s.p_step, s.q_step) for s in rep.trace] == [(4, 4), (0, 0), (-1, 1)]
    assert [s.signed for s in rep.trace] == [False, True, True]
    assert [s.level for s in rep.trace] == [2, 1, 0]
    assert (rep.p, rep.q) == (3, 5) and rep.found


def oracle_stage_minima(big_n, n):
    """Decomposition by plain enumeration of integer stage corrections."""
    leaves = [(0, 0)]
    for t in range(n):
        w = 1 << (n - 1 - t)
        steps = (0, w) if t == 0 else (-w, 0, w)
        nxt = []
        for p, q in leaves:
            cand = [(p + a, q + b) for a in steps for b in steps]
            low = min((x * y - big_n) ** 2 for x, y in cand)
            nxt += sorted({c for c in cand if (c[0] * c[1] - big_n) ** 2 == low},
                          key=lambda c: (c[0] - p, c[1] - q))
        leaves = nxt
    return leaves


@pytest.mark.parametrize("big_n,n,pairs", [(9, 2, {(3, 3)}), (35, 3, {(5, 7)}),
                                           (15, 3, {(3, 5)})])
def test_decomp_examples(big_n, n, pairs):
    rep = decompose_solve(big_n, n)
    assert rep.found and (rep.p, rep.q) in pairs
    leaves = oracle_stage_minima(big_n, n)
    assert any(p * q == big_n for p, q in leaves)


@pytest.mark.parametrize("p,q", [(p, q) for p, q in semiprime_pairs(63 * 63, 3) if q < 64])
def test_decomp_agrees_with_oracle(p, q):
    big_n = p * q
    n = q.bit_length()
    leaves = oracle_stage_minima(big_n, n)
    if len(leaves) > 16:
        with pytest.raises(StageMinimumAmbiguous):
            decompose_solve(big_n, n)
        return
    rep = decompose_solve(big_n, n)
    hits = [c for c in leaves if c[0] > 1 and c[1] > 1 and c[0] * c[1] == big_n]
    assert rep.found == bool(hits)
    if hits:
        assert sorted(hits[0]) == [rep.p, rep.q]
    last = rep.trace[-1]
    assert rep.energy_full == (last.p_acc * last.q_acc - big_n) ** 2


def test_decomp_budget():
    with pytest.raises(StageMinimumAmbiguous):
        decompose_solve(15, 3, branch_budget=0)


def test_report_roundtrip():
    rep = range_search(1_000_070_001_221, 6, stride=10 ** 6)
    d = rep.to_dict()
    assert d["p"] == "1000033" and d["energy_paper"] == "-4900170941490841"
    assert d["block"] == {"i": "1", "j": "1", "stride": "1000000"}
    assert SolveReport.from_dict(d) == rep
    rep = decompose_solve(15, 3)
    assert SolveReport.from_dict(rep.to_dict()) == rep
    assert isinstance(rep.trace[0], DecompStage)


@pytest.mark.parametrize("method", ["exact", "sa", "qubo-exact", "range", "decomp"])
def test_factorize_methods(method):
    rep = factorize(15, 3, method, fix_lsb=method.startswith("qubo"),
                    schedule=AnnealSchedule(sweeps=300, restarts=8))
    assert rep.found and (rep.p, rep.q) == (3, 5)
    assert rep.p * rep.q == 15


def test_factorize_unknown_method():
    with pytest.raises(ValueError):
        factorize(15, 3, "magic")


def test_range_minimum_positive_off_target():
    big_n = 10111 * 10133
    model = build_range_hubo(big_n, FactorLayout(6, s_i=157 * 64, s_j=157 * 64))
    assert minimum(model.poly) > 0
