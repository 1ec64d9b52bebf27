"""Command-line interface.

    hubofactor factor --n 15 --bits 3 --method exact
    hubofactor factor --n 1000070001221 --bits 6 --method range --stride 1000000
    hubofactor factor --n 15 --bits 3 --fix-lsb --method qubo-exact \\
        --emit-hubo hubo.json --emit-model qubo.json
    hubofactor verify hubo.json qubo.json
    hubofactor histogram --n 15 --bits 3 --fix-lsb --method qubo-exact

Exit status: 0 when a factor pair with p*q == N was found, 1 when not,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from .errors import HuboFactorError
from .modelgen import FactorLayout, build_plain_hubo, build_range_hubo, default_bits
from .quadratize import quadratize_model, verify_reduction
from .search import METHODS, SolveReport, decompose_solve, range_search, solve_model
from .serialization import load_model_and_ledger, save_model, save_qubo_coo
from .solvers import AnnealSchedule, enumerate_exact, histogram, sample_sa

EXIT_FOUND, EXIT_NOT_FOUND, EXIT_USAGE = 0, 1, 2


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _add_model_args(p: argparse.ArgumentParser, methods: Sequence[str]):
    p.add_argument("--n", dest="big_n", type=_positive_int, required=True,
                   help="the number to factor")
    p.add_argument("--bits", type=_positive_int, default=None,
                   help="binary digits per factor (default: bit length of isqrt(N) + 1)")
    p.add_argument("--method", choices=methods, default="exact")
    p.add_argument("--fix-lsb", action="store_true",
                   help="encode both factors as odd numbers (lowest bit fixed to 1)")
    p.add_argument("--sweeps", type=_positive_int, default=AnnealSchedule.sweeps)
    p.add_argument("--restarts", type=_positive_int, default=AnnealSchedule.restarts)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hubofactor", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factor", help="factor N with one of the model solvers")
    _add_model_args(f, METHODS)
    f.add_argument("--stride", type=_positive_int, default=None,
                   help="block stride for --method range (default 2**bits)")
    f.add_argument("--block-workers", type=_positive_int, default=1)
    f.add_argument("--max-blocks", type=_positive_int, default=None)
    f.add_argument("--emit-model", metavar="PATH",
                   help="write the solved model (hit block for range, QUBO for qubo-*)")
    f.add_argument("--emit-hubo", metavar="PATH",
                   help="for qubo-* methods, also write the HUBO before reduction")
    f.add_argument("--emit-coo", metavar="PATH",
                   help="for qubo-* methods, write the QUBO as 'i j coeff' lines")
    f.add_argument("--json", action="store_true", help="print the report as JSON")

    v = sub.add_parser("verify", help="check a HUBO/QUBO pair written by factor")
    v.add_argument("original")
    v.add_argument("reduced")
    v.add_argument("--limit", type=_positive_int, default=20,
                   help="enumerate jointly up to this many variables")
    v.add_argument("--samples", type=_positive_int, default=256)
    v.add_argument("--seed", type=int, default=0)

    h = sub.add_parser("histogram", help="energy/frequency table of a solve")
    _add_model_args(h, ("exact", "sa", "qubo-exact", "qubo-sa"))
    h.add_argument("--csv", action="store_true")
    h.add_argument("--top", type=_positive_int, default=20,
                   help="number of lowest energies to list")
    return parser


def _schedule(args) -> AnnealSchedule:
    return AnnealSchedule(sweeps=args.sweeps, restarts=args.restarts, seed=args.seed)


def _format_report(r: SolveReport) -> List[str]:
    out = [f"N = {r.big_n}"]
    if r.found:
        out += [f"p = {r.p}", f"q = {r.q}"]
    else:
        out.append("no factor pair found")
    out.append(f"method = {r.method}  bits = {r.bits}  fix_lsb = {'yes' if r.fix_lsb else 'no'}")
    out.append(f"qubits = {r.qubits}  ancillas = {r.ancillas}")
    out.append(f"energy (paper) = {r.energy_paper}")
    out.append(f"energy (full) = {r.energy_full}")
    out.append(f"target (paper) = {r.paper_gme}")
    if r.found and r.multiplicity:
        out.append(f"minimizers decoding to the pair = {r.multiplicity}")
    if r.block is not None:
        out.append(f"block = ({r.block.i}, {r.block.j})  stride = {r.block.stride}  "
                   f"S_i = {r.block.s_i}  S_j = {r.block.s_j}")
    if r.best_block is not None:
        out.append(f"best block = ({r.best_block.i}, {r.best_block.j})  "
                   f"excess = {r.best_excess}")
    if r.method == "range":
        out.append(f"blocks visited = {r.blocks_visited}")
    for k, st in enumerate(r.trace, 1):
        out.append(f"stage {k}: level {st.level}  (P, Q) = ({st.p_step}, {st.q_step})  "
                   f"acc = ({st.p_acc}, {st.q_acc})")
    return out


def _cmd_factor(args) -> int:
    n = args.bits or default_bits(args.big_n)
    schedule = _schedule(args)
    method = args.method
    if method == "range":
        report = range_search(args.big_n, n, stride=args.stride, fix_lsb=args.fix_lsb,
                              workers=args.block_workers, max_blocks=args.max_blocks,
                              schedule=schedule)
        if args.emit_model:
            coord = report.block or report.best_block
            model = build_range_hubo(args.big_n, FactorLayout(n, args.fix_lsb,
                                                              coord.s_i, coord.s_j))
            save_model(model, args.emit_model)
    elif method == "decomp":
        report = decompose_solve(args.big_n, n)
    else:
        model = build_plain_hubo(args.big_n, FactorLayout(n, args.fix_lsb))
        ledger = None
        if method.startswith("qubo"):
            if args.emit_hubo:
                save_model(model, args.emit_hubo)
            model, ledger = quadratize_model(model)
            if args.emit_coo:
                save_qubo_coo(model.poly, args.emit_coo)
        if args.emit_model:
            save_model(model, args.emit_model, ledger)
        solver = "sa" if method.endswith("sa") else "exact"
        report = solve_model(model, solver, schedule, method=method)

    # independent product check before anything is printed as a factorization
    if report.found and report.p * report.q != args.big_n:
        report.found = False
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print("\n".join(_format_report(report)))
    return EXIT_FOUND if report.found else EXIT_NOT_FOUND


def _cmd_verify(args) -> int:
    original, _ = load_model_and_ledger(args.original)
    reduced, ledger = load_model_and_ledger(args.reduced)
    if ledger is None:
        print(f"error: {args.reduced} carries no reduction ledger", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_reduction(original, reduced, ledger, args.limit, args.samples, args.seed)
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status}  mode = {rep.mode}  checked = {rep.checked}  "
          f"ancillas = {ledger.num_ancillas}  shift = {ledger.total_shift}")
    if rep.counterexample:
        print("counterexample: " + json.dumps(rep.counterexample, sort_keys=True))
    return EXIT_FOUND if rep.passed else EXIT_NOT_FOUND


def _cmd_histogram(args) -> int:
    n = args.bits or default_bits(args.big_n)
    model = build_plain_hubo(args.big_n, FactorLayout(n, args.fix_lsb))
    if args.method.startswith("qubo"):
        model, _ = quadratize_model(model)
    if args.method.endswith("sa"):
        samples = sample_sa(model.poly, _schedule(args), num_vars=model.num_vars)
    else:
        samples = enumerate_exact(model.poly, 22, num_vars=model.num_vars)
    counts = histogram(samples)
    pairs = {}
    for s in samples:
        if s.energy_paper in pairs or len(pairs) < args.top:
            pairs.setdefault(s.energy_paper, set()).add(model.decode(s.assignment))
    rows = list(counts.items())[:args.top]
    if args.csv:
        print("energy_paper,count,solutions")
    else:
        print(f"# N = {args.big_n}  method = {args.method}  target (paper) = {model.paper_gme}")
        print(f"{'energy_paper':>16} {'count':>8}  solutions (p, q)")
    for e, c in rows:
        sols = sorted(pairs.get(e, ()))
        shown = " ".join(f"({p},{q})" for p, q in sols[:4]) + (" ..." if len(sols) > 4 else "")
        if args.csv:
            print(f"{e},{c},{shown}")
        else:
            print(f"{e:>16} {c:>8}  {shown}")
    return EXIT_FOUND


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"factor": _cmd_factor, "verify": _cmd_verify,
               "histogram": _cmd_histogram}[args.command]
    try:
        return handler(args)
    except HuboFactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


cli_run = main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
