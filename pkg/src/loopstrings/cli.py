"""Command-line front end.

Every command prints one JSON document on stdout.  Failures print
``{"error": <kind>, "message": <text>}`` and exit non-zero.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .checks import (
    budgets_up_to,
    catalan_facts,
    check_bounds,
    check_duality,
    check_lemmas,
    check_pruning,
    standard_corpus,
)
from .coefficients import (
    CoefficientEngine,
    RecursionCycle,
    coefficient_table,
    default_cache_path,
    equation_residual,
    f_partial,
    frac_str,
    parse_fraction,
)
from .loops import DSLError, LoopError, LoopSequence, parse_loop_dsl, to_dsl
from .ops import OperationError
from .trajectories import (
    Budget,
    TrajectorySums,
    enumerate_vanishing,
    listing_sum,
    write_listing,
)

SCHEMA_VERSION = 1
EXIT_USAGE, EXIT_FAILURE, EXIT_CHECK = 2, 1, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers --------------------------------------------------------------

def _beta(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --beta {text!r}: {exc}") from None


def _box(text: str, dim: int):
    from .gauge import LatticeBox

    try:
        sides = tuple(int(t) for t in text.replace("x", ",").split(",") if t.strip())
    except ValueError:
        raise UsageError(f"bad --box {text!r}") from None
    if len(sides) == 1:
        sides = sides * dim
    if len(sides) != dim:
        raise UsageError(f"--box has {len(sides)} sides, expected {dim}")
    return LatticeBox(dim, sides)


def _loop(args) -> LoopSequence:
    if args.loop is None:
        raise UsageError("--loop is required")
    return parse_loop_dsl(args.loop, args.dim)


def _engine(args) -> CoefficientEngine:
    eng = CoefficientEngine(args.dim, literal_i0=getattr(args, "literal_i0", False))
    path = _cache_path(args)
    if path is not None:
        eng.load_cache(path)
    return eng


def _cache_path(args) -> Optional[Path]:
    if getattr(args, "cache", None) is None:
        return None
    return default_cache_path(args.dim) if args.cache == "auto" else Path(args.cache)


def _save(args, eng: CoefficientEngine) -> None:
    path = _cache_path(args)
    if path is not None:
        eng.save_cache(path)


def _emit(doc: dict, args) -> None:
    doc = {"schema": SCHEMA_VERSION, "command": args.command, **doc}
    text = json.dumps(doc, sort_keys=True, indent=None)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")


# -- commands ---------------------------------------------------------------------

def cmd_coeff(args) -> int:
    s = _loop(args)
    eng = _engine(args)
    kinds = ("a", "a_sym", "b") if args.kind == "all" else (args.kind,)
    table = coefficient_table(eng, s, args.imax, args.k, kinds)
    _save(args, eng)
    _emit({"dim": args.dim, "table": table}, args)
    return 0


def cmd_expand(args) -> int:
    s = _loop(args)
    eng = _engine(args)
    res = f_partial(eng, s, args.k, _beta(args.beta), args.imax, max_i=args.max_i)
    doc = {"dim": args.dim, "series": res.to_json()}
    if args.residual:
        r, allow = equation_residual(eng, s, args.k, res.beta, res.i_max)
        doc["equation_residual"] = {
            "residual": frac_str(r), "residual_float": float(r),
            "allowance": None if allow is None else frac_str(allow),
            "within": None if allow is None else abs(r) <= allow,
        }
    _save(args, eng)
    _emit(doc, args)
    return 0


def cmd_trajectories(args) -> int:
    s = _loop(args)
    if args.budget:
        try:
            parts = [int(t) for t in args.budget.split(",")]
            budgets = [Budget(*parts)]
        except (TypeError, ValueError):
            raise UsageError(f"bad --budget {args.budget!r}; expected i,a,b,c") from None
    else:
        budgets = [Budget(args.i, a, b, c) for a, b, c in Budget.splits_of(args.k)]
    sums = TrajectorySums(args.dim)
    rows = []
    listing = []
    for bud in budgets:
        signed, absolute = sums.raw(s, bud.as_tuple())
        row = {"budget": list(bud.as_tuple()), "T": frac_str(signed), "S": frac_str(absolute),
               "genus": frac_str(bud.genus)}
        if args.list or args.count:
            trajs = enumerate_vanishing(s, bud, args.dim)
            row["count"] = len(trajs)
            ls, la = listing_sum(trajs)
            row["listing_consistent"] = ls == signed and la == absolute
            if args.list:
                listing.extend(trajs)
        rows.append(row)
    T = sum((parse_fraction(r["T"]) for r in rows), Fraction(0))
    S = sum((parse_fraction(r["S"]) for r in rows), Fraction(0))
    doc = {"dim": args.dim, "loop": to_dsl(s), "budgets": rows, "T": frac_str(T), "S": frac_str(S),
           "beta_power": budgets[0].i if len({b.i for b in budgets}) == 1 else None}
    if args.list:
        if args.list == "-":
            doc["trajectories"] = [X.to_json() for X in listing]
        else:
            with open(args.list, "w") as fh:
                write_listing(listing, fh)
            doc["listing_path"] = args.list
    _emit(doc, args)
    return 0


def _mc_settings(args, beta: float):
    from .gauge import RunSettings

    if args.seed is None:
        raise UsageError("--seed is required for Monte Carlo commands")
    return RunSettings(N=args.N, beta=beta, box=_box(args.box, args.dim), sweeps=args.sweeps,
                       warmup=args.warmup, chains=args.chains, seed=args.seed)


def _place(s: LoopSequence, box, as_given: bool) -> LoopSequence:
    return s if as_given else box.center(s)


def cmd_mc(args) -> int:
    from .gauge import MCEstimate, simulate, write_samples_csv

    s = _loop(args)
    beta = _beta(args.beta)
    st = _mc_settings(args, float(beta))
    s = _place(s, st.box, args.as_given)
    st.box.check_sequence(s, margin=args.margin)
    run = simulate(st, {"s": s})
    est = MCEstimate.from_series(run.series["s"])
    if args.samples:
        with open(args.samples, "w", newline="") as fh:
            write_samples_csv(run, fh)
    doc = {**run.manifest(), "beta_exact": frac_str(beta), "loop": to_dsl(s),
           "estimates": {"phi": {"mean": est.mean, "stderr": est.stderr, "n_eff": est.n_eff,
                                 "tau": est.tau}}}
    _emit(doc, args)
    return 0


def _duality_worker(job):
    name, dsl, dim, imax, kmax = job
    s = parse_loop_dsl(dsl, dim)
    return check_duality([(name, s)], dim, imax, kmax).rows


def _pruning_worker(job):
    name, dsl, dim, total = job
    return check_pruning([(name, parse_loop_dsl(dsl, dim))], dim, total)


def _pool_map(fn, jobs, threads: int):
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, jobs))


def cmd_check(args) -> int:
    what = args.what
    ok = True
    if what == "duality":
        from .checks import DualityReport

        corpus = standard_corpus(args.dim, args.max_length)
        jobs = [(n, to_dsl(s), args.dim, args.imax, args.kmax) for n, s in corpus]
        rep = DualityReport([r for rows in _pool_map(_duality_worker, jobs, args.threads) for r in rows])
        ok = rep.all_equal
        doc = {"dim": args.dim, "corpus": [n for n, _ in corpus], **rep.to_json(),
               "all equal": rep.all_equal}
    elif what == "bounds":
        corpus = standard_corpus(args.dim, args.max_length)
        doc = check_bounds(corpus, args.dim, args.imax, args.kmax)
        ok = doc["ok"] and catalan_facts()
        doc["catalan_facts"] = catalan_facts()
    elif what == "pruning":
        corpus = standard_corpus(args.dim, args.max_length)
        jobs = [(n, to_dsl(s), args.dim, args.total) for n, s in corpus]
        rows = [r for rs in _pool_map(_pruning_worker, jobs, args.threads) for r in rs]
        ok = all(r.equal for r in rows)
        doc = {"dim": args.dim, "budgets": len(budgets_up_to(args.total)), "cases": len(rows),
               "all_equal": ok,
               "mismatches": [{"name": r.name, "budget": list(r.budget.as_tuple()),
                               "pruned": r.pruned, "brute": r.brute} for r in rows if not r.equal]}
    elif what == "invariants":
        seed = 0 if args.seed is None else args.seed
        tallies = check_lemmas(args.samples_per_lemma, (2, 3), 16, seed)
        ok = all(t.violations == 0 for t in tallies.values())
        doc = {"seed": seed, "lemmas": {k: {"applications": t.applications, "violations": t.violations}
                                        for k, t in tallies.items()}, "ok": ok}
    elif what == "residual":
        from .gauge import master_equation_residual

        s = _loop(args)
        beta = _beta(args.beta)
        st = _mc_settings(args, float(beta))
        s = _place(s, st.box, args.as_given)
        rep = master_equation_residual(s, st)
        ok = rep.z <= 3.0
        doc = {"loop": to_dsl(s), "beta_exact": frac_str(beta), **rep.to_json(), "within_3sigma": ok}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown check {what!r}")
    doc["check"] = what
    doc["ok"] = ok
    _emit(doc, args)
    return 0 if ok else EXIT_CHECK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--dim", type=int, default=2, help="lattice dimension d >= 2")
    common.add_argument("--loop", help='loop sequence DSL, e.g. "+1 +2 -1 -2 ; @(3,0) +1 +2 -1 -2"')
    common.add_argument("--out", help="also write the JSON document to this file")
    common.add_argument("--threads", type=int, default=1, help="worker processes for corpus checks")

    coeffs = _Parser(add_help=False)
    coeffs.add_argument("--k", type=int, default=0)
    coeffs.add_argument("--imax", type=int, default=None)
    coeffs.add_argument("--cache", nargs="?", const="auto", default=None,
                        help="coefficient memo file; bare flag uses the default cache directory")
    coeffs.add_argument("--literal-i0", action="store_true",
                        help="use a_{0,k} = 0 for non-null s instead of the recursion")

    mc = _Parser(add_help=False)
    mc.add_argument("--N", type=int, default=4)
    mc.add_argument("--beta", default="1/10")
    mc.add_argument("--box", default="8", help="side or comma-separated sides")
    mc.add_argument("--sweeps", type=int, default=2000)
    mc.add_argument("--warmup", type=int, default=200)
    mc.add_argument("--chains", type=int, default=16)
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument("--as-given", action="store_true", help="do not center the loop in the box")

    p = _Parser(prog="loopstrings", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("coeff", parents=[common, coeffs], help="a, a_sym, b coefficient tables")
    c.add_argument("--kind", choices=("a", "a_sym", "b", "all"), default="all")

    e = sub.add_parser("expand", parents=[common, coeffs], help="partial sums of f_k with tails")
    e.add_argument("--beta", required=True, help='exact rational, "num/den" or decimal')
    e.add_argument("--max-i", type=int, default=4, help="order cap when --imax is omitted")
    e.add_argument("--residual", action="store_true", help="also report the truncated limit-equation residual")

    t = sub.add_parser("trajectories", parents=[common], help="trajectory sums and listings")
    t.add_argument("--i", type=int, default=0, help="number of deformations")
    t.add_argument("--k", type=int, default=0, help="a + 2b + c")
    t.add_argument("--budget", help="explicit i,a,b,c instead of --i/--k")
    t.add_argument("--count", action="store_true", help="enumerate and count trajectories")
    t.add_argument("--list", nargs="?", const="-", default=None,
                   help="list trajectories inline, or as JSON lines into the given file")

    m = sub.add_parser("mc", parents=[common, mc], help="Monte Carlo Wilson loop estimate")
    m.add_argument("--margin", type=int, default=1)
    m.add_argument("--samples", help="raw per-measurement CSV dump")

    k = sub.add_parser("check", parents=[common, mc], help="duality, bounds, pruning, invariants, residual")
    k.add_argument("what", choices=("duality", "bounds", "pruning", "invariants", "residual"))
    k.add_argument("--max-length", type=int, default=8)
    k.add_argument("--imax", type=int, default=3)
    k.add_argument("--kmax", type=int, default=2)
    k.add_argument("--total", type=int, default=2, help="pruning: max i+a+b+c")
    k.add_argument("--samples-per-lemma", type=int, default=10_000)
    return p


COMMANDS = {"coeff": cmd_coeff, "expand": cmd_expand, "trajectories": cmd_trajectories,
            "mc": cmd_mc, "check": cmd_check}


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "schema": SCHEMA_VERSION}, sort_keys=True))
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.dim < 2:
            raise UsageError("--dim must be at least 2")
        if getattr(args, "imax", None) is None and args.command == "coeff":
            raise UsageError("--imax is required")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except DSLError as exc:
        return _fail("parse", str(exc), EXIT_USAGE)
    except (LoopError, OperationError, RecursionCycle, ValueError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
