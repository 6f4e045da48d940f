"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 certification or verification
failure, 3 partial result (a basis provider could not cover some weight).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from typing import Optional, Sequence

from . import __version__
from .bases import ingest_qexp_file, format_qexp_record
from .etaforms import (
    TForm,
    default_tform,
    prime_optimal_tform,
    prime_scholl_tform,
    scholl_solve_tform,
    validate_tform,
)
from .genring import EXPECTED_LOCALIZED, EXPECTED_RATIONAL, TableRow, format_table, run_level
from .modcurve import cusps_gamma0, has_no_elliptic_gamma0, invariants_gamma0, weight_bound_complex
from .qseries import CoeffRing
from .arith import is_prime

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _level(text: str) -> int:
    try:
        N = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if N < 1:
        raise argparse.ArgumentTypeError(f"level must be >= 1, got {N}")
    return N


def _cap(text: str) -> int:
    K = int(text)
    if K < 2 or K % 2:
        raise argparse.ArgumentTypeError(f"cap must be an even weight >= 2, got {K}")
    return K


def parse_range(text: str) -> list[int]:
    """``1..30``, ``5``, or comma lists of either."""
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if lo < 1 or hi < lo:
                raise UsageError(f"bad range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(_level(part))
    return out


def _ring(text: str, N: int) -> CoeffRing:
    try:
        return CoeffRing.parse(text, N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------


def cmd_invariants(args) -> int:
    N = args.level
    inv = invariants_gamma0(N)
    bound = weight_bound_complex("Gamma0", N)
    if args.format == "records":
        print(f"{N} {inv.index} {inv.nu2} {inv.nu3} {inv.cusp_count} {inv.genus} "
              f"{int(has_no_elliptic_gamma0(N))} {bound if bound is not None else '-'}")
        return EXIT_OK
    print(f"level {N}")
    print(f"  index        {inv.index}")
    print(f"  genus        {inv.genus}")
    print(f"  nu2, nu3     {inv.nu2}, {inv.nu3}")
    print(f"  cusps        {inv.cusp_count}")
    for c in cusps_gamma0(N):
        print(f"    {str(c):>8}  width {c.width}")
    print(f"  no elliptic  {str(has_no_elliptic_gamma0(N)).lower()}")
    print(f"  weight bound {bound if bound is not None else 'none'}")
    return EXIT_OK


def _pick_tform(N: int, kind: str, ring: CoeffRing) -> TForm:
    if kind == "optimal":
        if not is_prime(N) or N < 5:
            raise UsageError("--optimal needs a prime level >= 5")
        return prime_optimal_tform(N, ring)
    if N == 1:
        return default_tform(N, ring)
    if is_prime(N) and N >= 5:
        return prime_scholl_tform(N, ring)
    return scholl_solve_tform(N, ring)


def cmd_tform(args) -> int:
    N = args.level
    ring = _ring(args.ring, N)
    if ring.kind == "Q":
        ring = CoeffRing.integers()
    try:
        T = _pick_tform(N, args.kind, ring)
    except ArithmeticError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = validate_tform(T, ring)
    exps = " ".join(f"{d}:{r}" for d, r in sorted(T.source.nonzero.items()))
    if args.format == "records":
        print(f"{N} {T.weight} {T.vanishing_order} {int(rep.ok)} {exps}")
    else:
        print(f"level {N}: {T.source}")
        print(f"  exponents  {exps}")
        print(f"  weight     {T.weight}")
        print(f"  order      {T.vanishing_order}")
        for line in rep.lines():
            print(f"  {line}")
        print(f"  certified  {str(rep.ok).lower()}")
        print(f"  q-expansion {T.expansion(T.vanishing_order + args.terms).to_string(args.terms)}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _progress(args):
    if args.quiet:
        return lambda msg: None
    return lambda msg: print(msg, file=sys.stderr, flush=True)


def cmd_generators(args) -> int:
    N = args.level
    ring = _ring(args.ring, N)
    gs = run_level(N, ring, cap=args.cap, data_paths=args.data, use_trick=not args.no_trick,
                   progress=_progress(args), prec=args.prec)
    if args.format == "records":
        print(gs.record())
    else:
        print(f"level {N} over {ring}")
        for g in gs.sorted_entries():
            print(f"  weight {g.weight:>3}  order {g.valuation!s:>3}  {g.source:<8} {g.qexp.to_string(4)}")
        print(f"  max weight {gs.max_weight}")
        print(f"  halted by  {gs.halted_by}")
        print(f"  complete   {str(gs.complete).lower()}" + ("" if gs.complete else f" (checked to weight {gs.checked_to})"))
    if gs.halted_by and gs.halted_by.startswith("provider_gap"):
        return EXIT_PARTIAL
    return EXIT_OK


def _table_row(job) -> TableRow:
    N, ring_text, cap, data = job
    ring = CoeffRing.parse(ring_text, N)
    gs = run_level(N, ring, cap=cap, data_paths=data)
    expected = (EXPECTED_RATIONAL if ring.kind == "Q" else EXPECTED_LOCALIZED).get(N)
    return TableRow(N, gs.max_weight, None if gs.complete else gs.checked_to, gs.halted_by, expected)


def cmd_table(args) -> int:
    levels = parse_range(args.range)
    for N in levels:
        _ring(args.ring, N)
    expected_table = EXPECTED_RATIONAL if args.ring == "Q" else EXPECTED_LOCALIZED
    caps = {}
    for N in levels:
        if args.cap is not None:
            caps[N] = args.cap
        elif args.ring == "Q" and N in expected_table and expected_table[N][1] is not None:
            # published capped rows are reproduced up to the published cap
            caps[N] = expected_table[N][1]
    jobs = [(N, args.ring, caps.get(N), args.data) for N in levels]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_table_row, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_table_row(job))
            if not args.quiet:
                r = rows[-1]
                print(f"level {r.level}: weight {r.weight} ({r.halted_by})", file=sys.stderr, flush=True)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    print(f"# mfgens {__version__} table, ring {args.ring}, generated {stamp}")
    if args.format == "records":
        for r in rows:
            print(f"{r.level} {r.weight} {'--' if r.cap is None else r.cap}")
    else:
        print(format_table(rows))
    if not args.verify:
        return EXIT_OK
    failures = []
    for r in rows:
        if r.expected is None:
            continue
        ok = r.matches()
        print(f"{'PASS' if ok else 'FAIL'} level {r.level}: got {r.weight}"
              f"{'' if r.cap is None else f' up to {r.cap}'}, expected {r.expected[0]}"
              f"{'' if r.expected[1] is None else f' up to {r.expected[1]}'}")
        if not ok:
            failures.append(r.level)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_ingest(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        try:
            recs = ingest_qexp_file(path)
        except (OSError, ValueError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_FAIL
            continue
        if args.format == "records":
            for rec in recs:
                print(format_qexp_record(rec.level, rec.weight, rec.ring, rec.qexp))
            continue
        summary: dict[tuple[int, int], int] = {}
        for rec in recs:
            summary[(rec.level, rec.weight)] = summary.get((rec.level, rec.weight), 0) + 1
        print(f"{path}: {len(recs)} records")
        for (N, k), n in sorted(summary.items()):
            print(f"  level {N} weight {k}: {n} forms")
    return status


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mfgens", description="Generators of rings of modular forms on Gamma0(N).")
    ap.add_argument("--version", action="version", version=f"mfgens {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines")

    data = _Parser(add_help=False)
    data.add_argument("--data", action="append", metavar="PATH",
                      help="q-expansion data file or directory (repeatable; default $MFGENS_DATA or the bundled pack)")

    p = sub.add_parser("invariants", parents=[common], help="index, genus, cusps and weight bound of Gamma0(N)")
    p.add_argument("level", type=_level)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("tform", parents=[common], help="construct and certify a T-form")
    p.add_argument("level", type=_level)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scholl", dest="kind", action="store_const", const="scholl",
                   help="Scholl's eta quotient (default; closed form at primes >= 5)")
    g.add_argument("--optimal", dest="kind", action="store_const", const="optimal",
                   help="lowest-weight eta quotient eta(pz)^2p / eta(z)^2, prime p >= 5")
    p.add_argument("--ring", default="Z", help="coefficient ring for the unit check (default Z)")
    p.add_argument("--terms", type=int, default=6)
    p.set_defaults(func=cmd_tform, kind=None)

    p = sub.add_parser("generators", parents=[common, data], help="run the generator search at one level")
    p.add_argument("level", type=_level)
    p.add_argument("--ring", default="Z/1_6N", help="Q, Z, Z/1_M or Z/1_6N (default)")
    p.add_argument("--cap", type=_cap)
    p.add_argument("--prec", type=int, help="working precision (at least the Sturm bound)")
    p.add_argument("--no-trick", action="store_true", help="walk to the T-form bound without the coverage test")
    p.set_defaults(func=cmd_generators)

    p = sub.add_parser("table", parents=[common, data], help="maximal generator weights for a range of levels")
    p.add_argument("range", help="levels, e.g. 1..30 or 1,2,3,5")
    p.add_argument("--ring", default="Q", help="Q (default), Z/1_6N, Z/1_M or Z")
    p.add_argument("--cap", type=_cap)
    p.add_argument("--verify", action="store_true", help="compare with the published rows")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("ingest", parents=[common], help="validate q-expansion data files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_ingest)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mfgens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"mfgens: certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"mfgens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
