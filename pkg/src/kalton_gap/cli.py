"""Command-line entry point: ``kalton-gap <subcommand> ...``.

Exit codes: 0 success, 1 input error, 2 solver failure or failed certificate.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import additivity as add
from .bounds import bounds_table, format_table, parse_grid, write_csv as write_bounds_csv
from .core import (GroundSetTooLarge, KaltonGapError, SetFunction, SymmetricSetFunction,
                   expand, format_decimal, format_rational)
from .family import (CandidateMatrix, FamilyParams, instantiate_matrix, lower_bound_a,
                     make_fkn)
from .fileio import (FormatError, dump_function, dumps_certificate, dumps_set_function,
                     dumps_symmetric, load_function, loads_certificate)
from .projection import (IterationLimitError, ProfileSpaceTooLarge, SolveOptions,
                         audit_certificate, chebyshev_distance, symmetric_distance)
from .search import CertificateFailure, SearchConfig, default_grid, report, run_search, write_csv as write_search_csv


class InputError(Exception):
    pass


def _hex(x) -> str:
    return format(x, "x") if isinstance(x, int) else ",".join(map(str, x))


def cmd_check(args) -> int:
    f = load_function(args.file)
    mode = args.mode
    if isinstance(f, SymmetricSetFunction):
        try:
            f = expand(f)
        except GroundSetTooLarge:
            scan = {"additive": add.symmetric_additivity_defect, "modular": add.symmetric_modularity_defect,
                    "weak": add.symmetric_weak_modularity_defect}[mode]
            rep = scan(f)
            _print_defect(rep)
            return 0
    scan = {"additive": add.additivity_defect, "modular": add.modularity_defect,
            "weak": add.weak_modularity_defect}[mode]
    _print_defect(scan(f))
    return 0


def _print_defect(rep) -> None:
    a, b = rep.witness_pair
    print(f"mode: {rep.kind}")
    print(f"defect: {format_rational(rep.defect)} (~{format_decimal(rep.defect)})")
    print(f"f(empty): {format_rational(rep.empty_value)}")
    print(f"witness: {_hex(a)} {_hex(b)}")


def cmd_distance(args) -> int:
    f = load_function(args.file)
    opts = SolveOptions(strategy=args.strategy)
    if args.symmetric:
        if not isinstance(f, SymmetricSetFunction):
            raise InputError("--symmetric needs a symmetric-function file (blocks=...)")
        cert = symmetric_distance(f, opts)
    else:
        if isinstance(f, SymmetricSetFunction):
            f = expand(f)
        cert = chebyshev_distance(f, opts)
    print(f"distance: {format_rational(cert.optimum)} (~{format_decimal(cert.optimum)})")
    if cert.symmetric:
        y = cert.block_weights()
        print("block atom weights: " + ",".join(format_rational(w) for w in y))
    else:
        print("atoms: " + ",".join(format_rational(w) for w in cert.measure.atom_weights))
    print(f"pivots: {cert.stats.get('pivots')}, rounds: {cert.stats.get('rounds')}")
    if args.cert_out:
        Path(args.cert_out).write_text(dumps_certificate(cert), encoding="utf-8")
    return 0


def cmd_family(args) -> int:
    if args.what == "bound":
        a = lower_bound_a(args.k, args.n)
        print(f"{format_rational(a)} (≈ {format_decimal(a)})")
        return 0
    if args.what == "fkn":
        obj = make_fkn(FamilyParams(args.k, args.n))
        if args.expand:
            obj = expand(obj)
    else:
        entries = [Fraction(x) for x in args.entries.split(",")]
        obj = instantiate_matrix(CandidateMatrix.from_free(entries), args.k)
    if args.out:
        dump_function(obj, args.out)
    else:
        sys.stdout.write(dumps_symmetric(obj) if isinstance(obj, SymmetricSetFunction)
                         else dumps_set_function(obj))
    return 0


def cmd_search(args) -> int:
    cfg = SearchConfig(grid=tuple(default_grid(Fraction(args.grid_step))), k=args.k,
                       threshold=Fraction(args.threshold), dedup_sign=not args.no_dedup,
                       predicate=args.predicate, workers=args.workers)
    result = run_search(cfg)
    print(report(result, args.top), end="")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_search_csv(result, fh)
    return 0


def cmd_bounds(args) -> int:
    rows = bounds_table(parse_grid(args.grid), solve_lp=args.lp)
    print(format_table(rows))
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_bounds_csv(rows, fh)
    return 0


def cmd_certify(args) -> int:
    f = load_function(args.function)
    cert = loads_certificate(Path(args.certificate).read_text(encoding="utf-8"))
    if not cert.symmetric and isinstance(f, SymmetricSetFunction):
        f = expand(f)
    if cert.symmetric and isinstance(f, SetFunction):
        raise InputError("profile certificate needs a symmetric-function file")
    audit = audit_certificate(f, cert)
    for name, passed in audit.checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    return 0 if audit.ok else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kalton-gap",
                                description="Exact distances from set functions to finitely-additive measures.")
    sub = p.add_subparsers(dest="command", metavar="{check,distance,family,search,bounds,certify}")

    c = sub.add_parser("check", help="additivity / modularity defect")
    c.add_argument("file")
    c.add_argument("--mode", choices=("additive", "modular", "weak"), default="additive")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("distance", help="exact distance to measures")
    d.add_argument("file")
    d.add_argument("--symmetric", action="store_true")
    d.add_argument("--strategy", choices=("dense", "cg"), default="cg")
    d.add_argument("--cert-out")
    d.set_defaults(func=cmd_distance)

    f = sub.add_parser("family", help="build family members and closed-form bounds")
    f.add_argument("what", choices=("fkn", "matrix", "bound"))
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--n", type=int, default=2)
    f.add_argument("--entries", help="a12,a13,a21,a22,a23,a31,a32,a33")
    f.add_argument("--expand", action="store_true")
    f.add_argument("--out")
    f.set_defaults(func=cmd_family)

    s = sub.add_parser("search", help="grid search over two-block class matrices")
    s.add_argument("--grid-step", default="1/2")
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--threshold", default="7/5")
    s.add_argument("--predicate", choices=("lemma", "exact"), default="lemma")
    s.add_argument("--no-dedup", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--top", type=int, default=10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    b = sub.add_parser("bounds", help="lower-bound table for K(m), K_w, K_s")
    b.add_argument("--grid", default="diag:2..12")
    b.add_argument("--lp", action="store_true", help="also solve the exact LP per row")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("certify", help="audit a certificate file")
    v.add_argument("function")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_certify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 1
    if args.command == "family" and args.what == "matrix" and not args.entries:
        print("error: family matrix needs --entries", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (IterationLimitError, ProfileSpaceTooLarge, CertificateFailure) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except (InputError, FormatError, GroundSetTooLarge, OSError, ValueError, KaltonGapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
