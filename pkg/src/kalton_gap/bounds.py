"""Finite-m lower bounds on the Kalton constants from the 0/1/3 family."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

from .core import format_decimal, format_rational
from .family import FamilyParams, lower_bound_a, make_fkn
from .projection import SolveOptions, symmetric_distance, verify_certificate

CSV_HEADER = ["k", "n", "m", "a_formula", "a_formula_dec", "lp_distance",
              "best_lower", "kw_lower", "ks_lower"]


@dataclass(frozen=True)
class BoundRow:
    """One (k, n) row.  ``kw_lower = best/2`` since K(m) <= 2 K_w(m);
    ``ks_lower = best/4`` composes that with K_w(m) <= 2 K_s(m)."""

    k: int
    n: int
    a_formula: Fraction
    lp_distance: Optional[Fraction] = None

    @property
    def m(self) -> int:
        return self.k * self.n

    @property
    def best_lower(self) -> Fraction:
        if self.lp_distance is None:
            return self.a_formula
        return max(self.a_formula, self.lp_distance)

    @property
    def derived_Kw_lower(self) -> Fraction:
        return self.best_lower / 2

    @property
    def derived_Ks_lower(self) -> Fraction:
        return self.best_lower / 4

    @property
    def flagged(self) -> bool:
        """LP distance below the closed-form estimate (should never happen)."""
        return self.lp_distance is not None and self.lp_distance < self.a_formula


def parse_grid(text: str) -> List[Tuple[int, int]]:
    """``diag:a..b`` (k = n), ``rect:a..b,c..d`` (k range, n range) or ``KxN,KxN,...``."""
    text = text.strip()
    rng = r"(\d+)\.\.(\d+)"
    m = re.fullmatch(r"diag:" + rng, text)
    if m:
        lo, hi = map(int, m.groups())
        return [(k, k) for k in range(lo, hi + 1)]
    m = re.fullmatch(r"rect:" + rng + "," + rng, text)
    if m:
        k0, k1, n0, n1 = map(int, m.groups())
        return [(k, n) for k in range(k0, k1 + 1) for n in range(n0, n1 + 1)]
    pairs = []
    for part in text.split(","):
        m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", part)
        if not m:
            raise ValueError(f"bad grid {text!r}: use diag:a..b, rect:a..b,c..d or KxN,...")
        pairs.append((int(m.group(1)), int(m.group(2))))
    return pairs


def fkn_distance(k: int, n: int, opts: SolveOptions = SolveOptions()) -> Fraction:
    sf = make_fkn(FamilyParams(k, n))
    cert = symmetric_distance(sf, opts)
    if not verify_certificate(sf, cert):
        raise RuntimeError(f"certificate for f_({k},{n}) failed verification")
    return cert.optimum


def bounds_table(grid: Iterable[Tuple[int, int]], solve_lp: bool = False,
                 opts: SolveOptions = SolveOptions()) -> List[BoundRow]:
    rows = []
    for k, n in dict.fromkeys(grid):
        a = lower_bound_a(k, n)
        rows.append(BoundRow(k, n, a, fkn_distance(k, n, opts) if solve_lp else None))
    return sorted(rows, key=lambda r: (r.m, r.k))


def row_fields(r: BoundRow) -> List[str]:
    return [str(r.k), str(r.n), str(r.m), format_rational(r.a_formula), format_decimal(r.a_formula),
            "" if r.lp_distance is None else format_rational(r.lp_distance),
            format_rational(r.best_lower), format_rational(r.derived_Kw_lower),
            format_rational(r.derived_Ks_lower)]


def write_csv(rows: Sequence[BoundRow], fh: TextIO) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(row_fields(r))


def read_csv(fh: TextIO) -> List[BoundRow]:
    out = []
    for rec in csv.DictReader(fh):
        lp = Fraction(rec["lp_distance"]) if rec["lp_distance"] else None
        out.append(BoundRow(int(rec["k"]), int(rec["n"]), Fraction(rec["a_formula"]), lp))
    return out


def format_table(rows: Sequence[BoundRow]) -> str:
    head = f"{'k':>4} {'n':>4} {'m':>6}  {'a_formula':>22}  {'lp_distance':>22}  {'K_w >=':>9}  {'K_s >=':>9}"
    lines = [head]
    for r in rows:
        a = f"{format_rational(r.a_formula)} ({format_decimal(r.a_formula)})"
        lp = "-" if r.lp_distance is None else f"{format_rational(r.lp_distance)} ({format_decimal(r.lp_distance)})"
        flag = "  LP<formula!" if r.flagged else ""
        lines.append(f"{r.k:>4} {r.n:>4} {r.m:>6}  {a:>22}  {lp:>22}  "
                     f"{format_decimal(r.derived_Kw_lower):>9}  {format_decimal(r.derived_Ks_lower):>9}{flag}")
    lines.append("K(m) >= best lower bound per row; K_w column via K <= 2 K_w, "
                 "K_s column derived via 1/2 K_w <= K_s.")
    return "\n".join(lines)
