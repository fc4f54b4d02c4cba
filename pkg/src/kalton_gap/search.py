"""Grid search over two-block class matrices, ranked by exact distance to measures."""
from __future__ import annotations

import bisect
import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import as_rational, format_decimal, format_rational
from .family import (MATRIX_FKN, MATRIX_SECOND, CandidateMatrix,
                     matrix_additivity_conditions, matrix_function)
from .projection import (DistanceCertificate, SolveOptions, audit_certificate,
                         symmetric_distance)
from .core import KaltonGapError

Cell = Tuple[int, int]
LinearForm = Dict[Cell, int]

# row-major order of the free entries a12 .. a33 (0-based cells)
FREE_CELLS: Tuple[Cell, ...] = ((0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2))

NAMED_MATRICES = {"fkn": MATRIX_FKN, "second": MATRIX_SECOND}


def default_grid(step: Fraction = Fraction(1, 2), bound: Fraction = Fraction(3)) -> List[Fraction]:
    count = int(bound / step)
    return [i * step for i in range(-count, count + 1)]


@dataclass(frozen=True)
class SearchConfig:
    grid: Tuple[Fraction, ...] = tuple(default_grid())
    k: int = 4
    threshold: Fraction = Fraction(7, 5)
    dedup_sign: bool = True
    predicate: str = "lemma"  # "lemma": the nine listed conditions; "exact": true 1-additivity at k
    workers: int = 1

    def __post_init__(self):
        grid = tuple(sorted({as_rational(x) for x in self.grid}))
        if not grid:
            raise ValueError("grid must be nonempty")
        if self.dedup_sign and set(grid) != {-x for x in grid}:
            raise ValueError("sign dedup needs a grid symmetric about 0")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.predicate not in ("lemma", "exact"):
            raise ValueError(f"unknown predicate {self.predicate!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "threshold", as_rational(self.threshold))


def lemma_forms() -> List[LinearForm]:
    """The nine listed conditions as linear forms ``|sum coef * a[cell]| <= 1``."""
    a12, a13, a21, a22, a23, a31, a32, a33 = FREE_CELLS
    forms = [
        {a12: 1}, {a21: 1}, {a22: 1},                     # (i)
        {a12: 2, a13: -1},                                  # (ii)
        {a21: 2, a31: -1},                                  # (iii)
        {a13: 1, a31: 1, a33: -1},                          # (iv)
        {a12: 1, a21: 1, a22: -1},                          # (v)
        {a22: 2, a23: -1}, {a22: 2, a32: -1}, {a22: 2, a33: -1},  # (vi)
        {a12: 1, a22: 1, a23: -1},                          # (vii)
        {a21: 1, a22: 1, a32: -1},                          # (viii)
        {a33: 1, a32: -1, a12: -1}, {a33: 1, a23: -1, a21: -1},  # (ix)
    ]
    return forms


def exact_forms(k: int) -> List[LinearForm]:
    """Complete 1-additivity conditions for the class-matrix function on two k-blocks."""
    out = []
    for x, y, u in matrix_additivity_conditions(k):
        form: LinearForm = {}
        for cell, coef in ((x, 1), (y, 1), (u, -1)):
            if cell != (0, 0):
                form[cell] = form.get(cell, 0) + coef
        form = {c: v for c, v in form.items() if v}
        if form and form not in out:
            out.append(form)
    return out


def _interval(form: LinearForm, cell: Cell, assigned: Dict[Cell, Fraction]) -> Tuple[Fraction, Fraction]:
    rest = sum((coef * assigned[c] for c, coef in form.items() if c != cell), Fraction(0))
    coef = form[cell]
    lo, hi = (-1 - rest) / coef, (1 - rest) / coef
    return (lo, hi) if coef > 0 else (hi, lo)


def enumerate_candidates(cfg: SearchConfig) -> Iterator[CandidateMatrix]:
    """Every grid matrix passing the configured predicate, in row-major lexicographic order.

    Each condition is attached to the last of its cells in row-major order
    and turned into an interval for that cell once the others are fixed.
    """
    forms = lemma_forms() if cfg.predicate == "lemma" else exact_forms(cfg.k)
    order = {c: i for i, c in enumerate(FREE_CELLS)}
    closing: Dict[Cell, List[LinearForm]] = {c: [] for c in FREE_CELLS}
    for form in forms:
        closing[max(form, key=order.__getitem__)].append(form)
    grid = list(cfg.grid)
    assigned: Dict[Cell, Fraction] = {}

    def rec(depth: int) -> Iterator[CandidateMatrix]:
        if depth == len(FREE_CELLS):
            yield CandidateMatrix.from_free([assigned[c] for c in FREE_CELLS])
            return
        cell = FREE_CELLS[depth]
        lo, hi = grid[0], grid[-1]
        for form in closing[cell]:
            a, b = _interval(form, cell, assigned)
            lo, hi = max(lo, a), min(hi, b)
        if lo > hi:
            return
        for v in grid[bisect.bisect_left(grid, lo):bisect.bisect_right(grid, hi)]:
            assigned[cell] = v
            yield from rec(depth + 1)
        assigned.pop(cell, None)

    yield from rec(0)


def canonical_sign(A: CandidateMatrix) -> CandidateMatrix:
    """``A`` if its first nonzero row-major entry is positive, else ``-A``."""
    first = next((x for x in A.entries if x != 0), Fraction(0))
    return -A if first < 0 else A


@dataclass(frozen=True)
class RankedCandidate:
    matrix: CandidateMatrix
    distance: Fraction
    certificate: DistanceCertificate = field(repr=False, compare=False)

    def sort_key(self):
        return (-self.distance, self.matrix.entries)


@dataclass
class SearchResult:
    config: SearchConfig
    total_enumerated: int
    total_nonzero: int
    total_after_sign_dedup: int
    ranked: List[RankedCandidate]
    survivors: List[RankedCandidate]

    def lookup(self, A: CandidateMatrix) -> Optional[RankedCandidate]:
        target = canonical_sign(A) if self.config.dedup_sign else A
        return next((r for r in self.ranked if r.matrix == target), None)


class CertificateFailure(KaltonGapError, RuntimeError):
    pass


def matrix_distance(A: CandidateMatrix, k: int) -> DistanceCertificate:
    sf = matrix_function(A, k)
    cert = symmetric_distance(sf, SolveOptions(strategy="dense"))
    audit = audit_certificate(sf, cert)
    if not audit.ok:
        raise CertificateFailure(f"certificate for {A} failed check {audit.first_failure}")
    return cert


def _solve_chunk(args) -> List[Tuple[CandidateMatrix, DistanceCertificate]]:
    mats, k = args
    return [(A, matrix_distance(A, k)) for A in mats]


def run_search(cfg: SearchConfig = SearchConfig()) -> SearchResult:
    total = nonzero = 0
    todo: List[CandidateMatrix] = []
    for A in enumerate_candidates(cfg):
        total += 1
        if A.is_zero():
            continue
        nonzero += 1
        if cfg.dedup_sign and canonical_sign(A) != A:
            continue
        todo.append(A)
    if cfg.workers > 1:
        size = max(1, len(todo) // (cfg.workers * 8))
        chunks = [(todo[i:i + size], cfg.k) for i in range(0, len(todo), size)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            solved = [pair for part in pool.map(_solve_chunk, chunks) for pair in part]
    else:
        solved = _solve_chunk((todo, cfg.k))
    ranked = sorted((RankedCandidate(A, c.optimum, c) for A, c in solved), key=RankedCandidate.sort_key)
    survivors = [r for r in ranked if r.distance >= cfg.threshold]
    return SearchResult(cfg, total, nonzero, len(todo), ranked, survivors)


CSV_HEADER = ["a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33",
              "distance", "distance_dec", "survivor"]


def result_rows(result: SearchResult) -> Iterator[List[str]]:
    for r in result.ranked:
        yield ([format_rational(x) for x in r.matrix.entries]
               + [format_rational(r.distance), format_decimal(r.distance),
                  str(int(r.distance >= result.config.threshold))])


def write_csv(result: SearchResult, fh) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    w.writerows(result_rows(result))


def read_csv(fh) -> List[Tuple[CandidateMatrix, Fraction, bool]]:
    rows = []
    for rec in csv.DictReader(fh):
        A = CandidateMatrix(tuple(Fraction(rec[h]) for h in CSV_HEADER[:9]))
        rows.append((A, Fraction(rec["distance"]), rec["survivor"] == "1"))
    return rows


def report(result: SearchResult, top: int = 10) -> str:
    cfg = result.config
    out = io.StringIO()
    print(f"grid: {len(cfg.grid)} values in [{format_rational(cfg.grid[0])}, "
          f"{format_rational(cfg.grid[-1])}], k = {cfg.k}, predicate = {cfg.predicate}", file=out)
    print(f"enumerated: {result.total_enumerated}", file=out)
    print(f"nonzero: {result.total_nonzero}", file=out)
    print(f"after sign dedup: {result.total_after_sign_dedup}", file=out)
    print(f"threshold: {format_rational(cfg.threshold)} (~{format_decimal(cfg.threshold)})", file=out)
    print(f"survivors: {len(result.survivors)}", file=out)
    for name, A in NAMED_MATRICES.items():
        r = result.lookup(A)
        if r is None:
            print(f"named {name} {A}: not enumerated", file=out)
        else:
            print(f"named {name} {A}: distance {format_rational(r.distance)} "
                  f"(~{format_decimal(r.distance)})", file=out)
    print(f"top {min(top, len(result.ranked))}:", file=out)
    for r in result.ranked[:top]:
        print(f"  {r.matrix}  {format_rational(r.distance)} (~{format_decimal(r.distance)})", file=out)
    return out.getvalue()
