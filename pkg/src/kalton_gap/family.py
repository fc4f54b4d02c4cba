"""Lower-bound constructions: the 0/1/3 family, two-block class matrices, closed forms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .core import (BlockStructure, Profile, SetFunction, SymmetricSetFunction,
                   as_rational, expand)


@dataclass(frozen=True)
class FamilyParams:
    k: int
    n: int

    def __post_init__(self):
        if self.k < 2 or self.n < 2:
            raise ValueError(f"need k, n >= 2, got k={self.k}, n={self.n}")

    @property
    def m(self) -> int:
        return self.k * self.n

    @property
    def blocks(self) -> BlockStructure:
        return BlockStructure.equal(self.k, self.n)


def fkn_value(c: Sequence[int], k: int) -> int:
    """0 on the empty profile, 3 when every block is hit and one is full, else 1."""
    if not any(c):
        return 0
    if all(c) and any(cj == k for cj in c):
        return 3
    return 1


def make_fkn(p: FamilyParams) -> SymmetricSetFunction:
    k = p.k
    return SymmetricSetFunction.from_rule(p.blocks, "fkn", lambda c: fkn_value(c, k), (p.k, p.n))


# --- 3x3 class matrices on two blocks ---

ENTRY_NAMES = ("a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33")


@dataclass(frozen=True)
class CandidateMatrix:
    """Row ``r`` is the class of ``A n X1`` and column ``c`` the class of ``A n X2``,
    classes being empty / proper nonempty / full.  ``a11`` is always 0.
    """

    entries: Tuple[Fraction, ...]  # row-major, 9 values

    def __post_init__(self):
        e = tuple(as_rational(x) for x in self.entries)
        if len(e) != 9:
            raise ValueError("a class matrix has 9 entries")
        if e[0] != 0:
            raise ValueError("a11 must be 0")
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_free(cls, free: Sequence) -> "CandidateMatrix":
        """Build from the eight free entries ``a12, a13, a21, ..., a33``."""
        if len(free) != 8:
            raise ValueError("expected 8 entries a12..a33")
        return cls((0,) + tuple(free))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "CandidateMatrix":
        return cls(tuple(x for row in rows for x in row))

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij  # 1-based
        return self.entries[3 * (i - 1) + (j - 1)]

    @property
    def free(self) -> Tuple[Fraction, ...]:
        return self.entries[1:]

    def rows(self) -> Tuple[Tuple[Fraction, ...], ...]:
        e = self.entries
        return (e[0:3], e[3:6], e[6:9])

    def __neg__(self) -> "CandidateMatrix":
        return CandidateMatrix(tuple(-x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(_fmt(x) for x in r) for r in self.rows()) + "]"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


PAWLIK_MATRIX = CandidateMatrix.from_rows([[0, -1, -3], [1, 0, -1], [3, 1, 0]])
MATRIX_FKN = CandidateMatrix.from_rows([[0, 1, 1], [1, 1, 3], [1, 3, 3]])
MATRIX_SECOND = CandidateMatrix.from_rows([[0, 1, 1], [1, 1, 3], [3, 3, 3]])


def lemma_conditions(A: CandidateMatrix) -> List[Tuple[str, Fraction]]:
    """Each condition as ``(label, expression)``; it holds when ``|expression| <= 1``."""
    a = lambda i, j: A[i, j]  # noqa: E731
    return [
        ("i", a(1, 2)), ("i", a(2, 1)), ("i", a(2, 2)),
        ("ii", 2 * a(1, 2) - a(1, 3)),
        ("iii", 2 * a(2, 1) - a(3, 1)),
        ("iv", a(1, 3) + a(3, 1) - a(3, 3)),
        ("v", a(1, 2) + a(2, 1) - a(2, 2)),
        ("vi", 2 * a(2, 2) - a(2, 3)), ("vi", 2 * a(2, 2) - a(3, 2)), ("vi", 2 * a(2, 2) - a(3, 3)),
        ("vii", a(1, 2) + a(2, 2) - a(2, 3)),
        ("viii", a(2, 1) + a(2, 2) - a(3, 2)),
        ("ix", a(3, 3) - a(3, 2) - a(1, 2)), ("ix", a(3, 3) - a(2, 3) - a(2, 1)),
    ]


def matrix_is_one_additive(A: CandidateMatrix) -> Tuple[bool, List[str]]:
    """Check the nine listed conditions (i)-(ix); returns ``(ok, violated labels)``.

    This is the nine-condition list as stated.  It is *not* equivalent
    to 1-additivity of the instantiated function: see
    :func:`matrix_exactly_one_additive` for the complete class-level check.
    """
    violated: List[str] = []
    for label, expr in lemma_conditions(A):
        if abs(expr) > 1 and label not in violated:
            violated.append(label)
    return (not violated, violated)


def size_class(count: int, k: int) -> int:
    """0 for empty, 1 for proper nonempty, 2 for full."""
    return 0 if count == 0 else (2 if count == k else 1)


def class_triples(k: int) -> List[Tuple[int, int, int]]:
    """Possible (class A, class B, class A u B) for disjoint A, B inside one k-block."""
    out = set()
    for a in range(k + 1):
        for b in range(k + 1 - a):
            out.add((size_class(a, k), size_class(b, k), size_class(a + b, k)))
    return sorted(out)


def matrix_additivity_conditions(k: int) -> List[Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]]:
    """Every distinct ``(cell A, cell B, cell A u B)`` reachable by disjoint sets on two k-blocks.

    ``f`` built from a matrix is 1-additive iff ``|a[A] + a[B] - a[A u B]| <= 1``
    for each triple (cells are 0-based (row, col) with ``a[0,0] = 0``).
    """
    conds = set()
    triples = class_triples(k)
    for t1 in triples:
        for t2 in triples:
            x, y = (t1[0], t2[0]), (t1[1], t2[1])
            conds.add((min(x, y), max(x, y), (t1[2], t2[2])))
    return sorted(conds)


def matrix_additivity_defect(A: CandidateMatrix, k: int) -> Fraction:
    """Additivity defect of ``instantiate_matrix(A, k)`` via class triples only."""
    e = A.entries
    cell = lambda rc: e[3 * rc[0] + rc[1]]  # noqa: E731
    return max(abs(cell(x) + cell(y) - cell(u)) for x, y, u in matrix_additivity_conditions(k))


def matrix_exactly_one_additive(A: CandidateMatrix, k: int = 4) -> bool:
    return matrix_additivity_defect(A, k) <= 1


def matrix_function(A: CandidateMatrix, k: int) -> SymmetricSetFunction:
    """Block-symmetric form of the class-matrix function on two k-blocks."""
    if k < 2:
        raise ValueError("need k >= 2 for proper nonempty subsets to exist")
    e = A.entries

    def value(c: Profile) -> Fraction:
        if c[0] == 0 and c[1] == 0:
            return Fraction(0)
        return e[3 * size_class(c[0], k) + size_class(c[1], k)]

    return SymmetricSetFunction.from_rule(BlockStructure.equal(k, 2), "matrix", value, (A, k))


def instantiate_matrix(A: CandidateMatrix, k: int) -> SetFunction:
    return expand(matrix_function(A, k))


# --- closed forms for the block-constant equalizer ---

def _check(k: int, n: int) -> None:
    FamilyParams(k, n)


def closed_form_xj(k: int, n: int) -> Fraction:
    """Mass of each block at the equalizing block-constant measure: 4k/((n+1)k-1)."""
    _check(k, n)
    return Fraction(4 * k, (n + 1) * k - 1)


def closed_form_total(k: int, n: int) -> Fraction:
    _check(k, n)
    return Fraction(4 * n * k, (n + 1) * k - 1)


def lower_bound_a(k: int, n: int) -> Fraction:
    """3 - x - (n-1)x/k with x = closed_form_xj(k, n); equals 3 - 4(k+n-1)/((n+1)k-1)."""
    x = closed_form_xj(k, n)
    return 3 - x - Fraction(n - 1, k) * x


def two_block_distance(k: int) -> Fraction:
    """Equalized residual for two blocks, (5k-7)/(3k-1)."""
    return lower_bound_a(k, 2)
