"""Exact revised simplex for Chebyshev (minimax) fitting by a linear model.

Given items ``A`` with integer feature vectors ``phi(A)`` and targets
``v(A)``, the fitting problem

    minimize t  subject to  s * (v(A) - w . phi(A)) <= t   for s in {+1, -1}

is solved through its dual, a standard-form LP with only ``d + 1`` rows::

    maximize  sum_j s_j v_j y_j
    s.t.      sum_j y_j = 1,   sum_j s_j phi_j y_j = 0,   y >= 0.

A column is a pair ``(item, sign)``.  The simplex multipliers of the
optimal basis are ``(t, w)``, so one run yields both the primal optimum
(the fitted weights) and the dual certificate (basic ``y`` values).

Pivoting follows Bland's rule over a caller-defined column order, so the
method terminates even on the heavily degenerate LPs produced here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Generic, Hashable, List, Optional, Sequence, Tuple, TypeVar

from .core import KaltonGapError

Item = TypeVar("Item", bound=Hashable)
Key = Tuple[Hashable, int]  # (item, sign)


class IterationLimitError(KaltonGapError, RuntimeError):
    pass


class SingularBasisError(KaltonGapError, RuntimeError):
    pass


@dataclass
class ColumnSpace(Generic[Item]):
    """Describes the columns the simplex may price.

    ``features(item)`` and ``target(item)`` define a column; ``rank(key)``
    fixes the Bland order; ``first_entering(t, w)`` returns the lowest-ranked
    key with ``s * (v - w . phi) > t`` or ``None``.
    """

    features: Callable[[Item], Sequence[int]]
    target: Callable[[Item], Fraction]
    rank: Callable[[Key], object]
    first_entering: Callable[[Fraction, Sequence[Fraction]], Optional[Key]]


def _invert(mat: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularBasisError("initial basis is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class EpigraphSimplex:
    """Revised simplex state: basis keys and the exact basis inverse."""

    def __init__(self, dim: int, basis: Sequence[Key], features, target, pivot_cap: int = 10 ** 6):
        self.rows = dim + 1
        self.features = features
        self.target = target
        self.basis: List[Key] = list(basis)
        if len(self.basis) != self.rows:
            raise SingularBasisError(f"basis needs {self.rows} columns, got {len(self.basis)}")
        cols = [self.column(key) for key in self.basis]
        self.binv = _invert([[cols[j][i] for j in range(self.rows)] for i in range(self.rows)])
        if any(x < 0 for x in self.values()):
            raise SingularBasisError("initial basis is not primal feasible")
        self.pivots = 0
        self.pivot_cap = pivot_cap

    def column(self, key: Key) -> List[Fraction]:
        item, s = key
        return [Fraction(1)] + [Fraction(s * x) for x in self.features(item)]

    def cost(self, key: Key) -> Fraction:
        item, s = key
        return s * self.target(item)

    def values(self) -> List[Fraction]:
        """Basic variable values (the right-hand side is the first unit vector)."""
        return [row[0] for row in self.binv]

    def multipliers(self) -> List[Fraction]:
        costs = [self.cost(key) for key in self.basis]
        return [sum((c * self.binv[i][j] for i, c in enumerate(costs) if c), Fraction(0))
                for j in range(self.rows)]

    def objective(self) -> Fraction:
        return sum((self.cost(k) * x for k, x in zip(self.basis, self.values())), Fraction(0))

    def pivot(self, entering: Key, rank) -> None:
        a = self.column(entering)
        d = [sum((bi[j] * a[j] for j in range(self.rows) if a[j]), Fraction(0)) for bi in self.binv]
        xb = self.values()
        leave, best = None, None
        for i, di in enumerate(d):
            if di > 0:
                ratio = xb[i] / di
                if (best is None or ratio < best
                        or (ratio == best and rank(self.basis[i]) < rank(self.basis[leave]))):
                    leave, best = i, ratio
        if leave is None:  # pragma: no cover - the simplex constraint bounds every column
            raise KaltonGapError("unbounded direction in a bounded LP")
        p = d[leave]
        prow = [x / p for x in self.binv[leave]]
        for i in range(self.rows):
            if i == leave:
                self.binv[i] = prow
            elif d[i]:
                f = d[i]
                self.binv[i] = [x - f * y for x, y in zip(self.binv[i], prow)]
        self.basis[leave] = entering
        self.pivots += 1
        if self.pivots > self.pivot_cap:
            raise IterationLimitError(f"simplex exceeded {self.pivot_cap} pivots")

    def optimize(self, space: ColumnSpace) -> None:
        """Pivot with Bland's rule until no column of ``space`` prices out."""
        while True:
            pi = self.multipliers()
            key = space.first_entering(pi[0], pi[1:])
            if key is None:
                return
            if key in self.basis:  # pragma: no cover - would mean a pricing bug
                raise KaltonGapError(f"basic column {key!r} priced as improving")
            self.pivot(key, space.rank)


def pool_space(pool: List[Key], features, target) -> ColumnSpace:
    """Column space restricted to an explicit, ordered pool of keys."""
    index = {key: i for i, key in enumerate(pool)}
    cache = {}

    def entering(t, w):
        for key in pool:
            item, s = key
            phi = cache.get(item)
            if phi is None:
                phi = cache[item] = (tuple(features(item)), target(item))
            fit = sum((wi * x for wi, x in zip(w, phi[0]) if x), Fraction(0))
            if s * (phi[1] - fit) > t:
                return key
        return None

    return ColumnSpace(features, target, index.__getitem__, entering)
