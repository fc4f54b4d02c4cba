"""Exact additivity / modularity defects by exhaustive pair scans."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .core import (Profile, SetFunction, SymmetricSetFunction, require_dense)

ADDITIVE_MAX_M = 16
MODULAR_MAX_M = 12

_INT64_SAFE = 1 << 60


@dataclass(frozen=True)
class DefectReport:
    """Largest defect of one kind, with the lexicographically least witness.

    ``witness_pair`` holds two bitmasks (or two profiles for the symmetric
    scans); ``kind`` is ``"additive"``, ``"modular"`` or ``"weak"``.
    """

    defect: Fraction
    witness_pair: Tuple
    empty_value: Fraction
    kind: str = "additive"
    witness_meet: Optional[Profile] = None

    def within(self, bound) -> bool:
        """True when the function vanishes at the empty set and the defect is at most ``bound``."""
        return self.empty_value == 0 and self.defect <= bound


def _expression(f: SetFunction, a: int, b: int, kind: str) -> Fraction:
    v = f.values
    if kind == "additive":
        return v[a] + v[b] - v[a | b]
    if kind == "weak":
        return v[a] + v[b] - v[a | b] - v[0]
    return v[a] + v[b] - v[a | b] - v[a & b]


def recompute(f: SetFunction, report: DefectReport) -> Fraction:
    a, b = report.witness_pair
    return abs(_expression(f, a, b, report.kind))


def _int_array(ints):
    if max(map(abs, ints), default=0) < _INT64_SAFE // 4:
        return np.asarray(ints, dtype=np.int64)
    return np.asarray(ints, dtype=object)


def _scan(f: SetFunction, kind: str) -> DefectReport:
    # per A, vectorized over every B >= A; ties keep the least (A, B)
    lcm, ints = f.scaled()
    vals = _int_array(ints)
    n = len(ints)
    everything = np.arange(n, dtype=np.int64)
    best, best_pair = -1, (0, 0)
    for a in range(n):
        bs = everything[a:]
        if kind == "modular":
            expr = vals[a] + vals[a:] - vals[bs | a] - vals[bs & a]
        else:
            bs = bs[(bs & a) == 0]
            if bs.size == 0:
                continue
            expr = vals[a] + vals[bs] - vals[bs | a]
            if kind == "weak":
                expr = expr - vals[0]
        mags = np.abs(expr)
        i = int(np.argmax(mags))
        top = int(mags[i])
        if top > best:
            best, best_pair = top, (a, int(bs[i]))
    return DefectReport(Fraction(best, lcm), best_pair, f.values[0], kind)


def additivity_defect(f: SetFunction) -> DefectReport:
    """max |f(A)+f(B)-f(A u B)| over disjoint A, B; f(0) reported separately."""
    require_dense(f.m, ADDITIVE_MAX_M, "additivity scan")
    return _scan(f, "additive")


def modularity_defect(f: SetFunction) -> DefectReport:
    require_dense(f.m, MODULAR_MAX_M, "modularity scan")
    return _scan(f, "modular")


def weak_modularity_defect(f: SetFunction) -> DefectReport:
    require_dense(f.m, ADDITIVE_MAX_M, "weak modularity scan")
    return _scan(f, "weak")


def shift_to_additive(f: SetFunction) -> SetFunction:
    """Subtract ``f(emptyset)`` from every value so the result vanishes at the empty set."""
    a = f.values[0]
    if a == 0:
        return f
    return f.shifted(-a)


# --- profile-level scans for block-symmetric functions ---

def _symmetric_scan(sf: SymmetricSetFunction, kind: str) -> DefectReport:
    sizes = sf.blocks.block_sizes
    profiles = list(sf.blocks.profiles())
    vals = {c: sf.value(c) for c in profiles}
    zero = tuple(0 for _ in sizes)
    empty = vals[zero]
    best: Optional[Fraction] = None
    best_pair: Tuple = (zero, zero)
    meet = None
    if kind in ("additive", "weak"):
        for a in profiles:
            for b in profiles:
                if b < a or any(x + y > k for x, y, k in zip(a, b, sizes)):
                    continue
                u = tuple(x + y for x, y in zip(a, b))
                e = abs(vals[a] + vals[b] - vals[u] - (empty if kind == "weak" else 0))
                if best is None or e > best:
                    best, best_pair = e, (a, b)
    else:
        # A n B, A \ B, B \ A have profiles i, p, q with i + p + q <= k blockwise
        for i in profiles:
            for p in profiles:
                if any(x + y > k for x, y, k in zip(i, p, sizes)):
                    continue
                for q in profiles:
                    if any(x + y + z > k for x, y, z, k in zip(i, p, q, sizes)):
                        continue
                    a = tuple(x + y for x, y in zip(i, p))
                    b = tuple(x + z for x, z in zip(i, q))
                    u = tuple(x + y + z for x, y, z in zip(i, p, q))
                    e = abs(vals[a] + vals[b] - vals[u] - vals[i])
                    if best is None or e > best or (e == best and (a, b) < best_pair):
                        best, best_pair, meet = e, (a, b), i
    return DefectReport(best, best_pair, empty, kind, meet)


def symmetric_additivity_defect(sf: SymmetricSetFunction) -> DefectReport:
    """Additivity defect computed over profile pairs with ``a_j + b_j <= k_j``."""
    return _symmetric_scan(sf, "additive")


def symmetric_weak_modularity_defect(sf: SymmetricSetFunction) -> DefectReport:
    return _symmetric_scan(sf, "weak")


def symmetric_modularity_defect(sf: SymmetricSetFunction) -> DefectReport:
    return _symmetric_scan(sf, "modular")


def recompute_symmetric(sf: SymmetricSetFunction, report: DefectReport) -> Fraction:
    """Recompute the defect expression on a profile witness."""
    a, b = report.witness_pair
    if report.kind == "modular":
        i = report.witness_meet
        u = tuple(x + y - z for x, y, z in zip(a, b, i))
        return abs(sf.value(a) + sf.value(b) - sf.value(u) - sf.value(i))
    zero = tuple(0 for _ in a)
    u = tuple(x + y for x, y in zip(a, b))
    e = sf.value(a) + sf.value(b) - sf.value(u)
    if report.kind == "weak":
        e -= sf.value(zero)
    return abs(e)
