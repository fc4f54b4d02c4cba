"""Exact distance from a set function to the space of finitely-additive measures.

``chebyshev_distance`` works on dense tables; ``symmetric_distance`` works on
block profiles (a block-constant optimal measure always exists, so the two
agree).  Both return a :class:`DistanceCertificate` carrying the optimal
measure and dual weights that prove optimality in exact arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (BlockStructure, KaltonGapError, Measure, Profile, SetFunction,
                   SymmetricSetFunction, block_constant_measure, expand, require_dense)
from .family import FamilyParams, fkn_value
from .simplex import ColumnSpace, EpigraphSimplex, IterationLimitError, pool_space

DEFAULT_PROFILE_BUDGET = 10 ** 7
_INT64_SAFE = 1 << 62

__all__ = [
    "SolveOptions", "DistanceCertificate", "Violation", "ProfileSpaceTooLarge",
    "chebyshev_distance", "symmetric_distance", "fkn_separation_oracle",
    "verify_certificate", "audit_certificate", "IterationLimitError",
]


class ProfileSpaceTooLarge(KaltonGapError, ValueError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    """``strategy`` is ``"dense"`` (price every constraint, Bland order) or
    ``"cg"`` (constraint generation from a seed pool).  ``seed`` is
    ``"default"`` or ``"minimal"``.  ``iteration_cap`` bounds both simplex
    pivots and generation rounds.
    """

    strategy: str = "cg"
    seed: str = "default"
    iteration_cap: int = 100_000
    profile_budget: int = DEFAULT_PROFILE_BUDGET

    def __post_init__(self):
        if self.strategy not in ("dense", "cg"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.seed not in ("default", "minimal"):
            raise ValueError(f"unknown seed {self.seed!r}")
        if self.iteration_cap < 1:
            raise ValueError("iteration_cap must be >= 1")


@dataclass(frozen=True)
class Violation:
    item: object  # bitmask or profile
    sign: int
    amount: Fraction


DualEntry = Tuple[object, int, Fraction]


@dataclass(frozen=True)
class DistanceCertificate:
    """Optimal value with a primal minimizer and a dual proof.

    Entries of ``active_sets`` and ``dual_weights`` are bitmasks for dense
    certificates and profiles when ``blocks`` is set.  For profile
    certificates the balance condition is taken per block, which is the
    per-atom condition after spreading each weight evenly over its orbit.
    """

    optimum: Fraction
    measure: Measure
    active_sets: Tuple
    dual_weights: Tuple[DualEntry, ...]
    blocks: Optional[BlockStructure] = None
    stats: Dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def symmetric(self) -> bool:
        return self.blocks is not None

    def block_weights(self) -> Optional[Tuple[Fraction, ...]]:
        """Per-atom weight of each block, or None if the measure is not block-constant."""
        out = []
        w = self.measure.atom_weights
        for off, k in zip(self.blocks.offsets, self.blocks.block_sizes):
            vals = set(w[off:off + k])
            if len(vals) != 1:
                return None
            out.append(w[off])
        return tuple(out)


# --- enumerated constraint spaces ---

def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _as_array(ints: List[int], bound: int):
    return np.asarray(ints, dtype=np.int64 if bound < _INT64_SAFE else object)


class _Space:
    """Items in a fixed order; subclasses supply integer residual tables."""

    items_count: int
    dim: int

    def item(self, idx: int):
        raise NotImplementedError

    def index(self, item) -> int:
        raise NotImplementedError

    def features(self, item) -> Tuple[int, ...]:
        raise NotImplementedError

    def target(self, item) -> Fraction:
        raise NotImplementedError

    def residuals(self, w: Sequence[Fraction], extra: Sequence[Fraction] = ()):
        """``(D, r)`` with ``r[i] == D * (target - w . features)`` for item ``i``.

        ``D`` is also a multiple of every denominator in ``extra``.
        """
        raise NotImplementedError

    def rank(self, key) -> int:
        item, s = key
        return 2 * self.index(item) + (s < 0)

    def first_entering(self, t: Fraction, w: Sequence[Fraction]):
        scale, r = self.residuals(w, (t,))
        bound = int(t * scale)
        hit = np.flatnonzero((r > bound) | (r < -bound))
        if hit.size == 0:
            return None
        i = int(hit[0])
        return (self.item(i), 1 if r[i] > bound else -1)

    def max_residual(self, w: Sequence[Fraction]) -> Tuple[Fraction, np.ndarray, int, np.ndarray]:
        scale, r = self.residuals(w)
        mags = np.abs(r)
        top = int(mags.max())
        return Fraction(top, scale), r, top, mags

    def most_violated(self, w: Sequence[Fraction], t: Fraction) -> Optional[Violation]:
        value, r, top, mags = self.max_residual(w)
        if value <= t:
            return None
        i = int(np.argmax(mags))
        return Violation(self.item(i), 1 if r[i] > 0 else -1, value)

    def active(self, w: Sequence[Fraction], optimum: Fraction) -> Tuple:
        value, r, top, mags = self.max_residual(w)
        if value != optimum:
            return ()
        return tuple(self.item(int(i)) for i in np.flatnonzero(mags == top))


class _SetSpace(_Space):
    def __init__(self, f: SetFunction):
        self.f = f
        self.dim = f.m
        self.items_count = f.ground.size
        self.lcm, ints = f.scaled()
        self.ints = ints
        self.bound = max(map(abs, ints))

    def item(self, idx):
        return idx

    def index(self, item):
        return item

    def features(self, mask):
        return tuple((mask >> i) & 1 for i in range(self.dim))

    def target(self, mask):
        return self.f.values[mask]

    def residuals(self, w, extra=()):
        den = _lcm_den(list(w) + list(extra))
        scale = math.lcm(den, self.lcm)
        wi = [int(x * scale) for x in w]
        fmul = scale // self.lcm
        bound = self.bound * fmul + sum(map(abs, wi))
        tab = _as_array([0] * self.items_count, bound)
        for i, x in enumerate(wi):
            lo = 1 << i
            tab[lo:2 * lo] = tab[:lo] + x
        f = _as_array(list(self.ints), bound)
        return scale, f * fmul - tab


class _ProfileSpace(_Space):
    def __init__(self, sf: SymmetricSetFunction):
        self.sf = sf
        self.blocks = sf.blocks
        self.dim = sf.blocks.n
        self.profiles = list(sf.blocks.profiles())
        self.items_count = len(self.profiles)
        self._index = {c: i for i, c in enumerate(self.profiles)}
        vals = [sf.value(c) for c in self.profiles]
        self.vals = vals
        self.lcm = _lcm_den(vals)
        self.ints = [v.numerator * (self.lcm // v.denominator) for v in vals]
        self.bound = max(map(abs, self.ints))
        self.counts = np.asarray(self.profiles, dtype=np.int64).reshape(self.items_count, self.dim)

    def item(self, idx):
        return self.profiles[idx]

    def index(self, item):
        return self._index[tuple(item)]

    def features(self, c):
        return tuple(c)

    def target(self, c):
        return self.vals[self._index[tuple(c)]]

    def residuals(self, w, extra=()):
        den = _lcm_den(list(w) + list(extra))
        scale = math.lcm(den, self.lcm)
        wi = [int(x * scale) for x in w]
        fmul = scale // self.lcm
        bound = self.bound * fmul + sum(abs(x) * k for x, k in zip(wi, self.blocks.block_sizes))
        if bound < _INT64_SAFE:
            fit = self.counts @ np.asarray(wi, dtype=np.int64)
            f = np.asarray(self.ints, dtype=np.int64) * fmul
        else:
            fit = self.counts.astype(object) @ np.asarray(wi, dtype=object)
            f = np.asarray(self.ints, dtype=object) * fmul
        return scale, f - fit


# --- separation oracle for the 0/1/3 family ---

def _extreme(y: Fraction, lo: int, hi: int, want_min: bool) -> int:
    """Count in [lo, hi] minimizing (or maximizing) count * y; ties prefer lo."""
    if want_min:
        return hi if y < 0 else lo
    return hi if y > 0 else lo


def fkn_separation_oracle(params: FamilyParams, y: Sequence[Fraction], t: Fraction) -> Optional[Violation]:
    """Most violated profile constraint of the 0/1/3 family, or None.

    Works class by class in O(n^2): the value-3 class (all blocks hit, one
    forced full) and the two parts of the value-1 class (some block empty;
    every block proper) are each optimized blockwise for the smallest and
    largest fitted mass.
    """
    k, n = params.k, params.n
    if len(y) != n:
        raise ValueError(f"expected {n} block weights, got {len(y)}")
    y = [Fraction(v) for v in y]
    cands: List[Tuple[Fraction, Profile, int]] = []

    def add(value: int, c: List[int]):
        mass = sum((cj * yj for cj, yj in zip(c, y)), Fraction(0))
        resid = value - mass
        cands.append((abs(resid), tuple(c), 1 if resid >= 0 else -1))

    for want_min in (True, False):
        for j0 in range(n):  # value 3: block j0 full, others in [1, k]
            c = [k if j == j0 else _extreme(y[j], 1, k, want_min) for j in range(n)]
            add(3, c)
        for j0 in range(n):  # value 1: block j0 empty, others in [0, k], not all empty
            c = [0 if j == j0 else _extreme(y[j], 0, k, want_min) for j in range(n)]
            if not any(c):
                others = [j for j in range(n) if j != j0]
                sgn = 1 if want_min else -1
                c[min(others, key=lambda j: (sgn * y[j], j))] = 1
            add(1, c)
        c = [_extreme(y[j], 1, k - 1, want_min) for j in range(n)]  # value 1: all proper
        add(1, c)
    add(0, [0] * n)
    best = max(cands, key=lambda x: x[0])
    if best[0] <= t:
        return None
    assert fkn_value(best[1], k) in (0, 1, 3)
    return Violation(best[1], best[2], best[0])


Oracle = Callable[[Sequence[Fraction], Fraction], Optional[Violation]]


def default_oracle(sf: SymmetricSetFunction) -> Optional[Oracle]:
    if sf.rule == "fkn":
        k, n = sf.params
        params = FamilyParams(k, n)
        return lambda y, t: fkn_separation_oracle(params, y, t)
    return None


# --- solving ---

def _seed_sets(m: int, blocks: Optional[BlockStructure], seed: str) -> List[int]:
    singles = [1 << i for i in range(m)]
    if seed == "minimal":
        return [0] + singles
    out = [0] + singles + [(1 << m) - 1]
    if blocks is not None:
        out += list(blocks.block_masks)
    return list(dict.fromkeys(out))


def _seed_profiles(blocks: BlockStructure, seed: str) -> List[Profile]:
    n, sizes = blocks.n, blocks.block_sizes
    zero = (0,) * n
    units = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    if seed == "minimal":
        return [zero] + units
    full = tuple(sizes)
    lead = [tuple(sizes[i] if i == j else 1 for i in range(n)) for j in range(n)]
    return list(dict.fromkeys([zero] + units + [full] + lead))


def _run(dim: int, basis_items: List, seeds: List, features, target,
         opts: SolveOptions, full_space: Optional[_Space], separate) -> Tuple[EpigraphSimplex, int]:
    basis = [(item, 1) for item in basis_items]
    lp = EpigraphSimplex(dim, basis, features, target, pivot_cap=opts.iteration_cap)
    if opts.strategy == "dense":
        if full_space is None:
            raise ProfileSpaceTooLarge("dense strategy needs an enumerable constraint space")
        space = ColumnSpace(features, target, full_space.rank, full_space.first_entering)
        lp.optimize(space)
        return lp, 0
    pool = list(dict.fromkeys(basis + [(item, s) for item in seeds for s in (1, -1)]))
    rounds = 0
    while True:
        lp.optimize(pool_space(pool, features, target))
        pi = lp.multipliers()
        hit = separate(pi[1:], pi[0])
        if hit is None:
            return lp, rounds
        key = (hit.item, hit.sign)
        if key in pool:  # pragma: no cover - master optimum prices every pool column
            raise KaltonGapError(f"separation returned pooled column {key!r}")
        pool.append(key)
        rounds += 1
        if rounds > opts.iteration_cap:
            raise IterationLimitError(f"constraint generation exceeded {opts.iteration_cap} rounds")


def _dual_entries(lp: EpigraphSimplex) -> Tuple[DualEntry, ...]:
    return tuple((item, s, x) for (item, s), x in zip(lp.basis, lp.values()))


def chebyshev_distance(f: SetFunction, opts: SolveOptions = SolveOptions(),
                       blocks: Optional[BlockStructure] = None) -> DistanceCertificate:
    """min over measures mu of max_A |f(A) - mu(A)|, solved exactly.

    ``blocks`` only adds the block masks to the constraint-generation seed.
    """
    require_dense(f.m, what="distance solve")
    m = f.m
    space = _SetSpace(f)
    basis_items = [0] + [1 << i for i in range(m)]
    lp, rounds = _run(m, basis_items, _seed_sets(m, blocks, opts.seed), space.features,
                      space.target, opts, space, space.most_violated)
    pi = lp.multipliers()
    optimum, w = pi[0], pi[1:]
    return DistanceCertificate(
        optimum=optimum,
        measure=Measure(f.ground, tuple(w)),
        active_sets=space.active(w, optimum),
        dual_weights=_dual_entries(lp),
        stats={"pivots": lp.pivots, "rounds": rounds},
    )


def symmetric_distance(sf: SymmetricSetFunction, opts: SolveOptions = SolveOptions(),
                       oracle: Optional[Oracle] = None) -> DistanceCertificate:
    """Distance over block-constant measures, i.e. over profile constraints.

    Profiles are enumerated when their number is within
    ``opts.profile_budget``; otherwise a separation oracle is required (the
    0/1/3 family ships one).
    """
    blocks = sf.blocks
    n = blocks.n
    space: Optional[_Space] = None
    if blocks.profile_count <= opts.profile_budget:
        space = _ProfileSpace(sf)
    if oracle is None and space is not None:
        separate = space.most_violated
    else:
        separate = oracle or default_oracle(sf)
        if separate is None:
            raise ProfileSpaceTooLarge(
                f"{blocks.profile_count} profiles exceed the budget {opts.profile_budget} and no oracle is available")
    features = tuple
    target = sf.value
    zero = (0,) * n
    basis_items = [zero] + [tuple(int(i == j) for i in range(n)) for j in range(n)]
    lp, rounds = _run(n, basis_items, _seed_profiles(blocks, opts.seed), features, target,
                      opts, space, separate)
    pi = lp.multipliers()
    optimum, y = pi[0], pi[1:]
    duals = _dual_entries(lp)
    if space is not None:
        active = space.active(y, optimum)
    else:
        active = tuple(dict.fromkeys(item for item, s, _ in duals))
    return DistanceCertificate(
        optimum=optimum,
        measure=block_constant_measure(blocks, y),
        active_sets=active,
        dual_weights=duals,
        blocks=blocks,
        stats={"pivots": lp.pivots, "rounds": rounds},
    )


# --- certificate audit ---

Target = Union[SetFunction, SymmetricSetFunction]


@dataclass
class CertificateAudit:
    checks: List[Tuple[str, bool]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    @property
    def first_failure(self) -> Optional[str]:
        return next((name for name, passed in self.checks if not passed), None)

    def __bool__(self):
        return self.ok


def audit_certificate(target: Target, cert: DistanceCertificate,
                      oracle: Optional[Oracle] = None,
                      profile_budget: int = DEFAULT_PROFILE_BUDGET) -> CertificateAudit:
    """Check every certificate condition in exact arithmetic.

    Checks, in order: non-negative weights, weights summing to one, balance
    (per atom, or per block for profile certificates), dual objective equal
    to the optimum, tightness of every dual entry, active sets attaining the
    optimum, and no constraint exceeding it.
    """
    checks: List[Tuple[str, bool]] = []
    opt = cert.optimum
    duals = cert.dual_weights

    if cert.symmetric:
        blocks = cert.blocks
        if isinstance(target, SetFunction):
            raise TypeError("profile certificates need a symmetric function")
        if target.blocks != blocks:
            return CertificateAudit([("same_ground_set", False)])
        y = cert.block_weights()
        checks.append(("block_constant_measure", y is not None))
        if y is None:
            return CertificateAudit(checks)
        value = target.value
        feats = lambda c: tuple(c)  # noqa: E731
        dim = blocks.n
        valid = all(blocks.is_profile(c) for c, _, _ in duals) and all(
            blocks.is_profile(c) for c in cert.active_sets)
    else:
        if isinstance(target, SymmetricSetFunction):
            target = expand(target)
        if target.ground != cert.measure.ground:
            return CertificateAudit([("same_ground_set", False)])
        y = cert.measure.atom_weights
        value = target.values.__getitem__
        m = target.m
        feats = lambda a: tuple((a >> i) & 1 for i in range(m))  # noqa: E731
        dim = m
        valid = all(0 <= a < target.ground.size for a, _, _ in duals) and all(
            0 <= a < target.ground.size for a in cert.active_sets)
    checks.append(("entries_in_ground_set", valid))
    if not valid:
        return CertificateAudit(checks)

    def resid(item):
        return value(item) - sum((yi * x for yi, x in zip(y, feats(item)) if x), Fraction(0))

    checks.append(("weights_nonnegative", all(w >= 0 for _, _, w in duals)))
    checks.append(("weights_sum_to_one", sum((w for _, _, w in duals), Fraction(0)) == 1))
    balance = [Fraction(0)] * dim
    for item, s, w in duals:
        for i, x in enumerate(feats(item)):
            if x:
                balance[i] += s * w * x
    checks.append(("balance", all(b == 0 for b in balance)))
    dual_obj = sum((s * w * value(item) for item, s, w in duals), Fraction(0))
    checks.append(("dual_objective", dual_obj == opt))
    checks.append(("dual_entries_tight", all(s * resid(item) == opt for item, s, _ in duals)))
    checks.append(("active_sets_attain", bool(cert.active_sets)
                   and all(abs(resid(a)) == opt for a in cert.active_sets)))

    if cert.symmetric:
        if target.blocks.profile_count <= profile_budget:
            worst, *_ = _ProfileSpace(target).max_residual(y)
            feasible = worst == opt
        else:
            orc = oracle or default_oracle(target)
            feasible = orc is not None and orc(y, opt) is None
    else:
        worst, *_ = _SetSpace(target).max_residual(y)
        feasible = worst == opt
    checks.append(("primal_feasible", feasible))
    return CertificateAudit(checks)


def verify_certificate(target: Target, cert: DistanceCertificate,
                       oracle: Optional[Oracle] = None) -> bool:
    return audit_certificate(target, cert, oracle).ok
