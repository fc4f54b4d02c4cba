"""Ground sets, block structures and the two set-function representations.

Subsets of a ground set ``{0, ..., m-1}`` are bitmasks (bit ``i`` set means
element ``i`` is in the subset).  All values are exact :class:`Fraction`.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

Rational = Fraction
Profile = Tuple[int, ...]

HARD_MAX_M = 24
ENV_MAX_M = "KALTON_GAP_MAX_M"


class KaltonGapError(Exception):
    """Base class for errors raised by this package."""


class GroundSetTooLarge(KaltonGapError, ValueError):
    pass


def dense_cap() -> int:
    """Largest m allowed for dense (2^m table) operations.

    The environment variable ``KALTON_GAP_MAX_M`` may lower the cap, never
    raise it.
    """
    raw = os.environ.get(ENV_MAX_M)
    if not raw:
        return HARD_MAX_M
    try:
        value = int(raw)
    except ValueError:
        return HARD_MAX_M
    return max(1, min(HARD_MAX_M, value))


def require_dense(m: int, limit: Optional[int] = None, what: str = "dense table") -> None:
    cap = dense_cap() if limit is None else min(limit, dense_cap())
    if m > cap:
        raise GroundSetTooLarge(f"{what} needs m <= {cap}, got m = {m}")


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 4) -> str:
    return f"{float(q):.{digits}f}"


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for i in elements:
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class GroundSet:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("ground set needs at least one element")

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    @property
    def size(self) -> int:
        """Number of subsets."""
        return 1 << self.m


@dataclass(frozen=True)
class BlockStructure:
    """Partition of ``{0..m-1}`` into consecutive blocks of the given sizes."""

    block_sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.block_sizes)
        if not sizes:
            raise ValueError("need at least one block")
        if any(k < 1 for k in sizes):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def equal(cls, k: int, n: int) -> "BlockStructure":
        return cls((k,) * n)

    @property
    def n(self) -> int:
        return len(self.block_sizes)

    @property
    def m(self) -> int:
        return sum(self.block_sizes)

    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.m)

    @property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self.block_sizes[:-1]))

    @property
    def block_masks(self) -> Tuple[int, ...]:
        return tuple(((1 << k) - 1) << off for k, off in zip(self.block_sizes, self.offsets))

    def block_of(self, element: int) -> int:
        for j, (off, k) in enumerate(zip(self.offsets, self.block_sizes)):
            if off <= element < off + k:
                return j
        raise IndexError(element)

    @property
    def profile_count(self) -> int:
        return math.prod(k + 1 for k in self.block_sizes)

    def profiles(self) -> Iterator[Profile]:
        """All profiles in lexicographic order."""
        return itertools.product(*(range(k + 1) for k in self.block_sizes))

    def is_profile(self, c: Sequence[int]) -> bool:
        return len(c) == self.n and all(0 <= cj <= k for cj, k in zip(c, self.block_sizes))

    def canonical_subset(self, c: Sequence[int]) -> int:
        """The subset taking the first ``c_j`` elements of each block."""
        mask = 0
        for cj, off in zip(c, self.offsets):
            mask |= ((1 << cj) - 1) << off
        return mask

    def orbit_size(self, c: Sequence[int]) -> int:
        return math.prod(math.comb(k, cj) for k, cj in zip(self.block_sizes, c))


def profile_of(blocks: BlockStructure, subset: int) -> Profile:
    if subset >> blocks.m:
        raise ValueError("subset is not contained in the ground set")
    return tuple(popcount(subset & bm) for bm in blocks.block_masks)


@dataclass(frozen=True, eq=False)
class SetFunction:
    """Dense table of exact values on all ``2^m`` subsets, indexed by bitmask."""

    ground: GroundSet
    values: Tuple[Fraction, ...]
    _scaled: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(as_rational(v) for v in self.values)
        if len(vals) != self.ground.size:
            raise ValueError(f"expected {self.ground.size} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, m: int, values: Sequence) -> "SetFunction":
        require_dense(m)
        return cls(GroundSet(m), tuple(values))

    @classmethod
    def from_callable(cls, m: int, fn: Callable[[int], object]) -> "SetFunction":
        require_dense(m)
        return cls(GroundSet(m), tuple(as_rational(fn(a)) for a in range(1 << m)))

    @classmethod
    def zero(cls, m: int) -> "SetFunction":
        return cls.from_callable(m, lambda a: 0)

    @property
    def m(self) -> int:
        return self.ground.m

    def __call__(self, subset: int) -> Fraction:
        return self.values[subset]

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.ground == other.ground and self.values == other.values

    def __hash__(self):
        return hash((self.ground, self.values))

    def __sub__(self, other: "SetFunction") -> "SetFunction":
        return SetFunction(self.ground, tuple(a - b for a, b in zip(self.values, other.values)))

    def __add__(self, other: "SetFunction") -> "SetFunction":
        return SetFunction(self.ground, tuple(a + b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "SetFunction":
        return SetFunction(self.ground, tuple(-a for a in self.values))

    def shifted(self, a) -> "SetFunction":
        """``f + a`` on every subset, including the empty set."""
        a = as_rational(a)
        return SetFunction(self.ground, tuple(v + a for v in self.values))

    def scaled(self) -> Tuple[int, Tuple[int, ...]]:
        """``(L, ints)`` with ``values[A] == ints[A] / L`` and L the lcm of denominators."""
        if not self._scaled:
            lcm = 1
            for v in self.values:
                lcm = math.lcm(lcm, v.denominator)
            ints = tuple(v.numerator * (lcm // v.denominator) for v in self.values)
            self._scaled.append((lcm, ints))
        return self._scaled[0]


@dataclass(frozen=True)
class Measure:
    """Finitely-additive signed measure given by its atom weights."""

    ground: GroundSet
    atom_weights: Tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(as_rational(x) for x in self.atom_weights)
        if len(w) != self.ground.m:
            raise ValueError(f"expected {self.ground.m} atom weights, got {len(w)}")
        object.__setattr__(self, "atom_weights", w)

    @classmethod
    def from_weights(cls, weights: Sequence) -> "Measure":
        return cls(GroundSet(len(weights)), tuple(weights))

    def __call__(self, subset: int) -> Fraction:
        return sum((self.atom_weights[i] for i in bits(subset)), Fraction(0))

    def table(self) -> SetFunction:
        """Evaluation on every subset, built by adding one atom at a time."""
        m = self.ground.m
        require_dense(m)
        vals = [Fraction(0)] * (1 << m)
        for i, w in enumerate(self.atom_weights):
            lo = 1 << i
            for a in range(lo):
                vals[lo | a] = vals[a] + w
        return SetFunction(self.ground, tuple(vals))

    def block_averaged(self, blocks: BlockStructure) -> "Measure":
        """Replace each atom weight by the mean over its block."""
        out = []
        for off, k in zip(blocks.offsets, blocks.block_sizes):
            mean = sum(self.atom_weights[off:off + k], Fraction(0)) / k
            out.extend([mean] * k)
        return Measure(self.ground, tuple(out))


def block_constant_measure(blocks: BlockStructure, per_atom: Sequence) -> Measure:
    """Measure whose atoms in block ``j`` all weigh ``per_atom[j]``."""
    weights = []
    for w, k in zip(per_atom, blocks.block_sizes):
        weights.extend([as_rational(w)] * k)
    return Measure(blocks.ground, tuple(weights))


@dataclass(frozen=True, eq=False)
class SymmetricSetFunction:
    """Block-invariant set function given by its values on profiles.

    ``rule`` names where the values come from: ``"table"`` (explicit
    ``table``), ``"fkn"`` (the three-valued 0/1/3 family) or ``"matrix"``
    (two-block 3x3 class matrix).  ``params`` carries whatever the rule needs.
    """

    blocks: BlockStructure
    rule: str = "table"
    table: Optional[Mapping[Profile, Fraction]] = None
    params: tuple = ()
    _fn: Optional[Callable[[Profile], Fraction]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.rule == "table":
            if self.table is None:
                raise ValueError("table rule needs a table")
            tab: Dict[Profile, Fraction] = {}
            for c, v in self.table.items():
                c = tuple(int(x) for x in c)
                if not self.blocks.is_profile(c):
                    raise ValueError(f"{c} is not a profile of {self.blocks.block_sizes}")
                tab[c] = as_rational(v)
            missing = self.blocks.profile_count - len(tab)
            if missing:
                raise ValueError(f"profile table is missing {missing} entries")
            object.__setattr__(self, "table", tab)
        elif self._fn is None:
            raise ValueError(f"rule {self.rule!r} needs a value function")

    @classmethod
    def from_table(cls, blocks: BlockStructure, table: Mapping) -> "SymmetricSetFunction":
        return cls(blocks, "table", dict(table))

    @classmethod
    def from_rule(cls, blocks: BlockStructure, rule: str, fn: Callable[[Profile], object],
                  params: tuple = ()) -> "SymmetricSetFunction":
        return cls(blocks, rule, None, params, lambda c: as_rational(fn(c)))

    def value(self, c: Sequence[int]) -> Fraction:
        c = tuple(c)
        if self.table is not None:
            return self.table[c]
        return self._fn(c)

    __call__ = value

    def tabulate(self, budget: int = 10 ** 7) -> "SymmetricSetFunction":
        if self.blocks.profile_count > budget:
            raise ValueError("profile space exceeds the enumeration budget")
        return SymmetricSetFunction.from_table(
            self.blocks, {c: self.value(c) for c in self.blocks.profiles()})

    def __eq__(self, other):
        if not isinstance(other, SymmetricSetFunction):
            return NotImplemented
        if self.blocks != other.blocks:
            return False
        return all(self.value(c) == other.value(c) for c in self.blocks.profiles())

    __hash__ = None


def expand(sf: SymmetricSetFunction) -> SetFunction:
    """Dense table with ``f(A) = sf.value(profile_of(A))``."""
    blocks = sf.blocks
    require_dense(blocks.m, what="dense expansion")
    cache: Dict[Profile, Fraction] = {}
    bms = blocks.block_masks
    vals = []
    for a in range(1 << blocks.m):
        c = tuple(popcount(a & bm) for bm in bms)
        v = cache.get(c)
        if v is None:
            v = cache[c] = sf.value(c)
        vals.append(v)
    return SetFunction(blocks.ground, tuple(vals))


def symmetrize(f: SetFunction, blocks: BlockStructure) -> SymmetricSetFunction:
    """Average ``f`` over each orbit of the block-preserving permutations."""
    if blocks.m != f.m:
        raise ValueError("block structure does not match the ground set")
    sums: Dict[Profile, Fraction] = {}
    bms = blocks.block_masks
    for a, v in enumerate(f.values):
        c = tuple(popcount(a & bm) for bm in bms)
        sums[c] = sums.get(c, Fraction(0)) + v
    return SymmetricSetFunction.from_table(
        blocks, {c: s / blocks.orbit_size(c) for c, s in sums.items()})


def is_block_symmetric(f: SetFunction, blocks: BlockStructure) -> bool:
    seen: Dict[Profile, Fraction] = {}
    bms = blocks.block_masks
    for a, v in enumerate(f.values):
        c = tuple(popcount(a & bm) for bm in bms)
        if seen.setdefault(c, v) != v:
            return False
    return True
