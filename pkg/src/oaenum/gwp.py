"""Aberration statistics, all in exact rational arithmetic.

The generalized word length pattern (A_1, ..., A_k) of a design drives the
ranking: generalized minimum aberration (GMA) sequentially minimizes it left
to right. For two-level designs the A_r come from squared J-characteristics;
for any number of levels they come from the distance distribution through
Krawtchouk polynomials. Both routes agree and are cross-checked in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .core import Design, SignedDesign, as_array, to_signed


@dataclass(frozen=True)
class Gwp:
    """Word length pattern (A_1..A_k) of a design; A_0 = 1 is implicit."""

    factors: int
    runs: int
    levels: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.factors:
            raise ValueError("need exactly k values A_1..A_k")
        if any(v < 0 for v in self.values):
            raise ValueError("word length pattern entries are non-negative")


@dataclass(frozen=True)
class DistanceDistribution:
    """B_j = (1/N) * number of ordered row pairs at Hamming distance j,
    for j = 0..k (pairs include i == i', so B_0 >= 1 and sum B_j = N)."""

    factors: int
    runs: int
    levels: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.factors + 1:
            raise ValueError("need exactly k+1 values B_0..B_k")
        if sum(self.values) != self.runs:
            raise ValueError("distance distribution must sum to N")


def j_characteristic(sd: SignedDesign, cols: tuple[int, ...]) -> int:
    """Sum over runs of the product of the +-1 entries in `cols` (0-based)."""
    if len(set(cols)) != len(cols):
        raise ValueError("column subset must not repeat columns")
    for c in cols:
        if not (0 <= c < sd.factors):
            raise ValueError("column index out of range")
    total = 0
    for row in sd.rows:
        p = 1
        for c in cols:
            p *= row[c]
        total += p
    return total


def gwp_two_level(d: Design) -> Gwp:
    """A_r = N^-2 * sum of J^2 over all column subsets of size r (s = 2)."""
    if d.levels != 2:
        raise ValueError("the J-characteristic route needs s = 2")
    signed = as_array(to_signed(d))
    n2 = d.runs * d.runs
    values = []
    for r in range(1, d.factors + 1):
        acc = 0
        for cols in itertools.combinations(range(d.factors), r):
            j = int(signed[:, cols].prod(axis=1).sum())
            acc += j * j
        values.append(Fraction(acc, n2))
    return Gwp(factors=d.factors, runs=d.runs, levels=2, values=tuple(values))


def distance_distribution(d: Design) -> DistanceDistribution:
    """Count ordered row pairs by Hamming distance, scaled by 1/N."""
    counts = [0] * (d.factors + 1)
    # Group identical rows first; replicate blocks contribute in bulk.
    seen: dict[tuple[int, ...], int] = {}
    for row in d.rows:
        seen[row] = seen.get(row, 0) + 1
    runs = list(seen.items())
    counts[0] = sum(m * m for _, m in runs)
    for a in range(len(runs)):
        ra, ma = runs[a]
        for b in range(a + 1, len(runs)):
            rb, mb = runs[b]
            dist = sum(1 for x, y in zip(ra, rb) if x != y)
            counts[dist] += 2 * ma * mb
    values = tuple(Fraction(c, d.runs) for c in counts)
    return DistanceDistribution(factors=d.factors, runs=d.runs,
                                levels=d.levels, values=values)


@lru_cache(maxsize=None)
def krawtchouk(j: int, x: int, s: int, k: int) -> int:
    """Krawtchouk polynomial value P_j(x; s, k), by the two-term recursion
    P_j(x) = P_j(x-1) - P_{j-1}(x-1) - (s-1) P_{j-1}(x) from the column
    P_j(0) = (s-1)^j C(k,j) and the row P_0(x) = 1."""
    if j < 0 or j > k or x < 0 or x > k:
        raise ValueError("need 0 <= j <= k and 0 <= x <= k")
    if j == 0:
        return 1
    if x == 0:
        return (s - 1) ** j * comb(k, j)
    return (krawtchouk(j, x - 1, s, k)
            - krawtchouk(j - 1, x - 1, s, k)
            - (s - 1) * krawtchouk(j - 1, x, s, k))


def gwp_from_distance(dd: DistanceDistribution) -> Gwp:
    """A_j = N^-1 * sum_i P_j(i) B_i for j = 1..k (any number of levels)."""
    k, s = dd.factors, dd.levels
    values = []
    for j in range(1, k + 1):
        acc = sum(krawtchouk(j, i, s, k) * dd.values[i] for i in range(k + 1))
        values.append(Fraction(acc, dd.runs))
    return Gwp(factors=k, runs=dd.runs, levels=s, values=tuple(values))


def distance_from_gwp(g: Gwp) -> DistanceDistribution:
    """B_j = N * s^-k * sum_i P_j(i) A_i with A_0 = 1; inverse of
    gwp_from_distance."""
    k, s = g.factors, g.levels
    a = (Fraction(1),) + g.values
    scale = Fraction(g.runs, s ** k)
    values = []
    for j in range(k + 1):
        acc = sum(krawtchouk(j, i, s, k) * a[i] for i in range(k + 1))
        values.append(scale * acc)
    return DistanceDistribution(factors=k, runs=g.runs, levels=s,
                                values=tuple(values))


def strength_from_gwp(g: Gwp) -> int:
    """Largest t with A_1 = ... = A_t = 0 (k if the whole pattern is zero)."""
    t = 0
    for v in g.values:
        if v != 0:
            break
        t += 1
    return t


def gma_compare(g1: Gwp, g2: Gwp) -> int:
    """Lexicographic comparison of word length patterns: -1, 0 or 1."""
    if g1.factors != g2.factors:
        raise ValueError("patterns must have the same number of factors")
    if g1.values < g2.values:
        return -1
    if g1.values > g2.values:
        return 1
    return 0


def select_gma(gwps: list[Gwp]) -> list[int]:
    """Indices of all patterns equal to the lexicographic minimum."""
    if not gwps:
        return []
    best = min(g.values for g in gwps)
    return [i for i, g in enumerate(gwps) if g.values == best]


def select_weak_gma(gwps: list[Gwp]) -> list[int]:
    """Indices matching the GMA pattern up to its first non-zero entry.

    Weak GMA only constrains the leading entries: everything before the
    minimum pattern's first non-zero value must be zero and that value must
    match; later entries are free.
    """
    if not gwps:
        return []
    best = min(g.values for g in gwps)
    cut = 0
    for i, v in enumerate(best):
        if v != 0:
            cut = i + 1
            break
    else:
        cut = len(best)
    prefix = best[:cut]
    return [i for i, g in enumerate(gwps) if g.values[:cut] == prefix]


def format_fixed(value: Fraction, places: int) -> str:
    """Fixed-point decimal rendering with round-half-to-even."""
    q = round(value, places)  # Fraction.__round__ is half-to-even
    scaled = q * 10 ** places
    assert scaled.denominator == 1
    n = scaled.numerator
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10 ** places)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"
