"""Fixed-level designs and the basic operations on them.

A design is an N x k matrix over {0, ..., s-1}: N runs, k factors, s levels.
An orthogonal array of strength t is a design in which every t-column
projection contains each of the s^t level combinations equally often.
Everything here is exact integer arithmetic; designs are immutable and
hashable so they can be shared freely across workers and used as dict keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

Row = tuple[int, ...]


@dataclass(frozen=True)
class Design:
    """An N x k matrix over {0..s-1}, immutable after construction."""

    runs: int
    factors: int
    levels: int
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        if self.levels < 2:
            raise ValueError("levels must be at least 2")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if self.factors < 0:
            raise ValueError("factors must be non-negative")
        if len(self.rows) != self.runs:
            raise ValueError("row count does not match runs")
        for row in self.rows:
            if len(row) != self.factors:
                raise ValueError("row length does not match factors")
            for v in row:
                if not (0 <= v < self.levels):
                    raise ValueError(f"entry {v} outside 0..{self.levels - 1}")


def design(rows, s: int) -> Design:
    """Build a Design from any iterable of rows."""
    rows = tuple(tuple(int(v) for v in row) for row in rows)
    if not rows:
        raise ValueError("a design needs at least one run")
    return Design(runs=len(rows), factors=len(rows[0]), levels=s, rows=rows)


def as_array(d: Design) -> np.ndarray:
    """The entry matrix as an (N, k) int array."""
    return np.array(d.rows, dtype=np.int64).reshape(d.runs, d.factors)


@dataclass(frozen=True)
class SignedDesign:
    """Two-level design in the +-1 encoding (level 0 -> +1, level 1 -> -1)."""

    runs: int
    factors: int
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.runs:
            raise ValueError("row count does not match runs")
        for row in self.rows:
            if len(row) != self.factors:
                raise ValueError("row length does not match factors")
            for v in row:
                if v not in (-1, 1):
                    raise ValueError("signed entries must be +-1")


@dataclass(frozen=True)
class IndicatorMatrix:
    """Binary N x (s-1)k expansion: one indicator block of s-1 columns per
    factor, column r of block j set iff the entry is level r (levels 0..s-2;
    level s-1 is the all-zero pattern)."""

    runs: int
    factors: int
    levels: int
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        width = (self.levels - 1) * self.factors
        for row in self.rows:
            if len(row) != width:
                raise ValueError("indicator row width must be (s-1)k")
            for v in row:
                if v not in (0, 1):
                    raise ValueError("indicator entries must be binary")


@dataclass(frozen=True)
class RunProfile:
    """Distinct runs of a lex-sorted design.

    h distinct runs; multiplicities[l] is how often run l appears,
    first_rows[l] the 1-based row index of its first occurrence, and
    cells[l] its 1-based cell index in the s^k full factorial.
    """

    h: int
    multiplicities: tuple[int, ...]
    first_rows: tuple[int, ...]
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.multiplicities) == len(self.first_rows)
                == len(self.cells) == self.h):
            raise ValueError("profile fields must all have length h")


def to_signed(d: Design) -> SignedDesign:
    """Map a two-level design to +-1 entries via level -> 1 - 2*level."""
    if d.levels != 2:
        raise ValueError("signed encoding is defined for s = 2 only")
    rows = tuple(tuple(1 - 2 * v for v in row) for row in d.rows)
    return SignedDesign(runs=d.runs, factors=d.factors, rows=rows)


def from_signed(sd: SignedDesign) -> Design:
    """Inverse of to_signed."""
    rows = tuple(tuple((1 - v) // 2 for v in row) for row in sd.rows)
    return Design(runs=sd.runs, factors=sd.factors, levels=2, rows=rows)


def expand_indicator(d: Design) -> IndicatorMatrix:
    """Indicator expansion: block j, column r is 1 iff entry (i, j) == r.

    Levels 0..s-2 each get a column; level s-1 is encoded by an all-zero
    block row, so each block has at most one set bit per run.
    """
    s = d.levels
    out = []
    for row in d.rows:
        exp = []
        for v in row:
            exp.extend(1 if v == r else 0 for r in range(s - 1))
        out.append(tuple(exp))
    return IndicatorMatrix(runs=d.runs, factors=d.factors, levels=s,
                           rows=tuple(out))


def corresponding_design(im: IndicatorMatrix) -> Design:
    """Recover the design a binary matrix encodes, block by block.

    Each factor block of s-1 columns must be one-hot or all zero per run
    (all zero meaning level s-1); anything else is rejected.
    """
    s = im.levels
    w = s - 1
    rows = []
    for row in im.rows:
        vals = []
        for j in range(im.factors):
            block = row[j * w:(j + 1) * w]
            ones = [r for r, b in enumerate(block) if b]
            if len(ones) > 1:
                raise ValueError("indicator block has more than one set bit")
            vals.append(ones[0] if ones else s - 1)
        rows.append(tuple(vals))
    return Design(runs=im.runs, factors=im.factors, levels=s, rows=tuple(rows))


def verify_strength(d: Design, t: int) -> bool:
    """True iff every t-column projection hits all s^t level combinations
    equally often. t = 0 is vacuously true."""
    if t < 0 or t > d.factors:
        raise ValueError("strength must satisfy 0 <= t <= k")
    if t == 0:
        return True
    if d.runs % (d.levels ** t) != 0:
        return False
    lam = d.runs // (d.levels ** t)
    arr = as_array(d)
    s = d.levels
    weights = s ** np.arange(t - 1, -1, -1)
    for cols in itertools.combinations(range(d.factors), t):
        codes = arr[:, cols] @ weights
        counts = np.bincount(codes, minlength=s ** t)
        if not np.all(counts == lam):
            return False
    return True


def lex_sort_rows(d: Design) -> Design:
    """The same multiset of runs in lexicographic row order."""
    return Design(runs=d.runs, factors=d.factors, levels=d.levels,
                  rows=tuple(sorted(d.rows)))


def cell_of_row(row: Row, s: int) -> int:
    """1-based index of a run in the lexicographic s^k full factorial."""
    idx = 0
    for v in row:
        idx = idx * s + v
    return idx + 1


def run_profile(d: Design) -> RunProfile:
    """Group the lex-sorted runs of d and report multiplicities, first-row
    positions (1-based) and full-factorial cell indices (1-based)."""
    rows = sorted(d.rows)
    mult, firsts, cells = [], [], []
    pos = 0
    for row, grp in itertools.groupby(rows):
        n = len(list(grp))
        mult.append(n)
        firsts.append(pos + 1)
        cells.append(cell_of_row(row, d.levels))
        pos += n
    return RunProfile(h=len(mult), multiplicities=tuple(mult),
                      first_rows=tuple(firsts), cells=tuple(cells))

def dump_oad(d: Design) -> str:
    """Text form: header "N k s", then one run per line."""
    lines = [f"{d.runs} {d.factors} {d.levels}"]
    for row in d.rows:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_oad(text: str) -> Design:
    """Inverse of dump_oad; rejects dimension mismatches and bad levels."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty design text")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError("header must be 'N k s'")
    n, k, s = (int(v) for v in header)
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} runs, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        vals = tuple(int(v) for v in ln.split())
        if len(vals) != k:
            raise ValueError(f"expected {k} levels per run")
        rows.append(vals)
    return design(rows, s)
