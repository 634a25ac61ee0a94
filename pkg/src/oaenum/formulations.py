"""Builders turning array-extension tasks into integer systems.

Extension formulations append one factor to a strength-t array so that the
result again has strength t. The new factor is encoded in indicator form:
x_{ir} = 1 says run i takes level r, with the top level s-1 left implicit
(its indicator is determined by the others). The strength condition then
becomes counting rows: over any q-1 existing factors fixed to levels below
s-1, each new level r must appear exactly runs/s^q times. The shapes are

  identity    one indicator block per run of the input,
  compressed  one counting block per distinct run of the input,
  full        one frequency variable per cell of the s^k factorial,

plus "full-refilter", the full shape pinned to the input's projection
frequencies so its solutions are exactly the extensions of that input.

Each builder returns an ExtensionProblem bundling the IntEqSystem with the
data needed to decode raw solution vectors back into designs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (Design, RunProfile, design, lex_sort_rows, run_profile,
                   verify_strength)
from .groups import (DEGREE_CAP, CapExceeded, PermGroup, frequency_vector,
                     full_group_Gsk, stabilizer_of_design)
from .ilpsolve import IntEqSystem, LinearRow

_KINDS = ("identity", "compressed", "full", "full-refilter")


def p_max_bound(runs: int, s: int, t: int) -> int:
    """Largest possible cell frequency of a strength-t array: runs / s^t."""
    if t < 0:
        raise ValueError("strength must be nonnegative")
    if s < 2:
        raise ValueError("need at least two levels")
    block = s ** t
    if runs % block:
        raise ValueError(f"{runs} runs cannot have strength {t} at {s} "
                         "levels")
    return runs // block


@dataclass(frozen=True)
class FrequencyVector:
    """Cell frequencies of a design, indexed like cell_of_row."""

    values: tuple[int, ...]
    runs: int
    p_max: int

    def __post_init__(self) -> None:
        if any(v < 0 or v > self.p_max for v in self.values):
            raise ValueError("cell frequency out of range")
        if sum(self.values) != self.runs:
            raise ValueError("frequencies must sum to the run count")


@dataclass(frozen=True)
class ExtensionSolution:
    """One decoded solution: the formulation it came from, the raw vector,
    and the design it decodes to."""

    kind: str
    vector: tuple[int, ...]
    design: Design


@dataclass(frozen=True)
class ExtensionProblem:
    """A linear system together with the recipe that turns its solutions
    back into designs. `factors` counts the columns of decoded designs."""

    kind: str
    system: IntEqSystem
    runs: int
    factors: int
    levels: int
    strength: int
    base: Design | None = None
    profile: RunProfile | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown formulation kind {self.kind!r}")

    def decode(self, solution) -> Design:
        sol = tuple(int(v) for v in solution)
        if len(sol) != self.system.n:
            raise ValueError("solution length does not match the system")
        if self.kind == "identity":
            return self._decode_identity(sol)
        if self.kind == "compressed":
            return self._decode_compressed(sol)
        return self._decode_full(sol)

    def _decode_identity(self, sol) -> Design:
        s = self.levels
        rows = []
        for i, row in enumerate(self.base.rows):
            slots = sol[i * (s - 1):(i + 1) * (s - 1)]
            ones = [r for r, v in enumerate(slots) if v == 1]
            if any(v not in (0, 1) for v in slots) or len(ones) > 1:
                raise ValueError("run indicators must select at most one "
                                 "level")
            rows.append(row + (ones[0] if ones else s - 1,))
        return design(tuple(rows), s)

    def _decode_compressed(self, sol) -> Design:
        s = self.levels
        prof = self.profile
        rows = []
        for l in range(prof.h):
            counts = sol[l * (s - 1):(l + 1) * (s - 1)]
            mult = prof.multiplicities[l]
            rest = mult - sum(counts)
            if any(v < 0 for v in counts) or rest < 0:
                raise ValueError("run counts exceed the multiplicity")
            values = [r for r, c in enumerate(counts) for _ in range(c)]
            values.extend([s - 1] * rest)
            start = prof.first_rows[l] - 1
            for off in range(mult):
                rows.append(self.base.rows[start + off] + (values[off],))
        return design(tuple(rows), s)

    def _decode_full(self, sol) -> Design:
        freq = FrequencyVector(sol, self.runs,
                               p_max_bound(self.runs, self.levels,
                                           self.strength))
        rows = []
        cells = itertools.product(range(self.levels), repeat=self.factors)
        for cell, x in zip(cells, freq.values):
            rows.extend([cell] * x)
        return design(tuple(rows), self.levels)


def _match_rows(unit_rows, s: int, t: int, runs: int) -> list[LinearRow]:
    """One equality per (q-1 input factors, levels below s-1, new level):
    the matching units' indicators sum to runs / s^q. q runs from 1 (plain
    column balance) to t. Combinations touching the top level s-1 anywhere
    are rational consequences of these rows and are omitted."""
    k1 = len(unit_rows[0]) if unit_rows else 0
    width = len(unit_rows) * (s - 1)
    rows = []
    for q in range(1, t + 1):
        rhs = runs // s ** q
        for cols in itertools.combinations(range(k1), q - 1):
            for sigma in itertools.product(range(s - 1), repeat=q - 1):
                match = [u for u, row in enumerate(unit_rows)
                         if all(row[f] == v for f, v in zip(cols, sigma))]
                for r in range(s - 1):
                    coeffs = [0] * width
                    for u in match:
                        coeffs[u * (s - 1) + r] = 1
                    rows.append(LinearRow(tuple(coeffs), "eq", rhs))
    return rows


def _check_extension_input(d: Design, t: int) -> None:
    if t < 1:
        raise ValueError("strength must be positive")
    if t > d.factors + 1:
        raise ValueError("strength cannot exceed the extended column count")
    if not verify_strength(d, min(t, d.factors)):
        raise ValueError("input fails the strength check")


def build_identity_extension(d: Design, t: int) -> ExtensionProblem:
    """Indicator block of s-1 binaries per run: slot (i, r) puts level r in
    row i of the new column, all slots zero means the top level. The first
    run is pinned to level 0 (a wholesale level permutation of the column
    makes this lossless) and consecutive equal rows carry weakly increasing
    levels, which cuts duplicate columns that differ only by reordering
    replicates."""
    _check_extension_input(d, t)
    s = d.levels
    p_max_bound(d.runs, s, t)
    width = d.runs * (s - 1)
    rows = _match_rows(d.rows, s, t, d.runs)
    if s > 2:
        for i in range(d.runs):
            coeffs = [0] * width
            for r in range(s - 1):
                coeffs[i * (s - 1) + r] = 1
            rows.append(LinearRow(tuple(coeffs), "le", 1))
    for i in range(d.runs - 1):
        if d.rows[i] == d.rows[i + 1]:
            for r in range(s - 1):
                coeffs = [0] * width
                for m in range(r + 1):
                    coeffs[i * (s - 1) + m] = 1
                    coeffs[(i + 1) * (s - 1) + m] = -1
                rows.append(LinearRow(tuple(coeffs), "ge", 0))
    lo = [0] * width
    lo[0] = 1
    system = IntEqSystem(n=width, lo=tuple(lo), hi=(1,) * width,
                         rows=tuple(rows))
    return ExtensionProblem(kind="identity", system=system, runs=d.runs,
                            factors=d.factors + 1, levels=s, strength=t,
                            base=d)


def _run_symmetry(d: Design, prof: RunProfile) -> PermGroup | None:
    """Input symmetries as permutations of the compressed variables (the
    distinct-run blocks move, the level slots ride along), or None when the
    ambient group is too large to materialize."""
    try:
        stab = stabilizer_of_design(full_group_Gsk(d.levels, d.factors), d)
        table = stab.element_table()
    except CapExceeded:
        return None
    cells0 = [c - 1 for c in prof.cells]
    pos = {c: l for l, c in enumerate(cells0)}
    runperms = {tuple(pos[int(e[c])] for c in cells0) for e in table}
    m = d.levels - 1
    width = prof.h * m
    elements = []
    for p in sorted(runperms):
        img = [0] * width
        for l in range(prof.h):
            for r in range(m):
                img[l * m + r] = p[l] * m + r
        elements.append(img)
    return PermGroup(width, elements=np.array(elements, dtype=np.int64))


def build_compressed_extension(d: Design, t: int) -> ExtensionProblem:
    """Counting block of s-1 variables per distinct run of a lex-sorted
    input: slot (l, r) is how many of the run's rows receive level r, the
    rest take the top level. Caps are min(multiplicity, p_max) since a cell
    of a strength-t array never repeats more than p_max times. When the
    all-zero run is present its level-0 count is pinned to at least one,
    and the input's symmetries act on the variables for orbit pruning."""
    _check_extension_input(d, t)
    if list(d.rows) != sorted(d.rows):
        raise ValueError("compressed extension needs lex-sorted rows")
    s = d.levels
    p_max = p_max_bound(d.runs, s, t)
    prof = run_profile(d)
    reps = [d.rows[first - 1] for first in prof.first_rows]
    width = prof.h * (s - 1)
    rows = _match_rows(reps, s, t, d.runs)
    if s > 2:
        for l in range(prof.h):
            coeffs = [0] * width
            for r in range(s - 1):
                coeffs[l * (s - 1) + r] = 1
            rows.append(LinearRow(tuple(coeffs), "le",
                                  prof.multiplicities[l]))
    lo = [0] * width
    if prof.cells[0] == 1:
        lo[0] = 1
    hi = [0] * width
    for l in range(prof.h):
        cap = min(prof.multiplicities[l], p_max)
        for r in range(s - 1):
            hi[l * (s - 1) + r] = cap
    system = IntEqSystem(n=width, lo=tuple(lo), hi=tuple(hi),
                         rows=tuple(rows), group=_run_symmetry(d, prof))
    return ExtensionProblem(kind="compressed", system=system, runs=d.runs,
                            factors=d.factors + 1, levels=s, strength=t,
                            base=d, profile=prof)


def _moment_rows(cells: np.ndarray, runs: int, s: int,
                 t: int) -> list[LinearRow]:
    """For every subset of up to t columns and every level assignment
    avoiding the top level, the matching cells carry runs / s^q rows.
    Assignments touching level s-1 are rational combinations of these, so
    the rows generate the full strength condition."""
    k = cells.shape[1]
    rows = []
    for q in range(t + 1):
        rhs = runs // (s ** q)
        for cols in itertools.combinations(range(k), q):
            for sigma in itertools.product(range(s - 1), repeat=q):
                if q == 0:
                    mask = np.ones(len(cells), dtype=bool)
                else:
                    mask = (cells[:, list(cols)]
                            == np.array(sigma)).all(axis=1)
                rows.append(LinearRow(tuple(int(v) for v in
                                            mask.astype(np.int64)),
                                      "eq", rhs))
    return rows


def _factorial_cells(s: int, k: int) -> np.ndarray:
    degree = s ** k
    if degree > DEGREE_CAP:
        raise CapExceeded(f"{degree} cells exceed cap {DEGREE_CAP}")
    return np.array(list(itertools.product(range(s), repeat=k)),
                    dtype=np.int64)


def build_full_formulation(runs: int, k: int, s: int, t: int,
                           include_group: bool = True) -> ExtensionProblem:
    """Frequency variable per cell of the s^k factorial, bounded by p_max,
    with the all-zero cell pinned to be occupied (lossless up to level
    permutations). The cell action of the column/level group is attached
    for orbit pruning unless include_group is false."""
    if t < 1:
        raise ValueError("strength must be positive")
    if t > k:
        raise ValueError("strength cannot exceed the column count")
    p_max = p_max_bound(runs, s, t)
    cells = _factorial_cells(s, k)
    rows = _moment_rows(cells, runs, s, t)
    lo = (1,) + (0,) * (len(cells) - 1)
    group = full_group_Gsk(s, k) if include_group else None
    system = IntEqSystem(n=len(cells), lo=lo, hi=(p_max,) * len(cells),
                         rows=tuple(rows), group=group)
    return ExtensionProblem(kind="full", system=system, runs=runs,
                            factors=k, levels=s, strength=t)


def build_full_refilter(d: Design, t: int) -> ExtensionProblem:
    """Full formulation over k = input columns + 1, with one equality per
    input cell pinning the projection frequencies, so solutions decode to
    extensions of the given array (up to row order). Used to cross-check
    the extension formulations at small sizes."""
    _check_extension_input(d, t)
    base = lex_sort_rows(d)
    s, k = d.levels, d.factors + 1
    p_max = p_max_bound(d.runs, s, t)
    cells = _factorial_cells(s, k)
    rows = _moment_rows(cells, d.runs, s, t)
    freq = frequency_vector(base)
    for c, f in enumerate(freq):
        coeffs = [0] * len(cells)
        for r in range(s):
            coeffs[c * s + r] = 1
        rows.append(LinearRow(tuple(coeffs), "eq", int(f)))
    lo = [0] * len(cells)
    if freq[0] >= 1:
        lo[0] = 1
    system = IntEqSystem(n=len(cells), lo=tuple(lo),
                         hi=(p_max,) * len(cells), rows=tuple(rows))
    return ExtensionProblem(kind="full-refilter", system=system,
                            runs=d.runs, factors=k, levels=s, strength=t,
                            base=base)
