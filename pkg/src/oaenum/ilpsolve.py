"""Enumeration of bounded integer solutions of linear systems.

A system is a box lo <= x <= hi of integer vectors plus equality and
inequality rows. Solutions are enumerated by depth-first search over a
static variable order; at every node the variable domains are tightened to
bounds consistency (interval fixpoint over the rows), which both detects
dead subtrees early and fixes variables whose value has become forced.

A system may carry a symmetry group acting on the variable indices. The
group must map the row set into itself (checked on construction), but the
box may break the symmetry: some formulations pin a variable with a
tightened bound. Orbit pruning therefore emits exactly the solutions that
are lexicographically minimal among their in-box orbit images, where an
image y = x o g counts only if it satisfies the box everywhere.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .groups import PermGroup

_RELATIONS = ("eq", "le", "ge")

#: orbit pruning is skipped below this group order
PRUNING_MIN_ORDER = 4


@dataclass(frozen=True)
class LinearRow:
    """Integer row sum(coeffs[i] * x[i]) rel rhs with rel in eq/le/ge."""

    coeffs: tuple[int, ...]
    rel: str
    rhs: int

    def __post_init__(self) -> None:
        if self.rel not in _RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class IntEqSystem:
    """Box-bounded integer system, optionally with a variable symmetry."""

    n: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    rows: tuple[LinearRow, ...]
    group: PermGroup | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.lo) != self.n or len(self.hi) != self.n:
            raise ValueError("bound vectors must have length n")
        for row in self.rows:
            if len(row.coeffs) != self.n:
                raise ValueError("row width does not match n")
        if self.group is not None:
            if self.group.degree != self.n:
                raise ValueError("group degree must equal n")
            _validate_group(self)


def int_eq_system(n, lo, hi, rows, group=None) -> IntEqSystem:
    """Normalizing constructor accepting plain iterables."""
    rws = tuple(r if isinstance(r, LinearRow)
                else LinearRow(tuple(r[0]), r[1], r[2]) for r in rows)
    return IntEqSystem(n=n, lo=tuple(lo), hi=tuple(hi), rows=rws,
                       group=group)


# ---------------------------------------------------------------------------
# group validation

def _rational_basis(vectors):
    """Row-reduced basis of the span of the given Fraction vectors."""
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot, vector)
    for vec in vectors:
        vec = _reduce(basis, list(vec))
        pivot = next((i for i, v in enumerate(vec) if v != 0), None)
        if pivot is not None:
            inv = Fraction(1) / vec[pivot]
            vec = [v * inv for v in vec]
            basis.append((pivot, vec))
            basis.sort()
    return basis


def _reduce(basis, vec):
    vec = list(vec)
    for pivot, bvec in basis:
        f = vec[pivot]
        if f != 0:
            for i in range(len(vec)):
                vec[i] -= f * bvec[i]
    return vec


def _validate_group(system: IntEqSystem) -> None:
    """Generators must permute the rows into the system.

    An equality row may land anywhere in the rational span of the equality
    rows (formulations state one representative row per symmetry class, so
    images often are combinations rather than listed rows); an inequality
    row must land on an identical inequality row. The permuted row of c
    under g has coefficients c o g: x satisfies it exactly when x o g
    satisfies c. Checking generators suffices because the property is
    closed under composition and inversion.
    """
    eq_rows = [r for r in system.rows if r.rel == "eq"]
    ineq = {(r.rel, r.rhs, r.coeffs) for r in system.rows if r.rel != "eq"}
    basis = _rational_basis(
        [list(map(Fraction, r.coeffs)) + [Fraction(r.rhs)] for r in eq_rows])
    for gen in system.group.generators:
        img = gen.image
        for r in eq_rows:
            permuted = [Fraction(r.coeffs[img[i]]) for i in range(system.n)]
            residue = _reduce(basis, permuted + [Fraction(r.rhs)])
            if any(v != 0 for v in residue):
                raise ValueError("group does not preserve the equality rows")
        for rel, rhs, coeffs in ineq:
            permuted = tuple(coeffs[img[i]] for i in range(system.n))
            if (rel, rhs, permuted) not in ineq:
                raise ValueError("group does not preserve the inequality "
                                 "rows")


# ---------------------------------------------------------------------------
# bounds-consistency engine

class _Propagator:
    """Mutable domains with an undo trail and a row-interval fixpoint.

    For each row, L and U are the least and greatest achievable sums over
    the current domains. A row is infeasible when [L, U] cannot meet its
    relation; otherwise each variable's domain is clipped to the values
    that keep the rest of the row satisfiable.
    """

    def __init__(self, system: IntEqSystem):
        self.n = system.n
        self.lo = np.array(system.lo, dtype=np.int64)
        self.hi = np.array(system.hi, dtype=np.int64)
        self.trail: list[tuple[int, int, int]] = []
        self.rows = []
        rows_of_var: list[list[int]] = [[] for _ in range(system.n)]
        for ridx, row in enumerate(system.rows):
            coeffs = np.array(row.coeffs, dtype=np.int64)
            pos = np.nonzero(coeffs > 0)[0]
            neg = np.nonzero(coeffs < 0)[0]
            self.rows.append((row.rel, row.rhs, pos, coeffs[pos], neg,
                              -coeffs[neg]))
            for v in np.nonzero(coeffs)[0]:
                rows_of_var[v].append(ridx)
        self.rows_of_var = rows_of_var

    def mark(self) -> int:
        return len(self.trail)

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            v, lo, hi = self.trail.pop()
            self.lo[v] = lo
            self.hi[v] = hi

    def _clip(self, v: int, lo: int, hi: int, work, queued) -> bool:
        old_lo, old_hi = self.lo[v], self.hi[v]
        if lo <= old_lo and hi >= old_hi:
            return True
        lo, hi = max(lo, old_lo), min(hi, old_hi)
        if lo > hi:
            return False
        self.trail.append((v, int(old_lo), int(old_hi)))
        self.lo[v], self.hi[v] = lo, hi
        for r in self.rows_of_var[v]:
            if not queued[r]:
                queued[r] = True
                work.append(r)
        return True

    def tighten(self, seed_rows) -> bool:
        """Fixpoint over the seeded rows; False when infeasible."""
        queued = np.zeros(len(self.rows), dtype=bool)
        work = deque()
        for r in seed_rows:
            if not queued[r]:
                queued[r] = True
                work.append(r)
        lo, hi = self.lo, self.hi
        while work:
            r = work.popleft()
            queued[r] = False
            rel, rhs, pos, pc, neg, nc = self.rows[r]
            L = int(pc @ lo[pos]) - int(nc @ hi[neg])
            U = int(pc @ hi[pos]) - int(nc @ lo[neg])
            if rel != "ge" and L > rhs:
                return False
            if rel != "le" and U < rhs:
                return False
            if rel != "ge":
                slack = rhs - L
                for v, c in zip(pos, pc):
                    if not self._clip(v, lo[v], lo[v] + slack // c,
                                      work, queued):
                        return False
                for v, c in zip(neg, nc):
                    if not self._clip(v, hi[v] - slack // c, hi[v],
                                      work, queued):
                        return False
            if rel != "le":
                slack = U - rhs
                for v, c in zip(pos, pc):
                    if not self._clip(v, hi[v] - slack // c, hi[v],
                                      work, queued):
                        return False
                for v, c in zip(neg, nc):
                    if not self._clip(v, lo[v], lo[v] + slack // c,
                                      work, queued):
                        return False
        return True

    def assign(self, v: int, value: int) -> bool:
        queued = np.zeros(len(self.rows), dtype=bool)
        work = deque()
        if not self._clip(v, value, value, work, queued):
            return False
        return self.tighten(list(work))


def propagate(system: IntEqSystem, partial=None) -> IntEqSystem | None:
    """Bounds-consistent tightening of the box, optionally after fixing the
    variables of a partial assignment {index: value}. Returns the tightened
    system, or None when the rows prove infeasibility. Variables whose
    domain shrinks to a point are thereby fixed."""
    prop = _Propagator(system)
    if partial:
        for v, value in partial.items():
            if not 0 <= v < system.n:
                raise ValueError(f"variable index {v} out of range")
            if not system.lo[v] <= value <= system.hi[v]:
                raise ValueError(f"assignment x{v}={value} outside bounds")
            prop.lo[v] = value
            prop.hi[v] = value
    if np.any(prop.lo > prop.hi):
        return None
    if not prop.tighten(range(len(system.rows))):
        return None
    return IntEqSystem(n=system.n, lo=tuple(int(v) for v in prop.lo),
                       hi=tuple(int(v) for v in prop.hi), rows=system.rows,
                       group=system.group)


# ---------------------------------------------------------------------------
# search

class _OrbitPruner:
    """Vectorized canonicity test against the in-box orbit of the decided
    part of the current subtree (domain singletons; -1 marks undecided)."""

    def __init__(self, system: IntEqSystem):
        table = system.group.element_table()
        self.table = np.asarray(table, dtype=np.int64)
        self.lo = np.array(system.lo, dtype=np.int64)
        self.hi = np.array(system.hi, dtype=np.int64)
        # positions whose target box does not contain the source box can
        # break the in-box property while undecided
        self.need = ((self.lo[self.table] < self.lo[None, :])
                     | (self.hi[self.table] > self.hi[None, :]))

    def is_canonical_so_far(self, xvals: np.ndarray) -> bool:
        """False when some fully certified in-box image is lex-smaller."""
        t = self.table
        y = xvals[t]
        ky = y >= 0
        kx = xvals >= 0
        both = ky & kx[None, :]
        undecided_or_diff = ~(both & (y == xvals[None, :]))
        has_stop = undecided_or_diff.any(axis=1)
        if not has_stop.any():
            return True
        stop = undecided_or_diff.argmax(axis=1)
        rows = np.arange(len(t))
        atstop_known = both[rows, stop] & has_stop
        smaller = atstop_known & (y[rows, stop] < xvals[stop])
        if not smaller.any():
            return True
        # a competitor must be in-box: decided positions must satisfy the
        # box, undecided positions must be guaranteed by box containment
        viol = (ky & ((y < self.lo[None, :]) | (y > self.hi[None, :]))) \
            .any(axis=1)
        unresolved = (self.need & ~ky).any(axis=1)
        return not (smaller & ~viol & ~unresolved).any()


def enumerate_solutions(system: IntEqSystem, pruning: str = "off"):
    """Yield integer solutions in depth-first order.

    pruning="off" yields every solution; pruning="orbit" yields only
    solutions lexicographically minimal within their in-box orbit, provided
    the attached group has order at least PRUNING_MIN_ORDER (below that the
    walk costs more than it saves and all solutions are yielded).
    """
    if pruning not in ("off", "orbit"):
        raise ValueError(f"unknown pruning mode {pruning!r}")
    n = system.n
    if any(a > b for a, b in zip(system.lo, system.hi)):
        return

    pruner = None
    if pruning == "orbit" and system.group is not None \
            and system.group.order() >= PRUNING_MIN_ORDER:
        pruner = _OrbitPruner(system)

    prop = _Propagator(system)
    if not prop.tighten(range(len(system.rows))):
        return

    # static order: most constrained first, index breaking ties
    order = sorted(range(n),
                   key=lambda i: (-len(prop.rows_of_var[i]), i))

    def walk(depth: int):
        if pruner is not None:
            decided = np.where(prop.lo == prop.hi, prop.lo, -1)
            if not pruner.is_canonical_so_far(decided):
                return
        while depth < n and prop.lo[order[depth]] == prop.hi[order[depth]]:
            depth += 1
        if depth == n:
            yield tuple(int(v) for v in prop.lo)
            return
        v = order[depth]
        for value in range(int(prop.lo[v]), int(prop.hi[v]) + 1):
            m = prop.mark()
            if prop.assign(v, value):
                yield from walk(depth + 1)
            prop.undo_to(m)

    yield from walk(0)


def count_solutions(system: IntEqSystem, pruning: str = "off") -> int:
    return sum(1 for _ in enumerate_solutions(system, pruning))


# ---------------------------------------------------------------------------
# serialization

def dump_system(system: IntEqSystem) -> str:
    """Line format: one header, one var line per variable, one row line per
    row. Groups are runtime attachments and are not serialized."""
    out = [f"ilp {system.n}"]
    for i in range(system.n):
        out.append(f"var {i} {system.lo[i]} {system.hi[i]}")
    for row in system.rows:
        coeffs = " ".join(str(c) for c in row.coeffs)
        out.append(f"row {row.rel} {row.rhs} {coeffs}")
    return "\n".join(out) + "\n"


def parse_system(text: str) -> IntEqSystem:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ilp "):
        raise ValueError("missing ilp header")
    n = int(lines[0].split()[1])
    lo = [0] * n
    hi = [0] * n
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "var":
            i = int(parts[1])
            if not 0 <= i < n:
                raise ValueError(f"variable index {i} out of range")
            lo[i], hi[i] = int(parts[2]), int(parts[3])
        elif parts[0] == "row":
            rel = parts[1]
            rhs = int(parts[2])
            coeffs = tuple(int(v) for v in parts[3:])
            if len(coeffs) != n:
                raise ValueError("row width does not match header")
            rows.append(LinearRow(coeffs, rel, rhs))
        else:
            raise ValueError(f"unknown record {parts[0]!r}")
    return IntEqSystem(n=n, lo=tuple(lo), hi=tuple(hi), rows=tuple(rows))
