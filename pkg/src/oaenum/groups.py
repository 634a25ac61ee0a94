"""Permutation groups acting on the cells of a full factorial.

Column permutations and per-column level permutations of a k-factor,
s-level design induce permutations of the s^k cells of the full factorial.
Two designs are isomorphic exactly when their run-frequency vectors lie in
the same orbit of that group (row order is factored out by counting), which
is what makes these groups the backbone of symmetry pruning.

Small groups are handled by explicit element tables (numpy, one row per
element, rows usable as composition maps); orders of larger groups fall back
to a stabilizer chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .core import Design, cell_of_row

#: refuse explicit cell enumeration beyond this degree
DEGREE_CAP = 1024
#: refuse explicit element tables beyond this size
ELEMENT_CAP = 10_000_000


class CapExceeded(RuntimeError):
    """A size cap was hit; distinct from invalid-input errors."""


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0..degree-1} in one-line image form."""

    degree: int
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.image) != self.degree or sorted(self.image) != list(
                range(self.degree)):
            raise ValueError("image must be a bijection on 0..degree-1")

    def __call__(self, i: int) -> int:
        return self.image[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        if self.degree != other.degree:
            raise ValueError("degrees differ")
        return Permutation(self.degree,
                           tuple(self.image[v] for v in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, v in enumerate(self.image):
            inv[v] = i
        return Permutation(self.degree, tuple(inv))

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(degree, tuple(range(degree)))

    def to_line(self) -> str:
        """One-line serialization: space-separated images, 0-based."""
        return " ".join(str(v) for v in self.image)

    @classmethod
    def from_line(cls, line: str) -> "Permutation":
        image = tuple(int(v) for v in line.split())
        return cls(len(image), image)


def _compose_t(g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
    """g after h on raw image tuples."""
    return tuple(g[v] for v in h)


def _inverse_t(g: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(g)
    for i, v in enumerate(g):
        inv[v] = i
    return tuple(inv)


class PermGroup:
    """A finite permutation group, from generators or an element table.

    The element table is an (order, degree) integer array whose rows are
    one-line images. Because a group is closed under inversion, iterating
    rows as source maps (y[j] = x[row[j]]) sweeps the whole group as well,
    which is how the orbit tests below use it.
    """

    def __init__(self, degree: int, generators=(), elements=None):
        self.degree = degree
        self._generators = tuple(
            g if isinstance(g, Permutation) else Permutation(degree, tuple(g))
            for g in generators)
        for g in self._generators:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
        self._elements = elements
        if elements is not None:
            self._elements = np.ascontiguousarray(elements)
            if self._elements.ndim != 2 or self._elements.shape[1] != degree:
                raise ValueError("element table must be (order, degree)")

    @property
    def generators(self) -> tuple[Permutation, ...]:
        if not self._generators and self._elements is not None:
            self._generators = tuple(
                Permutation(self.degree, g)
                for g in _generating_subset(self._elements))
        return self._generators

    def element_table(self, cap: int = ELEMENT_CAP) -> np.ndarray:
        if self._elements is None:
            self._elements = _close_generators(
                self.degree, [g.image for g in self._generators], cap)
        if len(self._elements) > cap:
            raise CapExceeded(f"group has {len(self._elements)} > {cap} "
                              "elements")
        return self._elements

    def order(self) -> int:
        if self._elements is not None:
            return len(self._elements)
        if not self._generators:
            return 1
        return _chain_order(self.degree, [g.image for g in self._generators])

    def orbit(self, point: int) -> tuple[int, ...]:
        """Sorted orbit of a point under the group."""
        if not (0 <= point < self.degree):
            raise ValueError("point out of range")
        gens = [g.image for g in self.generators]
        seen = {point}
        frontier = [point]
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = g[a]
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return tuple(sorted(seen))


def _close_generators(degree: int, gens: list[tuple[int, ...]],
                      cap: int) -> np.ndarray:
    """Breadth-first closure of the generated group, as an element table."""
    identity = tuple(range(degree))
    seen = {identity}
    order = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = _compose_t(g, h)
                if p not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(
                            f"closure exceeds cap of {cap} elements")
                    seen.add(p)
                    order.append(p)
                    nxt.append(p)
        frontier = nxt
    return np.array(order, dtype=_dtype_for(degree))


def _dtype_for(degree: int):
    return np.int16 if degree <= 32000 else np.int32


def _generating_subset(elements: np.ndarray) -> list[tuple[int, ...]]:
    """A small generating sequence drawn from an explicit element table."""
    degree = elements.shape[1]
    identity = tuple(range(degree))
    have = {identity}
    gens: list[tuple[int, ...]] = []
    for row in elements:
        e = tuple(int(v) for v in row)
        if e in have:
            continue
        gens.append(e)
        # re-close over the enlarged generating set
        frontier = list(have)
        have.add(e)
        frontier.append(e)
        while frontier:
            h = frontier.pop()
            for g in gens:
                for p in (_compose_t(g, h), _compose_t(h, g)):
                    if p not in have:
                        have.add(p)
                        frontier.append(p)
    return gens


# ---------------------------------------------------------------------------
# stabilizer chain (order of groups too large for explicit closure)

def _chain_order(degree: int, gens: list[tuple[int, ...]]) -> int:
    """Order of the generated group via an incremental stabilizer chain.

    S[i] holds the known generators fixing base[:i] pointwise; transv[i] is
    the transversal of the base[i]-orbit under S[i]. After every insertion
    the Schreier condition is re-verified level by level: each Schreier
    generator must sift to the identity through the deeper levels, otherwise
    its residue is inserted there and the level restarts. Membership
    certificates never expire (the chain only grows), so restarts terminate.
    """
    identity = tuple(range(degree))
    base: list[int] = []
    S: list[list[tuple[int, ...]]] = []
    transv: list[dict[int, tuple[int, ...]]] = []

    def recompute(i: int) -> None:
        pts = {base[i]: identity}
        frontier = [base[i]]
        while frontier:
            a = frontier.pop()
            ra = pts[a]
            for g in S[i]:
                b = g[a]
                if b not in pts:
                    pts[b] = _compose_t(g, ra)
                    frontier.append(b)
        transv[i] = pts

    def sift(g: tuple[int, ...], start: int):
        for i in range(start, len(base)):
            b = g[base[i]]
            rep = transv[i].get(b)
            if rep is None:
                return g, i
            g = _compose_t(_inverse_t(rep), g)
        return g, len(base)

    def insert(g: tuple[int, ...], i0: int) -> bool:
        """Incorporate g, known to fix base[:i0]; true if the chain grew."""
        res, lev = sift(g, i0)
        if res == identity:
            return False
        if lev == len(base):
            p = next(p for p in range(degree) if res[p] != p)
            base.append(p)
            S.append([])
            transv.append({})
        for i in range(i0, lev + 1):
            S[i].append(res)
            recompute(i)
        i = lev
        while i >= i0:
            grew = False
            for a, ra in list(transv[i].items()):
                for h in S[i]:
                    rb = transv[i][h[a]]
                    sg = _compose_t(_inverse_t(rb), _compose_t(h, ra))
                    if sg != identity and insert(sg, i + 1):
                        grew = True
                        break
                if grew:
                    break
            if not grew:
                i -= 1
        return True

    for g in gens:
        if g != identity:
            insert(tuple(g), 0)

    out = 1
    for t in transv:
        out *= len(t)
    return out


# ---------------------------------------------------------------------------
# the design symmetry group and its derived objects

def cell_index(levels: tuple[int, ...], s: int) -> int:
    """1-based index of a level combination in the lexicographic full
    factorial: 1 + sum levels[j] * s^(k-1-j)."""
    for v in levels:
        if not (0 <= v < s):
            raise ValueError("level out of range")
    return cell_of_row(tuple(levels), s)


@lru_cache(maxsize=8)
def full_group_Gsk(s: int, k: int) -> PermGroup:
    """The group of column permutations and per-column level permutations,
    acting on the s^k cells; order k! * (s!)^k.

    Generators are adjacent column transpositions and adjacent level
    transpositions; the element table is built directly from the product
    structure rather than by closure.
    """
    if s < 2 or k < 1:
        raise ValueError("need s >= 2 and k >= 1")
    degree = s ** k
    if degree > DEGREE_CAP:
        raise CapExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
    order = factorial(k) * factorial(s) ** k
    if order > ELEMENT_CAP:
        raise CapExceeded(f"order {order} exceeds cap {ELEMENT_CAP}")

    cells = np.array(list(itertools.product(range(s), repeat=k)),
                     dtype=np.int64)
    weights = s ** np.arange(k - 1, -1, -1)

    def cell_perm(col_perm, level_perms) -> np.ndarray:
        # image of cell with levels v: u[j] = level_perms[j][v[pinv[j]]]
        pinv = [0] * k
        for i, v in enumerate(col_perm):
            pinv[v] = i
        img = np.zeros(degree, dtype=np.int64)
        for j in range(k):
            img += level_perms[j][cells[:, pinv[j]]] * weights[j]
        return img

    gens: list[tuple[int, ...]] = []
    ident_levels = [np.arange(s)] * k
    for j in range(k - 1):
        cp = list(range(k))
        cp[j], cp[j + 1] = cp[j + 1], cp[j]
        gens.append(tuple(int(v) for v in cell_perm(cp, ident_levels)))
    for j in range(k):
        for l in range(s - 1):
            lp = list(ident_levels)
            swapped = np.arange(s)
            swapped[l], swapped[l + 1] = swapped[l + 1], swapped[l]
            lp[j] = swapped
            gens.append(tuple(int(v) for v in
                              cell_perm(list(range(k)), lp)))

    level_perm_arrays = [np.array(p) for p in
                         itertools.permutations(range(s))]
    table = np.empty((order, degree), dtype=_dtype_for(degree))
    row = 0
    for cp in itertools.permutations(range(k)):
        for combo in itertools.product(level_perm_arrays, repeat=k):
            table[row] = cell_perm(list(cp), list(combo))
            row += 1
    assert row == order
    return PermGroup(degree, generators=gens, elements=table)


def frequency_vector(d: Design) -> np.ndarray:
    """Cell occupation counts of a design over the s^k full factorial."""
    degree = d.levels ** d.factors
    if degree > DEGREE_CAP:
        raise CapExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
    freq = np.zeros(degree, dtype=np.int64)
    for row in d.rows:
        freq[cell_of_row(row, d.levels) - 1] += 1
    return freq


def stabilizer_of_design(group: PermGroup, d: Design) -> PermGroup:
    """The subgroup whose elements map the design's run multiset to itself."""
    freq = frequency_vector(d)
    if len(freq) != group.degree:
        raise ValueError("group degree does not match the design's factorial")
    table = group.element_table()
    keep = np.all(freq[table] == freq[None, :], axis=1)
    return PermGroup(group.degree, elements=table[keep])


def lex_min_in_orbit(x, group: PermGroup, chunk: int = 65536) -> bool:
    """True iff no group element permutes x to a lexicographically smaller
    vector."""
    vec = np.asarray(x, dtype=np.int64)
    if vec.shape != (group.degree,):
        raise ValueError("vector length must equal the group degree")
    table = group.element_table()
    for lo in range(0, len(table), chunk):
        block = table[lo:lo + chunk]
        imgs = vec[block]
        diff = imgs != vec[None, :]
        has = diff.any(axis=1)
        if not has.any():
            continue
        first = diff.argmax(axis=1)
        rows = np.arange(len(block))
        smaller = has & (imgs[rows, first] < vec[first])
        if smaller.any():
            return False
    return True


def group_order(group: PermGroup) -> int:
    return group.order()


def orbit(group: PermGroup, point: int) -> tuple[int, ...]:
    return group.orbit(point)


def element_list(group: PermGroup, cap: int = ELEMENT_CAP) -> list[Permutation]:
    table = group.element_table(cap)
    return [Permutation(group.degree, tuple(int(v) for v in row))
            for row in table]
