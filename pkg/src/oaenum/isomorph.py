"""Isomorphism testing via colored-graph canonical forms.

A design maps to a colored graph whose isomorphisms are exactly the design
isomorphisms (row, column and level permutations); a two-level design with a
prepended constant column maps to a signed-pair graph whose isomorphisms are
the signed row/column permutations. Canonical forms of those graphs give
certificates: equal certificate, same class.

The canonical form is computed by individualization-refinement: refine an
ordered partition until it is equitable, branch on the vertices of the first
smallest non-singleton cell, and keep the lexicographically smallest leaf
adjacency code. Discovered automorphisms prune sibling branches; a
prefix-versus-best comparison prunes subtrees that can no longer win.
Vertices with identical neighborhoods (replicated runs) are first collapsed
into multiplicity-colored class vertices, which keeps heavily replicated
designs cheap without changing the equivalence (the collapse is canonical,
and multiplicities are part of the certificate header).
"""

from __future__ import annotations

import hashlib
import sys
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (Design, SignedDesign, from_signed, lex_sort_rows,
                   to_signed, verify_strength)
from .groups import CapExceeded, PermGroup

#: refuse graphs larger than this
VERTEX_CAP = 4096


@dataclass(frozen=True)
class ColoredGraph:
    """Simple undirected graph with an ordered partition of the vertices."""

    n: int
    colors: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n > VERTEX_CAP:
            raise CapExceeded(f"{self.n} vertices exceeds cap {VERTEX_CAP}")
        seen: set[int] = set()
        for cell in self.colors:
            for v in cell:
                if v in seen:
                    raise ValueError("color classes must be disjoint")
                seen.add(v)
        if seen != set(range(self.n)):
            raise ValueError("color classes must cover all vertices")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError("edges must be sorted pairs of distinct "
                                 "vertices")


def colored_graph(n: int, colors, edges) -> ColoredGraph:
    """Normalizing constructor: sorts edge endpoints, freezes everything."""
    norm = frozenset((min(u, v), max(u, v)) for u, v in edges)
    return ColoredGraph(n=n,
                        colors=tuple(tuple(c) for c in colors),
                        edges=norm)


@dataclass(frozen=True)
class Certificate:
    """Canonical byte string; equal bytes exactly when graphs isomorphic."""

    data: bytes

    @property
    def hex(self) -> str:
        return self.data.hex()

    @property
    def digest(self) -> str:
        """Hex digest of the canonical bytes; short prefixes of it make
        usable labels and file names (the raw bytes start with a size
        header shared by all same-shape designs)."""
        return hashlib.sha256(self.data).hexdigest()


def oa_graph(d: Design) -> ColoredGraph:
    """Graph whose color-preserving isomorphisms are design isomorphisms.

    N run vertices, k column vertices, k*s cell-level vertices. A cell-level
    vertex (j, l) joins its column vertex and every run with level l in
    column j. Row permutations move run vertices, column permutations move
    columns with their level blocks, level permutations move vertices within
    a block; nothing else preserves the three colors and the block edges.
    """
    n_rows, k, s = d.runs, d.factors, d.levels
    n = n_rows + k + k * s
    col0 = n_rows
    lev0 = n_rows + k
    edges = []
    for j in range(k):
        for l in range(s):
            edges.append((col0 + j, lev0 + j * s + l))
    for i, row in enumerate(d.rows):
        for j, v in enumerate(row):
            edges.append((i, lev0 + j * s + v))
    colors = [tuple(range(n_rows)),
              tuple(range(col0, col0 + k)),
              tuple(range(lev0, lev0 + k * s))]
    return colored_graph(n, colors, edges)


def hadamard_graph(sd: SignedDesign) -> ColoredGraph:
    """Signed-pair graph of a +-1 matrix (rows vs columns two-colored).

    Each row i gives vertices r_i+ , r_i- and each column j gives c_j+ ,
    c_j-; an entry +1 joins like signs, -1 joins unlike signs, and each +-
    pair is joined by an edge so that any graph isomorphism respects the
    pairing even when rows repeat. Isomorphism of these graphs is exactly
    equivalence under signed row/column permutations.
    """
    n_rows, k = sd.runs, sd.factors
    n = 2 * (n_rows + k)
    c0 = 2 * n_rows
    edges = []
    for i in range(n_rows):
        edges.append((2 * i, 2 * i + 1))
    for j in range(k):
        edges.append((c0 + 2 * j, c0 + 2 * j + 1))
    for i, row in enumerate(sd.rows):
        rp, rm = 2 * i, 2 * i + 1
        for j, v in enumerate(row):
            cp, cm = c0 + 2 * j, c0 + 2 * j + 1
            if v == 1:
                edges.append((rp, cp))
                edges.append((rm, cm))
            else:
                edges.append((rp, cm))
                edges.append((rm, cp))
    colors = [tuple(range(c0)), tuple(range(c0, n))]
    return colored_graph(n, colors, edges)


# ---------------------------------------------------------------------------
# equitable refinement

def _adjacency(graph: ColoredGraph) -> np.ndarray:
    a = np.zeros((graph.n, graph.n), dtype=np.uint8)
    for u, v in graph.edges:
        a[u, v] = 1
        a[v, u] = 1
    return a


def _refine(adj: np.ndarray, cells: list[list[int]],
            splitters: deque) -> list[list[int]]:
    """Refine until equitable with respect to pending splitter cells.

    Every fragment produced is queued as a further splitter, so starting
    from all cells yields the coarsest equitable refinement; starting from a
    freshly individualized singleton refines incrementally.
    """
    while splitters:
        sp = splitters.popleft()
        out: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            cl = np.array(cell)
            counts = adj[np.ix_(cl, sp)].sum(axis=1)
            if (counts == counts[0]).all():
                out.append(cell)
                continue
            order = np.argsort(counts, kind="stable")
            sc = counts[order]
            cut = np.flatnonzero(sc[1:] != sc[:-1]) + 1
            start = 0
            for stop in list(cut) + [len(cell)]:
                frag = [int(v) for v in cl[order][start:stop]]
                out.append(frag)
                splitters.append(frag)
                start = stop
        cells = out
    return cells


def refine_partition(graph: ColoredGraph, partition=None):
    """Coarsest equitable refinement of a partition (default: the colors).

    Equitable: vertices sharing a cell have the same number of neighbors in
    every cell. Cell order is deterministic: fragments replace their parent
    in ascending neighbor-count order.
    """
    if partition is None:
        cells = [list(c) for c in graph.colors]
    else:
        cells = [list(c) for c in partition]
        seen: set[int] = set()
        for c in cells:
            for v in c:
                if v in seen or not (0 <= v < graph.n):
                    raise ValueError("not a partition of the vertices")
                seen.add(v)
        if seen != set(range(graph.n)):
            raise ValueError("not a partition of the vertices")
    cells = [c for c in cells if c]
    adj = _adjacency(graph)
    refined = _refine(adj, cells, deque(cells))
    return tuple(tuple(c) for c in refined)


# ---------------------------------------------------------------------------
# canonical labeling search

class _UpperTriangle:
    """Bit layout for leaf codes: bit t covers vertex pair (p, q), p < q,
    ordered by q then p, so a singleton prefix of length m pins exactly the
    first m(m-1)/2 bits."""

    def __init__(self, n: int):
        self.n = n
        self.ps = np.concatenate([np.arange(q) for q in range(1, n)]) \
            if n > 1 else np.zeros(0, dtype=np.int64)
        self.qs = np.concatenate([np.full(q, q) for q in range(1, n)]) \
            if n > 1 else np.zeros(0, dtype=np.int64)

    def bits(self, adj: np.ndarray, lab: np.ndarray,
             start: int, stop: int) -> np.ndarray:
        """Code bits for prefix positions [start, stop): all pairs (p, q)
        with p < q < stop and q >= start, given lab[0..stop)."""
        a = start * (start - 1) // 2
        b = stop * (stop - 1) // 2
        return adj[lab[self.ps[a:b]], lab[self.qs[a:b]]]


class _Search:
    def __init__(self, adj: np.ndarray, cells: list[list[int]]):
        self.adj = adj
        self.n = adj.shape[0]
        self.tri = _UpperTriangle(self.n)
        self.total_bits = self.n * (self.n - 1) // 2
        self.best_bits: np.ndarray | None = None
        self.best_lab: np.ndarray | None = None
        self.best_version = 0
        self.first_bits: np.ndarray | None = None
        self.first_lab: np.ndarray | None = None
        self.gens: list[tuple[int, ...]] = []
        self._gen_set: set[tuple[int, ...]] = set()
        self.cells0 = cells

    def run(self):
        root = _refine(self.adj, self.cells0, deque(self.cells0))
        self._descend(root, (), 0, True, 0, 0)
        assert self.best_lab is not None
        return self.best_bits, self.best_lab, self.gens

    # -- leaf handling ------------------------------------------------------

    def _leaf(self, cells: list[list[int]]) -> None:
        lab = np.array([c[0] for c in cells])
        bits = self.tri.bits(self.adj, lab, 0, self.n)
        if self.first_bits is None:
            self.first_bits = bits
            self.first_lab = lab
            self.best_bits = bits
            self.best_lab = lab
            self.best_version += 1
            return
        if np.array_equal(bits, self.first_bits):
            self._record_automorphism(self.first_lab, lab)
        cmp = _compare_bits(bits, self.best_bits)
        if cmp == 0 and lab is not self.best_lab:
            self._record_automorphism(self.best_lab, lab)
        elif cmp < 0:
            self.best_bits = bits
            self.best_lab = lab
            self.best_version += 1

    def _record_automorphism(self, lab1: np.ndarray, lab2: np.ndarray):
        if np.array_equal(lab1, lab2):
            return
        perm = [0] * self.n
        for p in range(self.n):
            perm[int(lab2[p])] = int(lab1[p])
        perm = tuple(perm)
        if perm not in self._gen_set:
            self._gen_set.add(perm)
            self.gens.append(perm)

    # -- tree walk ----------------------------------------------------------

    def _descend(self, cells, path, m_done, eq_first, done_version,
                 cmp_state) -> None:
        """cells: current equitable partition; path: individualized vertices;
        m_done: positions whose code bits were already compared; eq_first:
        prefix equals the first leaf; cmp_state: -1/0/1 prefix versus best
        (a strict difference latches, as in lexicographic order)."""
        m = 0
        for c in cells:
            if len(c) > 1:
                break
            m += 1

        # compare the newly determined code bits against best and first
        if self.best_bits is not None and m > m_done:
            lab = np.array([c[0] for c in cells[:m]])
            a = m_done * (m_done - 1) // 2
            b = m * (m - 1) // 2
            seg = self.tri.bits(self.adj, lab, m_done, m)
            if done_version != self.best_version:
                # best changed since the parent was scored: rescore fully
                full = self.tri.bits(self.adj, lab, 0, m)
                cmp_state = _compare_bits(full, self.best_bits[:b])
                done_version = self.best_version
            elif cmp_state == 0:
                cmp_state = _compare_bits(seg, self.best_bits[a:b])
            if eq_first:
                eq_first = np.array_equal(seg, self.first_bits[a:b])
            if cmp_state > 0 and not eq_first:
                return
            m_done = m

        if m == len(cells):
            self._leaf(cells)
            return

        # target: first non-singleton cell of smallest size
        sizes = [len(c) for c in cells if len(c) > 1]
        smallest = min(sizes)
        tgt = next(i for i, c in enumerate(cells)
                   if len(c) == smallest and len(c) > 1)
        candidates = sorted(cells[tgt])

        tried: list[int] = []
        gen_count_at_scan = -1
        reps: np.ndarray | None = None
        for v in candidates:
            if tried:
                if gen_count_at_scan != len(self.gens):
                    reps = self._orbit_reps(path)
                    gen_count_at_scan = len(self.gens)
                if reps is not None and any(
                        reps[v] == reps[u] for u in tried):
                    continue
            tried.append(v)
            child = (cells[:tgt]
                     + [[v], [u for u in cells[tgt] if u != v]]
                     + cells[tgt + 1:])
            refined = _refine(self.adj, child, deque([[v]]))
            self._descend(refined, path + (v,), m_done, eq_first,
                          done_version, cmp_state)

    def _orbit_reps(self, path) -> np.ndarray | None:
        """Union-find over orbits of discovered automorphisms that fix the
        individualized path pointwise (safe sibling pruning).

        Only the most recently found such generators are merged; a subset of
        valid automorphisms yields a coarser orbit partition, which prunes
        less but never wrongly. The cap keeps highly symmetric graphs from
        turning every sibling scan into a pass over thousands of
        generators."""
        usable = []
        for g in reversed(self.gens):
            if all(g[v] == v for v in path):
                usable.append(g)
                if len(usable) >= 128:
                    break
        if not usable:
            return None
        parent = np.arange(self.n)

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in usable:
            for i in range(self.n):
                a, b = find(i), find(g[i])
                if a != b:
                    parent[a] = b
        for i in range(self.n):
            parent[i] = find(i)
        return parent


def _compare_bits(a: np.ndarray, b: np.ndarray) -> int:
    """Lexicographic comparison of equal-length 0/1 arrays."""
    diff = a != b
    if not diff.any():
        return 0
    i = int(diff.argmax())
    return -1 if a[i] < b[i] else 1


# ---------------------------------------------------------------------------
# twin collapse and the public canonical interface

def _twin_classes(graph: ColoredGraph, adj: np.ndarray):
    """Group vertices with identical neighborhoods within a color class.

    Twins are never adjacent (a common neighborhood containing the partner
    would need a self loop), so collapsing each class to one vertex with a
    multiplicity-refined color is reversible up to isomorphism.
    """
    classes: dict[tuple[int, bytes], list[int]] = {}
    for ci, cell in enumerate(graph.colors):
        for v in cell:
            key = (ci, adj[v].tobytes())
            classes.setdefault(key, []).append(v)
    return list(classes.values())


@lru_cache(maxsize=4096)
def _canonical(graph: ColoredGraph):
    adj = _adjacency(graph)
    classes = _twin_classes(graph, adj)
    # deterministic subclass order: original color, then multiplicity
    color_of = {}
    for ci, cell in enumerate(graph.colors):
        for v in cell:
            color_of[v] = ci
    classes.sort(key=lambda cls: (color_of[cls[0]], len(cls), cls[0]))
    subkeys = [(color_of[cls[0]], len(cls)) for cls in classes]

    nc = len(classes)
    cadj = np.zeros((nc, nc), dtype=np.uint8)
    rep = [cls[0] for cls in classes]
    for a in range(nc):
        cadj[a] = adj[rep[a]][rep]
    ccells: list[list[int]] = []
    start = 0
    for i in range(nc):
        if i == 0 or subkeys[i] != subkeys[i - 1]:
            ccells.append([i])
        else:
            ccells[-1].append(i)

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * nc + 1000))
    try:
        bits, lab, cgens = _Search(cadj, ccells).run()
    finally:
        sys.setrecursionlimit(old)

    header: list[int] = [graph.n, len(graph.colors)]
    header.extend(len(c) for c in graph.colors)
    header.append(nc)
    for key in subkeys:
        header.extend(key)
    payload = b"".join(v.to_bytes(4, "big") for v in header)
    payload += np.packbits(bits).tobytes()
    cert = Certificate(payload)

    # lift generators back to original vertices
    lifted: list[tuple[int, ...]] = []
    for g in cgens:
        perm = list(range(graph.n))
        for a in range(nc):
            src, dst = classes[a], classes[g[a]]
            for x, y in zip(src, dst):
                perm[x] = y
        lifted.append(tuple(perm))
    for cls in classes:
        if len(cls) > 1:
            for i in range(len(cls) - 1):
                perm = list(range(graph.n))
                perm[cls[i]], perm[cls[i + 1]] = cls[i + 1], cls[i]
                lifted.append(tuple(perm))
    group = PermGroup(graph.n, generators=lifted)
    return cert, group


def canonical_form(graph: ColoredGraph) -> Certificate:
    """Certificate with equal values exactly for isomorphic colored graphs."""
    return _canonical(graph)[0]


def automorphism_generators(graph: ColoredGraph) -> PermGroup:
    """Generators of the full color-preserving automorphism group."""
    return _canonical(graph)[1]


# ---------------------------------------------------------------------------
# design-level reduction

def _with_ones_column(d: Design) -> SignedDesign:
    sd = to_signed(d)
    rows = tuple((1,) + row for row in sd.rows)
    return SignedDesign(runs=sd.runs, factors=sd.factors + 1, rows=rows)


def _sign_pair_classes(patterns):
    """Group +-1 tuples that agree up to global negation.

    Returns (keys, members) where members[c] lists (index, side) and side
    tells whether the pattern equals the key or its negation. A pattern
    never equals its own negation, so the two sides of a class are disjoint
    and equally sized once both signs of each index are counted.
    """
    classes: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for i, p in enumerate(patterns):
        q = tuple(-v for v in p)
        key = min(p, q)
        classes.setdefault(key, []).append((i, 0 if p == key else 1))
    keys = sorted(classes)
    return keys, [classes[key] for key in keys]


def _hadamard_quotient(sd: SignedDesign) -> tuple[ColoredGraph, bytes]:
    """Collapse the signed-pair graph of a matrix by repeated rows/columns.

    Rows equal up to negation are interchangeable by signed row moves, so
    each class needs only its two sign orientations plus its multiplicity;
    likewise for columns. Adjacency between class sides is uniform (checked
    on representatives), and the pairing matchings lift uniquely, so the
    quotient is isomorphic exactly when the full graphs are. The returned
    prefix pins the multiplicity of every color cell, which the quotient's
    own color sizes alone would not.
    """
    rows = sd.rows
    cols = [tuple(r[j] for r in rows) for j in range(sd.factors)]
    rkeys, rmembers = _sign_pair_classes(rows)
    ckeys, cmembers = _sign_pair_classes(cols)
    nr, ncl = len(rkeys), len(ckeys)
    # vertices: row class c sides at 2c, 2c+1; column classes follow
    c0 = 2 * nr
    n = 2 * (nr + ncl)

    edges = [(2 * c, 2 * c + 1) for c in range(nr)]
    edges += [(c0 + 2 * c, c0 + 2 * c + 1) for c in range(ncl)]
    for rc in range(nr):
        i, ri_side = rmembers[rc][0]
        for cc in range(ncl):
            j, cj_side = cmembers[cc][0]
            # representative vertex (i, +) sits on side ri_side of its
            # class; entry sign decides which column side it joins
            like = 0 if rows[i][j] == 1 else 1
            edges.append((2 * rc + ri_side,
                          c0 + 2 * cc + (cj_side ^ like)))
            edges.append((2 * rc + (1 - ri_side),
                          c0 + 2 * cc + (1 - (cj_side ^ like))))

    # color cells: one per (kind, multiplicity), both sides together
    def cells_for(members, base, stride0):
        by_mult: dict[int, list[int]] = {}
        for c, mem in enumerate(members):
            v = base + 2 * c
            by_mult.setdefault(len(mem), []).extend((v, v + 1))
        return [(m, by_mult[m]) for m in sorted(by_mult)]

    row_cells = cells_for(rmembers, 0, 2)
    col_cells = cells_for(cmembers, c0, 2)
    colors = [cell for _, cell in row_cells] + [cell for _, cell in col_cells]
    graph = colored_graph(n, colors, set(edges))

    header: list[int] = [sd.runs, sd.factors, len(row_cells)]
    for m, cell in row_cells:
        header.extend((m, len(cell)))
    header.append(len(col_cells))
    for m, cell in col_cells:
        header.extend((m, len(cell)))
    prefix = b"ODQ1" + b"".join(v.to_bytes(4, "big") for v in header)
    return graph, prefix


@lru_cache(maxsize=131072)
def design_certificate(d: Design, relation: str = "iso") -> Certificate:
    """Class certificate of a design under `iso` (row/column/level
    permutations) or `od` (signed permutations of [1 | design])."""
    if relation == "iso":
        return canonical_form(oa_graph(d))
    if relation == "od":
        if d.levels != 2:
            raise ValueError("od equivalence is defined for s = 2 only")
        graph, prefix = _hadamard_quotient(_with_ones_column(d))
        return Certificate(prefix + canonical_form(graph).data)
    raise ValueError(f"unknown relation {relation!r}")


def reduce_classes(designs, relation: str = "iso") -> list[Design]:
    """One representative per class, first encountered in input order."""
    if relation not in ("iso", "od"):
        raise ValueError(f"unknown relation {relation!r}")
    reps: list[Design] = []
    seen: set[Certificate] = set()
    for d in designs:
        cert = design_certificate(d, relation)
        if cert not in seen:
            seen.add(cert)
            reps.append(d)
    return reps


def od_expand_to_iso(reps) -> list[Design]:
    """All isomorphism classes inside the given OD classes.

    Every input design stands for its matrix with a constant column
    prepended; multiplying all columns by one column and dropping the
    resulting constant column walks through the isomorphism classes of the
    OD class, one candidate per column.
    """
    out: list[Design] = []
    for d in reps:
        sd = _with_ones_column(d)
        kk = sd.factors
        for i in range(kk):
            rows = []
            for row in sd.rows:
                f = row[i]
                rows.append(tuple(f * v for v in row))
            if any(r[i] != 1 for r in rows):
                raise ValueError("variant lost its constant column; "
                                 "input is not a +-1 design")
            dropped = tuple(r[:i] + r[i + 1:] for r in rows)
            variant = from_signed(SignedDesign(runs=sd.runs,
                                               factors=kk - 1,
                                               rows=dropped))
            out.append(lex_sort_rows(variant))
    return reduce_classes(out, "iso")


def theorem1_check(y: Design, z: Design, t: int, k2: int) -> bool:
    """Whether two OD-equivalent arrays of even strength t extend equally
    far: true iff both or neither reach k2 factors."""
    if t % 2 != 0:
        raise ValueError("the equal-extendability check needs even t")
    if not (verify_strength(y, t) and verify_strength(z, t)):
        raise ValueError("inputs must be orthogonal arrays of strength t")
    if design_certificate(y, "od") != design_certificate(z, "od"):
        raise ValueError("inputs are not od-equivalent")
    from .extend import extendable_to
    return extendable_to(y, t, k2) == extendable_to(z, t, k2)
