"""Independent brute-force oracles used to pin down expected values.

Everything here recomputes results from first principles with the dumbest
possible method, deliberately sharing no code with the package internals.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from oaenum.core import Design, design, verify_strength


def brute_krawtchouk(j: int, x: int, s: int, k: int) -> int:
    """Closed-form sum, written without the package's recursion."""
    return sum((-1) ** i * (s - 1) ** (j - i) * comb(x, i) * comb(k - x, j - i)
               for i in range(j + 1))


def brute_j_characteristic(d: Design, cols) -> int:
    total = 0
    for row in d.rows:
        p = 1
        for j in cols:
            p *= 1 - 2 * row[j]
        total += p
    return total


def brute_gwp_two_level(d: Design) -> tuple[Fraction, ...]:
    out = []
    for r in range(1, d.factors + 1):
        acc = 0
        for cols in itertools.combinations(range(d.factors), r):
            acc += brute_j_characteristic(d, cols) ** 2
        out.append(Fraction(acc, d.runs ** 2))
    return tuple(out)


def brute_distance_distribution(d: Design) -> tuple[Fraction, ...]:
    counts = [0] * (d.factors + 1)
    for a in d.rows:
        for b in d.rows:
            dist = sum(1 for x, y in zip(a, b) if x != y)
            counts[dist] += 1
    return tuple(Fraction(c, d.runs) for c in counts)


def all_iso_images(d: Design):
    """Every design reachable by column and level permutations, rows
    lex-sorted (row order is irrelevant for identity checks)."""
    s, k = d.levels, d.factors
    for cp in itertools.permutations(range(k)):
        for lps in itertools.product(itertools.permutations(range(s)),
                                     repeat=k):
            rows = sorted(tuple(lps[j][row[cp[j]]] for j in range(k))
                          for row in d.rows)
            yield tuple(rows)


def brute_design_iso(d1: Design, d2: Design) -> bool:
    if (d1.runs, d1.factors, d1.levels) != (d2.runs, d2.factors, d2.levels):
        return False
    target = tuple(sorted(d2.rows))
    return any(img == target for img in all_iso_images(d1))


def brute_iso_classes(designs) -> int:
    """Number of isomorphism classes by pairwise comparison."""
    reps: list[Design] = []
    for d in designs:
        if not any(brute_design_iso(d, r) for r in reps):
            reps.append(d)
    return len(reps)


def brute_min_image(d: Design) -> tuple[int, ...]:
    """Lexicographically least image of a two-level design over all column
    and level permutations, rows bit-packed and sorted. Vectorised so that
    k=7 stays under a second; only the s=2 case is needed at this scale."""
    import numpy as np

    if d.levels != 2:
        raise ValueError("bit-packed canonical form needs two levels")
    k = d.factors
    rows = np.array(d.rows, dtype=np.int64)
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    packed = rows[:, perms].transpose(1, 0, 2) @ weights  # (k!, runs)
    # XOR with a mask flips a per-column level swap straight on the packed
    # integers. Only masks equal to some packed row can produce a form whose
    # first sorted row is zero, and the least image always starts at zero.
    images = np.sort(packed[:, None, :] ^ packed[:, :, None], axis=2)
    flat = images.reshape(-1, d.runs)
    best = flat[np.lexsort(flat.T[::-1])[0]]
    return tuple(int(v) for v in best)


def brute_min_image_classes(designs) -> int:
    """Isomorphism class count via the packed canonical form."""
    return len({brute_min_image(d) for d in designs})


def brute_graph_aut_count(g) -> int:
    """Count color-preserving adjacency-preserving vertex permutations."""
    edges = set(g.edges)
    count = 0
    for combo in itertools.product(
            *[itertools.permutations(c) for c in g.colors]):
        m = {}
        for cell, img in zip(g.colors, combo):
            for a, b in zip(cell, img):
                m[a] = b
        if all((min(m[u], m[v]), max(m[u], m[v])) in edges
               for u, v in edges):
            count += 1
    return count


def brute_graph_iso(g1, g2) -> bool:
    if g1.n != g2.n or [len(c) for c in g1.colors] != [len(c)
                                                       for c in g2.colors]:
        return False
    e1, e2 = set(g1.edges), set(g2.edges)
    if len(e1) != len(e2):
        return False
    for combo in itertools.product(
            *[itertools.permutations(c) for c in g2.colors]):
        m = {}
        for cell, img in zip(g1.colors, combo):
            for a, b in zip(cell, img):
                m[a] = b
        if all((min(m[u], m[v]), max(m[u], m[v])) in e2 for u, v in e1):
            return True
    return False


def brute_extension_columns(d: Design, t: int):
    """All level columns whose append keeps strength t, by trying every
    s^N candidate. Only sane for tiny run counts."""
    s = d.levels
    for cand in itertools.product(range(s), repeat=d.runs):
        rows = [row + (cand[i],) for i, row in enumerate(d.rows)]
        ext = design(rows, s)
        if verify_strength(ext, t):
            yield ext


def brute_enumerate_oas(N: int, k: int, s: int, t: int):
    """Every OA(N, k, s, t) up to row order, built column by column with
    every s^N candidate at each step. Exponential; keep N tiny.

    Partial designs are deduplicated on their sorted rows, which is safe
    because row-permuted designs have row-permuted extension sets.
    """
    cols = list(itertools.product(range(s), repeat=N))
    partial = {tuple(sorted((v,) for v in c)) for c in cols
               if verify_strength(design([(v,) for v in c], s), min(t, 1))}
    for width in range(2, k + 1):
        need = min(t, width)
        nxt = set()
        for rows in partial:
            for cand in cols:
                ext_rows = [row + (cand[i],) for i, row in enumerate(rows)]
                if verify_strength(design(ext_rows, s), need):
                    nxt.add(tuple(sorted(ext_rows)))
        partial = nxt
    for rows in sorted(partial):
        yield design(list(rows), s)


def half_fraction() -> Design:
    """The regular 2^(3-1) even-parity fraction."""
    return design([(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)], 2)


def full_factorial(k: int, s: int, replicates: int = 1) -> Design:
    rows = [r for r in itertools.product(range(s), repeat=k)
            for _ in range(replicates)]
    return design(rows, s)


def iso_scramble(d: Design, rng) -> Design:
    """A random row/column/level permutation image of a design."""
    s, k = d.levels, d.factors
    cp = list(range(k))
    rng.shuffle(cp)
    lps = [list(range(s)) for _ in range(k)]
    for lp in lps:
        rng.shuffle(lp)
    rows = [tuple(lps[j][row[cp[j]]] for j in range(k)) for row in d.rows]
    rng.shuffle(rows)
    return design(rows, s)
