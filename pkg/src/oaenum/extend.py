"""Breadth-first catalog construction.

Starting from the unique strength-t seed, each round extends every class
representative by one factor (through a pluggable formulation), pools the
decoded designs, and reduces the pool to one representative per class.
Repeating until the pool comes back empty yields the complete catalog and
the largest factor count admitting an array of the given parameters.
"""

from __future__ import annotations

import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .core import Design, design, lex_sort_rows, verify_strength
from .formulations import (ExtensionSolution, build_compressed_extension,
                           build_full_refilter, build_identity_extension)
from .gwp import (DistanceDistribution, Gwp, distance_distribution,
                  format_fixed, gwp_from_distance, select_gma)
from .ilpsolve import enumerate_solutions
from .isomorph import (Certificate, design_certificate, od_expand_to_iso,
                       reduce_classes)

log = logging.getLogger(__name__)

_BUILDERS = {"identity": build_identity_extension,
             "full-refilter": build_full_refilter,
             "compressed": build_compressed_extension}
_RELATIONS = {"oa-iso": "iso", "od-equiv": "od"}


class ConsistencyError(RuntimeError):
    """A decoded solution failed a property the construction guarantees."""


def default_jobs() -> int:
    """Worker count for extension rounds, from OAENUM_JOBS (default 1)."""
    raw = os.environ.get("OAENUM_JOBS", "1")
    try:
        jobs = int(raw)
    except ValueError as exc:
        raise ValueError(f"OAENUM_JOBS must be an integer, got {raw!r}") \
            from exc
    if jobs < 1:
        raise ValueError("job count must be positive")
    return jobs


@dataclass(frozen=True)
class ClassMember:
    """A class representative, its certificate, and what produced it."""

    design: Design
    certificate: Certificate
    method: str


@dataclass(frozen=True)
class ClassSet:
    """Representatives of the distinct classes at one parameter set."""

    runs: int
    factors: int
    levels: int
    strength: int
    relation: str
    members: tuple[ClassMember, ...]

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.relation == "od-equiv" and self.levels != 2:
            raise ValueError("od-equiv reduction needs two levels")
        certs = [m.certificate for m in self.members]
        if len(set(certs)) != len(certs):
            raise ValueError("class representatives must have distinct "
                             "certificates")
        need = min(self.strength, self.factors)
        for m in self.members:
            d = m.design
            if (d.runs, d.factors, d.levels) != (self.runs, self.factors,
                                                 self.levels):
                raise ValueError("member dimensions do not match the set")
            if not verify_strength(d, need):
                raise ValueError("class representative fails the strength "
                                 "check")

    def __len__(self) -> int:
        return len(self.members)

    def designs(self) -> list[Design]:
        return [m.design for m in self.members]


def _make_class_set(runs, factors, levels, strength, relation,
                    designs_with_method) -> ClassSet:
    members = tuple(
        ClassMember(design=d, certificate=design_certificate(
            d, _RELATIONS[relation]), method=m)
        for d, m in designs_with_method)
    return ClassSet(runs=runs, factors=factors, levels=levels,
                    strength=strength, relation=relation, members=members)


def seed(runs: int, s: int, t: int) -> ClassSet:
    """The singleton class at k = t: the full factorial in lexicographic
    row order, each row replicated runs / s^t times."""
    block = s ** t
    if runs % block:
        raise ValueError(f"{runs} runs cannot have strength {t} at {s} "
                         "levels")
    lam = runs // block
    rows = [row for row in itertools.product(range(s), repeat=t)
            for _ in range(lam)]
    d = design(rows, s)
    return _make_class_set(runs, t, s, t, "oa-iso", [(d, "seed")])


def _extend_one(d: Design, t: int, method: str,
                pruning: str) -> tuple[list[ExtensionSolution], float]:
    """All extensions of one representative; parallelism unit."""
    start = time.perf_counter()
    prob = _BUILDERS[method](lex_sort_rows(d), t)
    out = []
    need = min(t, prob.factors)
    for vec in enumerate_solutions(prob.system, pruning):
        dec = prob.decode(vec)
        if not verify_strength(dec, need):
            raise ConsistencyError("decoded extension fails the strength "
                                   "check")
        tag = "full" if prob.kind == "full-refilter" else prob.kind
        out.append(ExtensionSolution(kind=tag, vector=tuple(vec),
                                     design=dec))
    return out, time.perf_counter() - start


def _extend_one_args(args):
    return _extend_one(*args)


def extend_all(tk_minus_1: ClassSet, method: str = "compressed",
               reduce: str = "oa-iso", pruning: str = "orbit",
               jobs: int | None = None) -> ClassSet:
    """One extension round: enumerate every representative's extensions,
    pool them, and reduce the pool to distinct classes at k+1."""
    if method not in _BUILDERS:
        raise ValueError(f"unknown method {method!r}")
    if reduce not in _RELATIONS:
        raise ValueError(f"unknown reduction relation {reduce!r}")
    if pruning not in ("off", "orbit"):
        raise ValueError(f"unknown pruning mode {pruning!r}")
    if reduce == "od-equiv" and tk_minus_1.levels != 2:
        raise ValueError("od-equiv reduction needs two levels")
    jobs = default_jobs() if jobs is None else jobs
    if jobs < 1:
        raise ValueError("job count must be positive")

    cs = tk_minus_1
    k = cs.factors + 1
    tasks = [(m.design, cs.strength, method, pruning) for m in cs.members]
    if jobs == 1 or len(tasks) <= 1:
        results = map(_extend_one_args, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=min(jobs, len(tasks)))
        results = pool.map(_extend_one_args, tasks)

    pooled: list[Design] = []
    for i, (sols, elapsed) in enumerate(results):
        log.info("extend %d/%d to k=%d via %s: %d solutions in %.2fs",
                 i + 1, len(tasks), k, method, len(sols), elapsed)
        pooled.extend(s.design for s in sols)
    if jobs > 1 and len(tasks) > 1:
        pool.shutdown()

    sorted_pool = [lex_sort_rows(d) for d in pooled]
    if _RELATIONS[reduce] == "od":
        # The coarser relation refines along class boundaries, so reducing
        # the pool per isomorphism first keeps the same first-encountered
        # representatives while pricing the costlier signed-form
        # certificates only once per isomorphism class.
        sorted_pool = reduce_classes(sorted_pool, "iso")
    reps = reduce_classes(sorted_pool, _RELATIONS[reduce])
    return _make_class_set(cs.runs, k, cs.levels, cs.strength, reduce,
                           [(d, method) for d in reps])


def enumerate_up_to(runs: int, s: int, t: int, k_stop: int,
                    method: str = "compressed", reduce: str = "oa-iso",
                    pruning: str = "orbit",
                    jobs: int | None = None) -> list[ClassSet]:
    """Class sets for k = t .. k_stop, stopping early after the first empty
    one (the largest k with classes is then settled)."""
    if k_stop < t:
        raise ValueError("k_stop must be at least the strength")
    out = [seed(runs, s, t)]
    while out[-1].factors < k_stop and len(out[-1]) > 0:
        nxt = extend_all(out[-1], method=method, reduce=reduce,
                         pruning=pruning, jobs=jobs)
        out.append(nxt)
        log.info("k=%d: %d classes", nxt.factors, len(nxt))
    return out


def extendable_to(d: Design, t: int, k2: int) -> bool:
    """Whether the design extends (column by column) to k2 factors while
    keeping strength t. The last level needs only existence, so it stops
    at the first solution."""
    if k2 < d.factors:
        raise ValueError("target factor count below the design's own")
    frontier = [lex_sort_rows(d)]
    k = d.factors
    while k < k2 and frontier:
        last = k + 1 == k2
        nxt = []
        for rep in frontier:
            prob = build_compressed_extension(rep, t)
            for vec in enumerate_solutions(prob.system, "orbit"):
                if last:
                    return True
                nxt.append(lex_sort_rows(prob.decode(vec)))
        frontier = reduce_classes(nxt, "iso")
        k += 1
    return bool(frontier)


@dataclass(frozen=True)
class ClassReport:
    """Ranking entry: one class with its aberration and distance data."""

    member: ClassMember
    gwp: Gwp
    distance: DistanceDistribution
    gma: bool

    def gwp_text(self, strength: int) -> str:
        vals = self.gwp.values[strength:]
        return "(" + ", ".join(format_fixed(v, 2) for v in vals) + ")"

    def distance_text(self) -> str:
        return "(" + ", ".join(format_fixed(v, 3)
                               for v in self.distance.values) + ")"


@dataclass(frozen=True)
class GmaReport:
    """Per-class word length patterns with the minimum-aberration subset
    flagged, ordered best first."""

    runs: int
    factors: int
    levels: int
    strength: int
    relation: str
    entries: tuple[ClassReport, ...]

    def lines(self) -> list[str]:
        out = []
        for i, e in enumerate(self.entries):
            flag = "GMA" if e.gma else "   "
            out.append(f"{i + 1:3d} {flag} A>{self.strength}="
                       f"{e.gwp_text(self.strength)} "
                       f"B={e.distance_text()} "
                       f"[{e.member.certificate.digest[:16]}]")
        return out


def gma_report(cs: ClassSet) -> GmaReport:
    """Rank the classes of a set by generalized aberration."""
    dists = [distance_distribution(m.design) for m in cs.members]
    gwps = [gwp_from_distance(dd) for dd in dists]
    best = set(select_gma(gwps))
    order = sorted(range(len(cs.members)),
                   key=lambda i: (gwps[i].values,
                                  cs.members[i].certificate.data))
    entries = tuple(ClassReport(member=cs.members[i], gwp=gwps[i],
                                distance=dists[i], gma=i in best)
                    for i in order)
    return GmaReport(runs=cs.runs, factors=cs.factors, levels=cs.levels,
                     strength=cs.strength, relation=cs.relation,
                     entries=entries)
