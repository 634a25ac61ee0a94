"""Command-line front end for building and inspecting catalogs.

Exit codes: 0 success, 1 infeasible or nonexistent (an extension came back
empty, or a verification failed), 2 usage error, 3 internal-consistency
failure (corrupt catalog or a decoded solution violating its guarantees).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from .catalog import CatalogCorruption, max_k, read_catalog, write_catalog
from .core import parse_oad, verify_strength
from .extend import (ConsistencyError, extend_all, gma_report, seed)
from .gwp import (distance_distribution, format_fixed, gwp_from_distance)
from .isomorph import design_certificate, od_expand_to_iso, reduce_classes

log = logging.getLogger(__name__)

_CLI_METHODS = {"identity": "identity", "full": "full-refilter",
                "compressed": "compressed"}
_CLI_RELATIONS = {"iso": "oa-iso", "od": "od-equiv"}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="oaenum",
        description="Enumerate orthogonal-array classes by repeated "
                    "one-factor extension.")
    top.add_argument("--log-level", default="info",
                     choices=["debug", "info", "warning", "error"])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", help="start a catalog at k = strength")
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--strength", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("extend", help="extend a catalog one factor at a "
                                      "time up to --to")
    p.add_argument("--catalog", required=True)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--method", default="compressed",
                   choices=sorted(_CLI_METHODS))
    p.add_argument("--reduce", default="iso", choices=sorted(_CLI_RELATIONS))
    p.add_argument("--pruning", default="orbit", choices=["off", "orbit"])
    p.add_argument("--jobs", type=int, default=None,
                   help="worker count (default: OAENUM_JOBS or 1)")

    p = sub.add_parser("reduce", help="reduce design files to distinct "
                                      "classes")
    p.add_argument("--in", dest="files", nargs="+", required=True)
    p.add_argument("--relation", default="iso",
                   choices=sorted(_CLI_RELATIONS))

    p = sub.add_parser("expand-od", help="expand stored OD classes into "
                                         "isomorphism classes")
    p.add_argument("--catalog", required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("rank", help="rank stored classes by aberration")
    p.add_argument("--catalog", required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("verify", help="check a design file's strength")
    p.add_argument("--file", required=True)
    p.add_argument("--strength", type=int, required=True)

    p = sub.add_parser("stats", help="print a design file's word length "
                                     "pattern and distance distribution")
    p.add_argument("--file", required=True)
    return top


def _cmd_seed(args) -> int:
    cs = seed(args.runs, args.levels, args.strength)
    start = time.perf_counter()
    write_catalog(cs, args.out, wall_time=time.perf_counter() - start)
    print(f"seeded {args.out} with k={cs.factors}: {len(cs)} class")
    return 0


def _cmd_extend(args) -> int:
    k = max_k(args.catalog)
    if args.to <= k:
        print(f"catalog already reaches k={k}", file=sys.stderr)
        return 2
    cs = read_catalog(args.catalog, k)
    while cs.factors < args.to:
        start = time.perf_counter()
        cs = extend_all(cs, method=_CLI_METHODS[args.method],
                        reduce=_CLI_RELATIONS[args.reduce],
                        pruning=args.pruning, jobs=args.jobs)
        write_catalog(cs, args.catalog,
                      wall_time=time.perf_counter() - start)
        print(f"k={cs.factors}: {len(cs)} classes")
        if len(cs) == 0:
            print(f"nonexistent: no design at k={cs.factors}",
                  file=sys.stderr)
            return 1
    return 0


def _cmd_reduce(args) -> int:
    designs = []
    for name in args.files:
        with open(name, encoding="utf-8") as fh:
            designs.append(parse_oad(fh.read()))
    relation = "iso" if args.relation == "iso" else "od"
    reps = reduce_classes(designs, relation)
    kept = {design_certificate(d, relation) for d in reps}
    print(f"{len(reps)} classes among {len(designs)} designs")
    for name, d in zip(args.files, designs):
        cert = design_certificate(d, relation)
        if cert in kept:
            kept.remove(cert)
            print(f"keep {name} [{cert.digest[:16]}]")
    return 0


def _cmd_expand_od(args) -> int:
    cs = read_catalog(args.catalog, args.k)
    if cs.relation != "od-equiv":
        print(f"entry k={args.k} holds {cs.relation} classes, not "
              "od-equiv", file=sys.stderr)
        return 2
    expanded = od_expand_to_iso(cs.designs())
    print(f"{len(cs)} od classes expand to {len(expanded)} isomorphism "
          "classes")
    for d in expanded:
        print(f"  [{design_certificate(d, 'iso').digest[:16]}]")
    return 0


def _cmd_rank(args) -> int:
    cs = read_catalog(args.catalog, args.k)
    for line in gma_report(cs).lines():
        print(line)
    return 0


def _cmd_verify(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        d = parse_oad(fh.read())
    if args.strength < 0 or args.strength > d.factors:
        print(f"strength must be within 0..{d.factors}", file=sys.stderr)
        return 2
    if verify_strength(d, args.strength):
        print(f"{args.file}: strength {args.strength} holds")
        return 0
    print(f"{args.file}: strength {args.strength} fails", file=sys.stderr)
    return 1


def _cmd_stats(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        d = parse_oad(fh.read())
    dd = distance_distribution(d)
    g = gwp_from_distance(dd)
    gwp_text = ", ".join(format_fixed(v, 2) for v in g.values)
    dist_text = ", ".join(format_fixed(v, 3) for v in dd.values)
    print(f"A = ({gwp_text})")
    print(f"B = ({dist_text})")
    return 0


_COMMANDS = {
    "seed": _cmd_seed,
    "extend": _cmd_extend,
    "reduce": _cmd_reduce,
    "expand-od": _cmd_expand_od,
    "rank": _cmd_rank,
    "verify": _cmd_verify,
    "stats": _cmd_stats,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()),
                        format="%(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (CatalogCorruption, ConsistencyError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
