"""On-disk catalogs: one directory per parameter family.

A catalog directory holds a manifest.json plus one ".oad" file per class
representative, named by a prefix of the certificate digest. The manifest
records, per factor count, the relation, the file names, the certificate
digests, and ranking summaries. Manifest updates go through a temp file
and rename so an interrupted run never leaves a half-written manifest;
reruns with identical inputs produce byte-identical manifests except for
the wall-time fields.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .core import dump_oad, parse_oad
from .extend import ClassMember, ClassSet, gma_report
from .isomorph import design_certificate

MANIFEST_NAME = "manifest.json"

_RELATIONS = {"oa-iso": "iso", "od-equiv": "od"}


class CatalogCorruption(RuntimeError):
    """Stored designs no longer match their recorded certificates."""


def _manifest_path(directory) -> Path:
    return Path(directory) / MANIFEST_NAME


def load_manifest(directory) -> dict:
    path = _manifest_path(directory)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_manifest(directory, manifest: dict) -> None:
    path = _manifest_path(directory)
    tmp = path.with_suffix(".json.tmp")
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _file_names(digests: list[str]) -> list[str]:
    """Digest-prefix file names, extending prefixes on collision."""
    width = 16
    while width <= 64:
        names = [d[:width] + ".oad" for d in digests]
        if len(set(names)) == len(names):
            return names
        width += 8
    raise CatalogCorruption("certificate digests collide in full length")


def write_catalog(cs: ClassSet, directory,
                  wall_time: float = 0.0) -> dict:
    """Persist one ClassSet into the catalog; returns the manifest entry.

    The directory is created if missing. Parameters must match whatever
    the manifest already records; the entry for this k is replaced.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    params = {"runs": cs.runs, "levels": cs.levels, "strength": cs.strength}
    if _manifest_path(directory).exists():
        manifest = load_manifest(directory)
        have = {key: manifest[key] for key in params}
        if have != params:
            raise ValueError(f"catalog at {directory} holds {have}, "
                             f"not {params}")
    else:
        manifest = {**params, "entries": {}}

    report = gma_report(cs)
    digests = [e.member.certificate.digest for e in report.entries]
    names = _file_names(digests)
    for e, name in zip(report.entries, names):
        (directory / name).write_text(dump_oad(e.member.design),
                                      encoding="utf-8")
    entry = {
        "k": cs.factors,
        "relation": cs.relation,
        "count": len(cs),
        "files": names,
        "certificates": digests,
        "methods": [e.member.method for e in report.entries],
        "gwp": [e.gwp_text(cs.strength) for e in report.entries],
        "gma": [e.gma for e in report.entries],
        "wall_time": wall_time,
    }
    manifest["entries"][str(cs.factors)] = entry
    _write_manifest(directory, manifest)
    return entry


def read_catalog(directory, k: int) -> ClassSet:
    """Load the ClassSet stored for k, recomputing and checking every
    certificate against the manifest."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    try:
        entry = manifest["entries"][str(k)]
    except KeyError:
        raise KeyError(f"catalog has no entry for k={k}") from None
    if entry["count"] != len(entry["files"]):
        raise CatalogCorruption("entry count does not match its file list")
    relation = entry["relation"]
    members = []
    for name, digest, method in zip(entry["files"], entry["certificates"],
                                    entry["methods"]):
        d = parse_oad((directory / name).read_text(encoding="utf-8"))
        cert = design_certificate(d, _RELATIONS[relation])
        if cert.digest != digest:
            raise CatalogCorruption(f"{name} does not match its recorded "
                                    "certificate")
        members.append(ClassMember(design=d, certificate=cert,
                                   method=method))
    return ClassSet(runs=manifest["runs"], factors=k,
                    levels=manifest["levels"],
                    strength=manifest["strength"], relation=relation,
                    members=tuple(members))


def max_k(directory) -> int:
    """Largest factor count recorded in the catalog."""
    manifest = load_manifest(directory)
    ks = [int(v) for v in manifest["entries"]]
    if not ks:
        raise KeyError("catalog has no entries")
    return max(ks)
