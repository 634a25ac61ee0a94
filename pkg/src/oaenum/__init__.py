"""Enumeration of orthogonal-array classes by one-factor extension.

The pipeline seeds a catalog with the unique strength-t array at k = t,
then repeatedly extends every class representative by one factor through
an integer-system formulation, rejecting isomorphic duplicates, until the
target factor count is reached or no array exists. Classes are ranked by
generalized word length pattern.
"""

from .core import (Design, SignedDesign, design, dump_oad, lex_sort_rows,
                   parse_oad, verify_strength)
from .extend import (ClassMember, ClassSet, ConsistencyError, extend_all,
                     enumerate_up_to, gma_report, seed)
from .formulations import (build_compressed_extension, build_full_formulation,
                           build_full_refilter, build_identity_extension,
                           p_max_bound)
from .gwp import (distance_distribution, gwp_from_distance, gwp_two_level,
                  krawtchouk, strength_from_gwp)
from .ilpsolve import IntEqSystem, LinearRow, enumerate_solutions, propagate
from .isomorph import (Certificate, design_certificate, od_expand_to_iso,
                       reduce_classes, theorem1_check)
from .catalog import CatalogCorruption, read_catalog, write_catalog

__all__ = [
    "CatalogCorruption",
    "Certificate",
    "ClassMember",
    "ClassSet",
    "ConsistencyError",
    "Design",
    "IntEqSystem",
    "LinearRow",
    "SignedDesign",
    "build_compressed_extension",
    "build_full_formulation",
    "build_full_refilter",
    "build_identity_extension",
    "design",
    "design_certificate",
    "distance_distribution",
    "dump_oad",
    "enumerate_solutions",
    "enumerate_up_to",
    "extend_all",
    "gma_report",
    "gwp_from_distance",
    "gwp_two_level",
    "krawtchouk",
    "lex_sort_rows",
    "od_expand_to_iso",
    "p_max_bound",
    "parse_oad",
    "propagate",
    "read_catalog",
    "reduce_classes",
    "seed",
    "strength_from_gwp",
    "theorem1_check",
    "verify_strength",
    "write_catalog",
]
