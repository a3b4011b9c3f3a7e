"""Finitely presented groups: abelianization, finite-index subgroups, Dehn's algorithm."""

from .core import (
    FinitePresentation,
    free_presentation,
    parse_presentation,
    presentation_from_json,
    surface_presentation,
)
from .dehn import DehnSolver, dehn_is_trivial
from .schreier import (
    CosetTable,
    check_relators,
    coset_table_from_cyclic_hom,
    reidemeister_schreier,
    schreier_transversal,
)
from .smith import (
    AbelianInvariants,
    IntMatrix,
    SnfResult,
    abelianization,
    has_infinite_abelian_image,
    image_in_abelianization,
    relation_matrix,
    smith_normal_form,
)

__all__ = [
    "AbelianInvariants",
    "CosetTable",
    "DehnSolver",
    "FinitePresentation",
    "IntMatrix",
    "SnfResult",
    "abelianization",
    "check_relators",
    "coset_table_from_cyclic_hom",
    "dehn_is_trivial",
    "free_presentation",
    "has_infinite_abelian_image",
    "image_in_abelianization",
    "parse_presentation",
    "presentation_from_json",
    "reidemeister_schreier",
    "relation_matrix",
    "schreier_transversal",
    "smith_normal_form",
    "surface_presentation",
]
