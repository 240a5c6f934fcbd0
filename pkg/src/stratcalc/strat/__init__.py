"""Stratified diagram categories over finite posets and their checks."""

from .alignment import alignment_checks, excision_C, excision_L, mayer_vietoris_C, mayer_vietoris_L, y_commutation
from .families import Family, Fibered, Recollement, Tautological, link_gluing, stratum_profile
from .filtration import Filtration, FiltrationKind, filtration, filtration_identities, graded_piece, interchange
from .formulas import cover_formula_check, tcofib_formula_check, tfib_formula_check
from .micro import check_glue_conditions, glue, gluing_diagram, microcosm_check
from .nanocosm import NanocosmUnsupported, nanocosm_check, nanocosm_limit
from .operations import fundamental_ops, pushforward_check, quotient_check, refined_check, restricted_check
from .reflected import reflected_reconstruction
from .strictness import NotStrict, fibered_instances, strictness_check, tautological_witness, twisted_reconstruction
from .tstructure import is_coconnective, is_connective, orthogonality_check, tstructure_report

__all__ = [
    "Family",
    "Fibered",
    "Filtration",
    "FiltrationKind",
    "NanocosmUnsupported",
    "NotStrict",
    "Recollement",
    "Tautological",
    "alignment_checks",
    "check_glue_conditions",
    "cover_formula_check",
    "excision_C",
    "excision_L",
    "fibered_instances",
    "filtration",
    "filtration_identities",
    "fundamental_ops",
    "glue",
    "gluing_diagram",
    "graded_piece",
    "interchange",
    "is_coconnective",
    "is_connective",
    "link_gluing",
    "mayer_vietoris_C",
    "mayer_vietoris_L",
    "microcosm_check",
    "nanocosm_check",
    "nanocosm_limit",
    "orthogonality_check",
    "pushforward_check",
    "quotient_check",
    "reflected_reconstruction",
    "refined_check",
    "restricted_check",
    "strictness_check",
    "stratum_profile",
    "tautological_witness",
    "tcofib_formula_check",
    "tfib_formula_check",
    "tstructure_report",
    "twisted_reconstruction",
    "y_commutation",
]
