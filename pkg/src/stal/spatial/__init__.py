"""Qualitative spatial algebras and constraint networks."""
from .algebra import (
    QualitativeAlgebra,
    Relation,
    algebra_from_dict,
    available_algebras,
    check_axioms,
    complement,
    compose,
    converse,
    load_algebra,
)
from .csp import QCSP, csp_consistent, csp_solve, path_consistency

__all__ = [
    "QCSP",
    "QualitativeAlgebra",
    "Relation",
    "algebra_from_dict",
    "available_algebras",
    "check_axioms",
    "complement",
    "compose",
    "converse",
    "csp_consistent",
    "csp_solve",
    "path_consistency",
    "load_algebra",
]
