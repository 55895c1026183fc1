"""Downward relation algebra: evaluation, bounded satisfiability, and reductions."""

from .expr import (
    Atom, Composition, Difference, Intersection, Union, Vocabulary,
    difference_degree, parse_expression, relation_names, render_expression,
)
from .graph import Relation, Structure, active_domain, evaluate, is_satisfied, parse_structure
from .modelfind import Bounds, SatReport, check_finite_sat, encode_cnf, enumerate_models

__all__ = [
    "Atom", "Composition", "Difference", "Intersection", "Union", "Vocabulary",
    "difference_degree", "parse_expression", "relation_names", "render_expression",
    "Relation", "Structure", "active_domain", "evaluate", "is_satisfied", "parse_structure",
    "Bounds", "SatReport", "check_finite_sat", "encode_cnf", "enumerate_models",
]

__version__ = "0.1.0"
