"""Finitely presented groups: words, presentations, coset enumeration."""

from .cosets import CosetOverflow, CosetTable, coset_index, todd_coxeter
from .lowindex import is_normal_table, low_index_subgroups, schreier_words
from .presentation import Presentation, abelian_invariants, exponent_matrix, simplify
from .words import Word, commutator, evaluate

__all__ = [
    "CosetOverflow",
    "CosetTable",
    "Presentation",
    "Word",
    "abelian_invariants",
    "commutator",
    "coset_index",
    "evaluate",
    "exponent_matrix",
    "is_normal_table",
    "low_index_subgroups",
    "schreier_words",
    "simplify",
    "todd_coxeter",
]
