"""Exact computations with diagonal quadratic forms over Q, R, Q_p, F_p and iterated Laurent series fields."""

from .arith import REAL, PrimePlace, hilbert_symbol, legendre, squarefree_part
from .fields import FieldError, Laurent, PAdics, FiniteField, Rationals, Reals, parse_field
from .forms import Form, FormError, form, hyperbolic, invariants, orthogonal_sum, repeat, scale, tensor
from .isotropy import (
    anisotropy_certificate,
    is_anisotropic,
    is_isometric,
    is_isotropic,
    is_subform,
    is_universal,
    represents,
    witt_decomposition,
    witt_index,
)
from .levels import LevelResult, level, q_length, q_length_form, relation_suite, sublevel
from .parser import form_from_source, parse_form, to_source
from .pfister import I1Hints, I1Interval, has_maximal_splitting, i1_interval, is_neighbor_of, is_pfister_similar, pfister

__version__ = "0.1.0"

__all__ = [
    "REAL", "PrimePlace", "hilbert_symbol", "legendre", "squarefree_part",
    "FieldError", "Laurent", "PAdics", "FiniteField", "Rationals", "Reals", "parse_field",
    "Form", "FormError", "form", "hyperbolic", "invariants", "orthogonal_sum", "repeat", "scale", "tensor",
    "anisotropy_certificate", "is_anisotropic", "is_isometric", "is_isotropic", "is_subform", "is_universal",
    "represents", "witt_decomposition", "witt_index",
    "LevelResult", "level", "q_length", "q_length_form", "relation_suite", "sublevel",
    "form_from_source", "parse_form", "to_source",
    "I1Hints", "I1Interval", "has_maximal_splitting", "i1_interval", "is_neighbor_of", "is_pfister_similar", "pfister",
]
