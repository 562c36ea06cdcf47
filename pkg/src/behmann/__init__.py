"""Monadic second-order quantifier elimination with counting quantifiers."""

from .counting import counting_normal_form, expand_counting, normal_form_noeq
from .decision import (
    CardinalitySpectrum, Verdict, decide_satisfiability, decide_validity, quine_decide,
)
from .elimination import eliminate_all, eliminate_crude, eliminate_noeq, eliminate_predicate
from .errors import BehmannError
from .formula import FormulaClass, classify
from .oracle import check_entails, check_equiv, find_countermodel, find_model
from .polyadic import NotMonadizable, eliminate_polyadic
from .syntax import parse, to_text, to_unicode

__all__ = [
    "BehmannError", "CardinalitySpectrum", "FormulaClass", "NotMonadizable", "Verdict",
    "check_entails", "check_equiv", "classify", "counting_normal_form", "decide_satisfiability",
    "decide_validity", "eliminate_all", "eliminate_crude", "eliminate_noeq", "eliminate_polyadic",
    "eliminate_predicate", "expand_counting", "find_countermodel", "find_model",
    "normal_form_noeq", "parse", "quine_decide", "to_text", "to_unicode",
]
