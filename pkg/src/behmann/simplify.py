"""Post-processing of elimination results.

Elimination produces correct but cluttered formulas: truth values, guard
equalities such as ``forall x. (x != u | F)``, vacuous quantifiers and wide
quantifier scopes.  :func:`simplify_result` removes these by combining the
rewrite-rule cleanup with miniscoping (quantifiers pushed into the clauses of
their scope) and substitution of guard equalities.
"""

from __future__ import annotations

from .errors import CaptureError, SizeLimitExceeded
from .formula import (
    Eq, Exists, Forall, Not, TRUE, alpha_key, children, conj, disj,
    occurs_free, substitute, with_children,
)
from .counting import counting_simplify
from .rewriter import cleanup, dnf_clauses

MINISCOPE_LIMIT = 20000


def drop_reflexive_equalities(formula):
    """``t = t`` becomes true; negations are left to truth-value rules."""
    if isinstance(formula, Eq):
        return TRUE if formula.left == formula.right else formula
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [drop_reflexive_equalities(k) for k in kids])


def _guard_term(literal, var, universal):
    """The term ``t`` if ``literal`` is ``var != t`` (universal) or ``var = t``."""
    if universal:
        if not (isinstance(literal, Not) and isinstance(literal.sub, Eq)):
            return None
        eq = literal.sub
    else:
        if not isinstance(literal, Eq):
            return None
        eq = literal
    if eq.left == var and eq.right != var:
        return eq.right
    if eq.right == var and eq.left != var:
        return eq.left
    return None


def _scope_clause(var, literals, universal):
    """Quantify one clause of the scope, moving independent members out."""
    outer_join, inner_join = (disj, disj) if universal else (conj, conj)
    quant = Forall if universal else Exists
    free = [lit for lit in literals if not occurs_free(var, lit)]
    dependent = [lit for lit in literals if occurs_free(var, lit)]
    if not dependent:
        return outer_join(*free)
    for i, lit in enumerate(dependent):
        term = _guard_term(lit, var, universal)
        if term is None:
            continue
        rest = dependent[:i] + dependent[i + 1:]
        try:
            substituted = [substitute(other, var, term) for other in rest]
        except CaptureError:
            continue
        return outer_join(*free, *substituted)
    return outer_join(*free, quant(var, inner_join(*dependent)))


def _miniscope_quantifier(node):
    var, body = node.var, node.sub
    if not occurs_free(var, body):
        return body
    universal = isinstance(node, Forall)
    target = Not(body) if universal else body
    try:
        clauses, table = dnf_clauses(target, limit=MINISCOPE_LIMIT)
    except SizeLimitExceeded:
        return node
    parts = []
    for clause in clauses:
        lits = sorted(clause, key=lambda l: (abs(l), l < 0))
        literals = [table.formula(-l if universal else l) for l in lits]
        parts.append(_scope_clause(var, literals, universal))
    return conj(*parts) if universal else disj(*parts)


def miniscope(formula):
    """Push plain individual quantifiers inward as far as clause structure allows."""
    kids = children(formula)
    if kids:
        formula = with_children(formula, [miniscope(k) for k in kids])
    if isinstance(formula, (Forall, Exists)):
        return _miniscope_quantifier(formula)
    return formula


def simplify_result(formula, max_rounds=8):
    """Cleanup, counting absorption and miniscoping until nothing changes."""
    seen = set()
    for _ in range(max_rounds):
        key = alpha_key(formula)
        if key in seen:
            break
        seen.add(key)
        formula = cleanup(drop_reflexive_equalities(formula))
        formula = counting_simplify(formula)
        formula = miniscope(formula)
    return cleanup(drop_reflexive_equalities(formula))
