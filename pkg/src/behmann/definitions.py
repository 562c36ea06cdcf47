"""Auxiliary definitions, Ackermann's lemma and quantifier switching."""

from __future__ import annotations

from .errors import (
    CaptureError, EliminandInDefiniens, NotFresh, PolarityViolation, ShapeError,
)
from .formula import (
    And, Atom, ExistsPred, Forall, FreshNames, Not, Or, all_names,
    binders_above, children, complement, conj, disj, free_vars, iff, polarity_at,
    free_symbols, predicate_occurs, rename_bound, replace_at, replace_atoms, subformula_at,
    substitute,
    VAR_BINDERS, PRED_BINDERS,
)


def _match_instance(pattern, var, target):
    """The term ``t`` with ``pattern[var := t] == target``, or None."""
    symbols = free_symbols(target)
    for term in sorted(symbols.variables | symbols.constants, key=lambda t: (type(t).__name__, t.name)):
        try:
            if substitute(pattern, var, term) == target:
                return term
        except CaptureError:
            continue
    return None


def _instantiator(definiens, var, context):
    """Builder for :func:`replace_atoms` inserting ``definiens[var := t]``.

    The binders of the definiens are renamed apart from ``context`` first, so
    inserting a term never puts it under one of them.
    """
    renamed = rename_bound(definiens, FreshNames.avoiding(definiens, context))
    return lambda args: substitute(renamed, var, args[0])


def intro_definition(formula, definiens, var, positions, pred):
    """Replace the instances of ``definiens`` at ``positions`` by ``pred(t)``.

    Returns ``exists pred. (forall var. (pred(var) <-> definiens) & F')``.
    """
    if pred in all_names(formula, definiens):
        raise NotFresh(f"{pred} already occurs")
    if var not in free_vars(definiens):
        raise ShapeError(f"the definiens does not mention {var.name}")
    parameters = free_vars(definiens) - {var}
    result = formula
    for position in sorted(positions, key=lambda p: tuple(p), reverse=True):
        position = tuple(position)
        target = subformula_at(formula, position)
        term = _match_instance(definiens, var, target)
        if term is None:
            raise ShapeError(f"no instance of the definiens at {position}")
        bound, _ = binders_above(formula, position)
        if parameters & bound:
            raise CaptureError("a free variable of the definiens is bound at an occurrence")
        result = replace_at(result, position, Atom(pred, (term,)))
    definition = Forall(var, iff(Atom(pred, (var,)), definiens))
    return ExistsPred(pred, 1, conj(definition, result))


def definition_parts(formula):
    """``(pred, var, definiens)`` of ``forall var. (pred(var) <-> definiens)`` in iff encoding."""
    if not isinstance(formula, Forall) or not isinstance(formula.sub, And) or len(formula.sub.subs) != 2:
        return None
    var = formula.var
    first, second = formula.sub.subs
    first_members = first.subs if isinstance(first, Or) else (first,)
    head = first_members[0]
    if not (isinstance(head, Not) and isinstance(head.sub, Atom) and head.sub.args == (var,)):
        return None
    pred = head.sub.pred
    definiens = disj(*first_members[1:])
    if iff(head.sub, definiens) != formula.sub:
        return None
    return pred, var, definiens


def expand_definition(formula):
    """Inverse of :func:`intro_definition`: replace every ``pred(t)`` by the definiens."""
    if not isinstance(formula, ExistsPred) or not isinstance(formula.sub, And):
        raise ShapeError("expected exists p. (definition & body)")
    parts = definition_parts(formula.sub.subs[0])
    if parts is None or parts[0] != formula.pred:
        raise ShapeError("first conjunct is not a definition of the quantified predicate")
    pred, var, definiens = parts
    body = conj(*formula.sub.subs[1:])
    return replace_atoms(body, pred, _instantiator(definiens, var, body))


def occurrence_polarities(formula, pred):
    """Polarity (+1 or -1) of every occurrence of ``pred`` in ``formula``."""
    found = []

    def walk(node, path):
        if isinstance(node, Atom) and node.pred == pred:
            found.append((path, polarity_at(formula, path)))
            return
        if isinstance(node, PRED_BINDERS) and node.pred == pred:
            return
        for i, kid in enumerate(children(node)):
            walk(kid, path + (i,))

    walk(formula, ())
    return found


def ackermann_lemma_elim(pred, direction, definiens, var, body):
    """Eliminate ``exists pred`` over a one-sided definition.

    ``direction="imp"``: ``exists p. (forall x. (p(x) -> G) & F)`` with every
    occurrence of ``p`` in ``F`` positive.  ``"revimp"``: the converse
    implication with negative occurrences.  Both become ``F[p(t) := G[t]]``.
    """
    if predicate_occurs(pred, definiens):
        raise EliminandInDefiniens(f"{pred} occurs in its own definiens")
    wanted = 1 if direction == "imp" else -1
    if direction not in ("imp", "revimp"):
        raise ValueError("direction is 'imp' or 'revimp'")
    for path, polarity in occurrence_polarities(body, pred):
        if polarity != wanted:
            raise PolarityViolation(f"occurrence of {pred} at {path} has the wrong polarity")
    return replace_atoms(body, pred, _instantiator(definiens, var, body))


def ackermann_input(pred, direction, definiens, var, body):
    """The second-order formula that :func:`ackermann_lemma_elim` rewrites."""
    head = Atom(pred, (var,))
    if direction == "imp":
        clause = Or((Not(head), definiens))
    else:
        clause = Or((complement(definiens), head))
    return ExistsPred(pred, 1, And((Forall(var, clause), body)))


def quantifier_switch(formula, fresh=None):
    """``exists p. forall x. F[p(x, t)]`` becomes ``forall x. exists q. F[q(t)]``.

    ``q`` has one argument less than ``p``; every occurrence of ``p`` must
    have the switched variable ``x`` as first argument.
    """
    if not isinstance(formula, ExistsPred) or not isinstance(formula.sub, Forall):
        raise ShapeError("expected exists p. forall x. F")
    pred, arity, x, matrix = formula.pred, formula.arity, formula.sub.var, formula.sub.sub
    if arity < 1:
        raise ShapeError("the switched predicate needs at least one argument")
    if not predicate_occurs(pred, matrix):
        return formula.sub
    fresh = fresh or FreshNames.avoiding(formula)
    new_pred = fresh.name(pred)
    _check_switchable(matrix, pred, x)
    switched = replace_atoms(matrix, pred, lambda args: Atom(new_pred, tuple(args[1:])))
    return Forall(x, ExistsPred(new_pred, arity - 1, switched))


def _check_switchable(node, pred, var, shadowed=False):
    if isinstance(node, Atom) and node.pred == pred:
        if not node.args or node.args[0] != var or shadowed:
            raise ShapeError(f"an occurrence of {pred} lacks {var.name} as first argument")
        return
    if isinstance(node, VAR_BINDERS) and node.var == var:
        shadowed = True
    if isinstance(node, PRED_BINDERS) and node.pred == pred:
        return
    for kid in children(node):
        _check_switchable(kid, pred, var, shadowed)
