"""Elimination of monadic predicate quantifiers.

``exists p. F`` is brought into the *Hauptform*, a disjunction of p-free
guards conjoined with blocks

    exists p. ( allbut a_i x. (A_i | p(x))   for every A-entry
              & allbut b_i x. (B_i | ~p(x))  for every B-entry
              & atleast c_i x. (C_i & p(x))  for every C-entry
              & atleast d_i x. (D_i & ~p(x)) for every D-entry )

with p absent from the entries.  Expanding the counting quantifiers and
hoisting the new existential variables reduces each block to
``exists p. (forall x. (A | p(x)) & forall x. (B | ~p(x)))``, which the basic
lemma turns into ``forall x. (A | B)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .counting import counting_normal_form
from .errors import ClassError, EliminandOccurs, ShapeError
from .formula import (
    And, Atom, CountExists, CountForall, Eq, Exists, ExistsPred, Forall, ForallPred,
    FormulaClass, FreshNames, Not, Or, TRUE, Var, children, classify, complement, conj,
    disj, exists_many, neq, predicate_arities, predicate_occurs, substitute,
    with_children, )
from .rewriter import DEFAULT_SIZE_LIMIT, dnf_clauses
from .simplify import simplify_result


@dataclass
class Hauptform:
    """Normal form of ``exists p`` over one conjunction of p-literals.

    Each group holds ``(count, formula)`` pairs; the formulas mention the
    shared variable ``var`` and never the eliminand.  Without ``generalized``
    every count is 1 and the quantifiers render as plain ones.
    """

    eliminand: str
    var: Var
    A: list = field(default_factory=list)
    B: list = field(default_factory=list)
    C: list = field(default_factory=list)
    D: list = field(default_factory=list)
    generalized: bool = True

    def __post_init__(self):
        for group in (self.A, self.B, self.C, self.D):
            for count, entry in group:
                if count < 1:
                    raise ShapeError("Hauptform counts must be at least 1")
                if predicate_occurs(self.eliminand, entry):
                    raise EliminandOccurs(f"{self.eliminand} occurs in a Hauptform entry")
                if not self.generalized and count != 1:
                    raise ShapeError("counts above 1 need a generalized Hauptform")

    def p_atom(self):
        return Atom(self.eliminand, (self.var,))

    def blocks(self):
        x, px = self.var, self.p_atom()

        def universal(n, body):
            return Forall(x, body) if n == 1 else CountForall(n, x, body)

        def existential(n, body):
            return Exists(x, body) if n == 1 else CountExists(n, x, body)

        out = [universal(n, Or((entry, px))) for n, entry in self.A]
        out += [universal(n, Or((entry, Not(px)))) for n, entry in self.B]
        out += [existential(n, And((entry, px))) for n, entry in self.C]
        out += [existential(n, And((entry, Not(px)))) for n, entry in self.D]
        return out

    def render(self):
        """``exists p`` over the conjunction of the four groups."""
        return ExistsPred(self.eliminand, 1, conj(*self.blocks()))

    def entries(self):
        return [entry for group in (self.A, self.B, self.C, self.D) for _, entry in group]


# ---------------------------------------------------------------- basic lemma


def basic_elim(var, a_part, b_part, pred):
    """``exists p. (forall x. (A | p(x)) & forall x. (B | ~p(x)))`` is ``forall x. (A | B)``."""
    if predicate_occurs(pred, a_part) or predicate_occurs(pred, b_part):
        raise EliminandOccurs(f"{pred} occurs in the formulas to combine")
    return Forall(var, Or((a_part, b_part)))


# ---------------------------------------------------------------- Hauptform construction


def _check_class(formula, bound):
    if not classify(formula).within(bound):
        raise ClassError(f"formula is outside {bound.value}")


def _arity(pred, formula):
    arities = predicate_arities(formula, free_only=True)
    return arities.get(pred)


def _entry(literals, var, bound_var):
    """Conjunction of the other literals of a basic form, moved to ``var``."""
    return substitute(conj(*literals), bound_var, var)


def _classify_literal(pred, literal, var, hauptform):
    """File a p-literal of a normal-form clause into the Hauptform groups.

    Returns False if the literal does not mention ``pred``.
    """
    negated = isinstance(literal, Not)
    basic = literal.sub if negated else literal
    if isinstance(basic, Atom):
        if basic.pred != pred:
            return False
        (term,) = basic.args
        group = hauptform.B if negated else hauptform.A
        group.append((1, neq(var, term)))
        return True
    if not isinstance(basic, CountExists) or not predicate_occurs(pred, basic):
        return False
    n, y = basic.n, basic.var
    members = list(basic.sub.subs) if isinstance(basic.sub, And) else [basic.sub]
    positive = Atom(pred, (y,))
    has_positive = positive in members
    rest = [m for m in members if m != positive and m != Not(positive)]
    if not negated:
        group = hauptform.C if has_positive else hauptform.D
        group.append((n, _entry(rest, var, y)))
    else:
        # ~atleast n y. (p(y) & R) is allbut n y. (~p(y) | ~R)
        entry = substitute(disj(*[complement(r) for r in rest]), y, var)
        group = hauptform.B if has_positive else hauptform.A
        group.append((n, entry))
    return True


def decompose(pred, formula, fresh=None, limit=DEFAULT_SIZE_LIMIT):
    """``exists pred. formula`` as a list of ``(guard, hauptform or None)`` disjuncts."""
    fresh = fresh or FreshNames.avoiding(formula)
    normal = counting_normal_form(formula, limit=limit)
    clauses, table = dnf_clauses(normal, lambda f: isinstance(f, (Atom, Eq, CountExists)), limit)
    var = fresh.var("x")
    result = []
    for clause in clauses:
        literals = [table.formula(l) for l in sorted(clause, key=lambda l: (abs(l), l < 0))]
        form = Hauptform(pred, var)
        guard = [lit for lit in literals if not _classify_literal(pred, lit, var, form)]
        has_p = bool(form.A or form.B or form.C or form.D)
        form.generalized = any(n != 1 for n, _ in form.A + form.B + form.C + form.D)
        result.append((conj(*guard), form if has_p else None))
    return result


def build_hauptform(pred, formula, limit=DEFAULT_SIZE_LIMIT):
    """Equivalent of ``exists pred. formula`` whose predicate quantifiers are Hauptforms."""
    _check_class(formula, FormulaClass.MON_EQ)
    parts = []
    for guard, form in decompose(pred, formula, limit=limit):
        parts.append(guard if form is None else conj(guard, form.render()))
    return disj(*parts)


# ---------------------------------------------------------------- nullary eliminands


def normalize_nullary(pred, formula, limit=DEFAULT_SIZE_LIMIT):
    """``exists pred. formula`` with the quantifier only over ``pred`` or ``~pred``."""
    _check_class(formula, FormulaClass.MON_EQ)
    normal = counting_normal_form(formula, limit=limit)
    clauses, table = dnf_clauses(normal, limit=limit)
    target = Atom(pred, ())
    parts = []
    for clause in clauses:
        literals = [table.formula(l) for l in sorted(clause, key=lambda l: (abs(l), l < 0))]
        rest = [lit for lit in literals if lit not in (target, Not(target))]
        occurrence = [lit for lit in literals if lit in (target, Not(target))]
        if occurrence:
            rest.append(ExistsPred(pred, 0, occurrence[0]))
        parts.append(conj(*rest))
    return disj(*parts)


def _drop_nullary_blocks(formula, pred):
    if isinstance(formula, ExistsPred) and formula.pred == pred and formula.arity == 0:
        return TRUE
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [_drop_nullary_blocks(k, pred) for k in kids])


# ---------------------------------------------------------------- reduction to the basic lemma


@dataclass
class BasicReduction:
    """``exists prefix. (guard & exists p. (forall x. (A | p(x)) & forall x. (B | ~p(x))))``."""

    prefix: list
    guard: object
    var: Var
    A: object
    B: object


def hauptform_to_basic(form, fresh=None):
    """Expand counting quantifiers and hoist the new existential variables."""
    fresh = fresh or FreshNames.avoiding(*form.entries())
    fresh.reserve(form.var.name, form.eliminand)
    x = form.var
    prefix, guard = [], []
    a_parts, b_parts = [], []
    for group, base, parts in ((form.A, "x", a_parts), (form.B, "y", b_parts)):
        for n, entry in group:
            names = [fresh.var(base) for _ in range(n - 1)]
            prefix += names
            parts.append(disj(entry, *[Eq(x, v) for v in names]))
    for group, base, parts in ((form.C, "u", a_parts), (form.D, "v", b_parts)):
        for n, entry in group:
            names = [fresh.var(base) for _ in range(n)]
            prefix += names
            guard += [substitute(entry, x, v) for v in names]
            guard += [neq(s, t) for s, t in itertools.combinations(names, 2)]
            parts += [neq(x, v) for v in names]
    return BasicReduction(prefix, conj(*guard), x, conj(*a_parts), conj(*b_parts))


def reduction_result(reduction, pred):
    """Apply the basic lemma inside the reduction."""
    core = basic_elim(reduction.var, reduction.A, reduction.B, pred)
    return exists_many(reduction.prefix, conj(reduction.guard, core))


# ---------------------------------------------------------------- elimination


def eliminate_predicate(pred, formula, *, simplify=True, limit=DEFAULT_SIZE_LIMIT):
    """p-free equivalent of ``exists pred. formula``."""
    _check_class(formula, FormulaClass.MON_EQ)
    arity = _arity(pred, formula)
    if arity is None:
        return formula
    if arity == 0:
        result = _drop_nullary_blocks(normalize_nullary(pred, formula, limit), pred)
    else:
        fresh = FreshNames.avoiding(formula)
        parts = []
        for guard, form in decompose(pred, formula, fresh, limit):
            if form is None:
                parts.append(guard)
                continue
            parts.append(conj(guard, reduction_result(hauptform_to_basic(form, fresh), pred)))
        result = disj(*parts)
    return simplify_result(result) if simplify else result


def _guarded(guard, formula):
    return formula if guard == TRUE else conj(guard, formula)


def elimination_stages(pred, formula, limit=DEFAULT_SIZE_LIMIT):
    """Intermediate formulas of :func:`eliminate_predicate` as ``(stage, formula)`` pairs."""
    _check_class(formula, FormulaClass.MON_EQ)
    stages = [("input", ExistsPred(pred, _arity(pred, formula) or 1, formula))]
    if _arity(pred, formula) != 1:
        stages.append(("result", eliminate_predicate(pred, formula, limit=limit)))
        return stages
    stages.append(("counting normal form", counting_normal_form(formula, limit=limit)))
    fresh = FreshNames.avoiding(formula)
    decomposed = decompose(pred, formula, fresh, limit)
    stages.append(("Hauptform", disj(*[
        guard if form is None else _guarded(guard, form.render()) for guard, form in decomposed])))
    basic, raw = [], []
    for guard, form in decomposed:
        if form is None:
            basic.append(guard)
            raw.append(guard)
            continue
        reduction = hauptform_to_basic(form, fresh)
        x, px = reduction.var, Atom(pred, (reduction.var,))
        core = ExistsPred(pred, 1, conj(Forall(x, Or((reduction.A, px))), Forall(x, Or((reduction.B, Not(px))))))
        basic.append(_guarded(guard, exists_many(reduction.prefix, conj(reduction.guard, core))))
        raw.append(_guarded(guard, reduction_result(reduction, pred)))
    stages.append(("basic elimination shape", disj(*basic)))
    stages.append(("eliminated", disj(*raw)))
    stages.append(("simplified", simplify_result(disj(*raw))))
    return stages


def eliminate_all(formula, *, simplify=True, limit=DEFAULT_SIZE_LIMIT):
    """First-order equivalent of a formula with monadic predicate quantifiers.

    Quantifiers are eliminated innermost first, leftmost among siblings;
    ``forall p. G`` is handled as ``~exists p. ~G``.
    """
    _check_class(formula, FormulaClass.QMON_EQ)

    def walk(node):
        kids = children(node)
        if kids:
            node = with_children(node, [walk(k) for k in kids])
        if isinstance(node, ExistsPred):
            return eliminate_predicate(node.pred, node.sub, simplify=simplify, limit=limit)
        if isinstance(node, ForallPred):
            inner = eliminate_predicate(node.pred, complement(node.sub), simplify=simplify, limit=limit)
            return complement(inner)
        return node

    result = walk(formula)
    return simplify_result(result) if simplify else result


# ---------------------------------------------------------------- without equality


def noeq_resultant(form):
    """Exact p-free equivalent of a plain Hauptform in the closed shape.

    ``forall x. (&A_i | &B_i)`` plus one witness per C- and D-entry, pairwise
    distinct across the two groups, the C-witnesses satisfying every B_j and
    the D-witnesses every A_j.
    """
    if form.generalized:
        raise ShapeError("the closed resultant needs a plain Hauptform")
    fresh = FreshNames.avoiding(*form.entries())
    fresh.reserve(form.var.name, form.eliminand)
    x = form.var
    a_all = conj(*[e for _, e in form.A])
    b_all = conj(*[e for _, e in form.B])
    us = [fresh.var("u") for _ in form.C]
    vs = [fresh.var("v") for _ in form.D]
    parts = [neq(u, v) for u in us for v in vs]
    for u, (_, entry) in zip(us, form.C):
        parts.append(conj(substitute(entry, x, u), *[substitute(e, x, u) for _, e in form.B]))
    for v, (_, entry) in zip(vs, form.D):
        parts.append(conj(substitute(entry, x, v), *[substitute(e, x, v) for _, e in form.A]))
    head = Forall(x, Or((a_all, b_all)))
    if not parts:
        return head
    return conj(head, exists_many(us + vs, conj(*parts)))


def crude_resultant(form):
    """The weaker resultant without the disequalities between witnesses."""
    if form.generalized:
        raise ShapeError("the crude resultant needs a plain Hauptform")
    x = form.var
    a_all = conj(*[e for _, e in form.A])
    b_all = conj(*[e for _, e in form.B])
    parts = [Forall(x, Or((a_all, b_all)))]
    parts += [Exists(x, And((entry, b_all))) for _, entry in form.C]
    parts += [Exists(x, And((entry, a_all))) for _, entry in form.D]
    return conj(*parts)


def _noeq_parts(pred, formula, resultant, limit):
    _check_class(formula, FormulaClass.MON)
    arity = _arity(pred, formula)
    if arity is None:
        return formula
    if arity == 0:
        return _drop_nullary_blocks(normalize_nullary(pred, formula, limit), pred)
    parts = []
    for guard, form in decompose(pred, formula, limit=limit):
        parts.append(guard if form is None else conj(guard, resultant(form)))
    return disj(*parts)


def eliminate_noeq(pred, formula, *, simplify=False, limit=DEFAULT_SIZE_LIMIT):
    """Equality-free elimination in the closed resultant shape."""
    result = _noeq_parts(pred, formula, noeq_resultant, limit)
    return simplify_result(result) if simplify else result


def eliminate_crude(pred, formula, *, simplify=False, limit=DEFAULT_SIZE_LIMIT):
    """The crude resultant of ``exists pred. formula`` (entailed by the exact one)."""
    result = _noeq_parts(pred, formula, crude_resultant, limit)
    return simplify_result(result) if simplify else result


# ---------------------------------------------------------------- simultaneous elimination


def _clause_signs(clause, preds):
    if not isinstance(clause, Forall):
        raise ShapeError("every conjunct must be a universal clause")
    var = clause.var
    members = list(clause.sub.subs) if isinstance(clause.sub, Or) else [clause.sub]
    signs = {}
    rest = []
    for member in members:
        atom = member.sub if isinstance(member, Not) else member
        if isinstance(atom, Atom) and atom.pred in preds and atom.args == (var,):
            if atom.pred in signs:
                raise ShapeError(f"{atom.pred} occurs twice in one clause")
            signs[atom.pred] = not isinstance(member, Not)
        else:
            rest.append(member)
    if set(signs) != set(preds):
        raise ShapeError("a clause lacks one of the eliminands")
    return var, tuple(signs[p] for p in preds), disj(*rest)


def simultaneous_elim(preds, formula):
    """Eliminate ``exists p1 ... exists pn`` from a conjunction of 2^n clauses.

    Clause ``S`` reads ``forall x. (F_S | p_i(x) for i in S | ~p_i(x) otherwise)``;
    the result is ``forall x. (F_S1 | ... | F_Sk)``.
    """
    preds = list(preds)
    clauses = list(formula.subs) if isinstance(formula, And) else [formula]
    if len(clauses) != 2 ** len(preds):
        raise ShapeError(f"expected {2 ** len(preds)} clauses, found {len(clauses)}")
    seen = {}
    target = None
    for clause in clauses:
        var, signs, rest = _clause_signs(clause, preds)
        if any(predicate_occurs(p, rest) for p in preds):
            raise EliminandOccurs("an eliminand occurs in a clause remainder")
        if signs in seen:
            raise ShapeError("two clauses have the same sign pattern")
        if target is None:
            target = var
        seen[signs] = substitute(rest, var, target) if var != target else rest
    ordered = [seen[s] for s in itertools.product((True, False), repeat=len(preds))]
    return Forall(target, disj(*ordered))
