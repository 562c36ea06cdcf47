"""Counting quantifiers: expansions, simplification and the counting normal form.

The normal form is a Boolean combination of *basic* formulas:

* nullary atoms,
* unary atoms whose argument is a constant or free variable,
* equalities between constants and free variables,
* ``atleast n x. L1(x) & ... & Lk(x)`` with pairwise different and pairwise
  non-complementary unary literals on ``x``.

It is computed by eliminating innermost individual quantifiers one at a time,
each over a body that is already such a combination.
"""

from __future__ import annotations

import itertools

from .errors import BadArgs, BadCount, ClassError
from .formula import (
    And, Atom, Bottom, CountExists, CountForall, Eq, Exists, FALSE, Forall,
    FormulaClass, FreshNames, Not, Or, Top, alpha_key, classify, complement,
    conj, disj, exists_many, forall_many, neq, nnf, occurs_free, rename_bound,
    substitute, terms_of, children, with_children,
)
from .rewriter import (
    DEFAULT_SIZE_LIMIT, FLATTEN_RULES, L2R, RuleId, TRUTH_VALUE_RULES, dnf_clauses,
    rewrite_fixpoint,
)

MODES = ("conj", "disj")


# ---------------------------------------------------------------- expansions


def _fresh_for(formula, var, fresh):
    if fresh is None:
        fresh = FreshNames.avoiding(formula)
        fresh.reserve(var.name)
    return fresh


def expand_exists_counting(n, var, body, mode="poly", fresh=None):
    """First-order formula equivalent to ``atleast n var. body``."""
    if n < 1:
        raise BadCount(f"counting index must be at least 1, got {n}")
    fresh = _fresh_for(body, var, fresh)
    if mode == "poly":
        names = [fresh.var(var.name) for _ in range(n)]
        parts = [substitute(body, var, v) for v in names]
        parts += [neq(u, v) for u, v in itertools.combinations(names, 2)]
        return exists_many(names, conj(*parts))
    if mode == "lin":
        names = [fresh.var(var.name) for _ in range(n - 1)]
        inner = Exists(var, conj(body, *[neq(var, v) for v in names]))
        return forall_many(names, inner)
    raise BadArgs(f"unknown expansion mode {mode!r}")


def expand_forall_counting(n, var, body, mode="poly", fresh=None):
    """First-order formula equivalent to ``allbut n var. body``."""
    if n < 1:
        raise BadCount(f"counting index must be at least 1, got {n}")
    fresh = _fresh_for(body, var, fresh)
    if mode == "poly":
        names = [fresh.var(var.name) for _ in range(n)]
        parts = [substitute(body, var, v) for v in names]
        parts += [Eq(u, v) for u, v in itertools.combinations(names, 2)]
        return forall_many(names, disj(*parts))
    if mode == "lin":
        names = [fresh.var(var.name) for _ in range(n - 1)]
        inner = Forall(var, disj(body, *[Eq(var, v) for v in names]))
        return exists_many(names, inner)
    raise BadArgs(f"unknown expansion mode {mode!r}")


def expand_counting(formula, mode="poly", fresh=None):
    """Replace every counting quantifier by its first-order expansion."""
    fresh = fresh or FreshNames.avoiding(formula)

    def walk(node):
        kids = [walk(k) for k in children(node)]
        if kids:
            node = with_children(node, kids)
        if isinstance(node, CountExists):
            return expand_exists_counting(node.n, node.var, node.sub, mode, fresh)
        if isinstance(node, CountForall):
            return expand_forall_counting(node.n, node.var, node.sub, mode, fresh)
        return node

    return walk(formula)


# ---------------------------------------------------------------- simplification

COUNTING_RULES = TRUTH_VALUE_RULES + FLATTEN_RULES + (
    (RuleId.SubsAndAbsorp, L2R), (RuleId.SubsOrAbsorp, L2R),
)


def counting_simplify(formula, trace=None):
    """Truth-value laws of the counting quantifiers plus absorption.

    Among same-scope counting literals the stronger conjunct absorbs the
    weaker one, and dually for disjunctions.
    """
    return rewrite_fixpoint(formula, COUNTING_RULES, trace)


# ---------------------------------------------------------------- NDT and the guarded step


def _check_terms(body, var, terms, m=None):
    terms = list(terms)
    if len(set(terms)) != len(terms):
        raise BadArgs("terms must be distinct")
    for term in terms:
        if term == var:
            raise BadArgs("terms must differ from the quantified variable")
        if term in terms_of(body):
            raise BadArgs(f"term {term.name} occurs in the formula")
    if m is not None and not 1 <= m <= len(terms):
        raise BadArgs(f"m must lie between 1 and {len(terms)}")
    return terms


def ndt(body, var, terms, m):
    """No ``m`` of the terms denote distinct individuals satisfying ``body``."""
    terms = _check_terms(body, var, terms, m)
    return _ndt(body, var, terms, m)


def _ndt(body, var, terms, m):
    clauses = []
    for subset in itertools.combinations(terms, m):
        members = [complement(substitute(body, var, t)) for t in subset]
        members += [Eq(s, t) for s, t in itertools.combinations(subset, 2)]
        clauses.append(disj(*members))
    return conj(*clauses)


def eliminate_guarded_exists(body, var, terms, mode="conj"):
    """Counting form of ``exists var. (body & var != t1 & ... & var != tn)``."""
    terms = _check_terms(body, var, terms)
    if mode not in MODES:
        raise BadArgs(f"unknown mode {mode!r}")
    n = len(terms)
    if n == 0:
        return CountExists(1, var, body)
    if mode == "disj":
        parts = [conj(CountExists(m, var, body), _ndt(body, var, terms, m)) for m in range(1, n + 1)]
        return disj(*parts, CountExists(n + 1, var, body))
    parts = [disj(CountExists(m + 1, var, body), _ndt(body, var, terms, m)) for m in range(1, n + 1)]
    return conj(CountExists(1, var, body), *parts)


# ---------------------------------------------------------------- normal form


def _is_basic(formula):
    return isinstance(formula, (Atom, Eq, CountExists))


def _literal_sort_key(literal):
    atom = literal.sub if isinstance(literal, Not) else literal
    return (atom.pred, isinstance(literal, Not))


def make_basic(n, var, literals):
    """``atleast n var. (conjunction of literals)`` in canonical form.

    Duplicates are merged and a complementary pair collapses to false.
    """
    unique = {}
    for lit in literals:
        unique.setdefault(alpha_key(lit), lit)
    keys = set(unique)
    for key, lit in unique.items():
        if alpha_key(complement(lit)) in keys:
            return FALSE
    ordered = sorted(unique.values(), key=_literal_sort_key)
    return CountExists(n, var, conj(*ordered))


class _Normalizer:
    def __init__(self, formula, mode, limit):
        if mode not in MODES:
            raise BadArgs(f"unknown mode {mode!r}")
        self.mode = mode
        self.limit = limit
        self.fresh = FreshNames.avoiding(formula)

    def run(self, formula):
        return self.walk(nnf(rename_bound(formula, self.fresh, minimal=True)))

    def walk(self, node):
        if isinstance(node, (Top, Bottom, Atom, Eq)):
            return node
        if isinstance(node, Not):
            return Not(self.walk(node.sub))
        if isinstance(node, And):
            return conj(*[self.walk(s) for s in node.subs])
        if isinstance(node, Or):
            return disj(*[self.walk(s) for s in node.subs])
        body = self.walk(node.sub)
        if isinstance(node, Exists):
            return self.exists(node.var, body)
        if isinstance(node, Forall):
            return complement(self.exists(node.var, complement(body)))
        if isinstance(node, CountExists):
            return self.count_exists(node.n, node.var, body)
        if isinstance(node, CountForall):
            return complement(self.count_exists(node.n, node.var, complement(body)))
        raise ClassError(f"unexpected node in counting normal form: {type(node).__name__}")

    def count_exists(self, n, var, body):
        if n == 1:
            return self.exists(var, body)
        literals = _var_literals(body, var)
        if literals is not None:
            return make_basic(n, var, literals)
        names = [self.fresh.var(var.name) for _ in range(n)]
        parts = [substitute(body, var, v) for v in names]
        parts += [neq(u, v) for u, v in itertools.combinations(names, 2)]
        result = conj(*parts)
        for v in reversed(names):
            result = self.exists(v, result)
        return result

    def exists(self, var, body):
        if not occurs_free(var, body):
            return body
        clauses, table = dnf_clauses(body, _is_basic, self.limit)
        results = []
        for clause in clauses:
            literals = [table.formula(l) for l in sorted(clause, key=lambda l: (abs(l), l < 0))]
            results.append(self.exists_conjunction(var, literals))
        return disj(*results)

    def exists_conjunction(self, var, literals):
        kept = []
        for lit in literals:
            eq = lit.sub if isinstance(lit, Not) else lit
            if isinstance(eq, Eq):
                if eq.left == eq.right:
                    if isinstance(lit, Not):
                        return FALSE
                    continue
                if eq.right == var:
                    eq = Eq(eq.right, eq.left)
                    lit = Not(eq) if isinstance(lit, Not) else eq
            kept.append(lit)
        unique = {}
        for lit in kept:
            unique.setdefault(alpha_key(lit), lit)
        kept = list(unique.values())
        guard = [lit for lit in kept if not occurs_free(var, lit)]
        scoped = [lit for lit in kept if occurs_free(var, lit)]
        if not scoped:
            return conj(*guard)
        for lit in scoped:
            if isinstance(lit, Eq):
                witness = lit.right
                rest = [substitute(other, var, witness) for other in scoped if other is not lit]
                return conj(*guard, *_drop_reflexive(rest))
        disequal = []
        unary = []
        for lit in scoped:
            if isinstance(lit, Not) and isinstance(lit.sub, Eq):
                if lit.sub.right not in disequal:
                    disequal.append(lit.sub.right)
            else:
                unary.append(lit)
        body = conj(*sorted({alpha_key(u): u for u in unary}.values(), key=_literal_sort_key))
        step = eliminate_guarded_exists(body, var, disequal, self.mode)
        return conj(*guard, _canonical_basics(step))


def _drop_reflexive(literals):
    out = []
    for lit in literals:
        eq = lit.sub if isinstance(lit, Not) else lit
        if isinstance(eq, Eq) and eq.left == eq.right:
            if isinstance(lit, Not):
                return [FALSE]
            continue
        out.append(lit)
    return out


def _canonical_basics(formula):
    if isinstance(formula, CountExists):
        return make_basic(formula.n, formula.var, _conjuncts(formula.sub))
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [_canonical_basics(k) for k in kids])


def _conjuncts(formula):
    if isinstance(formula, Top):
        return []
    if isinstance(formula, And):
        return list(formula.subs)
    return [formula]


def _var_literals(body, var):
    """The literals of ``body`` if it is a conjunction of unary literals on ``var``."""
    literals = _conjuncts(body)
    for lit in literals:
        atom = lit.sub if isinstance(lit, Not) else lit
        if not (isinstance(atom, Atom) and atom.args == (var,)):
            return None
    return literals


def counting_normal_form(formula, mode="conj", limit=DEFAULT_SIZE_LIMIT):
    """Equivalent Boolean combination of basic formulas (see module docstring)."""
    if not classify(formula).within(FormulaClass.MON_EQ):
        raise ClassError("counting normal form needs a monadic first-order formula")
    result = _Normalizer(formula, mode, limit).run(formula)
    return counting_simplify(result)


def normal_form_noeq(formula, limit=DEFAULT_SIZE_LIMIT):
    """Normal form of an equality-free formula using plain existentials."""
    if not classify(formula).within(FormulaClass.MON):
        raise ClassError("the equality-free normal form needs an equality-free monadic formula")
    result = counting_normal_form(formula, limit=limit)
    return _plain_existentials(result)


def _plain_existentials(formula):
    if isinstance(formula, CountExists) and formula.n == 1:
        return Exists(formula.var, formula.sub)
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [_plain_existentials(k) for k in kids])


# ---------------------------------------------------------------- shape check


def validate_cqnf(formula, allow_equality=True):
    """None if ``formula`` has normal-form shape, else a description of the problem."""
    return _validate(formula, allow_equality)


def _validate(node, allow_equality):
    if isinstance(node, (Top, Bottom)):
        return None
    if isinstance(node, (Not,)):
        return _validate(node.sub, allow_equality)
    if isinstance(node, (And, Or)):
        for sub in node.subs:
            problem = _validate(sub, allow_equality)
            if problem:
                return problem
        return None
    if isinstance(node, Atom):
        if len(node.args) > 1:
            return f"atom {node} is not monadic"
        return None
    if isinstance(node, Eq):
        return None if allow_equality else f"equality {node} not allowed"
    if isinstance(node, (CountExists, Exists)):
        n = node.n if isinstance(node, CountExists) else 1
        if not allow_equality and n != 1:
            return f"counting index {n} not allowed without equality"
        literals = _var_literals(node.sub, node.var)
        if literals is None:
            return f"scope of {node} is not a conjunction of literals on {node.var.name}"
        keys = [alpha_key(lit) for lit in literals]
        if len(set(keys)) != len(keys):
            return f"repeated literal in {node}"
        if any(alpha_key(complement(lit)) in keys for lit in literals):
            return f"complementary literals in {node}"
        return None
    return f"{type(node).__name__} is not allowed in the normal form"
