"""Formula and term representation with the structural primitives.

Formulas are immutable dataclass trees.  ``And``/``Or`` nodes are n-ary; the
smart constructors :func:`conj` and :func:`disj` flatten nested nodes and
collapse the zero and one child cases, while the raw dataclass constructors
keep whatever shape they are given (rewrite traces rely on that).

Domains are always nonempty, so ``exists x. true`` is valid.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import BadCount, CaptureError


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    """An individual variable."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """An individual constant.  Binders never capture constants."""

    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


# ---------------------------------------------------------------- formulas


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        from .syntax import to_text

        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Atom(Formula):
    """Predicate application; ``args`` is empty for nullary predicates."""

    pred: str
    args: tuple = ()

    @property
    def arity(self):
        return len(self.args)


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    subs: tuple


@dataclass(frozen=True)
class Or(Formula):
    subs: tuple


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    sub: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    sub: Formula


@dataclass(frozen=True)
class CountExists(Formula):
    """At least ``n`` individuals satisfy ``sub``."""

    n: int
    var: Var
    sub: Formula

    def __post_init__(self):
        if self.n < 1:
            raise BadCount(f"counting index must be at least 1, got {self.n}")


@dataclass(frozen=True)
class CountForall(Formula):
    """All but fewer than ``n`` individuals satisfy ``sub``."""

    n: int
    var: Var
    sub: Formula

    def __post_init__(self):
        if self.n < 1:
            raise BadCount(f"counting index must be at least 1, got {self.n}")


@dataclass(frozen=True)
class ForallPred(Formula):
    pred: str
    arity: int
    sub: Formula


@dataclass(frozen=True)
class ExistsPred(Formula):
    pred: str
    arity: int
    sub: Formula


IND_QUANTIFIERS = (Forall, Exists)
COUNT_QUANTIFIERS = (CountExists, CountForall)
VAR_BINDERS = IND_QUANTIFIERS + COUNT_QUANTIFIERS
PRED_BINDERS = (ForallPred, ExistsPred)
BINDERS = VAR_BINDERS + PRED_BINDERS
JUNCTIONS = (And, Or)


class FormulaClass(enum.Enum):
    MON = "MON"
    MON_EQ = "MON="
    QMON = "QMON"
    QMON_EQ = "QMON="
    GENERAL = "GENERAL"

    def within(self, other):
        """True if every formula of this class belongs to ``other``."""
        return other in _CLASS_SUPERSETS[self]


_CLASS_SUPERSETS = {
    FormulaClass.MON: {FormulaClass.MON, FormulaClass.MON_EQ, FormulaClass.QMON,
                       FormulaClass.QMON_EQ, FormulaClass.GENERAL},
    FormulaClass.MON_EQ: {FormulaClass.MON_EQ, FormulaClass.QMON_EQ, FormulaClass.GENERAL},
    FormulaClass.QMON: {FormulaClass.QMON, FormulaClass.QMON_EQ, FormulaClass.GENERAL},
    FormulaClass.QMON_EQ: {FormulaClass.QMON_EQ, FormulaClass.GENERAL},
    FormulaClass.GENERAL: {FormulaClass.GENERAL},
}


# ---------------------------------------------------------------- construction


def atom(pred, *args):
    return Atom(pred, tuple(args))


def conj(*subs):
    """Flattening conjunction; no children gives TRUE, one child gives it back."""
    return _junction(And, subs, TRUE)


def disj(*subs):
    """Flattening disjunction; no children gives FALSE, one child gives it back."""
    return _junction(Or, subs, FALSE)


def _junction(kind, subs, empty):
    if len(subs) == 1 and not isinstance(subs[0], Formula):
        subs = tuple(subs[0])
    flat = []
    for sub in subs:
        if isinstance(sub, kind):
            flat.extend(sub.subs)
        else:
            flat.append(sub)
    if not flat:
        return empty
    if len(flat) == 1:
        return flat[0]
    return kind(tuple(flat))


def neq(left, right):
    return Not(Eq(left, right))


def complement(formula):
    """``G`` for ``~G``, otherwise ``~F``."""
    if isinstance(formula, Not):
        return formula.sub
    return Not(formula)


def implies(left, right):
    return disj(complement(left), right)


def iff(left, right):
    """Biconditional encoded as (~L | R) & (L | ~R)."""
    return conj(disj(complement(left), right), disj(left, complement(right)))


def forall_many(variables, body):
    for var in reversed(list(variables)):
        body = Forall(var, body)
    return body


def exists_many(variables, body):
    for var in reversed(list(variables)):
        body = Exists(var, body)
    return body


# ---------------------------------------------------------------- traversal


def children(formula):
    if isinstance(formula, JUNCTIONS):
        return formula.subs
    if isinstance(formula, Not) or isinstance(formula, BINDERS):
        return (formula.sub,)
    return ()


def with_children(formula, kids):
    """Rebuild ``formula`` with new children, keeping its node type."""
    kids = tuple(kids)
    if isinstance(formula, JUNCTIONS):
        return type(formula)(kids)
    if isinstance(formula, Not):
        return Not(kids[0])
    if isinstance(formula, IND_QUANTIFIERS):
        return type(formula)(formula.var, kids[0])
    if isinstance(formula, COUNT_QUANTIFIERS):
        return type(formula)(formula.n, formula.var, kids[0])
    if isinstance(formula, PRED_BINDERS):
        return type(formula)(formula.pred, formula.arity, kids[0])
    return formula


def map_children(formula, fn):
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [fn(kid) for kid in kids])


def subformulas(formula):
    """Yield every subformula in pre-order, the formula itself first."""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def size(formula):
    return sum(1 for _ in subformulas(formula))


def terms_of(formula):
    """Terms of an atom or equality."""
    if isinstance(formula, Atom):
        return formula.args
    if isinstance(formula, Eq):
        return (formula.left, formula.right)
    return ()


def subformula_at(formula, path):
    node = formula
    for index in path:
        kids = children(node)
        if index < 0 or index >= len(kids):
            raise IndexError(f"no child {index} at this position")
        node = kids[index]
    return node


def replace_at(formula, path, replacement):
    """Replace the subformula at ``path``; the surrounding shape is kept as is."""
    if not path:
        return replacement
    kids = list(children(formula))
    head = path[0]
    if head < 0 or head >= len(kids):
        raise IndexError(f"no child {head} at this position")
    kids[head] = replace_at(kids[head], path[1:], replacement)
    return with_children(formula, kids)


def polarity_at(formula, path):
    """+1 if the position lies under an even number of negations, else -1."""
    sign = 1
    node = formula
    for index in path:
        if isinstance(node, Not):
            sign = -sign
        node = children(node)[index]
    return sign


def binders_above(formula, path):
    """Variables and predicates bound by binders strictly above ``path``."""
    bound_vars, bound_preds = set(), set()
    node = formula
    for index in path:
        if isinstance(node, VAR_BINDERS):
            bound_vars.add(node.var)
        elif isinstance(node, PRED_BINDERS):
            bound_preds.add(node.pred)
        node = children(node)[index]
    return bound_vars, bound_preds


# ---------------------------------------------------------------- symbols


class FreeSymbols(NamedTuple):
    variables: frozenset
    constants: frozenset
    predicates: frozenset


def free_symbols(formula):
    """Free variables, constants and free predicate names of ``formula``."""
    variables, constants, predicates = set(), set(), set()
    _collect_free(formula, frozenset(), frozenset(), variables, constants, predicates)
    return FreeSymbols(frozenset(variables), frozenset(constants), frozenset(predicates))


def _collect_free(formula, bound_vars, bound_preds, variables, constants, predicates):
    if isinstance(formula, (Atom, Eq)):
        if isinstance(formula, Atom) and formula.pred not in bound_preds:
            predicates.add(formula.pred)
        for term in terms_of(formula):
            if isinstance(term, Const):
                constants.add(term)
            elif term not in bound_vars:
                variables.add(term)
        return
    if isinstance(formula, VAR_BINDERS):
        bound_vars = bound_vars | {formula.var}
    elif isinstance(formula, PRED_BINDERS):
        bound_preds = bound_preds | {formula.pred}
    for kid in children(formula):
        _collect_free(kid, bound_vars, bound_preds, variables, constants, predicates)


def free_vars(formula):
    return free_symbols(formula).variables


def occurs_free(var, formula):
    return var in free_symbols(formula).variables


def predicate_arities(formula, free_only=True):
    """Map each predicate name to its arity; free occurrences only by default."""
    result = {}

    def walk(node, bound):
        if isinstance(node, Atom):
            if not (free_only and node.pred in bound):
                result.setdefault(node.pred, node.arity)
            return
        if isinstance(node, PRED_BINDERS):
            bound = bound | {node.pred}
        for kid in children(node):
            walk(kid, bound)

    walk(formula, frozenset())
    return result


def predicate_occurs(pred, formula):
    """True if ``pred`` occurs free in ``formula``."""
    return pred in free_symbols(formula).predicates


def all_names(*formulas):
    """Every identifier used anywhere in the formulas, bound or free."""
    names = set()
    for formula in formulas:
        for node in subformulas(formula):
            if isinstance(node, Atom):
                names.add(node.pred)
            if isinstance(node, VAR_BINDERS):
                names.add(node.var.name)
            if isinstance(node, PRED_BINDERS):
                names.add(node.pred)
            for term in terms_of(node):
                names.add(term.name)
    return names


def quantifier_rank(formula, count_weight=True):
    """Nesting depth of quantifiers; a counting quantifier weighs its index."""
    if isinstance(formula, COUNT_QUANTIFIERS):
        weight = formula.n if count_weight else 1
        return weight + quantifier_rank(formula.sub, count_weight)
    if isinstance(formula, BINDERS):
        return 1 + quantifier_rank(formula.sub, count_weight)
    kids = children(formula)
    return max((quantifier_rank(kid, count_weight) for kid in kids), default=0)


# ---------------------------------------------------------------- fresh names


_SUFFIX = re.compile(r"^(.*?)(\d+)$")


class FreshNames:
    """Generates names not used so far, as base name plus numeric suffix.

    The counter is per base name and only ever grows, so a pipeline that owns
    one instance never hands out the same name twice.
    """

    def __init__(self, used=()):
        self.used = set(used)
        self.counters = {}

    @classmethod
    def avoiding(cls, *formulas):
        return cls(all_names(*formulas))

    def reserve(self, *names):
        self.used.update(names)

    def name(self, base):
        match = _SUFFIX.match(base)
        if match and match.group(1):
            base = match.group(1)
        counter = self.counters.get(base, 0)
        while True:
            counter += 1
            candidate = f"{base}{counter}"
            if candidate not in self.used:
                break
        self.counters[base] = counter
        self.used.add(candidate)
        return candidate

    def var(self, base="x"):
        return Var(self.name(base))


# ---------------------------------------------------------------- substitution


def substitute(formula, var, term):
    """Replace the free occurrences of ``var`` by ``term`` without capture.

    Raises CaptureError if a free occurrence of ``var`` sits in the scope of a
    binder of ``term``.
    """
    return _subst(formula, var, term, False)


def _subst(formula, var, term, under_term_binder):
    if isinstance(formula, (Atom, Eq)):
        if var not in terms_of(formula):
            return formula
        if under_term_binder:
            raise CaptureError(f"substituting {term} for {var} would be captured")
        if isinstance(formula, Atom):
            return Atom(formula.pred, tuple(term if a == var else a for a in formula.args))
        left = term if formula.left == var else formula.left
        right = term if formula.right == var else formula.right
        return Eq(left, right)
    if isinstance(formula, VAR_BINDERS):
        if formula.var == var:
            return formula
        captured = under_term_binder or formula.var == term
        sub = _subst(formula.sub, var, term, captured)
        return formula if sub is formula.sub else with_children(formula, [sub])
    kids = children(formula)
    if not kids:
        return formula
    new = [_subst(kid, var, term, under_term_binder) for kid in kids]
    if all(a is b for a, b in zip(new, kids)):
        return formula
    return with_children(formula, new)


def substitute_many(formula, mapping):
    """Simultaneous capture-free substitution of terms for variables."""
    if not mapping:
        return formula

    def swap(term, shadowed, bound):
        if term not in mapping or term in shadowed:
            return term
        target = mapping[term]
        if target in bound:
            raise CaptureError(f"substituting {target} for {term} would be captured")
        return target

    def walk(node, shadowed, bound):
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(swap(a, shadowed, bound) for a in node.args))
        if isinstance(node, Eq):
            return Eq(swap(node.left, shadowed, bound), swap(node.right, shadowed, bound))
        if isinstance(node, VAR_BINDERS):
            shadowed = shadowed | ({node.var} & mapping.keys())
            bound = bound | {node.var}
        return map_children(node, lambda kid: walk(kid, shadowed, bound))

    return walk(formula, frozenset(), frozenset())


def replace_atoms(formula, pred, builder):
    """Replace each free occurrence ``pred(t..)`` by ``builder(args)``.

    ``builder`` returns a formula in which the argument terms are inserted; a
    CaptureError is raised when an argument variable of that formula, or one
    of its free variables, would fall under an enclosing binder.
    """

    def walk(node, bound_vars, bound_preds):
        if isinstance(node, Atom):
            if node.pred != pred or pred in bound_preds:
                return node
            replacement = builder(node.args)
            clash = free_vars(replacement) - set(a for a in node.args if isinstance(a, Var))
            if clash & bound_vars:
                raise CaptureError(f"replacing {pred} would capture {sorted(v.name for v in clash & bound_vars)}")
            return replacement
        if isinstance(node, VAR_BINDERS):
            bound_vars = bound_vars | {node.var}
        elif isinstance(node, PRED_BINDERS):
            bound_preds = bound_preds | {node.pred}
        return map_children(node, lambda kid: walk(kid, bound_vars, bound_preds))

    return walk(formula, frozenset(), frozenset())


def replace_subformula(formula, target, replacement):
    """Replace every occurrence of ``target`` (structural equality)."""
    if formula == target:
        return replacement
    return map_children(formula, lambda kid: replace_subformula(kid, target, replacement))


# ---------------------------------------------------------------- duality, nnf


def dual(formula):
    """Swap TRUE/FALSE, and/or, forall/exists (all quantifier kinds).

    Atoms, equalities and negation are left in place.
    """
    if isinstance(formula, Top):
        return FALSE
    if isinstance(formula, Bottom):
        return TRUE
    if isinstance(formula, (Atom, Eq)):
        return formula
    if isinstance(formula, Not):
        return Not(dual(formula.sub))
    if isinstance(formula, And):
        return Or(tuple(dual(s) for s in formula.subs))
    if isinstance(formula, Or):
        return And(tuple(dual(s) for s in formula.subs))
    if isinstance(formula, Forall):
        return Exists(formula.var, dual(formula.sub))
    if isinstance(formula, Exists):
        return Forall(formula.var, dual(formula.sub))
    if isinstance(formula, CountExists):
        return CountForall(formula.n, formula.var, dual(formula.sub))
    if isinstance(formula, CountForall):
        return CountExists(formula.n, formula.var, dual(formula.sub))
    if isinstance(formula, ForallPred):
        return ExistsPred(formula.pred, formula.arity, dual(formula.sub))
    if isinstance(formula, ExistsPred):
        return ForallPred(formula.pred, formula.arity, dual(formula.sub))
    raise TypeError(f"not a formula: {formula!r}")


_NEGATED_BINDER = {
    Forall: Exists, Exists: Forall,
    CountExists: CountForall, CountForall: CountExists,
    ForallPred: ExistsPred, ExistsPred: ForallPred,
}


def nnf(formula):
    """Negation normal form: negation only in front of atoms and equalities."""
    return _nnf(formula, False)


def _nnf(formula, negate):
    if isinstance(formula, Not):
        return _nnf(formula.sub, not negate)
    if isinstance(formula, Top):
        return FALSE if negate else TRUE
    if isinstance(formula, Bottom):
        return TRUE if negate else FALSE
    if isinstance(formula, (Atom, Eq)):
        return Not(formula) if negate else formula
    if isinstance(formula, JUNCTIONS):
        kind = type(formula)
        if negate:
            kind = Or if kind is And else And
        return _junction(kind, [_nnf(s, negate) for s in formula.subs], TRUE if kind is And else FALSE)
    if isinstance(formula, BINDERS):
        kind = _NEGATED_BINDER[type(formula)] if negate else type(formula)
        return _rebinder(formula, kind, _nnf(formula.sub, negate))
    raise TypeError(f"not a formula: {formula!r}")


def _rebinder(formula, kind, sub):
    if kind in IND_QUANTIFIERS:
        return kind(formula.var, sub)
    if kind in COUNT_QUANTIFIERS:
        return kind(formula.n, formula.var, sub)
    return kind(formula.pred, formula.arity, sub)


def is_literal(formula):
    return isinstance(formula, (Atom, Eq)) or (
        isinstance(formula, Not) and isinstance(formula.sub, (Atom, Eq)))


def flatten(formula):
    """Flatten nested and/or nodes throughout."""
    if isinstance(formula, JUNCTIONS):
        kids = [flatten(s) for s in formula.subs]
        return conj(*kids) if isinstance(formula, And) else disj(*kids)
    return map_children(formula, flatten)


# ---------------------------------------------------------------- classes


def classify(formula):
    """Smallest formula class containing ``formula``.

    A counting quantifier with index two or more counts as use of equality,
    since its first-order expansion needs disequalities.
    """
    uses_equality = False
    second_order = False
    for node in subformulas(formula):
        if isinstance(node, Atom) and node.arity > 1:
            return FormulaClass.GENERAL
        if isinstance(node, PRED_BINDERS):
            if node.arity > 1:
                return FormulaClass.GENERAL
            second_order = True
        if isinstance(node, Eq) or (isinstance(node, COUNT_QUANTIFIERS) and node.n > 1):
            uses_equality = True
    if second_order:
        return FormulaClass.QMON_EQ if uses_equality else FormulaClass.QMON
    return FormulaClass.MON_EQ if uses_equality else FormulaClass.MON


def is_first_order(formula):
    return not any(isinstance(node, PRED_BINDERS) for node in subformulas(formula))


# ---------------------------------------------------------------- renaming


def rename_bound(formula, fresh=None, *, minimal=False):
    """Give binders pairwise distinct names, distinct from all free symbols.

    With ``minimal`` a binder keeps its name when that name is not taken yet;
    otherwise every binder gets a fresh name.
    """
    fresh = fresh or FreshNames.avoiding(formula)
    claimed = None
    if minimal:
        symbols = free_symbols(formula)
        claimed = {v.name for v in symbols.variables} | {c.name for c in symbols.constants}
        claimed |= set(symbols.predicates)
    return _rename(formula, {}, {}, fresh, claimed)


def _pick(name, fresh, claimed):
    if claimed is not None and name not in claimed:
        claimed.add(name)
        fresh.reserve(name)
        return name
    new = fresh.name(name)
    if claimed is not None:
        claimed.add(new)
    return new


def _rename(formula, var_map, pred_map, fresh, claimed):
    if isinstance(formula, Atom):
        args = tuple(var_map.get(a, a) for a in formula.args)
        return Atom(pred_map.get(formula.pred, formula.pred), args)
    if isinstance(formula, Eq):
        return Eq(var_map.get(formula.left, formula.left), var_map.get(formula.right, formula.right))
    if isinstance(formula, VAR_BINDERS):
        new_var = Var(_pick(formula.var.name, fresh, claimed))
        sub = _rename(formula.sub, {**var_map, formula.var: new_var}, pred_map, fresh, claimed)
        return _rebinder_var(formula, new_var, sub)
    if isinstance(formula, PRED_BINDERS):
        new_pred = _pick(formula.pred, fresh, claimed)
        sub = _rename(formula.sub, var_map, {**pred_map, formula.pred: new_pred}, fresh, claimed)
        return type(formula)(new_pred, formula.arity, sub)
    return map_children(formula, lambda kid: _rename(kid, var_map, pred_map, fresh, claimed))


def _rebinder_var(formula, var, sub):
    if isinstance(formula, IND_QUANTIFIERS):
        return type(formula)(var, sub)
    return type(formula)(formula.n, var, sub)


def rename_var_binder(formula, new_var):
    """Rename the variable bound at the root of ``formula`` to ``new_var``."""
    if not isinstance(formula, VAR_BINDERS):
        raise TypeError("root is not an individual binder")
    sub = substitute(formula.sub, formula.var, new_var)
    return _rebinder_var(formula, new_var, sub)


# ---------------------------------------------------------------- alpha keys


def alpha_key(formula):
    """Hashable key equal for formulas that differ only in bound names."""
    return _key(formula, {}, {}, 0)


def _key(formula, var_env, pred_env, depth):
    if isinstance(formula, Top):
        return ("T",)
    if isinstance(formula, Bottom):
        return ("F",)
    if isinstance(formula, Atom):
        pred = pred_env.get(formula.pred, ("p", formula.pred))
        return ("A", pred, tuple(_term_key(a, var_env) for a in formula.args))
    if isinstance(formula, Eq):
        return ("E", _term_key(formula.left, var_env), _term_key(formula.right, var_env))
    if isinstance(formula, Not):
        return ("N", _key(formula.sub, var_env, pred_env, depth))
    if isinstance(formula, JUNCTIONS):
        tag = "&" if isinstance(formula, And) else "|"
        return (tag,) + tuple(_key(s, var_env, pred_env, depth) for s in formula.subs)
    if isinstance(formula, VAR_BINDERS):
        env = {**var_env, formula.var: ("b", depth)}
        count = formula.n if isinstance(formula, COUNT_QUANTIFIERS) else 0
        return (type(formula).__name__, count, _key(formula.sub, env, pred_env, depth + 1))
    if isinstance(formula, PRED_BINDERS):
        env = {**pred_env, formula.pred: ("bp", depth)}
        return (type(formula).__name__, formula.arity, _key(formula.sub, var_env, env, depth + 1))
    raise TypeError(f"not a formula: {formula!r}")


def _term_key(term, var_env):
    if isinstance(term, Var):
        return var_env.get(term, ("v", term.name))
    return ("c", term.name)
