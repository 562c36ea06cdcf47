"""Finite-model semantics: evaluation, model enumeration, bounded equivalence.

Two evaluators live here.  :func:`evaluate` is a direct recursive evaluator
over one :class:`Interpretation`.  The table evaluator behind
:func:`check_equiv` evaluates a formula on every interpretation of a given
domain size at once, as numpy boolean vectors indexed by interpretation.  It
only enumerates the predicate cells that some atom can actually read, which
keeps binary predicates with fixed arguments cheap.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, MissingSymbol
from .formula import (
    And, Atom, Bottom, Const, CountExists, Eq, Exists, ExistsPred,
    Forall, Not, Or, PRED_BINDERS, Top, Var, VAR_BINDERS, children,
    free_symbols, predicate_arities, quantifier_rank, subformulas,
)

DEFAULT_PRED_QUANTIFIER_DOMAIN = 6
DEFAULT_BUDGET = 50_000_000


@dataclass
class Interpretation:
    """A finite structure with domain ``0 .. domain_size - 1``.

    ``pred_ext`` maps a predicate name to a bool (nullary) or to a frozenset of
    elements (unary) or of element tuples (higher arity).
    """

    domain_size: int
    pred_ext: dict = field(default_factory=dict)
    const_den: dict = field(default_factory=dict)
    var_assign: dict = field(default_factory=dict)

    def describe(self):
        lines = [f"domain size: {self.domain_size}"]
        for name in sorted(self.pred_ext):
            ext = self.pred_ext[name]
            if isinstance(ext, bool):
                lines.append(f"{name}: {'true' if ext else 'false'}")
            else:
                items = sorted(ext)
                lines.append(f"{name}: [{', '.join(_show_element(e) for e in items)}]")
        for name in sorted(self.const_den):
            lines.append(f"{name} = {self.const_den[name]}")
        for name in sorted(self.var_assign):
            lines.append(f"{name} := {self.var_assign[name]}")
        return "\n".join(lines)

    def to_record(self):
        return {
            "domain_size": self.domain_size,
            "predicates": {
                name: ext if isinstance(ext, bool) else [list(e) if isinstance(e, tuple) else e for e in sorted(ext)]
                for name, ext in sorted(self.pred_ext.items())
            },
            "constants": dict(sorted(self.const_den.items())),
            "variables": dict(sorted(self.var_assign.items())),
        }


def _show_element(element):
    if isinstance(element, tuple):
        return "(" + ",".join(str(e) for e in element) + ")"
    return str(element)


# ---------------------------------------------------------------- direct evaluator


def evaluate(formula, interp, *, max_pred_domain=DEFAULT_PRED_QUANTIFIER_DOMAIN):
    """Truth value of ``formula`` in ``interp``."""
    size = interp.domain_size
    if size < 1:
        raise ValueError("domains are nonempty")
    preds = {}
    for name, ext in interp.pred_ext.items():
        preds[name] = ext

    def term_value(term, env):
        if isinstance(term, Var):
            if term.name in env:
                return env[term.name]
            if term.name in interp.var_assign:
                return interp.var_assign[term.name]
            raise MissingSymbol(f"variable {term.name} is unassigned")
        if term.name in interp.const_den:
            return interp.const_den[term.name]
        raise MissingSymbol(f"constant {term.name} has no denotation")

    def holds(node, env, preds):
        if isinstance(node, Top):
            return True
        if isinstance(node, Bottom):
            return False
        if isinstance(node, Atom):
            if node.pred not in preds:
                raise MissingSymbol(f"predicate {node.pred} has no extension")
            ext = preds[node.pred]
            if node.arity == 0:
                return bool(ext)
            values = tuple(term_value(a, env) for a in node.args)
            return (values[0] if node.arity == 1 else values) in ext
        if isinstance(node, Eq):
            return term_value(node.left, env) == term_value(node.right, env)
        if isinstance(node, Not):
            return not holds(node.sub, env, preds)
        if isinstance(node, And):
            return all(holds(s, env, preds) for s in node.subs)
        if isinstance(node, Or):
            return any(holds(s, env, preds) for s in node.subs)
        if isinstance(node, VAR_BINDERS):
            name = node.var.name
            hits = (holds(node.sub, {**env, name: e}, preds) for e in range(size))
            if isinstance(node, Forall):
                return all(hits)
            if isinstance(node, Exists):
                return any(hits)
            count = sum(1 for h in hits if h)
            if isinstance(node, CountExists):
                return count >= node.n
            return size - count < node.n
        if isinstance(node, PRED_BINDERS):
            if size > max_pred_domain:
                raise BudgetExceeded(
                    f"predicate quantifier over domain {size} exceeds limit {max_pred_domain}")
            results = (holds(node.sub, env, {**preds, node.pred: ext})
                       for ext in _all_extensions(node.arity, size))
            return any(results) if isinstance(node, ExistsPred) else all(results)
        raise TypeError(f"not a formula: {node!r}")

    return holds(formula, {}, preds)


def _all_extensions(arity, size):
    if arity == 0:
        yield False
        yield True
        return
    cells = list(itertools.product(range(size), repeat=arity))
    if arity == 1:
        cells = [c[0] for c in cells]
    for bits in itertools.product((False, True), repeat=len(cells)):
        yield frozenset(c for c, b in zip(cells, bits) if b)


# ---------------------------------------------------------------- bounds


def small_model_bound(formula):
    """Domain size up to which bounded checking of ``formula`` is complete.

    Quantifier rank (counting indices weigh their index) times two to the
    number of predicates, plus one element per constant or free variable.
    """
    rank = quantifier_rank(formula)
    symbols = free_symbols(formula)
    preds = {node.pred for node in subformulas(formula) if isinstance(node, Atom)}
    named = len(symbols.constants) + len(symbols.variables)
    return max(1, rank * 2 ** len(preds) + named)


# ---------------------------------------------------------------- table evaluator


class _Signature:
    def __init__(self, formulas):
        arities = {}
        constants, variables = set(), set()
        for formula in formulas:
            for name, arity in predicate_arities(formula).items():
                arities.setdefault(name, arity)
            symbols = free_symbols(formula)
            constants |= {c.name for c in symbols.constants}
            variables |= {v.name for v in symbols.variables}
        self.arities = dict(sorted(arities.items()))
        self.constants = sorted(constants)
        self.variables = sorted(variables)
        self.formulas = formulas


def _free_atoms(formula):
    """Atoms whose predicate is free, with the set of variables bound above."""
    found = []

    def walk(node, bound_vars, bound_preds):
        if isinstance(node, Atom):
            if node.pred not in bound_preds:
                found.append((node, bound_vars))
            return
        if isinstance(node, VAR_BINDERS):
            bound_vars = bound_vars | {node.var}
        elif isinstance(node, PRED_BINDERS):
            bound_preds = bound_preds | {node.pred}
        for kid in children(node):
            walk(kid, bound_vars, bound_preds)

    walk(formula, frozenset(), frozenset())
    return found


def _cells_of_atom(atom_node, bound_vars, denote, size):
    choices = []
    for arg in atom_node.args:
        if isinstance(arg, Var) and arg in bound_vars:
            choices.append(range(size))
        else:
            choices.append((denote(arg),))
    return set(itertools.product(*choices))


class _TableEvaluator:
    """Evaluates formulas on all interpretations of one denotation at once."""

    def __init__(self, size, denotation, relevant, max_pred_domain):
        self.size = size
        self.denotation = denotation
        self.columns = relevant
        self.rows = 1 << len(relevant)
        self.max_pred_domain = max_pred_domain
        self._scoped_atoms = {}
        index = np.arange(self.rows, dtype=np.int64)
        width = len(relevant)
        self.preds = {}
        for j, (pred, cell) in enumerate(relevant):
            column = ((index >> (width - 1 - j)) & 1).astype(bool)
            self.preds.setdefault(pred, {})[cell] = column

    def table(self, formula):
        result = self._ev(formula, {}, self.preds)
        return np.broadcast_to(np.asarray(result, dtype=bool), (self.rows,))

    def _term(self, term, env):
        if isinstance(term, Var) and term.name in env:
            return env[term.name]
        return self.denotation[term]

    def _ev(self, node, env, preds):
        if isinstance(node, Top):
            return True
        if isinstance(node, Bottom):
            return False
        if isinstance(node, Atom):
            cell = tuple(self._term(a, env) for a in node.args)
            return preds[node.pred][cell]
        if isinstance(node, Eq):
            return self._term(node.left, env) == self._term(node.right, env)
        if isinstance(node, Not):
            return np.logical_not(self._ev(node.sub, env, preds))
        if isinstance(node, And):
            acc = True
            for sub in node.subs:
                acc = np.logical_and(acc, self._ev(sub, env, preds))
                if not np.any(acc):
                    return False
            return acc
        if isinstance(node, Or):
            acc = False
            for sub in node.subs:
                acc = np.logical_or(acc, self._ev(sub, env, preds))
                if np.all(acc):
                    return True
            return acc
        if isinstance(node, VAR_BINDERS):
            name = node.var.name
            values = [self._ev(node.sub, {**env, name: e}, preds) for e in range(self.size)]
            if isinstance(node, Forall):
                return functools.reduce(np.logical_and, values)
            if isinstance(node, Exists):
                return functools.reduce(np.logical_or, values)
            count = sum(np.asarray(v, dtype=np.int64) for v in values)
            if isinstance(node, CountExists):
                return count >= node.n
            return self.size - count < node.n
        if isinstance(node, PRED_BINDERS):
            return self._pred_quantifier(node, env, preds)
        raise TypeError(f"not a formula: {node!r}")

    def _pred_quantifier(self, node, env, preds):
        if self.size > self.max_pred_domain:
            raise BudgetExceeded(
                f"predicate quantifier over domain {self.size} exceeds limit {self.max_pred_domain}")
        key = id(node)
        if key not in self._scoped_atoms:
            self._scoped_atoms[key] = [
                pair for pair in _free_atoms(node.sub) if pair[0].pred == node.pred]
        cells = set()
        for atom_node, bound_vars in self._scoped_atoms[key]:
            cells |= _cells_of_atom(atom_node, bound_vars, self._fixed_term(env), self.size)
        cells = sorted(cells)
        existential = isinstance(node, ExistsPred)
        acc = not existential
        for bits in itertools.product((False, True), repeat=len(cells)):
            local = {**preds, node.pred: dict(zip(cells, bits))}
            value = self._ev(node.sub, env, local)
            if existential:
                acc = np.logical_or(acc, value)
                if np.all(acc):
                    return True
            else:
                acc = np.logical_and(acc, value)
                if not np.any(acc):
                    return False
        return acc

    def _fixed_term(self, env):
        def denote(term):
            return self._term(term, env)
        return denote


def _interpretations(signature, size, max_pred_domain, budget):
    """Yield (evaluator, denotation) for each denotation of the free terms."""
    term_keys = [Const(c) for c in signature.constants] + [Var(v) for v in signature.variables]
    free_atoms = [pair for formula in signature.formulas for pair in _free_atoms(formula)]
    denotations = list(itertools.product(range(size), repeat=len(term_keys)))
    for values in denotations:
        denotation = dict(zip(term_keys, values))

        def denote(term, denotation=denotation):
            return denotation[term]

        relevant = set()
        for atom_node, bound_vars in free_atoms:
            for cell in _cells_of_atom(atom_node, bound_vars, denote, size):
                relevant.add((atom_node.pred, cell))
        relevant = sorted(relevant, key=lambda pc: (list(signature.arities).index(pc[0]), pc[1]))
        if (1 << len(relevant)) * len(denotations) > budget:
            raise BudgetExceeded(
                f"{len(denotations)} denotations times 2^{len(relevant)} extensions exceed budget {budget}")
        yield _TableEvaluator(size, denotation, relevant, max_pred_domain), denotation


def _decode_row(evaluator, signature, denotation, row):
    width = len(evaluator.columns)
    truth = {}
    for j, (pred, cell) in enumerate(evaluator.columns):
        truth[(pred, cell)] = bool((row >> (width - 1 - j)) & 1)
    pred_ext = {}
    for name, arity in signature.arities.items():
        if arity == 0:
            pred_ext[name] = truth.get((name, ()), False)
        elif arity == 1:
            pred_ext[name] = frozenset(c[0] for (p, c), v in truth.items() if p == name and v)
        else:
            pred_ext[name] = frozenset(c for (p, c), v in truth.items() if p == name and v)
    const_den = {name: denotation[Const(name)] for name in signature.constants}
    var_assign = {name: denotation[Var(name)] for name in signature.variables}
    return Interpretation(evaluator.size, pred_ext, const_den, var_assign)


def _order_key(interp, signature):
    bits = []
    for name, arity in signature.arities.items():
        ext = interp.pred_ext[name]
        if arity == 0:
            bits.append(bool(ext))
            continue
        for cell in itertools.product(range(interp.domain_size), repeat=arity):
            bits.append((cell[0] if arity == 1 else cell) in ext)
    terms = tuple(interp.const_den[c] for c in signature.constants) + tuple(
        interp.var_assign[v] for v in signature.variables)
    return (tuple(bits), terms)


def find_interpretation(formulas, condition, max_domain, *, min_domain=1,
                        max_pred_domain=DEFAULT_PRED_QUANTIFIER_DOMAIN, budget=DEFAULT_BUDGET):
    """First interpretation (in enumeration order) where ``condition`` holds.

    ``condition`` receives one truth table per formula and returns a boolean
    vector.  Enumeration is by ascending domain size, then lexicographic over
    predicate extensions, then over constant and variable denotations.
    """
    signature = _Signature(list(formulas))
    for size in range(min_domain, max_domain + 1):
        best = None
        for evaluator, denotation in _interpretations(signature, size, max_pred_domain, budget):
            tables = [evaluator.table(f) for f in signature.formulas]
            hits = np.flatnonzero(condition(*tables))
            if hits.size == 0:
                continue
            candidate = _decode_row(evaluator, signature, denotation, int(hits[0]))
            key = _order_key(candidate, signature)
            if best is None or key < best[0]:
                best = (key, candidate)
        if best is not None:
            return best[1]
    return None


def check_equiv(left, right, max_domain, **options):
    """None if ``left`` and ``right`` agree on all domains up to ``max_domain``.

    Otherwise the first counterexample interpretation in enumeration order.
    """
    return find_interpretation([left, right], np.not_equal, max_domain, **options)


def check_entails(premise, conclusion, max_domain, **options):
    """None if every model of ``premise`` (up to ``max_domain``) satisfies ``conclusion``."""
    return find_interpretation(
        [premise, conclusion], lambda a, b: np.logical_and(a, np.logical_not(b)), max_domain, **options)


def find_model(formula, max_domain, **options):
    return find_interpretation([formula], lambda a: a, max_domain, **options)


def find_countermodel(formula, max_domain, **options):
    return find_interpretation([formula], np.logical_not, max_domain, **options)


def truth_table(formula, size, **options):
    """Truth values over all relevant interpretations of one domain size."""
    signature = _Signature([formula])
    out = []
    for evaluator, _ in _interpretations(signature, size,
                                         options.get("max_pred_domain", DEFAULT_PRED_QUANTIFIER_DOMAIN),
                                         options.get("budget", DEFAULT_BUDGET)):
        out.append(evaluator.table(formula))
    return np.concatenate(out) if out else np.zeros(0, dtype=bool)


def equivalent_upto(left, right, max_domain, **options):
    return check_equiv(left, right, max_domain, **options) is None


def valid_upto(formula, max_domain, **options):
    return find_countermodel(formula, max_domain, **options) is None
