"""Decision procedures built on elimination and on expansion.

A closed monadic sentence without predicates or constants is, after counting
normalization, a Boolean combination of ``atleast n x. true``: its truth
depends only on the domain size and is described by a
:class:`CardinalitySpectrum`.  Validity and satisfiability of any QMON=
formula reduce to such a spectrum by closing the formula over its free
symbols and eliminating every predicate quantifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .counting import counting_normal_form
from .elimination import eliminate_all
from .errors import ClassError, EligibilityError, ShapeError
from .formula import (
    And, Atom, Bottom, CountExists, CountForall, Eq, Exists, ExistsPred, FALSE,
    Forall, ForallPred, FormulaClass, FreshNames, Not, Or, PRED_BINDERS, TRUE, Top,
    VAR_BINDERS, children, classify, complement, conj, disj, free_symbols, free_vars,
    map_children, predicate_arities, rename_bound, replace_atoms, replace_subformula,
    subformulas, with_children,
)
from .rewriter import DEFAULT_SIZE_LIMIT, cleanup, dnf_clauses, simplify_truth_values


# ---------------------------------------------------------------- spectra


@dataclass(frozen=True)
class CardinalitySpectrum:
    """Domain sizes on which a sentence holds: cofinitely true or cofinitely false.

    ``truth(n)`` is ``cofinite`` except at the sizes listed in ``exceptions``.
    """

    cofinite: bool
    exceptions: frozenset = frozenset()

    def truth(self, n):
        if n < 1:
            raise ValueError("domains are nonempty")
        return self.cofinite != (n in self.exceptions)

    @property
    def always(self):
        return self.cofinite and not self.exceptions

    @property
    def never(self):
        return not self.cofinite and not self.exceptions

    def describe(self):
        sizes = ", ".join(str(n) for n in sorted(self.exceptions))
        if self.always:
            return "true for all domain cardinalities"
        if self.never:
            return "false for all domain cardinalities"
        word = "true" if self.cofinite else "false"
        return f"{word} for all domain cardinalities with exception of {sizes}"

    def to_dict(self):
        return {
            "sign": "true-cofinitely" if self.cofinite else "false-cofinitely",
            "exceptions": sorted(self.exceptions),
        }


@dataclass
class Verdict:
    valid: bool
    satisfiable: bool
    witness_spectrum: CardinalitySpectrum | None = None
    trace: list | None = None
    eliminated: object = None

    def __post_init__(self):
        if self.valid and not self.satisfiable:
            raise ValueError("a valid formula is satisfiable over nonempty domains")

    def to_dict(self):
        record = {"valid": self.valid, "satisfiable": self.satisfiable}
        if self.witness_spectrum is not None:
            record["spectrum"] = self.witness_spectrum.to_dict()
        if self.eliminated is not None:
            record["eliminated_formula"] = str(self.eliminated)
        if self.trace is not None:
            record["trace"] = [step.describe() for step in self.trace]
        return record


# ---------------------------------------------------------------- pure counting formulas


def _cardinality_literal(formula):
    """``(n, positive)`` for ``atleast n x. true`` and its negation forms."""
    if isinstance(formula, Not):
        n, positive = _cardinality_literal(formula.sub)
        return n, not positive
    if isinstance(formula, Exists) and isinstance(formula.sub, Top):
        return 1, True
    if isinstance(formula, Forall) and isinstance(formula.sub, Bottom):
        return 1, False
    if isinstance(formula, CountExists) and isinstance(formula.sub, Top):
        return formula.n, True
    if isinstance(formula, CountForall) and isinstance(formula.sub, Bottom):
        return formula.n, False
    raise ShapeError(f"not a pure counting literal: {formula}")


def _is_cardinality_basic(formula):
    return isinstance(formula, (Exists, Forall, CountExists, CountForall))


def _cardinality_clauses(formula, conjunctive):
    """Clauses over ``(n, positive)`` literals; CNF when ``conjunctive``."""
    target = complement(formula) if conjunctive else formula
    clauses, table = dnf_clauses(target, _is_cardinality_basic)
    result = []
    for clause in clauses:
        literals = []
        for lit in clause:
            n, positive = _cardinality_literal(table.formula(lit))
            literals.append((n, positive != conjunctive))
        result.append(literals)
    return result


def _mentioned_counts(formula):
    counts = [1]
    for node in subformulas(formula):
        if isinstance(node, (CountExists, CountForall)):
            counts.append(node.n)
    return max(counts)


def _literal_holds(literal, size):
    n, positive = literal
    return (size >= n) == positive


def _spectrum_from_truth(truth, horizon):
    """Spectrum from the truth values at sizes ``1 .. horizon``; the last one is the cofinite value."""
    cofinite = truth(horizon)
    exceptions = frozenset(n for n in range(1, horizon) if truth(n) != cofinite)
    return CardinalitySpectrum(cofinite, exceptions)


def decide_pure_counting(formula):
    """Spectrum of a Boolean combination of ``atleast n x. true`` literals.

    The formula is brought into clause form; a clause holds on the sizes
    ``>= n`` of its positive literals and ``< n`` of its negative ones, and
    the spectrum is the intersection over the clauses.  Beyond the largest
    count every literal is constant, so sizes up to that count plus one
    determine the spectrum.
    """
    horizon = _mentioned_counts(formula) + 1
    clauses = _cardinality_clauses(formula, conjunctive=True)

    def truth(size):
        return all(any(_literal_holds(lit, size) for lit in clause) for clause in clauses)

    return _spectrum_from_truth(truth, horizon)


def spectrum_via_dnf(formula):
    """The same spectrum from the disjunctive clause form."""
    horizon = _mentioned_counts(formula) + 1
    clauses = _cardinality_clauses(formula, conjunctive=False)

    def truth(size):
        return any(all(_literal_holds(lit, size) for lit in clause) for clause in clauses)

    return _spectrum_from_truth(truth, horizon)


def _clause_valid(clause):
    """A clause holds at every size iff some ``atleast n`` meets some ``not atleast m`` with ``n <= m``."""
    lower = min((n for n, positive in clause if positive), default=None)
    upper = max((n for n, positive in clause if not positive), default=None)
    return lower == 1 or (lower is not None and upper is not None and lower <= upper)


def pure_counting_valid(formula):
    """Validity read off the clauses alone, without assembling the spectrum."""
    return all(_clause_valid(clause) for clause in _cardinality_clauses(formula, conjunctive=True))


# ---------------------------------------------------------------- closure and elimination


def _constants_to_variables(formula, fresh):
    symbols = free_symbols(formula)
    mapping = {c: fresh.var(c.name) for c in sorted(symbols.constants, key=lambda c: c.name)}

    def walk(node):
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(mapping.get(a, a) for a in node.args))
        if isinstance(node, Eq):
            return Eq(mapping.get(node.left, node.left), mapping.get(node.right, node.right))
        return map_children(node, walk)

    return walk(formula), list(mapping.values())


def close(formula, universal):
    """Bind every free predicate, constant and variable of ``formula``.

    Constants become variables first; the binders are universal for a
    validity question and existential for a satisfiability question.
    """
    fresh = FreshNames.avoiding(formula)
    opened, new_vars = _constants_to_variables(formula, fresh)
    var_binder = Forall if universal else Exists
    pred_binder = ForallPred if universal else ExistsPred
    variables = sorted(free_vars(opened), key=lambda v: v.name)
    for var in reversed(variables):
        opened = var_binder(var, opened)
    for pred, arity in sorted(predicate_arities(opened, free_only=True).items(), reverse=True):
        opened = pred_binder(pred, arity, opened)
    return opened


def _check_decidable(formula):
    if not classify(formula).within(FormulaClass.QMON_EQ):
        raise ClassError("decision needs a formula within QMON=")


def closed_spectrum(formula, universal, limit=DEFAULT_SIZE_LIMIT):
    """Eliminated form and spectrum of the universal or existential closure."""
    closed = close(formula, universal)
    eliminated = eliminate_all(closed, limit=limit)
    normal = counting_normal_form(eliminated, limit=limit)
    return eliminated, decide_pure_counting(normal)


def decide_validity(formula, limit=DEFAULT_SIZE_LIMIT):
    """Verdict with the spectrum of the universal closure."""
    _check_decidable(formula)
    eliminated, spectrum = closed_spectrum(formula, True, limit)
    _, existential = closed_spectrum(formula, False, limit)
    return Verdict(spectrum.always, not existential.never, spectrum, eliminated=eliminated)


def decide_satisfiability(formula, limit=DEFAULT_SIZE_LIMIT):
    """Verdict with the spectrum of the existential closure."""
    _check_decidable(formula)
    eliminated, spectrum = closed_spectrum(formula, False, limit)
    _, universal = closed_spectrum(formula, True, limit)
    return Verdict(universal.always, not spectrum.never, spectrum, eliminated=eliminated)


# ---------------------------------------------------------------- propositional deciders


def _check_boolean(formula):
    for node in subformulas(formula):
        if isinstance(node, (Eq, *VAR_BINDERS)):
            raise ClassError("a quantified Boolean formula has no individual terms")
        if isinstance(node, Atom) and node.args:
            raise ClassError(f"{node.pred} is not nullary")
        if isinstance(node, PRED_BINDERS) and node.arity:
            raise ClassError(f"quantifier over non-nullary {node.pred}")


def _free_nullary(formula):
    return sorted(predicate_arities(formula, free_only=True))


def _assign(formula, pred, value):
    return replace_atoms(formula, pred, lambda args: value)


def _substitution_value(formula):
    """Truth value of a closed formula; each quantified predicate is replaced by both truth values."""
    if isinstance(formula, Top):
        return True
    if isinstance(formula, Bottom):
        return False
    if isinstance(formula, Not):
        return not _substitution_value(formula.sub)
    if isinstance(formula, And):
        return all(_substitution_value(k) for k in formula.subs)
    if isinstance(formula, Or):
        return any(_substitution_value(k) for k in formula.subs)
    if isinstance(formula, PRED_BINDERS):
        branches = (_substitution_value(_assign(formula.sub, formula.pred, v)) for v in (TRUE, FALSE))
        return any(branches) if isinstance(formula, ExistsPred) else all(branches)
    raise ShapeError(f"{formula} is not closed")


def prop_decide_substitution(formula):
    """Decide by substituting both truth values for every nullary predicate."""
    _check_boolean(formula)
    valid = _substitution_value(close(formula, True))
    satisfiable = _substitution_value(close(formula, False))
    return Verdict(valid, satisfiable)


def shannon_expand(formula):
    """Replace ``exists p. G`` by ``G[true] | G[false]`` and ``forall p. G`` by the conjunction."""
    kids = children(formula)
    if kids:
        formula = with_children(formula, [shannon_expand(k) for k in kids])
    if isinstance(formula, PRED_BINDERS):
        join = disj if isinstance(formula, ExistsPred) else conj
        return join(_assign(formula.sub, formula.pred, TRUE), _assign(formula.sub, formula.pred, FALSE))
    return formula


def _has_complementary(clause):
    return any(-lit in clause for lit in clause)


def _cnf_valid(formula):
    """Every clause of the conjunctive form holds: it is empty of falsity or has a complementary pair."""
    negated, _ = dnf_clauses(complement(formula))
    return all(_has_complementary(clause) for clause in negated)


def _dnf_satisfiable(formula):
    """Some conjunctive clause of the disjunctive form is free of complementary pairs."""
    clauses, _ = dnf_clauses(formula)
    return any(not _has_complementary(clause) for clause in clauses)


def prop_decide_cnf(formula):
    """Validity from the clauses of the conjunctive form; satisfiability as invalidity of the negation."""
    _check_boolean(formula)
    matrix = shannon_expand(formula)
    valid = _cnf_valid(matrix)
    return Verdict(valid, not _cnf_valid(complement(matrix)))


def prop_decide_dnf(formula):
    """Satisfiability from the clauses of the disjunctive form; validity via the negation."""
    _check_boolean(formula)
    matrix = shannon_expand(formula)
    satisfiable = _dnf_satisfiable(matrix)
    return Verdict(not _dnf_satisfiable(complement(matrix)), satisfiable)


def _eliminate_boolean_quantifier(pred, matrix):
    """``exists pred. matrix`` for quantifier-free ``matrix``, quantifier pushed into the clauses.

    In each disjunctive clause only ``exists p. p`` or ``exists p. ~p`` is
    left under the quantifier, and both are true.
    """
    clauses, table = dnf_clauses(matrix)
    parts = []
    for clause in clauses:
        rest = [table.formula(l) for l in sorted(clause, key=lambda l: (abs(l), l < 0))
                if table.formula(abs(l)) != Atom(pred, ())]
        parts.append(conj(*rest))
    return disj(*parts)


def _inward(formula):
    kids = children(formula)
    if kids:
        formula = with_children(formula, [_inward(k) for k in kids])
    if isinstance(formula, ExistsPred):
        return _eliminate_boolean_quantifier(formula.pred, formula.sub)
    if isinstance(formula, ForallPred):
        return complement(_eliminate_boolean_quantifier(formula.pred, complement(formula.sub)))
    return formula


def qbf_value(formula):
    """Truth value of a closed quantified Boolean formula by inward propagation."""
    result = simplify_truth_values(_inward(formula))
    if not isinstance(result, (Top, Bottom)):
        raise ShapeError("the formula is not closed")
    return isinstance(result, Top)


def qbf_decide_inward(formula):
    """Decide a quantified Boolean formula by pushing its quantifiers onto single literals."""
    _check_boolean(formula)
    return Verdict(qbf_value(close(formula, True)), qbf_value(close(formula, False)))


# ---------------------------------------------------------------- Quine's expansion


def _occurrence_paths(formula, target):
    found = []

    def walk(node, path, bound):
        if node == target:
            found.append((path, bound))
            return
        if isinstance(node, VAR_BINDERS):
            bound = bound | {node.var}
        for i, kid in enumerate(children(node)):
            walk(kid, path + (i,), bound)

    walk(formula, (), frozenset())
    return found


def quine_step(formula, sub, var=None):
    """Move ``sub`` out of the quantifier ``formula`` by case distinction.

    ``exists x. F[G]`` becomes ``(G | exists x. F[false]) & (~G | exists x. F[true])``
    and ``forall x. F[G]`` becomes ``(G & forall x. F[true]) | (~G & forall x. F[false])``.
    ``G`` must not mention ``x`` and none of its occurrences may sit under a
    binder of one of its free variables.
    """
    if not isinstance(formula, (Exists, Forall)):
        raise EligibilityError("Quine's expansion applies to a plain quantifier")
    if var is not None and var != formula.var:
        raise EligibilityError(f"the quantifier binds {formula.var.name}, not {var.name}")
    x, body = formula.var, formula.sub
    free = free_vars(sub)
    if x in free:
        raise EligibilityError(f"the subformula mentions {x.name}")
    occurrences = _occurrence_paths(body, sub)
    if not occurrences:
        raise EligibilityError("the subformula does not occur")
    if any(bound & free for _, bound in occurrences):
        raise EligibilityError("a free variable of the subformula is bound at an occurrence")
    quant = type(formula)
    if_false = quant(x, replace_subformula(body, sub, FALSE))
    if_true = quant(x, replace_subformula(body, sub, TRUE))
    if quant is Exists:
        return conj(disj(sub, if_false), disj(complement(sub), if_true))
    return disj(conj(sub, if_true), conj(complement(sub), if_false))


def _eligible(body, var):
    """First subformula (preorder) that may be moved out of a quantifier on ``var``."""
    for node in _preorder(body):
        if isinstance(node, (Top, Bottom)):
            continue
        if isinstance(node, (Atom, Exists, Forall)) and var not in free_vars(node):
            return node
    return None


def _preorder(formula):
    yield formula
    for kid in children(formula):
        yield from _preorder(kid)


def _quine_split(node):
    """Expand a quantifier whose body is already split until only its own variable remains."""
    if not isinstance(node, (Exists, Forall)):
        return node
    body = cleanup(node.sub)
    node = type(node)(node.var, body)
    if not free_vars(body) & {node.var} and not isinstance(body, (Top, Bottom)):
        return cleanup(node)
    sub = _eligible(body, node.var)
    if sub is None:
        return cleanup(node)
    expanded = quine_step(node, sub)
    return cleanup(map_children(expanded, lambda part: _split_parts(part)))


def _split_parts(formula):
    if isinstance(formula, (Exists, Forall)):
        return _quine_split(formula)
    return map_children(formula, _split_parts)


def quine_reduce(formula):
    """Innermost-first expansion until every quantifier body mentions only its own variable."""
    kids = children(formula)
    if kids:
        formula = with_children(formula, [quine_reduce(k) for k in kids])
    return _quine_split(formula) if isinstance(formula, (Exists, Forall)) else formula


def _cell_value(formula, cells, constant_cells, nullary, preds):
    """Truth of a reduced formula given the nonempty cells, the cell of each constant and nullary values."""

    def literal_in(cell, atom_node):
        return cell[preds.index(atom_node.pred)]

    def local(node, cell):
        if isinstance(node, Top):
            return True
        if isinstance(node, Bottom):
            return False
        if isinstance(node, Not):
            return not local(node.sub, cell)
        if isinstance(node, And):
            return all(local(k, cell) for k in node.subs)
        if isinstance(node, Or):
            return any(local(k, cell) for k in node.subs)
        if isinstance(node, Atom):
            return literal_in(cell, node)
        raise ShapeError(f"unexpected {node} in a reduced quantifier body")

    def walk(node):
        if isinstance(node, Top):
            return True
        if isinstance(node, Bottom):
            return False
        if isinstance(node, Not):
            return not walk(node.sub)
        if isinstance(node, And):
            return all(walk(k) for k in node.subs)
        if isinstance(node, Or):
            return any(walk(k) for k in node.subs)
        if isinstance(node, Atom):
            if not node.args:
                return nullary[node.pred]
            return literal_in(constant_cells[node.args[0]], node)
        if isinstance(node, Exists):
            return any(local(node.sub, cell) for cell in cells)
        if isinstance(node, Forall):
            return all(local(node.sub, cell) for cell in cells)
        raise ShapeError(f"unexpected {node} in a reduced formula")

    return walk(formula)


def _cell_outcomes(formula):
    """Truth values of a reduced formula over all ways to populate the cells."""
    unary = sorted({n.pred for n in subformulas(formula) if isinstance(n, Atom) and n.args})
    nullary_preds = sorted({n.pred for n in subformulas(formula) if isinstance(n, Atom) and not n.args})
    constants = sorted(free_symbols(formula).constants, key=lambda c: c.name)
    all_cells = list(itertools.product((False, True), repeat=len(unary)))
    for size in range(1, len(all_cells) + 1):
        for cells in itertools.combinations(all_cells, size):
            for placement in itertools.product(cells, repeat=len(constants)):
                constant_cells = dict(zip(constants, placement))
                for values in itertools.product((False, True), repeat=len(nullary_preds)):
                    nullary = dict(zip(nullary_preds, values))
                    yield _cell_value(formula, cells, constant_cells, nullary, unary)


def quine_decide(formula):
    """Decide a MON sentence by Quine's expansion and a final look at the populated cells.

    After the expansion every quantifier only speaks about the predicates of
    its own variable, so the truth of the sentence depends only on which
    combinations of predicate values (cells) are inhabited, in which cells
    the constants lie, and the nullary values.
    """
    if not classify(formula).within(FormulaClass.MON):
        raise ClassError("Quine's expansion needs a formula within MON")
    if free_vars(formula):
        raise ShapeError("Quine's expansion decides sentences")
    reduced = quine_reduce(rename_bound(formula))
    outcomes = set(_cell_outcomes(reduced))
    return Verdict(False not in outcomes, True in outcomes, eliminated=reduced)
