import itertools
import random

import pytest

from behmann.corpus import SYLLOGISMS
from behmann.elimination import (
    Hauptform, basic_elim, build_hauptform, crude_resultant, decompose, eliminate_all,
    eliminate_crude, eliminate_noeq, eliminate_predicate, hauptform_to_basic,
    noeq_resultant, normalize_nullary, reduction_result, simultaneous_elim,
)
from behmann.errors import ClassError, EliminandOccurs, ShapeError
from behmann.formula import (
    Atom, Const, Eq, ExistsPred, FALSE, Forall, ForallPred, Not, Or, TRUE, Var, atom, conj,
    disj, free_symbols, neq, predicate_occurs,
)
from behmann.oracle import check_entails, check_equiv, find_model
from behmann.rewriter import simplify_truth_values
from behmann.syntax import parse

from support import FormulaGen

x = Var("x")
a = Const("a")


def test_basic_elim_examples():
    assert basic_elim(x, atom("r", x), atom("q", x), "p") == parse(
        "forall x. (r(x) | q(x))")
    assert simplify_truth_values(basic_elim(x, FALSE, FALSE, "p")) == FALSE
    assert simplify_truth_values(basic_elim(x, TRUE, atom("q", x), "p")) == TRUE
    with pytest.raises(EliminandOccurs):
        basic_elim(x, atom("p", x), FALSE, "p")


def test_basic_elim_matches_its_input():
    a_part, b_part = parse("forall x. (q(x) | x = a)").sub, parse("forall x. ~r(x)").sub
    source = ExistsPred("p", 1, conj(
        Forall(x, Or((a_part, atom("p", x)))), Forall(x, Or((b_part, Not(atom("p", x)))))))
    assert check_equiv(source, basic_elim(x, a_part, b_part, "p"), 3) is None


@pytest.mark.parametrize("example", SYLLOGISMS, ids=lambda e: e.name)
def test_syllogisms(example):
    result = eliminate_all(parse(example.source))
    assert check_equiv(result, parse(example.expected), 3) is None
    assert not any(predicate_occurs(q, result) for q in ("q", "q1", "q2"))


def test_ferio_hauptform():
    body = parse("forall x. (~q(x) | ~p(x)) & exists x. (r(x) & q(x))")
    (guard, form), = decompose("q", body)
    assert guard == TRUE
    assert len(form.B) == 1 and len(form.C) == 1 and not form.A and not form.D
    assert check_equiv(build_hauptform("q", body), ExistsPred("q", 1, body), 3) is None


def test_hauptform_without_eliminand():
    assert build_hauptform("p", parse("q")) == parse("q")


def test_hauptform_of_constant_occurrence():
    (guard, form), = decompose("p", parse("p(a)"))
    assert guard == TRUE
    assert form.A == [(1, neq(form.var, a))]
    assert form.render() == ExistsPred("p", 1, Forall(form.var, Or((neq(form.var, a), Atom("p", (form.var,))))))


def test_hauptform_invariants():
    with pytest.raises(EliminandOccurs):
        Hauptform("p", x, A=[(1, atom("p", x))])
    with pytest.raises(ShapeError):
        Hauptform("p", x, C=[(2, TRUE)], generalized=False)
    with pytest.raises(ShapeError):
        Hauptform("p", x, C=[(0, TRUE)])


def test_hauptform_renders_four_blocks():
    form = Hauptform("p", x, A=[(1, atom("a", x))], B=[(1, atom("b", x))],
                     C=[(1, atom("c", x))], D=[(1, atom("d", x))], generalized=False)
    assert form.render() == parse(
        "exists2 p. (forall x. (a(x) | p(x)) & forall x. (b(x) | ~p(x))"
        " & exists x. (c(x) & p(x)) & exists x. (d(x) & ~p(x)))")


def test_nullary_examples():
    for source, expected in [("exists2 p. p", "true"), ("exists2 p. ~p", "true"),
                             ("exists2 p. (p & q)", "q")]:
        assert eliminate_all(parse(source)) == parse(expected)
    normal = normalize_nullary("p", parse("(p & q) | (~p & r)"))
    assert normal == parse("q & exists2 p. p | r & exists2 p. ~p")


def test_hauptform_to_basic_plain():
    form = Hauptform("p", x, A=[(1, atom("a", x))], B=[(1, atom("b", x))])
    reduction = hauptform_to_basic(form)
    assert reduction.prefix == [] and reduction.guard == TRUE
    assert reduction.A == atom("a", x) and reduction.B == atom("b", x)


def test_hauptform_to_basic_existential_block():
    form = Hauptform("p", x, C=[(1, atom("r", x))])
    reduction = hauptform_to_basic(form)
    (u,) = reduction.prefix
    assert reduction.guard == atom("r", u)
    assert reduction.A == neq(x, u)


def test_hauptform_to_basic_counted_universal():
    form = Hauptform("p", x, A=[(2, atom("a", x))])
    reduction = hauptform_to_basic(form)
    (x1,) = reduction.prefix
    assert reduction.A == disj(atom("a", x), Eq(x, x1))


@pytest.mark.parametrize("seed", range(20))
def test_hauptform_reduction_equivalent(seed):
    rng = random.Random(seed)
    pool = [atom("q", x), atom("r", x), Eq(x, a), TRUE]
    groups = [[(rng.randint(1, 2), rng.choice(pool)) for _ in range(rng.randint(0, 1))] for _ in range(4)]
    form = Hauptform("p", x, *groups)
    reduction = hauptform_to_basic(form)
    assert check_equiv(reduction_result(reduction, "p"), form.render(), 3) is None


def test_eliminate_all_examples():
    assert eliminate_all(parse("forall2 p. forall x. (p(x) | ~p(x))")) == TRUE
    first_order = parse("forall x. (q(x) | x = a)")
    assert eliminate_all(first_order) == first_order
    with pytest.raises(ClassError):
        eliminate_all(parse("exists2 p. exists x. f(x, x)"))


@pytest.mark.parametrize("seed", range(60))
def test_eliminate_all_random(seed):
    gen = FormulaGen(seed, counting=seed % 3 == 0, max_count=2)
    body = gen.sentence(3)
    formula = ExistsPred("q", 1, body) if seed % 2 else ForallPred("q", 1, body)
    result = eliminate_all(formula)
    assert not predicate_occurs("q", result)
    assert check_equiv(formula, result, 3) is None
    before, after = free_symbols(formula), free_symbols(result)
    assert after.predicates <= before.predicates
    assert after.constants <= before.constants


@pytest.mark.parametrize("seed", range(40))
def test_noeq_agrees_with_exact(seed):
    gen = FormulaGen(seed, equality=False, nullary=("s",) if seed % 4 == 0 else ())
    body = gen.sentence(3)
    pred = "s" if seed % 8 == 0 else "q"
    exact = eliminate_predicate(pred, body)
    closed = eliminate_noeq(pred, body)
    crude = eliminate_crude(pred, body)
    assert not predicate_occurs(pred, closed)
    assert check_equiv(exact, closed, 3) is None
    assert check_entails(closed, crude, 3) is None


def test_noeq_examples():
    ferio = parse("forall x. (~q(x) | ~p(x)) & exists x. (r(x) & q(x))")
    assert check_equiv(eliminate_noeq("q", ferio), eliminate_predicate("q", ferio), 3) is None
    plain = Hauptform("p", x, A=[(1, atom("a", x))], B=[(1, atom("b", x))], generalized=False)
    assert noeq_resultant(plain) == parse("forall x. (a(x) | b(x))")
    two = Hauptform("p", x, C=[(1, TRUE)], D=[(1, TRUE)], generalized=False)
    assert check_equiv(noeq_resultant(two), parse("exists u. exists v. u != v"), 3) is None
    with pytest.raises(ClassError):
        eliminate_noeq("q", parse("exists x. (q(x) & x = a)"))


def test_crude_resultant_examples():
    plain = Hauptform("p", x, A=[(1, atom("a", x))], B=[(1, atom("b", x))], generalized=False)
    assert crude_resultant(plain) == noeq_resultant(plain)
    two = Hauptform("p", x, C=[(1, TRUE)], D=[(1, TRUE)], generalized=False)
    crude, exact = crude_resultant(two), noeq_resultant(two)
    assert check_equiv(crude, TRUE, 3) is None
    assert check_entails(exact, crude, 3) is None
    separating = find_model(conj(crude, Not(exact)), 3)
    assert separating is not None and separating.domain_size == 1
    with pytest.raises(ShapeError):
        crude_resultant(Hauptform("p", x, C=[(2, TRUE)]))


def _clauses(preds, rests):
    clauses = []
    for signs, rest in zip(itertools.product((True, False), repeat=len(preds)), rests):
        lits = [atom(p, x) if s else Not(atom(p, x)) for p, s in zip(preds, signs)]
        clauses.append(Forall(x, disj(rest, *lits)))
    return conj(*clauses)


def test_simultaneous_elim_single_is_basic_lemma():
    formula = _clauses(["p"], [atom("a", x), atom("b", x)])
    assert simultaneous_elim(["p"], formula) == Forall(x, disj(atom("a", x), atom("b", x)))


def test_simultaneous_elim_falsum():
    formula = _clauses(["p", "q"], [FALSE] * 4)
    result = simultaneous_elim(["p", "q"], formula)
    assert isinstance(result, Forall) and simplify_truth_values(result.sub) == FALSE


@pytest.mark.parametrize("seed", range(10))
def test_simultaneous_elim_random(seed):
    rng = random.Random(seed)
    pool = [atom("r", x), Not(atom("r", x)), FALSE, TRUE, Eq(x, a)]
    formula = _clauses(["p", "q"], [rng.choice(pool) for _ in range(4)])
    result = simultaneous_elim(["p", "q"], formula)
    source = ExistsPred("p", 1, ExistsPred("q", 1, formula))
    assert check_equiv(source, result, 3) is None


def test_simultaneous_elim_errors():
    with pytest.raises(ShapeError):
        simultaneous_elim(["p", "q"], _clauses(["p"], [FALSE, FALSE]))
    with pytest.raises(EliminandOccurs):
        simultaneous_elim(["p"], _clauses(["p"], [atom("p", a), FALSE]))
