import random

import pytest

from behmann.definitions import (
    ackermann_input, ackermann_lemma_elim, expand_definition, intro_definition,
    occurrence_polarities, quantifier_switch,
)
from behmann.elimination import eliminate_all
from behmann.errors import (
    CaptureError, EliminandInDefiniens, NotFresh, PolarityViolation, ShapeError,
)
from behmann.formula import (
    Const, Exists, ExistsPred, Forall, Not, Var, atom, conj, disj, free_vars, predicate_occurs,
)
from behmann.oracle import check_equiv
from behmann.rewriter import RuleId, apply_rule
from behmann.syntax import parse

from support import one_polarity_formula

x, y = Var("x"), Var("y")
a, b = Const("a"), Const("b")


def test_intro_definition_example():
    formula = parse("q(a) | q(b)")
    defined = intro_definition(formula, atom("q", x), x, [(0,), (1,)], "p")
    assert defined == parse("exists2 p. (forall x. (p(x) <-> q(x)) & (p(a) | p(b)))")
    assert expand_definition(defined) == formula
    assert check_equiv(defined, formula, 3) is None


def test_intro_definition_partial_occurrences():
    formula = parse("(q(a) & r(a)) | (q(b) & r(b))")
    definiens = conj(atom("q", x), atom("r", x))
    defined = intro_definition(formula, definiens, x, [(1,)], "p")
    assert defined.sub.subs[1] == parse("q(a) & r(a) | p(b)")
    assert check_equiv(defined, formula, 3) is None


def test_intro_definition_errors():
    formula = parse("q(a) | p(b)")
    with pytest.raises(NotFresh):
        intro_definition(formula, atom("q", x), x, [(0,)], "p")
    with pytest.raises(ShapeError):
        intro_definition(formula, atom("r", x), x, [(0,)], "s")
    # the definiens parameter y is bound at the occurrence
    bound = Exists(y, atom("f", a, y))
    with pytest.raises(CaptureError):
        intro_definition(bound, atom("f", x, y), x, [(0,)], "s")


def test_expandable_definition_is_trivial():
    assert eliminate_all(parse("exists2 p. forall x. (p(x) <-> q(x))")) == parse("true")


def test_ackermann_examples():
    assert ackermann_lemma_elim("p", "imp", atom("q", x), x, parse("p(a)")) == parse("q(a)")
    assert ackermann_lemma_elim("p", "revimp", atom("q", x), x, parse("~p(a)")) == parse("~q(a)")
    with pytest.raises(PolarityViolation):
        ackermann_lemma_elim("p", "imp", atom("q", x), x, parse("p(a) & ~p(b)"))
    with pytest.raises(EliminandInDefiniens):
        ackermann_lemma_elim("p", "imp", atom("p", x), x, parse("p(a)"))


def test_ackermann_matches_definition_round_trip():
    body = parse("p(a) | exists y. (r(y) & p(y))")
    definiens = atom("q", x)
    via_lemma = ackermann_lemma_elim("p", "imp", definiens, x, body)
    assert via_lemma == parse("q(a) | exists y. (r(y) & q(y))")
    assert check_equiv(ackermann_input("p", "imp", definiens, x, body), via_lemma, 3) is None


def test_occurrence_polarities():
    found = occurrence_polarities(parse("p(a) & ~(p(b) | q) & exists2 p. p(a)"), "p")
    assert [polarity for _, polarity in found] == [1, -1]


@pytest.mark.parametrize("seed", range(40))
def test_ackermann_random(seed):
    rng = random.Random(seed)
    direction = "imp" if seed % 2 else "revimp"
    polarity = 1 if direction == "imp" else -1
    definiens = rng.choice([atom("r", y), disj(atom("r", y), atom("s", y)), Not(atom("s", y)),
                            Exists(x, conj(atom("r", x), Not(atom("s", y))))])
    body = Exists(x, one_polarity_formula(rng, "p", polarity, 3)) if seed % 3 else one_polarity_formula(rng, "p", polarity, 3)
    body = Forall(x, body) if x in free_vars(body) else body
    result = ackermann_lemma_elim("p", direction, definiens, y, body)
    assert not predicate_occurs("p", result)
    assert check_equiv(ackermann_input("p", direction, definiens, y, body), result, 3) is None


def test_quantifier_switch_example():
    source = parse("exists2 f. (forall x. exists y. (a(x,y) & f(x,y)) & forall x. exists z. (b(x,z) & ~f(x,z)))")
    merged = apply_rule(source, RuleId.AllOutAnd, (0,))
    switched = quantifier_switch(merged)
    assert switched == parse("forall x. exists2 f1. (exists y. (a(x,y) & f1(y)) & exists z. (b(x,z) & ~f1(z)))")
    assert check_equiv(source, switched, 2) is None


def test_quantifier_switch_to_nullary():
    switched = quantifier_switch(parse("exists2 p. forall x. (p(x) <-> q(x))"))
    assert isinstance(switched, Forall) and isinstance(switched.sub, ExistsPred)
    assert switched.sub.arity == 0
    assert check_equiv(switched, parse("true"), 3) is None


def test_quantifier_switch_edge_cases():
    assert quantifier_switch(ExistsPred("s", 1, parse("forall x. q(x)"))) == parse("forall x. q(x)")
    with pytest.raises(ShapeError):
        quantifier_switch(parse("exists2 p. forall x. (p(x) | p(a))"))
    with pytest.raises(ShapeError):
        quantifier_switch(parse("exists2 p. exists x. p(x)"))
