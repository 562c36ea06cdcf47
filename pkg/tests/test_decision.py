import random

import pytest

from behmann.decision import (
    CardinalitySpectrum, Verdict, close, decide_pure_counting, decide_satisfiability,
    decide_validity, prop_decide_cnf, prop_decide_dnf, prop_decide_substitution,
    pure_counting_valid, qbf_decide_inward, quine_decide, quine_step, shannon_expand,
    spectrum_via_dnf,
)
from behmann.elimination import eliminate_all
from behmann.errors import ClassError, EligibilityError, ShapeError
from behmann.formula import ExistsPred, Not, PRED_BINDERS, subformulas
from behmann.oracle import (
    Interpretation, check_equiv, evaluate, find_countermodel, find_model, small_model_bound,
)
from behmann.rewriter import cleanup
from behmann.syntax import parse

from support import FormulaGen, boolean_formula, pure_counting_formula


def test_spectrum_examples():
    assert decide_pure_counting(parse("atleast 3 x. true")) == CardinalitySpectrum(True, frozenset({1, 2}))
    only_one = decide_pure_counting(parse("atleast 1 x. true & ~atleast 2 x. true"))
    assert only_one == CardinalitySpectrum(False, frozenset({1}))
    assert decide_pure_counting(parse("atleast 2 x. true | ~atleast 2 x. true")).always


def test_spectrum_queries():
    spectrum = CardinalitySpectrum(False, frozenset({2, 3}))
    assert [spectrum.truth(n) for n in range(1, 6)] == [False, True, True, False, False]
    assert spectrum.describe() == "false for all domain cardinalities with exception of 2, 3"
    assert spectrum.to_dict() == {"sign": "false-cofinitely", "exceptions": [2, 3]}
    with pytest.raises(ValueError):
        spectrum.truth(0)


def test_pure_counting_rejects_other_literals():
    with pytest.raises(ShapeError):
        decide_pure_counting(parse("atleast 2 x. p(x)"))


@pytest.mark.parametrize("seed", range(50))
def test_pure_counting_matches_evaluation(seed):
    rng = random.Random(seed)
    formula = pure_counting_formula(rng, 3)
    spectrum = decide_pure_counting(formula)
    for size in range(1, 7):
        assert spectrum.truth(size) == evaluate(formula, Interpretation(size))
    assert spectrum == spectrum_via_dnf(formula)
    assert pure_counting_valid(formula) == spectrum.always


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(valid=True, satisfiable=False)


def test_closure():
    assert close(parse("p(a) | q"), True) == parse("forall2 p. forall2 q. forall a1. (p(a1) | q)")
    assert close(parse("p(a) | q"), False) == parse("exists2 p. exists2 q. exists a1. (p(a1) | q)")


def test_decide_examples():
    verdict = decide_validity(parse("forall x. p(x) | exists x. ~p(x)"))
    assert verdict.valid and verdict.satisfiable
    verdict = decide_satisfiability(parse("exists x. exists y. x != y"))
    assert verdict.satisfiable and not verdict.valid
    assert verdict.witness_spectrum == CardinalitySpectrum(True, frozenset({1}))
    ferio = parse("(forall x. (~q(x) | ~p(x)) & exists x. (r(x) & q(x))) -> exists x. (r(x) & ~p(x))")
    assert decide_validity(ferio).valid
    with pytest.raises(ClassError):
        decide_validity(parse("exists x. f(x, x)"))


@pytest.mark.parametrize("seed", range(30))
def test_decide_agrees_with_oracle(seed):
    gen = FormulaGen(seed, counting=seed % 3 == 0, predicates=("p", "q"), max_count=2)
    formula = gen.sentence(3)
    if seed % 4 == 0:
        formula = ExistsPred("q", 1, formula)
    verdict = decide_validity(formula)
    universal, existential = close(formula, True), close(formula, False)
    # bounds of the eliminated closures, capped where exhaustive checking gets slow
    valid_bound = min(4, small_model_bound(eliminate_all(universal)))
    sat_bound = min(4, small_model_bound(eliminate_all(existential)))
    assert verdict.valid == (find_countermodel(universal, valid_bound) is None)
    assert verdict.satisfiable == (find_model(existential, sat_bound) is not None)
    assert verdict.satisfiable == (not decide_validity(Not(formula)).valid)


@pytest.mark.parametrize("source, valid, satisfiable", [
    ("p | ~p", True, True),
    ("exists2 p. (p & q)", False, True),
    ("forall2 p. exists2 q. (p <-> q)", True, True),
    ("(p | ~p) & (q | ~q)", True, True),
    ("(p & ~p) | (q & r)", False, True),
    ("p & ~p", False, False),
    ("exists2 p. forall2 q. (p | ~q)", True, True),
    ("forall2 p. exists2 q. (p & ~q)", False, False),
    ("exists2 p. p", True, True),
])
def test_propositional_examples(source, valid, satisfiable):
    formula = parse(source)
    for decide in (prop_decide_substitution, prop_decide_cnf, prop_decide_dnf, qbf_decide_inward):
        verdict = decide(formula)
        assert (verdict.valid, verdict.satisfiable) == (valid, satisfiable), decide.__name__


def test_propositional_class_check():
    for decide in (prop_decide_substitution, prop_decide_cnf, prop_decide_dnf, qbf_decide_inward):
        with pytest.raises(ClassError):
            decide(parse("p(a)"))


def test_shannon_expansion():
    expanded = shannon_expand(parse("exists2 p. (p & q)"))
    assert not any(isinstance(node, PRED_BINDERS) for node in subformulas(expanded))
    assert check_equiv(expanded, parse("q"), 1) is None


@pytest.mark.parametrize("seed", range(100))
def test_propositional_deciders_agree(seed):
    formula = boolean_formula(random.Random(seed), 5)
    verdicts = {(v.valid, v.satisfiable) for v in (
        prop_decide_substitution(formula), prop_decide_cnf(formula),
        prop_decide_dnf(formula), qbf_decide_inward(formula))}
    assert len(verdicts) == 1


def test_quine_step_examples():
    universal = parse("forall x. (p | q(x))")
    expanded = cleanup(quine_step(universal, parse("p")))
    assert expanded == parse("p | ~p & forall x. q(x)")
    assert check_equiv(expanded, parse("p | forall x. q(x)"), 3) is None
    existential = parse("exists x. (p & q(x))")
    assert check_equiv(quine_step(existential, parse("p")), parse("p & exists x. q(x)"), 3) is None
    with pytest.raises(EligibilityError):
        quine_step(parse("exists x. q(x)"), parse("p"))
    with pytest.raises(EligibilityError):
        quine_step(existential, parse("exists x. q(x)").sub)
    with pytest.raises(EligibilityError):
        quine_step(parse("p"), parse("p"))


def test_quine_decide_examples():
    assert quine_decide(parse("forall x. p(x) | exists x. ~p(x)")).valid
    verdict = quine_decide(parse("forall x. exists y. (p(x) <-> ~p(y))"))
    assert not verdict.valid and verdict.satisfiable
    assert not quine_decide(parse("p(a) & forall x. ~p(x)")).satisfiable
    with pytest.raises(ClassError):
        quine_decide(parse("exists x. x = a"))


@pytest.mark.parametrize("seed", range(40))
def test_quine_agrees_with_elimination(seed):
    gen = FormulaGen(seed, equality=False, predicates=("p", "q"), nullary=("s",) if seed % 5 == 0 else ())
    formula = gen.sentence(3)
    by_quine = quine_decide(formula)
    by_elimination = decide_validity(formula)
    assert (by_quine.valid, by_quine.satisfiable) == (by_elimination.valid, by_elimination.satisfiable)
