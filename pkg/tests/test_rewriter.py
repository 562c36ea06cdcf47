import pytest

from behmann.errors import EntailmentReversed, NoMatch, ShapeError, SideConditionViolated, SizeLimitExceeded
from behmann.formula import (
    And, Atom, Const, Eq, Exists, Forall, Not, Or, Var, TRUE, classify, nnf, subformulas,
    children, FormulaClass,
)
from behmann.oracle import check_entails, check_equiv
from behmann.rewriter import (
    R2L, RuleId, Trace, apply_rule, circumlocute, clause_simplify,
    cleanup, entails_syntactically, is_cnf_over_basics, is_dnf_over_basics, push_negations,
    replay, simplify_truth_values, to_cnf_over_basics, to_dnf_over_basics,
)
from behmann.syntax import parse

from support import FormulaGen

x, y = Var("x"), Var("y")
a = Const("a")


def positions(formula, path=()):
    yield path
    for i, kid in enumerate(children(formula)):
        yield from positions(kid, path + (i,))


@pytest.mark.parametrize("rule, source, expected", [
    (RuleId.NotNot, "~~p", "p"),
    (RuleId.NotAnd, "~(p & q)", "~p | ~q"),
    (RuleId.NotOr, "~(p | q)", "~p & ~q"),
    (RuleId.NotAll, "~forall x. p(x)", "exists x. ~p(x)"),
    (RuleId.NotEx, "~exists x. p(x)", "forall x. ~p(x)"),
    (RuleId.NotEx, "~atleast 2 x. p(x)", "allbut 2 x. ~p(x)"),
    (RuleId.AoAssoc, "(p & q) & r", "p & q & r"),
    (RuleId.AoComm, "p | q", "q | p"),
    (RuleId.AoIdem, "p & q & p", "p & q"),
    (RuleId.TvAndT, "p & true", "p"),
    (RuleId.TvOrT, "p | true", "true"),
    (RuleId.TvQT, "forall x. true", "true"),
    (RuleId.TvQF, "atleast 3 x. false", "false"),
    (RuleId.ComplemAnd, "p & q & ~p", "false"),
    (RuleId.ComplemOr, "p | ~p", "true"),
    (RuleId.DistDnf, "p & (q | r)", "(p & q) | (p & r)"),
    (RuleId.DistCnf, "p | (q & r)", "(p | q) & (p | r)"),
    (RuleId.AllOutAnd, "forall x. p(x) & forall x. q(x)", "forall x. (p(x) & q(x))"),
    (RuleId.ExOutOr, "exists x. p(x) | exists x. q(x)", "exists x. (p(x) | q(x))"),
    (RuleId.QOutAo, "s & exists x. p(x)", "exists x. (s & p(x))"),
    (RuleId.QuantDrop, "forall x. s", "s"),
    (RuleId.QuantFlip, "forall x. forall y. p(x)", "forall y. forall x. p(x)"),
    (RuleId.SubsAndAbsorp, "p & (p | q)", "p"),
    (RuleId.SubsOrAbsorp, "p | (p & q)", "p"),
    (RuleId.SubsAndAbsorp, "atleast 3 x. p(x) & atleast 2 y. p(y)", "atleast 3 x. p(x)"),
    (RuleId.Taut, "(p | ~p) & q", "q"),
    (RuleId.Subs, "p & (p | q)", "p"),
    (RuleId.Unit, "p & (~p | q)", "p & q"),
    (RuleId.Unit, "~p | (p & q)", "~p | q"),
    (RuleId.InfV, "(p | q) & (~p | r)", "q | r"),
    (RuleId.InfVQ, "forall x. (p(x) | q(x)) & forall x. (~p(x) | r(x))", "forall x. (q(x) | r(x))"),
    (RuleId.InfVbarPos, "(p | s) & (~p | q)", "q | s"),
    (RuleId.InfVbarNeg, "(~p | s) & (p | ~q)", "~q | s"),
])
def test_rule_examples(rule, source, expected):
    result = apply_rule(parse(source), rule)
    assert result == parse(expected)


def test_pullout_round_trip():
    formula = parse("p(a) & q(a)")
    out = apply_rule(formula, RuleId.PulloutAll, arg=(a, x))
    assert out == Forall(x, Or((Not(Eq(x, a)), parse("p(a) & q(a)").__class__(
        (parse("forall x. p(x)").sub, parse("forall x. q(x)").sub)))))
    assert apply_rule(out, RuleId.PulloutAll, direction=R2L) == formula
    ex = apply_rule(formula, RuleId.PulloutEx, arg=(a, x))
    assert apply_rule(ex, RuleId.PulloutEx, direction=R2L) == formula
    assert check_equiv(formula, out, 3) is None
    assert check_equiv(formula, ex, 3) is None


def test_pullout_has_no_dual():
    with pytest.raises(SideConditionViolated):
        apply_rule(parse("p(a)"), RuleId.PulloutAll, arg=(a, x), dualized=True)


def test_circumlocute_rejects_capture():
    with pytest.raises(Exception):
        circumlocute(parse("forall x. p(x)"), a, x)
    assert check_equiv(circumlocute(parse("p(a)"), a, y, "exists"), parse("p(a)"), 3) is None


def test_side_conditions():
    px = Atom("p", (x,))
    with pytest.raises(SideConditionViolated):
        apply_rule(Forall(x, px), RuleId.QuantDrop)
    with pytest.raises(SideConditionViolated):
        apply_rule(And((px, Exists(x, Atom("q", (x,))))), RuleId.QOutAo, arg=1)
    with pytest.raises(SideConditionViolated):
        apply_rule(parse("forall x. (p(x) & q(x))"), RuleId.QOutAo, direction=R2L)


def test_entailment_rules_refuse_reversal():
    with pytest.raises(EntailmentReversed):
        apply_rule(parse("q | r"), RuleId.InfV, direction=R2L)
    with pytest.raises(EntailmentReversed):
        apply_rule(parse("(p | q) & (~p | r)"), RuleId.InfV, dualized=True)


def test_no_match():
    with pytest.raises(NoMatch):
        apply_rule(parse("p & q"), RuleId.NotNot)
    with pytest.raises(NoMatch):
        apply_rule(parse("atleast 2 x. true"), RuleId.TvQT)


def test_dual_flag_matches_partner_rule():
    formula = parse("exists x. p(x) | exists x. q(x)")
    assert apply_rule(formula, RuleId.AllOutAnd, dualized=True) == apply_rule(formula, RuleId.ExOutOr)


def test_witness_right_to_left():
    formula = parse("p")
    witness = parse("p & (p | q)")
    assert apply_rule(formula, RuleId.SubsAndAbsorp, direction=R2L, arg=witness) == witness
    with pytest.raises(NoMatch):
        apply_rule(formula, RuleId.SubsAndAbsorp, direction=R2L, arg=parse("q & (p | q)"))


def test_var_rename():
    formula = parse("forall x. (p(x) & exists y. q(y))")
    assert apply_rule(formula, RuleId.VarRename, arg="z") == parse("forall z. (p(z) & exists y. q(y))")
    with pytest.raises(SideConditionViolated):
        apply_rule(parse("forall x. (p(x) & exists y. q(x))"), RuleId.VarRename, arg="y")


def test_vbar_requires_unbound_context():
    formula = parse("forall x. p(x) & (~p(x) | q)".replace("(~p(x) | q)", "(~p(a) | q)"))
    # p(a) does not occur in the context, so nothing matches
    with pytest.raises(NoMatch):
        apply_rule(formula, RuleId.InfVbarPos)
    bad = And((parse("forall x. (p(x) | s)"), Or((Not(parse("p(a)").__class__("p", (x,))), parse("q")))))
    with pytest.raises(NoMatch):
        apply_rule(bad, RuleId.InfVbarPos)
    starred = parse("forall x. (p(x) | s) & forall x. (~p(x) | q(x))")
    out = apply_rule(starred, RuleId.InfVbarPosStar)
    assert out == parse("forall x. (q(x) | s)")


RULES_TO_SWEEP = [r for r in RuleId if r not in (RuleId.VarRename, RuleId.PulloutAll, RuleId.PulloutEx)]


@pytest.mark.parametrize("seed", range(40))
def test_random_rule_soundness(seed):
    gen = FormulaGen(seed, counting=True, truth_values=True)
    formula = gen.sentence(4)
    fired = 0
    for path in positions(formula):
        for rule in RULES_TO_SWEEP:
            for dualized in (False, True):
                if dualized and (rule.entailment_only or classify(formula) in (FormulaClass.MON_EQ, FormulaClass.QMON_EQ)):
                    continue
                try:
                    out = apply_rule(formula, rule, path, dualized=dualized)
                except (NoMatch, SideConditionViolated):
                    continue
                fired += 1
                if rule.entailment_only:
                    assert check_entails(formula, out, 3) is None, (rule, path)
                else:
                    assert check_equiv(formula, out, 3) is None, (rule, path, dualized)


def test_truth_value_simplification():
    formula = parse("(p & true) | (q & false) | forall x. ~false")
    assert simplify_truth_values(formula) == TRUE
    formula = parse("(p & ~p) | (q & true)")
    assert simplify_truth_values(formula) == parse("q")


@pytest.mark.parametrize("seed", range(30))
def test_traces_replay(seed):
    gen = FormulaGen(seed, counting=True, truth_values=True)
    formula = gen.sentence(4)
    trace = Trace()
    result = push_negations(formula, trace)
    result = cleanup(result, trace)
    for step in trace:
        assert replay(step), step.describe()
    if trace.steps:
        assert trace.steps[0].before == formula
        assert trace.steps[-1].after == result
        for first, second in zip(trace.steps, trace.steps[1:]):
            assert first.after == second.before
    assert check_equiv(formula, result, 3) is None


@pytest.mark.parametrize("seed", range(30))
def test_push_negations_matches_nnf(seed):
    formula = FormulaGen(seed, counting=True).sentence(4)
    pushed = push_negations(formula)
    for node in subformulas(pushed):
        if isinstance(node, Not):
            assert not children(node.sub) or isinstance(node.sub, Eq)
    assert check_equiv(pushed, nnf(formula), 3) is None


@pytest.mark.parametrize("seed", range(30))
def test_generalized_normal_forms(seed):
    formula = FormulaGen(seed, counting=True, truth_values=True).sentence(4)
    dnf = to_dnf_over_basics(formula)
    cnf = to_cnf_over_basics(formula)
    assert is_dnf_over_basics(dnf)
    assert is_cnf_over_basics(cnf)
    assert check_equiv(formula, dnf, 3) is None
    assert check_equiv(formula, cnf, 3) is None


def test_normal_form_size_limit():
    clauses = " & ".join(f"(p{i} | q{i})" for i in range(12))
    with pytest.raises(SizeLimitExceeded):
        to_dnf_over_basics(parse(clauses), limit=1000)


@pytest.mark.parametrize("seed", range(30))
def test_clause_simplify(seed):
    dnf = to_dnf_over_basics(FormulaGen(seed, predicates=("p", "q")).sentence(3))
    raw = parse("(p & q) | (p & q & r) | (~p) | (s & ~s) | (p & ~r)")
    for matrix in (raw, dnf):
        trace = Trace()
        out = clause_simplify(matrix, "dnf", trace)
        assert check_equiv(matrix, out, 3) is None
        assert len(children(out)) <= len(children(matrix)) or not isinstance(out, Or)
        assert clause_simplify(out, "dnf") == out
        assert all(replay(step) for step in trace)
    assert clause_simplify(raw, "dnf") == parse("q | ~p | ~r")


def test_clause_simplify_rejects_nested():
    with pytest.raises(ShapeError):
        clause_simplify(parse("(p | (q & r)) & s"), "cnf")


def test_syntactic_entailment():
    assert entails_syntactically(parse("atleast 3 x. p(x)"), parse("exists y. p(y)"))
    assert entails_syntactically(parse("allbut 1 x. p(x)"), parse("allbut 4 y. p(y)"))
    assert not entails_syntactically(parse("atleast 1 x. p(x)"), parse("atleast 2 x. p(x)"))
