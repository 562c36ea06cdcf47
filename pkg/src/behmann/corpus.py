"""Built-in worked examples with their known results.

Each example names an operation, an input and the expected output; running an
example computes the output and compares it with the expected one under the
finite-model oracle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .counting import counting_normal_form
from .definitions import quantifier_switch
from .elimination import eliminate_all
from .oracle import check_equiv
from .polyadic import NotMonadizable, eliminate_polyadic
from .rewriter import RuleId, apply_rule
from .syntax import parse


@dataclass(frozen=True)
class Example:
    name: str
    operation: str
    source: str
    expected: str | None
    eliminand: str | None = None
    mode: str = "conj"


SYLLOGISMS = (
    Example(
        "ferio", "eliminate",
        "exists2 q. (forall x. (~q(x) | ~p(x)) & exists x. (r(x) & q(x)))",
        "exists u. (r(u) & ~p(u))",
    ),
    Example(
        "darapti", "eliminate",
        "exists2 q. (forall x. (~q(x) | p(x)) & forall x. (~q(x) | r(x)) & exists x. q(x))",
        "exists u. (p(u) & r(u))",
    ),
    Example(
        "two-negative-particulars", "eliminate",
        "exists2 q. (exists x. (p(x) & ~q(x)) & exists x. (q(x) & ~r(x)))",
        "exists u. exists v. (p(u) & ~r(v) & u != v)",
    ),
    Example(
        "composed-syllogism", "eliminate",
        "exists2 q1. exists2 q2. (forall x. (~q1(x) | p(x)) & forall x. (~q2(x) | r(x))"
        " & exists x. (q1(x) & q2(x)))",
        "exists u. (r(u) & p(u))",
    ),
)

POLYADIC = (
    Example(
        "schroeder-shorthand", "polyadic",
        "exists2 p. (forall z. (f(x,z) | p(z,y) | h(z,y)) & forall z. (g(x,z) | ~p(z,y) | h(z,y)))",
        "forall z. (f(x,z) | g(x,z) | h(z,y))", "p",
    ),
    Example(
        "schroeder-universal", "polyadic",
        "forall2 p. (exists u. (p(x,u) & f(u,y)) | forall v. (~p(x,v) | g(v,y)))",
        "forall v. (g(v,y) | f(v,y))", "p",
    ),
    Example(
        "schroeder-proper-relation", "polyadic",
        "forall2 p. (p(x,y) | exists v. (forall u. (~p(x,u) | f(u,v)) & g(v,y)))",
        None, "p",
    ),
    Example(
        "schroeder-two-positions", "polyadic",
        "exists2 p. (forall z. (f(x,z) | p(z,y)) & forall z. (~p(x,z) | g(z,y)))",
        "g(y,y) | f(x,x)", "p",
    ),
    Example(
        "ackermann-switching", "switch",
        "exists2 f. (forall x. exists y. (a(x,y) & f(x,y)) & forall x. exists z. (b(x,z) & ~f(x,z)))",
        "forall x. exists y. exists z. (a(x,y) & b(x,z) & y != z)", "f",
    ),
)

MISCELLANEOUS = (
    Example("expandable-definition", "eliminate", "exists2 p. forall x. (p(x) <-> q(x))", "true"),
    Example("nullary-conjunct", "eliminate", "exists2 p. (p & q)", "q"),
    Example(
        "guard-single", "normalize", "exists x. (p(x) & x != a)",
        "(atleast 1 x. p(x) & ~p(a)) | atleast 2 x. p(x)", mode="disj",
    ),
    Example(
        "guard-double-disj", "normalize", "exists x. (p(x) & x != a & x != b)",
        "(atleast 1 x. p(x) & ~p(a) & ~p(b)) | (atleast 2 x. p(x) & (~p(a) | ~p(b) | a = b))"
        " | atleast 3 x. p(x)", mode="disj",
    ),
    Example(
        "guard-double-conj", "normalize", "exists x. (p(x) & x != a & x != b)",
        "atleast 1 x. p(x) & (atleast 2 x. p(x) | (~p(a) & ~p(b)))"
        " & (atleast 3 x. p(x) | ~p(a) | ~p(b) | a = b)",
    ),
    Example(
        "positive-equality-collapse", "normalize", "exists x. (p(x) & x != a & x = c & x = d & x != b)",
        "p(c) & c != a & c != b & c = d",
    ),
)

EXAMPLES = SYLLOGISMS + POLYADIC + MISCELLANEOUS


def by_name(name):
    for example in EXAMPLES:
        if example.name == name:
            return example
    raise KeyError(name)


def switch_and_eliminate(formula):
    """Merge the two universal conjuncts, switch ``exists f. forall x`` and eliminate."""
    merged = apply_rule(formula, RuleId.AllOutAnd, (0,))
    switched = quantifier_switch(merged)
    return eliminate_polyadic(switched, switched.sub.pred)


def compute(example):
    """The output of the example's operation on its input."""
    formula = parse(example.source)
    if example.operation == "eliminate":
        return eliminate_all(formula)
    if example.operation == "polyadic":
        return eliminate_polyadic(formula, example.eliminand)
    if example.operation == "switch":
        return switch_and_eliminate(formula)
    if example.operation == "normalize":
        return counting_normal_form(formula, mode=example.mode)
    raise ValueError(f"unknown operation {example.operation}")


@dataclass
class Outcome:
    example: Example
    result: object
    passed: bool
    detail: str
    seconds: float


def run_example(example, max_domain=3):
    """Compute the example and compare with the expected result under the oracle."""
    start = time.perf_counter()
    result = compute(example)
    if example.expected is None:
        passed = isinstance(result, NotMonadizable)
        detail = result.reason if passed else "expected no monadic encoding"
    elif isinstance(result, NotMonadizable):
        passed, detail = False, result.reason
    else:
        counterexample = check_equiv(result, parse(example.expected), max_domain)
        passed = counterexample is None
        detail = "equivalent" if passed else f"differs on {counterexample}"
    return Outcome(example, result, passed, detail, time.perf_counter() - start)


def run_corpus(max_domain=3, names=None):
    return [run_example(e, max_domain) for e in EXAMPLES if names is None or e.name in names]
