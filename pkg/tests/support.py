"""Random formula generators shared by the test modules."""

import random

from behmann.formula import (
    And, Atom, Const, CountExists, CountForall, Eq, Exists, ExistsPred, Forall, ForallPred,
    Not, Or, Var, FALSE, TRUE, atom, children, conj, disj,
)

PREDICATES = ("p", "q", "r")
CONSTANTS = (Const("a"), Const("b"))
VARIABLES = (Var("x"), Var("y"), Var("z"))


class FormulaGen:
    """Seeded generator of small monadic formulas."""

    def __init__(self, seed, *, equality=True, counting=False, constants=True,
                 predicates=PREDICATES, nullary=(), max_count=3, truth_values=False):
        self.rng = random.Random(seed)
        self.equality = equality
        self.counting = counting
        self.constants = constants
        self.predicates = predicates
        self.nullary = nullary
        self.max_count = max_count
        self.truth_values = truth_values

    def term(self, bound):
        pool = list(bound) + (list(CONSTANTS) if self.constants else [])
        if not pool:
            return None
        return self.rng.choice(pool)

    def atom(self, bound):
        rng = self.rng
        choices = ["pred"]
        if self.equality:
            choices.append("eq")
        if self.nullary:
            choices.append("nullary")
        if self.truth_values:
            choices.append("tv")
        kind = rng.choice(choices)
        if kind == "nullary":
            return Atom(rng.choice(self.nullary), ())
        if kind == "tv":
            return rng.choice([TRUE, FALSE])
        left = self.term(bound)
        if left is None:
            if self.nullary:
                return Atom(rng.choice(self.nullary), ())
            return rng.choice([TRUE, FALSE])
        if kind == "eq":
            return Eq(left, self.term(bound))
        return Atom(rng.choice(self.predicates), (left,))

    def formula(self, depth, bound=()):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            lit = self.atom(bound)
            return Not(lit) if rng.random() < 0.4 else lit
        kinds = ["and", "or", "not", "forall", "exists"]
        if self.counting:
            kinds += ["atleast", "allbut"]
        kind = rng.choice(kinds)
        if kind in ("and", "or"):
            subs = tuple(self.formula(depth - 1, bound) for _ in range(rng.randint(2, 3)))
            return (And if kind == "and" else Or)(subs)
        if kind == "not":
            return Not(self.formula(depth - 1, bound))
        var = rng.choice(VARIABLES)
        inner_bound = tuple(dict.fromkeys(bound + (var,)))
        body = self.formula(depth - 1, inner_bound)
        if kind == "forall":
            return Forall(var, body)
        if kind == "exists":
            return Exists(var, body)
        n = rng.randint(1, self.max_count)
        return (CountExists if kind == "atleast" else CountForall)(n, var, body)

    def sentence(self, depth):
        return self.formula(depth, ())


def same_up_to_order(left, right):
    """Structural equality ignoring the order of and/or children."""
    return _unordered_key(left) == _unordered_key(right)


def _unordered_key(formula):
    kids = children(formula)
    if not kids:
        return repr(formula)
    inner = [_unordered_key(k) for k in kids]
    if isinstance(formula, (And, Or)):
        inner.sort()
    head = {k: v for k, v in vars(formula).items() if k not in ("subs", "sub")}
    return f"{type(formula).__name__}{sorted(head.items())}({','.join(inner)})"


def boolean_formula(rng, depth, preds=("p", "q", "r", "s"), quantified=True):
    """Random quantified Boolean formula over nullary predicates."""
    if depth <= 0 or rng.random() < 0.2:
        leaf = Atom(rng.choice(preds), ()) if rng.random() < 0.9 else rng.choice([TRUE, FALSE])
        return Not(leaf) if rng.random() < 0.4 else leaf
    kinds = ["and", "or", "not"] + (["forall2", "exists2"] if quantified else [])
    kind = rng.choice(kinds)
    if kind in ("and", "or"):
        subs = tuple(boolean_formula(rng, depth - 1, preds, quantified) for _ in range(rng.randint(2, 3)))
        return (And if kind == "and" else Or)(subs)
    if kind == "not":
        return Not(boolean_formula(rng, depth - 1, preds, quantified))
    binder = ExistsPred if kind == "exists2" else ForallPred
    return binder(rng.choice(preds), 0, boolean_formula(rng, depth - 1, preds, quantified))


def pure_counting_formula(rng, depth, max_count=5):
    """Random Boolean combination of ``atleast n x. true`` and ``allbut n x. false``."""
    x = Var("x")
    if depth <= 0 or rng.random() < 0.25:
        n = rng.randint(1, max_count)
        leaf = CountExists(n, x, TRUE) if rng.random() < 0.7 else CountForall(n, x, FALSE)
        return Not(leaf) if rng.random() < 0.4 else leaf
    kind = rng.choice(["and", "or", "not"])
    if kind == "not":
        return Not(pure_counting_formula(rng, depth - 1, max_count))
    subs = tuple(pure_counting_formula(rng, depth - 1, max_count) for _ in range(rng.randint(2, 3)))
    return (And if kind == "and" else Or)(subs)


def one_polarity_formula(rng, pred, polarity, depth):
    """Random formula over x, a, b in which every ``pred`` literal has the given sign."""
    x = VARIABLES[0]
    a, b = CONSTANTS
    if depth == 0 or rng.random() < 0.3:
        choice = rng.randrange(4)
        if choice == 0:
            literal = atom(pred, rng.choice([a, b, x]))
            return literal if polarity > 0 else Not(literal)
        if choice == 1:
            return atom(rng.choice("rs"), rng.choice([a, b, x]))
        if choice == 2:
            return Not(atom(rng.choice("rs"), rng.choice([a, b, x])))
        return Eq(CONSTANTS[0], CONSTANTS[1])
    kind = rng.randrange(4)
    left = one_polarity_formula(rng, pred, polarity, depth - 1)
    right = one_polarity_formula(rng, pred, polarity, depth - 1)
    if kind == 0:
        return conj(left, right)
    if kind == 1:
        return disj(left, right)
    quant = Forall if kind == 2 else Exists
    return quant(x, disj(left, right))
