"""Position-addressed rewrite rules with replayable traces.

Every rule of the catalog is applied to the subformula at a path of child
indices (quantifier bodies are child 0) in a direction.  Mirror-image rules
(for instance merging existentials over a disjunction) are not coded twice:
they are obtained by conjugating their partner with :func:`dual`.  Rules that
mention equality have no sound dual and are coded directly.

The strategy functions at the end of the module (truth-value simplification,
negation pushing, clause simplification, generalized DNF/CNF) are built on
the same rule implementations and can record a trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import (
    CaptureError, EntailmentReversed, NoMatch, ShapeError, SideConditionViolated,
    SizeLimitExceeded,
)
from .formula import (
    And, Atom, Bottom, COUNT_QUANTIFIERS, CountExists, CountForall, Eq,
    Exists, ExistsPred, FALSE, Forall, ForallPred, Formula, IND_QUANTIFIERS, JUNCTIONS,
    Not, Or, PRED_BINDERS, TRUE, Top, VAR_BINDERS, Var, alpha_key, binders_above,
    children, complement, conj, disj, dual, free_vars, occurs_free, polarity_at,
    predicate_occurs, replace_at, substitute, subformula_at, with_children, all_names,
)

DEFAULT_SIZE_LIMIT = 10 ** 6


class Direction(enum.Enum):
    L2R = "L2R"
    R2L = "R2L"


L2R = Direction.L2R
R2L = Direction.R2L


class RuleId(enum.Enum):
    """Rule catalog; ``label`` is the traditional roman-numeral name."""

    NotNot = "NotNot"
    NotAnd = "NotAnd"
    NotOr = "NotOr"
    NotAll = "NotAll"
    NotEx = "NotEx"
    AoAssoc = "AoAssoc"
    AoComm = "AoComm"
    AoIdem = "AoIdem"
    TvNotT = "TvNotT"
    TvNotF = "TvNotF"
    TvAndT = "TvAndT"
    TvAndF = "TvAndF"
    TvOrT = "TvOrT"
    TvOrF = "TvOrF"
    TvQT = "TvQT"
    TvQF = "TvQF"
    ComplemAnd = "ComplemAnd"
    ComplemOr = "ComplemOr"
    DistDnf = "DistDnf"
    DistCnf = "DistCnf"
    AllOutAnd = "AllOutAnd"
    ExOutOr = "ExOutOr"
    QOutAo = "QOutAo"
    QuantDrop = "QuantDrop"
    QuantFlip = "QuantFlip"
    VarRename = "VarRename"
    SubsAndAbsorp = "SubsAndAbsorp"
    SubsOrAbsorp = "SubsOrAbsorp"
    Taut = "Taut"
    Subs = "Subs"
    Unit = "Unit"
    PulloutAll = "PulloutAll"
    PulloutEx = "PulloutEx"
    InfV = "InfV"
    InfVQ = "InfVQ"
    InfVbarPos = "InfVbarPos"
    InfVbarNeg = "InfVbarNeg"
    InfVbarPosStar = "InfVbarPosStar"
    InfVbarNegStar = "InfVbarNegStar"

    @property
    def label(self):
        return _LABELS.get(self, "")

    @property
    def entailment_only(self):
        return self in _ENTAILMENTS


_LABELS = {
    RuleId.NotNot: "I",
    RuleId.NotAnd: "VI",
    RuleId.NotOr: "VI",
    RuleId.NotAll: "VI*",
    RuleId.NotEx: "VI*",
    RuleId.AoAssoc: "II",
    RuleId.AoComm: "III",
    RuleId.AoIdem: "IV",
    RuleId.DistDnf: "VII",
    RuleId.DistCnf: "VII",
    RuleId.AllOutAnd: "IV*",
    RuleId.ExOutOr: "IV*",
    RuleId.QOutAo: "II*",
    RuleId.QuantFlip: "III*",
    RuleId.SubsAndAbsorp: "X",
    RuleId.SubsOrAbsorp: "X",
    RuleId.Taut: "IX",
    RuleId.Subs: "IX",
    RuleId.Unit: "IX",
    RuleId.PulloutAll: "XI",
    RuleId.PulloutEx: "XI",
    RuleId.InfV: "V",
    RuleId.InfVQ: "V*",
    RuleId.InfVbarPos: "V̄",
    RuleId.InfVbarNeg: "V̄",
    RuleId.InfVbarPosStar: "V̄*",
    RuleId.InfVbarNegStar: "V̄*",
}

_ENTAILMENTS = {RuleId.InfV, RuleId.InfVQ, RuleId.InfVbarPos, RuleId.InfVbarNeg, RuleId.InfVbarPosStar, RuleId.InfVbarNegStar}


# Rules implemented as the dual conjugate of their partner.
DUAL_OF = {
    RuleId.NotOr: RuleId.NotAnd,
    RuleId.NotEx: RuleId.NotAll,
    RuleId.TvNotF: RuleId.TvNotT,
    RuleId.TvOrF: RuleId.TvAndT,
    RuleId.TvOrT: RuleId.TvAndF,
    RuleId.TvQF: RuleId.TvQT,
    RuleId.ComplemOr: RuleId.ComplemAnd,
    RuleId.DistCnf: RuleId.DistDnf,
    RuleId.ExOutOr: RuleId.AllOutAnd,
    RuleId.SubsOrAbsorp: RuleId.SubsAndAbsorp,
}

_NO_DUAL = {RuleId.PulloutAll, RuleId.PulloutEx}


@dataclass(frozen=True)
class RewriteStep:
    """One rule application; ``before`` and ``after`` are whole formulas."""

    rule: RuleId
    position: tuple
    direction: Direction
    before: Formula
    after: Formula
    arg: object = None
    dualized: bool = False

    def describe(self):
        path = ".".join(str(i) for i in self.position) or "root"
        label = self.rule.label or "-"
        extra = " dual" if self.dualized else ""
        return f"{label} @ {path} {self.direction.value} {self.rule.name}{extra}"


@dataclass
class Trace:
    """Collects rewrite steps in application order."""

    steps: list = field(default_factory=list)

    def record(self, step):
        self.steps.append(step)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


# ---------------------------------------------------------------- entry points


def apply_rule(formula, rule, position=(), direction=L2R, *, arg=None, dualized=False):
    """Apply ``rule`` to the subformula of ``formula`` at ``position``."""
    position = tuple(position)
    try:
        target = subformula_at(formula, position)
    except IndexError as exc:
        raise NoMatch(str(exc)) from None
    rewritten = rewrite_node(target, rule, direction, arg=arg, dualized=dualized)
    return replace_at(formula, position, rewritten)


def apply_step(formula, rule, position=(), direction=L2R, *, arg=None, dualized=False, trace=None):
    """Like :func:`apply_rule`, additionally recording the step in ``trace``."""
    after = apply_rule(formula, rule, position, direction, arg=arg, dualized=dualized)
    if trace is not None:
        trace.record(RewriteStep(rule, tuple(position), direction, formula, after, arg, dualized))
    return after


def replay(step):
    """True if re-applying ``step`` to its ``before`` yields exactly its ``after``."""
    result = apply_rule(step.before, step.rule, step.position, step.direction,
                        arg=step.arg, dualized=step.dualized)
    return result == step.after


def rewrite_node(node, rule, direction=L2R, *, arg=None, dualized=False):
    """Apply ``rule`` at the root of ``node``."""
    if rule.entailment_only and (direction is R2L or dualized):
        raise EntailmentReversed(f"{rule.name} is an entailment and only applies left to right")
    if dualized:
        if rule in _NO_DUAL:
            raise SideConditionViolated(f"{rule.name} involves equality and has no sound dual")
        return dual(rewrite_node(dual(node), rule, direction, arg=_dual_arg(arg)))
    if rule in DUAL_OF:
        return dual(_IMPLEMENTATIONS[DUAL_OF[rule]](dual(node), direction, _dual_arg(arg)))
    return _IMPLEMENTATIONS[rule](node, direction, arg)


def _dual_arg(arg):
    if isinstance(arg, Formula):
        return dual(arg)
    if isinstance(arg, tuple):
        return tuple(_dual_arg(a) for a in arg)
    return arg


def _witness(rule, node, witness, arg_candidates=(None,)):
    """Right-to-left application of a lossy rule, justified by a witness.

    The witness is the intended result; it is accepted if the rule maps it
    back to ``node`` left to right.
    """
    if not isinstance(witness, Formula):
        raise NoMatch(f"{rule.name} right to left needs the resulting formula as argument")
    for candidate in arg_candidates:
        try:
            if _IMPLEMENTATIONS[rule](witness, L2R, candidate) == node:
                return witness
        except (NoMatch, SideConditionViolated):
            continue
    raise NoMatch(f"{rule.name} does not rewrite the witness to this subformula")


def _collapse(kind, kids):
    """Rebuild a junction without flattening; 0 or 1 children collapse."""
    kids = tuple(kids)
    if not kids:
        return TRUE if kind is And else FALSE
    if len(kids) == 1:
        return kids[0]
    return kind(kids)


def _index_candidates(node):
    return (None,) + tuple(range(len(children(node)) + 1))


# ---------------------------------------------------------------- negation


def _not_not(node, direction, arg):
    if direction is L2R:
        if isinstance(node, Not) and isinstance(node.sub, Not):
            return node.sub.sub
        raise NoMatch("expected a double negation")
    return Not(Not(node))


def _not_and(node, direction, arg):
    if direction is L2R:
        if isinstance(node, Not) and isinstance(node.sub, And):
            return Or(tuple(Not(s) for s in node.sub.subs))
        raise NoMatch("expected a negated conjunction")
    if isinstance(node, Or) and all(isinstance(s, Not) for s in node.subs):
        return Not(And(tuple(s.sub for s in node.subs)))
    raise NoMatch("expected a disjunction of negations")


_NEGATION_PAIRS = {Forall: Exists, CountForall: CountExists, ForallPred: ExistsPred}


def _not_all(node, direction, arg):
    if direction is L2R:
        if isinstance(node, Not) and type(node.sub) in _NEGATION_PAIRS:
            inner = node.sub
            return _same_binder(inner, _NEGATION_PAIRS[type(inner)], Not(inner.sub))
        raise NoMatch("expected a negated universal quantification")
    reverse = {v: k for k, v in _NEGATION_PAIRS.items()}
    if type(node) in reverse and isinstance(node.sub, Not):
        return Not(_same_binder(node, reverse[type(node)], node.sub.sub))
    raise NoMatch("expected an existential quantification over a negation")


def _same_binder(template, kind, sub):
    if kind in IND_QUANTIFIERS:
        return kind(template.var, sub)
    if kind in COUNT_QUANTIFIERS:
        return kind(template.n, template.var, sub)
    return kind(template.pred, template.arity, sub)


# ---------------------------------------------------------------- and/or structure


def _ao_assoc(node, direction, arg):
    if not isinstance(node, JUNCTIONS):
        raise NoMatch("expected a conjunction or disjunction")
    kind = type(node)
    kids = list(node.subs)
    if direction is L2R:
        nested = [i for i, k in enumerate(kids) if isinstance(k, kind)]
        index = arg if arg is not None else (nested[0] if nested else None)
        if index is None or index >= len(kids) or not isinstance(kids[index], kind):
            raise NoMatch("no nested junction of the same kind")
        return kind(tuple(kids[:index]) + kids[index].subs + tuple(kids[index + 1:]))
    start, stop = arg if arg is not None else (1, len(kids))
    if not (0 <= start < stop <= len(kids)) or stop - start < 2 or stop - start == len(kids):
        raise NoMatch("grouping needs at least two children and must leave one outside")
    grouped = kind(tuple(kids[start:stop]))
    return kind(tuple(kids[:start]) + (grouped,) + tuple(kids[stop:]))


def _ao_comm(node, direction, arg):
    if not isinstance(node, JUNCTIONS) or len(node.subs) < 2:
        raise NoMatch("expected a junction with two or more children")
    index = arg or 0
    kids = list(node.subs)
    if index + 1 >= len(kids):
        raise NoMatch("no child to swap with")
    kids[index], kids[index + 1] = kids[index + 1], kids[index]
    return type(node)(tuple(kids))


def _ao_idem(node, direction, arg):
    if direction is R2L:
        return And((node, node))
    if not isinstance(node, JUNCTIONS):
        raise NoMatch("expected a conjunction or disjunction")
    seen = set()
    for i, kid in enumerate(node.subs):
        key = alpha_key(kid)
        if key in seen:
            return _collapse(type(node), node.subs[:i] + node.subs[i + 1:])
        seen.add(key)
    raise NoMatch("no repeated child")


# ---------------------------------------------------------------- truth values


def _tv_not_t(node, direction, arg):
    if direction is L2R:
        if isinstance(node, Not) and isinstance(node.sub, Top):
            return FALSE
        raise NoMatch("expected ~true")
    if isinstance(node, Bottom):
        return Not(TRUE)
    raise NoMatch("expected false")


def _tv_and_t(node, direction, arg):
    if direction is L2R:
        if isinstance(node, And) and any(isinstance(s, Top) for s in node.subs):
            return _collapse(And, [s for s in node.subs if not isinstance(s, Top)])
        raise NoMatch("expected a conjunction with a true member")
    return And((TRUE, node))


def _tv_and_f(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.TvAndF, node, arg)
    if isinstance(node, And) and any(isinstance(s, Bottom) for s in node.subs):
        return FALSE
    raise NoMatch("expected a conjunction with a false member")


def _tv_q_t(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.TvQT, node, arg)
    if isinstance(node, (Forall, Exists, ForallPred, ExistsPred, CountForall)) and isinstance(node.sub, Top):
        return TRUE
    if isinstance(node, CountExists) and node.n == 1 and isinstance(node.sub, Top):
        return TRUE
    raise NoMatch("expected a quantifier over true (at least n over true needs n = 1)")


def _complem_and(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.ComplemAnd, node, arg)
    if isinstance(node, And) and _complementary_pair(node.subs) is not None:
        return FALSE
    raise NoMatch("no complementary pair of conjuncts")


def _complementary_pair(items):
    keys = {}
    for i, item in enumerate(items):
        keys.setdefault(alpha_key(item), i)
    for j, item in enumerate(items):
        i = keys.get(alpha_key(complement(item)))
        if i is not None and i != j:
            return (min(i, j), max(i, j))
    return None


# ---------------------------------------------------------------- distribution


def _dist_dnf(node, direction, arg):
    if direction is L2R:
        if not isinstance(node, And):
            raise NoMatch("expected a conjunction")
        ors = [i for i, s in enumerate(node.subs) if isinstance(s, Or)]
        index = arg if arg is not None else (ors[0] if ors else None)
        if index is None or index >= len(node.subs) or not isinstance(node.subs[index], Or):
            raise NoMatch("no disjunctive conjunct to distribute over")
        kids = node.subs
        return Or(tuple(And(kids[:index] + (d,) + kids[index + 1:]) for d in kids[index].subs))
    if not isinstance(node, Or) or len(node.subs) < 2:
        raise NoMatch("expected a disjunction of conjunctions")
    conjs = node.subs
    if not all(isinstance(c, And) and len(c.subs) == len(conjs[0].subs) for c in conjs):
        raise NoMatch("disjuncts are not conjunctions of equal length")
    width = len(conjs[0].subs)
    differing = [i for i in range(width) if len({alpha_key(c.subs[i]) for c in conjs}) > 1]
    if arg is not None:
        index = arg
        if any(i != index for i in differing):
            raise NoMatch("disjuncts differ outside the factored position")
    elif len(differing) == 1:
        index = differing[0]
    else:
        raise NoMatch("disjuncts must differ in exactly one position")
    common = conjs[0].subs
    return And(common[:index] + (Or(tuple(c.subs[index] for c in conjs)),) + common[index + 1:])


# ---------------------------------------------------------------- quantifier shifting


def _all_out_and(node, direction, arg):
    if direction is R2L:
        if isinstance(node, Forall) and isinstance(node.sub, And):
            return And(tuple(Forall(node.var, s) for s in node.sub.subs))
        if isinstance(node, ForallPred) and isinstance(node.sub, And):
            return And(tuple(ForallPred(node.pred, node.arity, s) for s in node.sub.subs))
        raise NoMatch("expected a universal quantification over a conjunction")
    if not isinstance(node, And):
        raise NoMatch("expected a conjunction")

    def binder_key(kid):
        if isinstance(kid, Forall):
            return ("v", kid.var)
        if isinstance(kid, ForallPred):
            return ("p", kid.pred, kid.arity)
        return None

    if arg is None:
        keyed = [(i, binder_key(k)) for i, k in enumerate(node.subs) if binder_key(k) is not None]
        if not keyed:
            raise NoMatch("no universal conjunct")
        first = keyed[0][1]
        indices = [i for i, key in keyed if key == first]
    else:
        indices = list(arg)
    if len(indices) < 2:
        raise NoMatch("need two universal conjuncts over the same variable")
    keys = {binder_key(node.subs[i]) for i in indices}
    if len(keys) != 1 or None in keys:
        raise NoMatch("conjuncts are not universal over the same variable")
    first = node.subs[indices[0]]
    body = And(tuple(node.subs[i].sub for i in indices))
    merged = with_children(first, [body])
    rest = [merged if i == indices[0] else k for i, k in enumerate(node.subs) if i not in indices[1:]]
    return _collapse(And, rest)


_PLAIN_QUANTIFIERS = (Forall, Exists, ForallPred, ExistsPred)


def _binds(quant, formula):
    """True if the variable or predicate bound by ``quant`` occurs free in ``formula``."""
    if isinstance(quant, PRED_BINDERS):
        return predicate_occurs(quant.pred, formula)
    return occurs_free(quant.var, formula)


def _q_out_ao(node, direction, arg):
    if direction is L2R:
        if not isinstance(node, JUNCTIONS):
            raise NoMatch("expected a conjunction or disjunction")
        kids = node.subs
        candidates = [i for i, k in enumerate(kids) if isinstance(k, _PLAIN_QUANTIFIERS)]
        index = arg if arg is not None else (candidates[0] if candidates else None)
        if index is None or index >= len(kids) or not isinstance(kids[index], _PLAIN_QUANTIFIERS):
            raise NoMatch("no quantified member to pull out")
        quant = kids[index]
        others = kids[:index] + kids[index + 1:]
        if any(_binds(quant, o) for o in others):
            raise SideConditionViolated("the bound symbol occurs free in a sibling")
        inner = type(node)(kids[:index] + (quant.sub,) + kids[index + 1:])
        return with_children(quant, [inner])
    if not isinstance(node, _PLAIN_QUANTIFIERS) or not isinstance(node.sub, JUNCTIONS):
        raise NoMatch("expected a quantifier over a conjunction or disjunction")
    kids = node.sub.subs
    using = [i for i, k in enumerate(kids) if _binds(node, k)]
    if len(using) > 1:
        raise SideConditionViolated("the bound symbol occurs free in more than one member")
    index = using[0] if using else (arg or 0)
    pushed = with_children(node, [kids[index]])
    return type(node.sub)(kids[:index] + (pushed,) + kids[index + 1:])


def _quant_drop(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.QuantDrop, node, arg)
    plain = isinstance(node, _PLAIN_QUANTIFIERS) or (
        isinstance(node, COUNT_QUANTIFIERS) and node.n == 1)
    if not plain:
        raise NoMatch("expected a plain quantifier")
    if _binds(node, node.sub):
        raise SideConditionViolated("the bound symbol occurs free in the body")
    return node.sub


_UNIVERSAL = (Forall, ForallPred)
_EXISTENTIAL = (Exists, ExistsPred)


def _quant_flip(node, direction, arg):
    if not isinstance(node, _PLAIN_QUANTIFIERS) or not isinstance(node.sub, _PLAIN_QUANTIFIERS):
        raise NoMatch("expected two nested plain quantifiers")
    outer, inner = node, node.sub
    same = (isinstance(outer, _UNIVERSAL) and isinstance(inner, _UNIVERSAL)) or (
        isinstance(outer, _EXISTENTIAL) and isinstance(inner, _EXISTENTIAL))
    if not same:
        raise NoMatch("quantifiers are of different type")
    return with_children(inner, [with_children(outer, [inner.sub])])


def _var_rename(node, direction, arg):
    if isinstance(node, VAR_BINDERS):
        new = arg if isinstance(arg, Var) else Var(arg) if isinstance(arg, str) else None
        if new is None:
            raise NoMatch("renaming needs the new variable as argument")
        if new != node.var and occurs_free(new, node.sub):
            raise SideConditionViolated(f"{new.name} occurs free in the body")
        try:
            body = substitute(node.sub, node.var, new)
        except CaptureError as exc:
            raise SideConditionViolated(str(exc)) from None
        return _same_binder_var(node, new, body)
    if isinstance(node, PRED_BINDERS):
        if not isinstance(arg, str):
            raise NoMatch("renaming needs the new predicate name as argument")
        if arg != node.pred and predicate_occurs(arg, node.sub):
            raise SideConditionViolated(f"{arg} occurs free in the body")
        from .formula import replace_atoms

        body = replace_atoms(node.sub, node.pred, lambda args: Atom(arg, args))
        return type(node)(arg, node.arity, body)
    raise NoMatch("expected a quantifier")


def _same_binder_var(template, var, sub):
    if isinstance(template, IND_QUANTIFIERS):
        return type(template)(var, sub)
    return type(template)(template.n, var, sub)


# ---------------------------------------------------------------- absorption


def entails_syntactically(premise, conclusion):
    """Sound, incomplete entailment test based on structure alone."""
    if alpha_key(premise) == alpha_key(conclusion):
        return True
    if isinstance(conclusion, Top) or isinstance(premise, Bottom):
        return True
    if isinstance(premise, And) and any(entails_syntactically(s, conclusion) for s in premise.subs):
        return True
    if isinstance(conclusion, Or) and any(entails_syntactically(premise, s) for s in conclusion.subs):
        return True
    if isinstance(premise, Or) and premise.subs and all(
            entails_syntactically(s, conclusion) for s in premise.subs):
        return True
    if isinstance(conclusion, And) and all(entails_syntactically(premise, s) for s in conclusion.subs):
        return True
    return _counting_entails(premise, conclusion)


def _same_scope(left, right):
    return alpha_key(Exists(left.var, left.sub)) == alpha_key(Exists(right.var, right.sub))


def _counting_entails(premise, conclusion):
    if not (isinstance(premise, VAR_BINDERS) and isinstance(conclusion, VAR_BINDERS)):
        return False
    if not _same_scope(premise, conclusion):
        return False
    low = {Exists: 1, CountExists: None}
    if type(premise) in low and type(conclusion) in low:
        have = premise.n if isinstance(premise, CountExists) else 1
        need = conclusion.n if isinstance(conclusion, CountExists) else 1
        return need <= have
    high = {Forall: 1, CountForall: None}
    if type(premise) in high and type(conclusion) in high:
        have = premise.n if isinstance(premise, CountForall) else 1
        need = conclusion.n if isinstance(conclusion, CountForall) else 1
        return have <= need
    return False


def _subs_and_absorp(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.SubsAndAbsorp, node, arg, _index_candidates(arg) if isinstance(arg, Formula) else (None,))
    if not isinstance(node, And):
        raise NoMatch("expected a conjunction")
    kids = node.subs
    indices = [arg] if arg is not None else range(len(kids))
    for j in indices:
        if j >= len(kids):
            raise NoMatch("no such conjunct")
        rest = _collapse(And, kids[:j] + kids[j + 1:])
        if entails_syntactically(rest, kids[j]):
            return rest
    if arg is not None:
        raise SideConditionViolated("the other conjuncts do not visibly entail this one")
    raise NoMatch("no conjunct is entailed by the others")


# ---------------------------------------------------------------- clausal rules


def _matrix(node):
    if not isinstance(node, JUNCTIONS):
        raise NoMatch("expected a matrix of clauses")
    clause_kind = Or if isinstance(node, And) else And
    clauses = []
    for kid in node.subs:
        members = kid.subs if isinstance(kid, clause_kind) else (kid,)
        clauses.append(members)
    return clause_kind, clauses


def _rebuild_clause(clause_kind, members):
    return _collapse(clause_kind, members)


def _taut(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.Taut, node, arg, _index_candidates(arg) if isinstance(arg, Formula) else (None,))
    clause_kind, clauses = _matrix(node)
    indices = [arg] if arg is not None else range(len(clauses))
    for j in indices:
        if j < len(clauses) and _complementary_pair(clauses[j]) is not None:
            return _collapse(type(node), node.subs[:j] + node.subs[j + 1:])
    raise NoMatch("no clause with a complementary pair")


def _subs(node, direction, arg):
    if direction is R2L:
        return _witness(RuleId.Subs, node, arg, _index_candidates(arg) if isinstance(arg, Formula) else (None,))
    clause_kind, clauses = _matrix(node)
    keysets = [frozenset(alpha_key(m) for m in c) for c in clauses]
    indices = [arg] if arg is not None else range(len(clauses))
    for j in indices:
        if j >= len(clauses):
            continue
        for i in range(len(clauses)):
            if i == j:
                continue
            if keysets[i] < keysets[j] or (keysets[i] == keysets[j] and i < j):
                return _collapse(type(node), node.subs[:j] + node.subs[j + 1:])
    raise NoMatch("no subsumed clause")


def _unit(node, direction, arg):
    if direction is R2L:
        if not isinstance(arg, Formula):
            raise NoMatch("Unit right to left needs the resulting formula as argument")
        try:
            _, clauses = _matrix(arg)
        except NoMatch:
            raise NoMatch("witness is not a matrix") from None
        candidates = [(j, m) for j, c in enumerate(clauses) for m in range(len(c))]
        return _witness(RuleId.Unit, node, arg, candidates)
    clause_kind, clauses = _matrix(node)
    units = {alpha_key(c[0]): i for i, c in enumerate(clauses) if len(c) == 1}
    candidates = [arg] if arg is not None else [
        (j, m) for j, c in enumerate(clauses) for m in range(len(c))]
    for j, m in candidates:
        if j >= len(clauses) or m >= len(clauses[j]):
            continue
        member = clauses[j][m]
        owner = units.get(alpha_key(complement(member)))
        if owner is None or owner == j:
            continue
        members = clauses[j][:m] + clauses[j][m + 1:]
        new_clause = _rebuild_clause(clause_kind, members)
        return type(node)(node.subs[:j] + (new_clause,) + node.subs[j + 1:])
    raise NoMatch("no member whose complement is a unit clause")


# ---------------------------------------------------------------- circumlocution


def _abstract_term(formula, term, var):
    """Replace free occurrences of ``term`` by ``var``."""
    if isinstance(term, Var):
        return substitute(formula, term, var)
    return _replace_const(formula, term, var)


def _replace_const(formula, const, var):
    if isinstance(formula, Atom):
        return Atom(formula.pred, tuple(var if a == const else a for a in formula.args))
    if isinstance(formula, Eq):
        return Eq(var if formula.left == const else formula.left,
                  var if formula.right == const else formula.right)
    kids = children(formula)
    if not kids:
        return formula
    return with_children(formula, [_replace_const(k, const, var) for k in kids])


def _bound_vars(formula):
    from .formula import subformulas

    return {n.var for n in subformulas(formula) if isinstance(n, VAR_BINDERS)}


def _pullout(node, direction, arg, universal):
    quant = Forall if universal else Exists
    inner = Or if universal else And
    if direction is L2R:
        if not (isinstance(arg, tuple) and len(arg) == 2):
            raise NoMatch("circumlocution needs (term, variable) as argument")
        term, var = arg
        if isinstance(term, Var) and term in _bound_vars(node):
            raise SideConditionViolated(f"{term.name} is bound in the formula")
        if var == term or var.name in all_names(node):
            raise SideConditionViolated(f"{var.name} is not fresh")
        guard = Not(Eq(var, term)) if universal else Eq(var, term)
        return quant(var, inner((guard, _abstract_term(node, term, var))))
    if not isinstance(node, quant) or not isinstance(node.sub, inner):
        raise NoMatch("expected the circumlocution shape")
    var = node.var
    members = node.sub.subs
    for i, member in enumerate(members):
        eq = member.sub if universal and isinstance(member, Not) else member
        if universal and not isinstance(member, Not):
            continue
        if not isinstance(eq, Eq):
            continue
        if eq.left == var and eq.right != var:
            term = eq.right
        elif eq.right == var and eq.left != var:
            term = eq.left
        else:
            continue
        rest = _collapse(inner, members[:i] + members[i + 1:])
        if isinstance(term, Var) and term in _bound_vars(rest):
            continue
        try:
            return substitute(rest, var, term)
        except CaptureError:
            continue
    raise NoMatch("no usable guard equality")


def _pullout_all(node, direction, arg):
    return _pullout(node, direction, arg, True)


def _pullout_ex(node, direction, arg):
    return _pullout(node, direction, arg, False)


# ---------------------------------------------------------------- entailments


def _members(formula):
    return formula.subs if isinstance(formula, Or) else (formula,)


def _resolve(left, right):
    lefts, rights = _members(left), _members(right)
    right_keys = [alpha_key(r) for r in rights]
    for i, g in enumerate(lefts):
        target = alpha_key(complement(g))
        for j, key in enumerate(right_keys):
            if key == target:
                rest = lefts[:i] + lefts[i + 1:] + rights[:j] + rights[j + 1:]
                return _collapse(Or, rest)
    return None


def _pair_args(node, arg):
    if not isinstance(node, And) or len(node.subs) < 2:
        raise NoMatch("expected a conjunction of two clauses")
    i, j = arg if arg is not None else (0, 1)
    if not (0 <= i < len(node.subs) and 0 <= j < len(node.subs)) or i == j:
        raise NoMatch("bad conjunct indices")
    return i, j


def _replace_pair(node, i, j, result):
    kids = [result if k == i else kid for k, kid in enumerate(node.subs) if k != j]
    return _collapse(And, kids)


def _inf_v(node, direction, arg):
    i, j = _pair_args(node, arg)
    resolvent = _resolve(node.subs[i], node.subs[j])
    if resolvent is None:
        raise NoMatch("no complementary members to resolve on")
    return _replace_pair(node, i, j, resolvent)


def _inf_v_q(node, direction, arg):
    i, j = _pair_args(node, arg)
    left, right = node.subs[i], node.subs[j]
    if not (isinstance(left, Forall) and isinstance(right, Forall) and left.var == right.var):
        raise NoMatch("expected two universal clauses over the same variable")
    resolvent = _resolve(left.sub, right.sub)
    if resolvent is None:
        raise NoMatch("no complementary members to resolve on")
    return _replace_pair(node, i, j, Forall(left.var, resolvent))


def _occurrence_paths(formula, path=()):
    yield path
    for k, kid in enumerate(children(formula)):
        yield from _occurrence_paths(kid, path + (k,))


def _inf_vbar(node, direction, arg, positive, starred):
    if not isinstance(node, And) or len(node.subs) < 2:
        raise NoMatch("expected a conjunction")
    if arg is not None and len(arg) == 3:
        i, j, path = arg
        path_choices = [tuple(path)]
        explicit = True
    else:
        explicit = False
        i, j = arg if arg is not None else (0, 1)
        path_choices = None
    if not (0 <= i < len(node.subs) and 0 <= j < len(node.subs)) or i == j:
        raise NoMatch("bad conjunct indices")
    context, clause = node.subs[i], node.subs[j]
    quantified = []
    if starred:
        while isinstance(clause, Forall):
            quantified.append(clause.var)
            clause = clause.sub
    members = _members(clause)
    if path_choices is None:
        path_choices = list(_occurrence_paths(context))
    for path in path_choices:
        try:
            target = subformula_at(context, path)
        except IndexError:
            raise NoMatch("no subformula at the given path") from None
        if polarity_at(context, path) != (1 if positive else -1):
            continue
        wanted = alpha_key(complement(target)) if positive else alpha_key(target)
        for m, member in enumerate(members):
            if alpha_key(member) != wanted:
                continue
            rest = _collapse(Or, members[:m] + members[m + 1:])
            replacement = rest if positive else complement(rest)
            bound, _ = binders_above(context, path)
            loose = (free_vars(target) | free_vars(replacement)) - set(quantified)
            if loose & bound:
                if explicit:
                    raise SideConditionViolated("a free variable of the replaced part is bound in context")
                continue
            return _replace_pair(node, i, j, replace_at(context, path, replacement))
    raise NoMatch("no occurrence matching the implication")


_IMPLEMENTATIONS = {
    RuleId.NotNot: _not_not,
    RuleId.NotAnd: _not_and,
    RuleId.NotAll: _not_all,
    RuleId.AoAssoc: _ao_assoc,
    RuleId.AoComm: _ao_comm,
    RuleId.AoIdem: _ao_idem,
    RuleId.TvNotT: _tv_not_t,
    RuleId.TvAndT: _tv_and_t,
    RuleId.TvAndF: _tv_and_f,
    RuleId.TvQT: _tv_q_t,
    RuleId.ComplemAnd: _complem_and,
    RuleId.DistDnf: _dist_dnf,
    RuleId.AllOutAnd: _all_out_and,
    RuleId.QOutAo: _q_out_ao,
    RuleId.QuantDrop: _quant_drop,
    RuleId.QuantFlip: _quant_flip,
    RuleId.VarRename: _var_rename,
    RuleId.SubsAndAbsorp: _subs_and_absorp,
    RuleId.Taut: _taut,
    RuleId.Subs: _subs,
    RuleId.Unit: _unit,
    RuleId.PulloutAll: _pullout_all,
    RuleId.PulloutEx: _pullout_ex,
    RuleId.InfV: _inf_v,
    RuleId.InfVQ: _inf_v_q,
    RuleId.InfVbarPos: lambda n, d, a: _inf_vbar(n, d, a, True, False),
    RuleId.InfVbarNeg: lambda n, d, a: _inf_vbar(n, d, a, False, False),
    RuleId.InfVbarPosStar: lambda n, d, a: _inf_vbar(n, d, a, True, True),
    RuleId.InfVbarNegStar: lambda n, d, a: _inf_vbar(n, d, a, False, True),
}


# ---------------------------------------------------------------- strategies


def rewrite_fixpoint(formula, rules, trace=None):
    """Normalize bottom-up with ``rules`` (pairs of RuleId and Direction).

    After the children of a node are normal, the rules are tried at the node
    in order; whenever one fires the result is normalized again.
    """
    return _normalize(formula, tuple(rules), trace, (), lambda node: node)


def _normalize(node, rules, trace, path, rebuild):
    kids = list(children(node))
    if kids:
        for index in range(len(kids)):
            def child_rebuild(new_kid, index=index):
                snapshot = list(kids)
                snapshot[index] = new_kid
                return rebuild(with_children(node, snapshot))

            kids[index] = _normalize(kids[index], rules, trace, path + (index,), child_rebuild)
        node = with_children(node, kids)
    for rule, direction in rules:
        try:
            result = rewrite_node(node, rule, direction)
        except (NoMatch, SideConditionViolated):
            continue
        if trace is not None:
            trace.record(RewriteStep(rule, path, direction, rebuild(node), rebuild(result)))
        return _normalize(result, rules, trace, path, rebuild)
    return node


TRUTH_VALUE_RULES = (
    (RuleId.TvNotT, L2R), (RuleId.TvNotF, L2R),
    (RuleId.TvAndF, L2R), (RuleId.TvOrT, L2R),
    (RuleId.TvAndT, L2R), (RuleId.TvOrF, L2R),
    (RuleId.TvQT, L2R), (RuleId.TvQF, L2R),
    (RuleId.ComplemAnd, L2R), (RuleId.ComplemOr, L2R),
)

NEGATION_RULES = (
    (RuleId.NotNot, L2R), (RuleId.NotAnd, L2R), (RuleId.NotOr, L2R),
    (RuleId.NotAll, L2R), (RuleId.NotEx, L2R),
    (RuleId.TvNotT, L2R), (RuleId.TvNotF, L2R),
)

FLATTEN_RULES = ((RuleId.AoAssoc, L2R),)

CLEANUP_RULES = TRUTH_VALUE_RULES + FLATTEN_RULES + (
    (RuleId.AoIdem, L2R),
    (RuleId.QuantDrop, L2R),
    (RuleId.PulloutAll, R2L), (RuleId.PulloutEx, R2L),
)


def simplify_truth_values(formula, trace=None):
    """Fixpoint of the truth-value and complement rules."""
    return rewrite_fixpoint(formula, TRUTH_VALUE_RULES, trace)


def push_negations(formula, trace=None):
    """Negation normal form computed with the negation rules."""
    return rewrite_fixpoint(formula, NEGATION_RULES + FLATTEN_RULES, trace)


def cleanup(formula, trace=None):
    """Truth values, complements, flattening, idempotence, vacuous quantifiers
    and pulling guard equalities back into their atoms."""
    return rewrite_fixpoint(formula, CLEANUP_RULES, trace)


def clause_simplify(matrix, polarity, trace=None):
    """Tautology removal, subsumption and unit reduction on a clausal matrix.

    ``polarity`` is ``"cnf"`` (a conjunction of disjunctions) or ``"dnf"``.
    """
    if polarity not in ("cnf", "dnf"):
        raise ValueError("polarity is 'cnf' or 'dnf'")
    kind = And if polarity == "cnf" else Or
    clause_kind = Or if kind is And else And
    if not isinstance(matrix, kind):
        if isinstance(matrix, clause_kind) or _is_clause_member(matrix):
            _check_clause(matrix, clause_kind)
            return _idempotent_clause(matrix, trace)
        if isinstance(matrix, (Top, Bottom)):
            return matrix
        raise ShapeError("matrix is not clausal")
    for clause in matrix.subs:
        _check_clause(clause, clause_kind)
    rules = ((RuleId.Taut, L2R), (RuleId.Subs, L2R), (RuleId.Unit, L2R), (RuleId.AoIdem, L2R))
    current = matrix
    changed = True
    while changed:
        changed = False
        if not isinstance(current, kind):
            break
        for index, clause in enumerate(current.subs):
            if isinstance(clause, clause_kind):
                try:
                    new_clause = rewrite_node(clause, RuleId.AoIdem, L2R)
                except NoMatch:
                    continue
                after = replace_at(current, (index,), new_clause)
                if trace is not None:
                    trace.record(RewriteStep(RuleId.AoIdem, (index,), L2R, current, after))
                current = after
                changed = True
                break
        if changed:
            continue
        for rule, direction in rules[:3]:
            try:
                after = rewrite_node(current, rule, direction)
            except NoMatch:
                continue
            if trace is not None:
                trace.record(RewriteStep(rule, (), direction, current, after))
            current = after
            changed = True
            break
    return current


def _idempotent_clause(clause, trace):
    current = clause
    while isinstance(current, JUNCTIONS):
        try:
            after = rewrite_node(current, RuleId.AoIdem, L2R)
        except NoMatch:
            break
        if trace is not None:
            trace.record(RewriteStep(RuleId.AoIdem, (), L2R, current, after))
        current = after
    return current


def _is_clause_member(formula):
    return not isinstance(formula, JUNCTIONS)


def _check_clause(clause, clause_kind):
    members = clause.subs if isinstance(clause, clause_kind) else (clause,)
    for member in members:
        if isinstance(member, JUNCTIONS):
            raise ShapeError("clause member is itself a conjunction or disjunction")
        if isinstance(member, Not) and isinstance(member.sub, (JUNCTIONS + (Not,))):
            raise ShapeError("clause member is a negated compound")


# ---------------------------------------------------------------- generalized normal forms


def default_is_basic(formula):
    return not isinstance(formula, (Top, Bottom, Not, And, Or))


class _Literals:
    """Interns basic formulas; literals are signed integers."""

    def __init__(self):
        self.ids = {}
        self.basics = []

    def literal(self, basic, positive):
        key = _literal_key(basic)
        if key not in self.ids:
            self.ids[key] = len(self.basics) + 1
            self.basics.append(basic)
        ident = self.ids[key]
        return ident if positive else -ident

    def formula(self, lit):
        basic = self.basics[abs(lit) - 1]
        return basic if lit > 0 else Not(basic)


def _literal_key(basic):
    if isinstance(basic, Eq):
        left, right = sorted([(type(basic.left).__name__, basic.left.name),
                              (type(basic.right).__name__, basic.right.name)])
        return ("E", left, right)
    return alpha_key(basic)


def _bool_nnf(formula, negate, is_basic):
    """Push negation through the Boolean structure only."""
    if isinstance(formula, Not):
        return _bool_nnf(formula.sub, not negate, is_basic)
    if isinstance(formula, Top):
        return FALSE if negate else TRUE
    if isinstance(formula, Bottom):
        return TRUE if negate else FALSE
    if isinstance(formula, (And, Or)):
        kind = type(formula)
        if negate:
            kind = Or if kind is And else And
        subs = [_bool_nnf(s, negate, is_basic) for s in formula.subs]
        return conj(*subs) if kind is And else disj(*subs)
    if not is_basic(formula):
        raise ShapeError(f"leaf is not a basic formula: {formula}")
    return Not(formula) if negate else formula


def _minimize(clauses):
    """Drop contradictory clauses and clauses subsumed by smaller ones."""
    unique = []
    seen = set()
    for clause in clauses:
        if any(-lit in clause for lit in clause):
            continue
        if clause in seen:
            continue
        seen.add(clause)
        unique.append(clause)
    unique.sort(key=len)
    kept = []
    for clause in unique:
        if any(other <= clause for other in kept):
            continue
        kept.append(clause)
    return kept


def _unit_reduce(clauses):
    changed = True
    while changed:
        changed = False
        units = {next(iter(c)) for c in clauses if len(c) == 1}
        reduced = []
        for clause in clauses:
            if len(clause) > 1:
                smaller = frozenset(l for l in clause if -l not in units)
                if smaller != clause:
                    changed = True
                    clause = smaller
            reduced.append(clause)
        clauses = _minimize(reduced)
    return clauses


def _dnf_clauses(formula, table, limit, counter):
    if isinstance(formula, Top):
        return [frozenset()]
    if isinstance(formula, Bottom):
        return []
    if isinstance(formula, Or):
        out = []
        for sub in formula.subs:
            out.extend(_dnf_clauses(sub, table, limit, counter))
        return _minimize(out)
    if isinstance(formula, And):
        acc = [frozenset()]
        for sub in formula.subs:
            part = _dnf_clauses(sub, table, limit, counter)
            product = []
            for left in acc:
                for right in part:
                    merged = left | right
                    if any(-lit in merged for lit in right):
                        continue
                    product.append(merged)
                    counter[0] += len(merged)
                    if counter[0] > limit:
                        raise SizeLimitExceeded(f"normal form exceeds {limit} nodes")
            acc = _minimize(product)
            if not acc:
                return []
        return acc
    if isinstance(formula, Not):
        return [frozenset([table.literal(formula.sub, False)])]
    return [frozenset([table.literal(formula, True)])]


def dnf_clauses(formula, is_basic=default_is_basic, limit=DEFAULT_SIZE_LIMIT, table=None):
    """Generalized DNF as a list of literal sets plus the interning table."""
    table = table or _Literals()
    prepared = _bool_nnf(formula, False, is_basic)
    clauses = _unit_reduce(_dnf_clauses(prepared, table, limit, [0]))
    return clauses, table


def _render(clauses, table, outer, inner):
    rendered = []
    for clause in clauses:
        lits = sorted(clause, key=lambda l: (abs(l), l < 0))
        members = [table.formula(l) for l in lits]
        rendered.append(inner(*members))
    return outer(*rendered)


def to_dnf_over_basics(formula, is_basic=default_is_basic, limit=DEFAULT_SIZE_LIMIT):
    """Disjunction of conjunctions of basic or negated basic formulas.

    Tautology removal, subsumption and unit reduction are applied to the
    clause set.
    """
    clauses, table = dnf_clauses(formula, is_basic, limit)
    return _render(clauses, table, disj, conj)


def to_cnf_over_basics(formula, is_basic=default_is_basic, limit=DEFAULT_SIZE_LIMIT):
    """Conjunction of disjunctions of basic or negated basic formulas."""
    clauses, table = dnf_clauses(Not(formula), is_basic, limit)
    negated = [frozenset(-l for l in c) for c in clauses]
    return _render(negated, table, conj, disj)


def is_dnf_over_basics(formula, is_basic=default_is_basic):
    def literal(f):
        return is_basic(f) or (isinstance(f, Not) and is_basic(f.sub))

    def clause(f):
        return literal(f) or isinstance(f, Top) or (isinstance(f, And) and all(literal(s) for s in f.subs))

    return isinstance(formula, Bottom) or clause(formula) or (
        isinstance(formula, Or) and all(clause(s) for s in formula.subs))


def is_cnf_over_basics(formula, is_basic=default_is_basic):
    return is_dnf_over_basics(dual(formula), is_basic)


# ---------------------------------------------------------------- circumlocution


def circumlocute(formula, term, var, mode="forall"):
    """``F[t]`` as ``forall x (x != t | F[x])`` or ``exists x (x = t & F[x])``."""
    if isinstance(term, Var) and term in _bound_vars(formula):
        raise CaptureError(f"{term.name} is bound in the formula")
    if var.name in all_names(formula) or var == term:
        raise CaptureError(f"{var.name} is not fresh for the formula")
    rule = RuleId.PulloutAll if mode == "forall" else RuleId.PulloutEx
    return rewrite_node(formula, rule, L2R, arg=(term, var))
