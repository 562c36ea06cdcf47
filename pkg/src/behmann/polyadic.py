"""Monadic elimination for polyadic formulas with one varying argument.

Inside the scope of ``exists p`` an atom ``f(x, z)`` whose only argument bound
within that scope is ``z`` behaves like a unary atom ``f'(z)``.  The encoder
replaces such atoms by fresh unary shorthands (and atoms without a bound
argument by fresh nullary ones), eliminates the now monadic quantifier and
decodes the shorthands again.

Occurrences of the eliminand with the varying argument in different positions
get separate shorthands.  Two shorthands ``p1`` (hole ``i``) and ``p2`` (hole
``j``) describe the same relation where their fixed arguments meet, so a
linking constraint is conjoined:

* ``i != j``: the one common point is ``p(.., Q_i, .., P_j, ..)``, giving
  ``(P_k != Q_k for some other k) | (p1(Q_i) <-> p2(P_j))``;
* ``i == j``: ``forall z. (P_k != Q_k for some k | (p1(z) <-> p2(z)))``.

An atom with two distinct bound arguments expresses a proper relation between
bound variables and cannot be encoded; the result is then
:class:`NotMonadizable`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import ShapeError
from .formula import (
    Atom, ExistsPred, Forall, FreshNames, PRED_BINDERS, VAR_BINDERS, children,
    complement, conj, disj, iff, map_children, neq, rename_bound, replace_at,
    replace_atoms, subformula_at,
)
from .elimination import eliminate_all
from .rewriter import DEFAULT_SIZE_LIMIT
from .simplify import simplify_result


@dataclass(frozen=True)
class Shorthand:
    """``pred`` applied to ``template``; ``None`` marks the argument supplied by the shorthand."""

    pred: str
    template: tuple

    @property
    def hole(self):
        return self.template.index(None) if None in self.template else None

    def expand(self, args):
        if self.hole is None:
            return Atom(self.pred, self.template)
        return Atom(self.pred, tuple(args[0] if a is None else a for a in self.template))


@dataclass(frozen=True)
class NotMonadizable:
    """Why a formula has no monadic encoding.  Falsy, so it reads as a failed result."""

    reason: str

    def __bool__(self):
        return False


class Monadization(NamedTuple):
    encoded: object
    decoding: dict
    path: tuple


class _Unencodable(Exception):
    pass


def find_binder(formula, pred):
    """Path of the outermost-leftmost quantifier binding ``pred``."""

    def walk(node, path):
        if isinstance(node, PRED_BINDERS) and node.pred == pred:
            return path
        for i, kid in enumerate(children(node)):
            found = walk(kid, path + (i,))
            if found is not None:
                return found
        return None

    path = walk(formula, ())
    if path is None:
        raise ShapeError(f"no quantifier binds {pred}")
    return path


def _template(atom, bound):
    """Argument tuple with the bound arguments replaced by None, plus the bound variables."""
    varying = {a for a in atom.args if a in bound}
    return tuple(None if a in bound else a for a in atom.args), varying


class _Encoder:
    def __init__(self, eliminand, fresh):
        self.eliminand = eliminand
        self.fresh = fresh
        self.shorthands = {}
        self.names = {}

    def shorthand(self, pred, template):
        key = Shorthand(pred, template)
        if key not in self.names:
            self.names[key] = self.fresh.name(pred + "_")
            self.shorthands[self.names[key]] = key
        return self.names[key]

    def collect_patterns(self, node, bound):
        """Shorthands for eliminand occurrences that have a bound argument."""
        if isinstance(node, Atom) and node.pred == self.eliminand:
            template, varying = _template(node, bound)
            if len(varying) > 1 or template.count(None) > 1:
                raise _Unencodable(f"{node} relates bound arguments of {self.eliminand}")
            if varying:
                self.shorthand(node.pred, template)
            return
        if isinstance(node, PRED_BINDERS) and node.pred == self.eliminand:
            raise _Unencodable(f"{self.eliminand} is bound again inside its scope")
        if isinstance(node, VAR_BINDERS):
            bound = bound | {node.var}
        for kid in children(node):
            self.collect_patterns(kid, bound)

    def fixed_pattern(self, args):
        """A pattern containing the fully fixed point ``args``, created if needed."""
        for name, form in self.shorthands.items():
            if form.pred != self.eliminand:
                continue
            hole = form.hole
            if all(a == b for k, (a, b) in enumerate(zip(form.template, args)) if k != hole):
                return name, args[hole]
        template = args[:-1] + (None,)
        return self.shorthand(self.eliminand, template), args[-1]

    def encode(self, node, bound):
        if isinstance(node, Atom) and (len(node.args) >= 2 or node.pred == self.eliminand and node.args):
            template, varying = _template(node, bound)
            if node.pred == self.eliminand and not varying:
                name, point = self.fixed_pattern(node.args)
                return Atom(name, (point,))
            if len(varying) > 1:
                raise _Unencodable(f"{node} relates two bound variables")
            if not varying:
                return Atom(self.shorthand(node.pred, template), ())
            (var,) = varying
            return Atom(self.shorthand(node.pred, template), (var,))
        if isinstance(node, VAR_BINDERS):
            inner = bound | {node.var}
            return map_children(node, lambda kid: self.encode(kid, inner))
        return map_children(node, lambda kid: self.encode(kid, bound))

    def links(self):
        patterns = [(name, form) for name, form in self.shorthands.items() if form.pred == self.eliminand]
        constraints = []
        for n, (first_name, first) in enumerate(patterns):
            for second_name, second in patterns[n + 1:]:
                constraints.append(self._link(first_name, first, second_name, second))
        return constraints

    def _link(self, first_name, first, second_name, second):
        i, j = first.hole, second.hole
        apart = [
            neq(a, b)
            for k, (a, b) in enumerate(zip(first.template, second.template))
            if k not in (i, j) and a != b
        ]
        if i != j:
            meet = iff(Atom(first_name, (second.template[i],)), Atom(second_name, (first.template[j],)))
            return disj(*apart, meet)
        z = self.fresh.var("z")
        return Forall(z, disj(*apart, iff(Atom(first_name, (z,)), Atom(second_name, (z,)))))


def polyadic_monadize(formula, eliminand):
    """Encode the scope of the quantifier on ``eliminand`` with monadic shorthands.

    Returns a :class:`Monadization` ``(encoded, decoding, path)``: ``encoded``
    is ``formula`` with that quantifier replaced by a quantification over the
    eliminand's shorthands, ``decoding`` maps each shorthand name to its
    :class:`Shorthand`, and ``path`` addresses the replaced quantifier.  A
    :class:`NotMonadizable` is returned when some atom relates two bound
    variables.
    """
    formula = rename_bound(formula, minimal=True)
    path = find_binder(formula, eliminand)
    binder = subformula_at(formula, path)
    encoder = _Encoder(eliminand, FreshNames.avoiding(formula))
    try:
        encoder.collect_patterns(binder.sub, frozenset())
        matrix = encoder.encode(binder.sub, frozenset())
    except _Unencodable as exc:
        return NotMonadizable(str(exc))
    patterns = [name for name, form in encoder.shorthands.items() if form.pred == eliminand]
    links = encoder.links()
    if isinstance(binder, ExistsPred):
        body = conj(matrix, *links)
    else:
        body = conj(complement(matrix), *links)
    for name in reversed(patterns):
        body = ExistsPred(name, 1, body)
    if not isinstance(binder, ExistsPred):
        body = complement(body)
    return Monadization(replace_at(formula, path, body), encoder.shorthands, path)


def decode(formula, decoding):
    """Replace every shorthand atom by the polyadic atom it stands for."""
    for name, form in decoding.items():
        formula = replace_atoms(formula, name, form.expand)
    return formula


def eliminate_polyadic(formula, eliminand, *, simplify=True, limit=DEFAULT_SIZE_LIMIT):
    """Eliminate the quantifier on a polyadic ``eliminand`` through the monadic encoding.

    Returns the formula with that quantifier replaced by an eliminand-free
    equivalent, or :class:`NotMonadizable`.
    """
    encoding = polyadic_monadize(formula, eliminand)
    if not encoding:
        return encoding
    encoded, decoding, path = encoding
    scope = subformula_at(encoded, path)
    result = decode(eliminate_all(scope, simplify=simplify, limit=limit), decoding)
    if simplify:
        result = simplify_result(result)
    return replace_at(rename_bound(formula, minimal=True), path, result)
