"""Surface syntax: a recursive descent parser and a matching printer.

Grammar (loosest binding first)::

    formula := iff
    iff     := imp ('<->' imp)*
    imp     := or ('->' or)*                      right associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | quant | atom | '(' formula ')'
    quant   := ('forall' | 'exists') VAR '.' unary
             | ('atleast' | 'allbut') INT VAR '.' unary
             | ('forall2' | 'exists2') PRED '.' unary
    atom    := 'true' | 'false' | PRED | PRED '(' term (',' term)* ')'
             | term ('=' | '!=') term

An identifier used as a term is a variable when an enclosing quantifier binds
it and a constant otherwise.  ``#`` starts a comment that runs to the end of
the line.  ``->`` and ``<->`` are sugar and do not survive parsing.
"""

from __future__ import annotations

import re

from .errors import ArityError, ParseError
from .formula import (
    And, Atom, Bottom, Const, CountExists, CountForall, Eq, Exists, ExistsPred,
    Forall, ForallPred, Not, Or, Top, Var, conj, disj, complement,
)

KEYWORDS = {"forall", "exists", "atleast", "allbut", "forall2", "exists2", "true", "false"}

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)|(?P<newline>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<op><->|->|!=|[~&|().,=])"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
)


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind, self.text, self.line, self.column = kind, text, line, column


def _tokenize(text):
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind not in ("space", "comment"):
            tokens.append(_Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(_Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.arities = {}

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text):
        if self.peek().text == text and self.peek().kind in ("op", "ident"):
            return self.advance()
        return None

    def expect(self, text):
        token = self.peek()
        if token.text != text:
            raise ParseError(f"expected {text!r}, found {token.text or 'end of input'!r}",
                             token.line, token.column)
        return self.advance()

    def identifier(self, what):
        token = self.peek()
        if token.kind != "ident" or token.text in KEYWORDS:
            raise ParseError(f"expected {what}, found {token.text or 'end of input'!r}",
                             token.line, token.column)
        return self.advance()

    def parse(self):
        result = self.formula(frozenset(), {})
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.line, token.column)
        return result

    def formula(self, bound, preds):
        left = self.imp(bound, preds)
        while self.accept("<->"):
            right = self.imp(bound, preds)
            left = conj(disj(complement(left), right), disj(left, complement(right)))
        return left

    def imp(self, bound, preds):
        left = self.disjunction(bound, preds)
        if self.accept("->"):
            right = self.imp(bound, preds)
            return disj(complement(left), right)
        return left

    def disjunction(self, bound, preds):
        items = [self.conjunction(bound, preds)]
        while self.accept("|"):
            items.append(self.conjunction(bound, preds))
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self, bound, preds):
        items = [self.unary(bound, preds)]
        while self.accept("&"):
            items.append(self.unary(bound, preds))
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self, bound, preds):
        token = self.peek()
        if self.accept("~"):
            return Not(self.unary(bound, preds))
        if self.accept("("):
            inner = self.formula(bound, preds)
            self.expect(")")
            return inner
        if token.kind == "ident" and token.text in ("forall", "exists"):
            self.advance()
            var = Var(self.identifier("a variable").text)
            self.expect(".")
            body = self.unary(bound | {var.name}, preds)
            return (Forall if token.text == "forall" else Exists)(var, body)
        if token.kind == "ident" and token.text in ("atleast", "allbut"):
            self.advance()
            count = self.peek()
            if count.kind != "int":
                raise ParseError("expected a count", count.line, count.column)
            self.advance()
            n = int(count.text)
            if n < 1:
                raise ParseError("counting index must be at least 1", count.line, count.column)
            var = Var(self.identifier("a variable").text)
            self.expect(".")
            body = self.unary(bound | {var.name}, preds)
            return (CountExists if token.text == "atleast" else CountForall)(n, var, body)
        if token.kind == "ident" and token.text in ("forall2", "exists2"):
            self.advance()
            name = self.identifier("a predicate").text
            self.expect(".")
            scope = {**preds, name: [None, token]}
            body = self.unary(bound, scope)
            arity = scope[name][0]
            return (ForallPred if token.text == "forall2" else ExistsPred)(
                name, 1 if arity is None else arity, body)
        return self.atom(bound, preds)

    def term(self, bound):
        token = self.identifier("a term")
        return Var(token.text) if token.text in bound else Const(token.text)

    def atom(self, bound, preds):
        if self.accept("true"):
            return Top()
        if self.accept("false"):
            return Bottom()
        name = self.identifier("a formula")
        if self.peek().text in ("=", "!="):
            op = self.advance().text
            left = Var(name.text) if name.text in bound else Const(name.text)
            right = self.term(bound)
            return Eq(left, right) if op == "=" else Not(Eq(left, right))
        args = []
        if self.accept("("):
            args.append(self.term(bound))
            while self.accept(","):
                args.append(self.term(bound))
            self.expect(")")
        self.record_arity(name, len(args), preds)
        return Atom(name.text, tuple(args))

    def record_arity(self, token, arity, preds):
        if token.text in preds:
            slot = preds[token.text]
            if slot[0] is None:
                slot[0] = arity
            elif slot[0] != arity:
                raise ArityError(f"predicate {token.text} used with arities {slot[0]} and {arity}",
                                 token.line, token.column)
            return
        known = self.arities.setdefault(token.text, arity)
        if known != arity:
            raise ArityError(f"predicate {token.text} used with arities {known} and {arity}",
                             token.line, token.column)


def parse(text):
    """Parse surface syntax into a formula."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

_ATOMIC = (Top, Bottom, Atom, Eq)


def _is_unit(formula):
    if isinstance(formula, _ATOMIC):
        return True
    if isinstance(formula, Not):
        return True
    return isinstance(formula, (Forall, Exists, CountExists, CountForall, ForallPred, ExistsPred))


def to_text(formula):
    """Render a formula; ``parse(to_text(f)) == f`` for and/or nodes with two or more children."""
    return _show(formula)


def _show(f):
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(a.name for a in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left.name} = {f.right.name}"
    if isinstance(f, Not):
        if isinstance(f.sub, Eq):
            return f"{f.sub.left.name} != {f.sub.right.name}"
        return "~" + _wrap_unit(f.sub)
    if isinstance(f, And):
        if not f.subs:
            return "true"
        return " & ".join(_wrap_unit(s) for s in f.subs)
    if isinstance(f, Or):
        if not f.subs:
            return "false"
        return " | ".join(_wrap_unit(s) if isinstance(s, Or) else _wrap_or_child(s) for s in f.subs)
    if isinstance(f, Forall):
        return f"forall {f.var.name}. {_wrap_body(f.sub)}"
    if isinstance(f, Exists):
        return f"exists {f.var.name}. {_wrap_body(f.sub)}"
    if isinstance(f, CountExists):
        return f"atleast {f.n} {f.var.name}. {_wrap_body(f.sub)}"
    if isinstance(f, CountForall):
        return f"allbut {f.n} {f.var.name}. {_wrap_body(f.sub)}"
    if isinstance(f, ForallPred):
        return f"forall2 {f.pred}. {_wrap_body(f.sub)}"
    if isinstance(f, ExistsPred):
        return f"exists2 {f.pred}. {_wrap_body(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap_unit(f):
    text = _show(f)
    if _is_unit(f):
        return text
    return f"({text})"


def _wrap_or_child(f):
    text = _show(f)
    if _is_unit(f) or (isinstance(f, And) and len(f.subs) > 1):
        return text
    return f"({text})"


def _wrap_body(f):
    text = _show(f)
    if _is_unit(f):
        return text
    return f"({text})"


# ---------------------------------------------------------------- pretty printing

def to_unicode(formula):
    """Human-oriented rendering with logical symbols; not meant for re-parsing."""
    return _pretty(formula)


def _pretty(f):
    if isinstance(f, Top):
        return "⊤"
    if isinstance(f, Bottom):
        return "⊥"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(a.name for a in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left.name}={f.right.name}"
    if isinstance(f, Not):
        if isinstance(f.sub, Eq):
            return f"{f.sub.left.name}≠{f.sub.right.name}"
        return "¬" + _pretty_unit(f.sub)
    if isinstance(f, And):
        return " ∧ ".join(_pretty_unit(s) for s in f.subs) if f.subs else "⊤"
    if isinstance(f, Or):
        return " ∨ ".join(_pretty_unit(s) for s in f.subs) if f.subs else "⊥"
    if isinstance(f, Forall):
        return f"∀{f.var.name} {_pretty_unit(f.sub)}"
    if isinstance(f, Exists):
        return f"∃{f.var.name} {_pretty_unit(f.sub)}"
    if isinstance(f, CountExists):
        return f"∃≥{f.n} {f.var.name} {_pretty_unit(f.sub)}"
    if isinstance(f, CountForall):
        return f"∀<{f.n} {f.var.name} {_pretty_unit(f.sub)}"
    if isinstance(f, ForallPred):
        return f"∀{f.pred} {_pretty_unit(f.sub)}"
    if isinstance(f, ExistsPred):
        return f"∃{f.pred} {_pretty_unit(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


def _pretty_unit(f):
    text = _pretty(f)
    return text if _is_unit(f) else f"({text})"
