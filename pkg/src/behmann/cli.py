"""Command line interface.

Exit codes: 0 success (equivalent, valid or satisfiable as asked, corpus
passed), 1 negative answer, 2 usage or input error, 3 an internal size or
enumeration limit was hit.  With ``--json`` every invocation prints a single
record carrying ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus
from .counting import counting_normal_form, expand_counting, normal_form_noeq
from .decision import (
    decide_satisfiability, decide_validity, prop_decide_substitution, quine_decide,
)
from .elimination import (
    eliminate_all, eliminate_crude, eliminate_noeq, eliminate_predicate, elimination_stages,
)
from .errors import BehmannError, BudgetExceeded, ShapeError, SizeLimitExceeded
from .formula import ExistsPred, Formula, predicate_arities, subformula_at
from .oracle import check_equiv
from .polyadic import eliminate_polyadic, find_binder
from .syntax import parse, to_text, to_unicode

SCHEMA = 1

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from exc


def _load(path):
    return parse(_read(path))


def _show(formula, args):
    return to_unicode(formula) if getattr(args, "unicode", False) else to_text(formula)


def _emit(args, record, lines):
    if args.json:
        print(json.dumps({"schema": SCHEMA, "command": args.command, **record}, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


# ---------------------------------------------------------------- commands


def cmd_normalize(args):
    formula = _load(args.file)
    if args.noeq:
        result = normal_form_noeq(formula)
    elif args.mode in ("poly", "lin"):
        result = expand_counting(counting_normal_form(formula), args.mode)
    else:
        result = counting_normal_form(formula, mode=args.mode)
    _emit(args, {"input": to_text(formula), "result": to_text(result)}, [_show(result, args)])
    return EXIT_OK


def _eliminand_arity(formula, pred):
    try:
        return subformula_at(formula, find_binder(formula, pred)).arity
    except ShapeError:
        return predicate_arities(formula, free_only=False).get(pred, 1)


def cmd_eliminate(args):
    formula = _load(args.file)
    record = {"input": to_text(formula)}
    lines = []
    pred = args.predicate
    if args.all:
        result = eliminate_all(formula)
    elif _eliminand_arity(formula, pred) >= 2:
        target = formula
        if pred in predicate_arities(formula):
            target = ExistsPred(pred, _eliminand_arity(formula, pred), formula)
        result = eliminate_polyadic(target, pred)
        if not result:
            record["not_monadizable"] = result.reason
            _emit(args, record, [f"not monadizable: {result.reason}"])
            return EXIT_NEGATIVE
    else:
        body = formula.sub if isinstance(formula, ExistsPred) and formula.pred == pred else formula
        if args.crude:
            result = eliminate_crude(pred, body, simplify=not args.raw)
        elif args.noeq:
            result = eliminate_noeq(pred, body, simplify=not args.raw)
        else:
            result = eliminate_predicate(pred, body, simplify=not args.raw)
            if args.trace:
                stages = elimination_stages(pred, body)
                record["trace"] = [{"stage": name, "formula": to_text(f)} for name, f in stages]
                lines += [f"{name}: {_show(f, args)}" for name, f in stages]
    record["result"] = to_text(result)
    lines.append(_show(result, args))
    _emit(args, record, lines)
    return EXIT_OK


def cmd_decide(args):
    formula = _load(args.file)
    if args.method == "behmann":
        verdict = decide_validity(formula) if args.validity else decide_satisfiability(formula)
    elif args.method == "quine":
        verdict = quine_decide(formula)
    else:
        verdict = prop_decide_substitution(formula)
    positive = verdict.valid if args.validity else verdict.satisfiable
    question = "valid" if args.validity else "satisfiable"
    lines = [f"{question}: {'yes' if positive else 'no'}",
             f"valid: {verdict.valid}", f"satisfiable: {verdict.satisfiable}"]
    if verdict.witness_spectrum is not None:
        lines.append(f"spectrum: {verdict.witness_spectrum.describe()}")
    _emit(args, {"input": to_text(formula), "question": question, "answer": positive,
                 "method": args.method, **verdict.to_dict()}, lines)
    return EXIT_OK if positive else EXIT_NEGATIVE


def cmd_equiv(args):
    left, right = _load(args.left), _load(args.right)
    counterexample = check_equiv(left, right, args.max_domain)
    record = {"left": to_text(left), "right": to_text(right), "max_domain": args.max_domain,
              "equivalent": counterexample is None}
    if counterexample is None:
        lines = [f"equivalent on all domains up to size {args.max_domain}"]
    else:
        record["counterexample"] = counterexample.to_record()
        lines = ["not equivalent; counterexample:", counterexample.describe()]
    _emit(args, record, lines)
    return EXIT_OK if counterexample is None else EXIT_NEGATIVE


def cmd_corpus(args):
    outcomes = corpus.run_corpus(args.max_domain, names=args.names or None)
    cases, lines = [], []
    for outcome in outcomes:
        result = outcome.result
        shown = to_text(result) if isinstance(result, Formula) else f"not monadizable: {result.reason}"
        cases.append({"name": outcome.example.name, "passed": outcome.passed, "result": shown,
                      "detail": outcome.detail, "seconds": round(outcome.seconds, 4)})
        lines.append(f"{'PASS' if outcome.passed else 'FAIL'} {outcome.example.name}: {shown}")
    failed = sum(not o.passed for o in outcomes)
    lines.append(f"{len(outcomes) - failed}/{len(outcomes)} examples passed")
    _emit(args, {"cases": cases, "failed": failed}, lines)
    return EXIT_OK if failed == 0 else EXIT_NEGATIVE


# ---------------------------------------------------------------- argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one structured record")
    common.add_argument("--unicode", action="store_true", help="print formulas with logical symbols")

    parser = argparse.ArgumentParser(
        prog="behmann", description="Monadic second-order quantifier elimination and decision.")
    commands = parser.add_subparsers(dest="command", required=True)

    normalize = commands.add_parser("normalize", parents=[common], help="counting quantifier normal form")
    normalize.add_argument("file", help="formula file, or - for stdin")
    normalize.add_argument("--noeq", action="store_true", help="equality-free normal form")
    normalize.add_argument("--mode", choices=["poly", "lin", "conj", "disj"], default="conj",
                           help="guard elimination shape, or expand counting quantifiers")
    normalize.set_defaults(run=cmd_normalize)

    eliminate = commands.add_parser("eliminate", parents=[common], help="eliminate predicate quantifiers")
    eliminate.add_argument("file")
    target = eliminate.add_mutually_exclusive_group(required=True)
    target.add_argument("--predicate", "-p", help="eliminate exists PREDICATE")
    target.add_argument("--all", action="store_true", help="eliminate every predicate quantifier")
    shape = eliminate.add_mutually_exclusive_group()
    shape.add_argument("--noeq", action="store_true", help="equality-free closed resultant")
    shape.add_argument("--crude", action="store_true", help="crude resultant (weaker)")
    eliminate.add_argument("--raw", action="store_true", help="skip the final simplification")
    eliminate.add_argument("--trace", action="store_true", help="show intermediate stages")
    eliminate.set_defaults(run=cmd_eliminate)

    decide = commands.add_parser("decide", parents=[common], help="decide validity or satisfiability")
    decide.add_argument("file")
    question = decide.add_mutually_exclusive_group(required=True)
    question.add_argument("--validity", action="store_true")
    question.add_argument("--satisfiability", action="store_true")
    decide.add_argument("--method", choices=["behmann", "quine", "substitution"], default="behmann")
    decide.set_defaults(run=cmd_decide)

    equiv = commands.add_parser("equiv", parents=[common], help="bounded equivalence check")
    equiv.add_argument("left")
    equiv.add_argument("right")
    equiv.add_argument("--max-domain", type=int, default=3)
    equiv.set_defaults(run=cmd_equiv)

    run_corpus = commands.add_parser("corpus", parents=[common], help="run the built-in worked examples")
    run_corpus.add_argument("names", nargs="*", help="restrict to these examples")
    run_corpus.add_argument("--max-domain", type=int, default=3)
    run_corpus.set_defaults(run=cmd_corpus)
    return parser


def _fail(args, code, kind, message):
    if getattr(args, "json", False):
        print(json.dumps({"schema": SCHEMA, "command": getattr(args, "command", None),
                          "error": {"type": kind, "message": message}}))
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.run(args)
    except (SizeLimitExceeded, BudgetExceeded) as exc:
        return _fail(args, EXIT_LIMIT, type(exc).__name__, str(exc))
    except (_Usage, BehmannError) as exc:
        return _fail(args, EXIT_USAGE, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
