import io
import json
import subprocess
import sys

import pytest

from behmann.cli import main
from behmann.oracle import check_equiv
from behmann.syntax import parse

FERIO = "exists2 q. (forall x. (~q(x) | ~p(x)) & exists x. (r(x) & q(x)))"


@pytest.fixture
def write(tmp_path):
    def make(text, name="input.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def record(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    lines = out.strip().splitlines()
    assert len(lines) == 1
    data = json.loads(lines[0])
    assert data["schema"] == 1
    return code, data


def test_eliminate(capsys, write):
    code, out, _ = run(capsys, "eliminate", write("# ferio\n" + FERIO), "-p", "q")
    assert code == 0
    assert check_equiv(parse(out), parse("exists u. (r(u) & ~p(u))"), 3) is None


def test_eliminate_trace_and_json(capsys, write):
    code, data = record(capsys, "eliminate", write(FERIO), "-p", "q", "--trace")
    assert code == 0
    stages = [step["stage"] for step in data["trace"]]
    assert stages[0] == "input" and stages[-1] == "simplified"
    assert data["trace"][-1]["formula"] == data["result"]


@pytest.mark.parametrize("flag", ["--noeq", "--crude", "--raw"])
def test_eliminate_variants(capsys, write, flag):
    code, out, _ = run(capsys, "eliminate", write(FERIO), "-p", "q", flag)
    assert code == 0
    assert check_equiv(parse(out), parse("exists u. (r(u) & ~p(u))"), 3) is None


def test_eliminate_all(capsys, write):
    code, data = record(capsys, "eliminate", write("exists2 p. (p & q)"), "--all")
    assert (code, data["result"]) == (0, "q")


def test_eliminate_polyadic(capsys, write):
    source = "exists2 p. (forall z. (f(x,z) | p(z,y)) & forall z. (~p(x,z) | g(z,y)))"
    code, out, _ = run(capsys, "eliminate", write(source), "-p", "p")
    assert code == 0
    assert check_equiv(parse(out), parse("f(x,x) | g(y,y)"), 2) is None


def test_eliminate_not_monadizable(capsys, write):
    source = "forall2 p. (p(x,y) | exists v. (forall u. (~p(x,u) | f(u,v)) & g(v,y)))"
    code, data = record(capsys, "eliminate", write(source), "-p", "p")
    assert code == 1
    assert "relates two bound variables" in data["not_monadizable"]


@pytest.mark.parametrize("mode, expected", [
    ("disj", "atleast 1 x. p(x) & ~p(a) | atleast 2 x. p(x)"),
    ("conj", "atleast 1 x. p(x) & (atleast 2 x. p(x) | ~p(a))"),
])
def test_normalize_modes(capsys, write, mode, expected):
    code, out, _ = run(capsys, "normalize", write("exists x. (p(x) & x != a)"), "--mode", mode)
    assert code == 0
    assert check_equiv(parse(out), parse(expected), 3) is None


def test_normalize_expansion(capsys, write):
    code, out, _ = run(capsys, "normalize", write("atleast 2 x. p(x)"), "--mode", "poly")
    assert code == 0 and "atleast" not in out
    assert check_equiv(parse(out), parse("atleast 2 x. p(x)"), 4) is None


def test_normalize_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("exists x. (p(x) & q(a))"))
    code, out, _ = run(capsys, "normalize", "-", "--noeq")
    assert code == 0 and "atleast" not in out
    assert check_equiv(parse(out), parse("exists x. p(x) & q(a)"), 3) is None


def test_decide(capsys, write):
    path = write("exists2 p. (exists x. p(x) & exists x. ~p(x))")
    code, data = record(capsys, "decide", path, "--validity")
    assert code == 1
    assert data["valid"] is False and data["satisfiable"] is True
    assert data["spectrum"] == {"sign": "true-cofinitely", "exceptions": [1]}
    code, _ = record(capsys, "decide", path, "--satisfiability")
    assert code == 0


@pytest.mark.parametrize("method, source", [
    ("quine", "forall x. p(x) | exists x. ~p(x)"),
    ("substitution", "forall2 p. (p | ~p)"),
])
def test_decide_methods(capsys, write, method, source):
    code, out, _ = run(capsys, "decide", write(source), "--validity", "--method", method)
    assert code == 0 and out.startswith("valid: yes")


def test_equiv(capsys, write):
    left, right = write("forall x. p(x)", "a.txt"), write("exists x. p(x)", "b.txt")
    code, data = record(capsys, "equiv", left, right)
    assert code == 1 and data["counterexample"]["domain_size"] == 2
    code, out, _ = run(capsys, "equiv", left, write("~exists x. ~p(x)", "c.txt"), "--max-domain", "4")
    assert code == 0 and "up to size 4" in out


def test_corpus(capsys):
    code, data = record(capsys, "corpus")
    assert code == 0 and data["failed"] == 0
    assert {case["name"] for case in data["cases"]} >= {"ferio", "ackermann-switching"}


def test_usage_errors(capsys, write):
    code, data = record(capsys, "normalize", write("p("))
    assert code == 2 and data["error"]["type"] == "ParseError"
    code, _, err = run(capsys, "normalize", "missing-file.txt")
    assert code == 2 and "cannot read" in err
    code, _, _ = run(capsys, "eliminate", write("p"))
    assert code == 2
    code, data = record(capsys, "eliminate", write("exists2 p. exists x. f(x, x)"), "--all")
    assert code == 2 and data["error"]["type"] == "ClassError"


def test_console_script(write):
    completed = subprocess.run([sys.executable, "-m", "behmann.cli", "eliminate", write(FERIO), "-p", "q"],
                               capture_output=True, text=True, check=False)
    assert completed.returncode == 0 and "r(" in completed.stdout
