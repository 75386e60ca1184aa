import json

import pytest

from aspsigma.cli import (
    EXIT_BUDGET,
    EXIT_INPUT,
    EXIT_NEGATIVE,
    EXIT_OK,
    report_digest,
    roundtrip_asp,
    roundtrip_logic,
    run,
)
from aspsigma.corpus import CorpusSpec


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_solve_no_models(files, capsys):
    path = files("p.lp", "p :- not p.\n")
    assert run(["solve", path]) == EXIT_NEGATIVE
    assert "no stable models" in capsys.readouterr().out


def test_solve_prints_sorted_models(files, capsys):
    path = files("p.lp", "p :- not q. q :- not p. r :- p. r :- q.\n")
    assert run(["solve", path]) == EXIT_OK
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ["p, r", "q, r"]


def test_solve_json(files, capsys):
    path = files("p.lp", "p.\n")
    assert run(["--json", "solve", path]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data == {"models": [["p"]]}


def test_ground(files, capsys):
    path = files("p.lp", "#domain c, d. p(x) :- not q(x).\n")
    assert run(["ground", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "p(c) :- not q(c)." in out and "p(d) :- not q(d)." in out


def test_entail_verdicts(files, capsys):
    path = files("p.lp", "p :- not q. q :- not p. r :- p. r :- q.\n")
    assert run(["entail", path, "r"]) == EXIT_OK
    assert run(["entail", path, "p"]) == EXIT_NEGATIVE


def test_prove_and_check(files, capsys, tmp_path):
    f = files("f.sig1", "a -> a\n")
    assert run(["prove", f]) == EXIT_OK
    cert = capsys.readouterr().out.strip().splitlines()[-1]
    term = files("cert.term", cert + "\n")
    assert run(["check", term, f]) == EXIT_OK
    assert "ACCEPTED" in capsys.readouterr().out
    bad = files("bad.term", "\\X:b. X\n")
    assert run(["check", bad, f]) == EXIT_NEGATIVE


def test_prove_negative(files):
    f = files("f.sig1", "((a -> b) -> a) -> a\n")
    assert run(["prove", f]) == EXIT_NEGATIVE


def test_parse_error_exit_code(files):
    assert run(["solve", files("p.lp", "p :- \n")]) == EXIT_INPUT
    assert run(["solve", "/nonexistent/x.lp"]) == EXIT_INPUT


def test_cap_exit_code(files):
    big = files(
        "big.lp", "#domain c1, c2, c3. p(u, v, w, x, y, z) :- not q(u).\n"
    )
    assert run(["--cap-base", "4", "solve", big]) == EXIT_BUDGET


def test_translate_asp_output_proves(files, capsys, tmp_path):
    p = files("p.lp", "p :- not p.\n")
    out = str(tmp_path / "out.sig1")
    assert run(["translate-asp", p, "--goal", "omega", "-o", out]) == EXIT_OK
    assert run(["prove", out]) == EXIT_OK


def test_translate_asp_stats(files, capsys):
    p = files("p.lp", "p :- not p.\n")
    assert run(["--json", "translate-asp", p, "--goal", "omega"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["axioms"] == 11


def test_translate_formula_header(files, capsys, tmp_path):
    f = files("f.sig1", "b -> a\n")
    out = str(tmp_path / "out.lp")
    assert run(["translate-formula", f, "-o", out]) == EXIT_OK
    text = open(out).read()
    assert text.startswith("% source formula: b -> a")
    assert "addresses of length" in text


def test_soup_pipeline(files, capsys, tmp_path):
    f = files("f.sig1", "((a -> b) -> a) -> a\n")
    soup = str(tmp_path / "z.soup")
    assert run(["soup-find", f, "-o", soup]) == EXIT_OK
    assert run(["soup-check", f, soup]) == EXIT_OK
    capsys.readouterr()
    assert run(["soup-to-model", f, soup]) == EXIT_OK
    model_lines = capsys.readouterr().out
    model = files("m.model", model_lines)
    soup2 = str(tmp_path / "z2.soup")
    assert run(["--addr-len", "1", "model-to-soup", f, model, "-o", soup2]) == EXIT_OK
    assert run(["soup-check", f, soup2]) == EXIT_OK


def test_soup_find_provable(files):
    f = files("f.sig1", "a -> a\n")
    assert run(["soup-find", f]) == EXIT_NEGATIVE


def test_roundtrip_asp_driver():
    spec = CorpusSpec(count=25, seed=3)
    reports = roundtrip_asp(spec, timeout=10.0)
    assert len(reports) == 25
    assert all(r.agreed for r in reports if not r.skipped)
    assert [r.instance_id for r in reports] == list(range(25))


def test_roundtrip_logic_driver():
    spec = CorpusSpec(count=15, seed=4)
    reports = roundtrip_logic(spec, timeout=30.0)
    assert len(reports) == 15
    assert all(r.agreed for r in reports if not r.skipped)


def test_digest_reproducible():
    spec = CorpusSpec(count=10, seed=5)
    a = report_digest(roundtrip_asp(spec, timeout=10.0))
    b = report_digest(roundtrip_asp(spec, timeout=10.0))
    assert a == b
    c = report_digest(roundtrip_asp(CorpusSpec(count=10, seed=6), timeout=10.0))
    assert a != c


def test_roundtrip_cli(capsys):
    assert run(["roundtrip-asp", "--count", "8"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0 disagreements" in out
    assert run(["--json", "roundtrip-logic", "--count", "5"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["disagreements"] == 0
    assert len(data["reports"]) == 5


def test_roundtrip_workers_agree_with_sequential():
    spec = CorpusSpec(count=8, seed=9)
    seq = roundtrip_asp(spec, timeout=10.0, workers=1)
    par = roundtrip_asp(spec, timeout=10.0, workers=2)
    assert report_digest(seq) == report_digest(par)
