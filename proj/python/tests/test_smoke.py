from fractions import Fraction
from pathlib import Path

import pytest

import aara

CORPUS = Path(__file__).resolve().parents[2] / "corpus"


def src(name):
    return (CORPUS / name).read_text()


def test_run_append():
    value, cost = aara.run(src("append.raml"), ["<[<>, <>], [<>]>"], metric="tick")
    assert value == "[<>, <>, <>]"
    assert cost == Fraction(2)


def test_quicksort_bound():
    r = aara.analyze(src("quicksort.raml"), mode="uni", degree=2)
    assert r["ok"]
    assert "L^(1,2)" in r["signature"]
    assert r["bound"] == "|l|^2"


def test_append_multivariate_closed_form():
    r = aara.analyze(src("append.raml"), mode="multi", degree=2, require_output="{ [*] : 1; [*,*] : 2 }")
    assert r["bound"] == "|l1| + (|l1|+|l2|)^2"


def test_multiply_needs_multivariate():
    assert not aara.analyze(src("multiply.raml"), mode="uni", degree=2, metric="time")["ok"]
    assert aara.analyze(src("multiply.raml"), mode="multi", degree=2, metric="time")["ok"]


def test_ip():
    assert not aara.ip(src("doubling.raml"))["ok"]
    rep = aara.ip(src("share_step.raml"))
    assert rep["ok"]
    assert any("zero-potential" in v for v in rep["details"].values())


def test_tm():
    machine = (CORPUS / "tm" / "bitflip.tm").read_text()
    assert aara.run_tm(machine, "10") == ("01", 3)
    assert aara.certify_tm(machine, max_len=4)["ok"]
    assert "fun run" in aara.compile_tm(machine)


def test_errors():
    with pytest.raises(aara.SourceError):
        aara.analyze("fun f x = case x {")
    with pytest.raises(aara.EvalError):
        aara.run("main (x : unit) = error", ["<>"])
    with pytest.raises(ValueError):
        aara.analyze(src("append.raml"), mode="cubic")
