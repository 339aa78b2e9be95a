import json

import pytest

import calcforge as cf


def test_parse_print_and_prefix():
    e = cf.parse("sin(x)^2 + cos(x)^2")
    assert str(e) == "sin(x)^2 + cos(x)^2"
    assert e.prefix()[:2] == ["add", "pow"]
    assert cf.from_prefix(e.prefix()) == e
    assert len(e) == e.size == 9
    with pytest.raises(ValueError):
        cf.parse("sin(x")


def test_simplify_and_calculus():
    assert str(cf.simplify(cf.parse("sin(exp(exp(x)))^2 + cos(exp(exp(x)))^2"))) == "1"
    d = cf.differentiate(cf.parse("sin(sin(x))"))
    assert cf.canonicalize(d) == cf.canonicalize(cf.parse("cos(sin(x))*cos(x)"))
    assert cf.integrate(cf.parse("cos(x)")) == cf.canonicalize(cf.parse("sin(x)"))
    assert cf.integrate(cf.parse("exp(x^2)")) is None


def test_oracle_witness():
    v = cf.numeric_equiv(cf.parse("sin(x)"), cf.parse("cos(x)"), seed=3)
    assert v["outcome"] == "NotEquivalent"
    assert v["witness"] is not None
    assert cf.numeric_equiv(cf.parse("(x+1)^2"), cf.parse("x^2+2*x+1"))["outcome"] == "Equivalent"


def test_verification():
    assert cf.check_integral(cf.parse("cos(x)"), "sin(x) + 4")["outcome"] == "accept"
    assert cf.check_integral(cf.parse("cos(x)"), "cos(x)")["outcome"] == "reject"
    bad = cf.check_integral(cf.parse("cos(x)"), "x + * 2")
    assert bad["outcome"] == "malformed" and bad["offset"] == 4
    assert cf.check_ode(cf.parse_ode("x*y' - y"), "c*x")["outcome"] == "accept"
    assert str(cf.make_ode(cf.parse("x + c"))) == "y' - 1"


def test_uglify_keeps_value():
    u = cf.uglify(cf.parse("cos(x)"), steps=2, seed=4)
    assert u.size > 4
    assert cf.check_integral(u, "sin(x)")["outcome"] == "accept"


def test_generation_is_deterministic_and_sound():
    a = cf.gen_bwd(20, seed=42)
    assert a == cf.gen_bwd(20, seed=42, jobs=2)
    for line in a:
        rec = json.loads(line)
        assert rec["source"] == "BWD"
        assert cf.check_integral(cf.parse(rec["problem"]), rec["solution"])["outcome"] == "accept"
    stats = json.loads(cf.corpus_stats(a))
    assert stats["all"]["count"] == 20


def test_cli_exit_codes():
    code, out, err = cf.run_cli(["gen", "--mode", "bogus", "--seed", "1"])
    assert code == 1 and out == b""
    code, out, _ = cf.run_cli(["simplify", "--expr", "log(exp(x))"])
    assert code == 0 and out == b"x\n"
