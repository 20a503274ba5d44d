import json

import pytest

from bvforms.cli import main
from bvforms.suites import run_suite


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def test_parse_command(capsys):
    assert run(capsys, "parse", "dp1*dx1") == (0, "dx1*dp1", "")
    code, out, _ = run(capsys, "parse", "--json", "3/2*x1")
    assert code == 0 and json.loads(out)["terms"] == [{"monomial": "x1", "coeff": "3/2"}]


def test_parse_error_is_usage_error(capsys):
    code, _, err = run(capsys, "parse", "x1 +* p1")
    assert code == 2 and "position 4" in err


@pytest.mark.parametrize(
    "op,expr,expected",
    [
        ("d", "p1*dx1", "dx1*dp1"),
        ("omega", "1", "dx1*dp1"),
        ("L", "dx1*dp1 + dx2*dp2", "2"),
        ("delta", "x1^2*p1", "2*x1"),
        ("invert-omega", "dx1*dp1", "1"),
        ("reduce", "x1*dx1 + dx1*dp1", "x1"),
        ("hbar-d", "p1*dx1 - h", "0"),
    ],
)
def test_apply(capsys, op, expr, expected):
    assert run(capsys, "apply", "--op", op, expr) == (0, expected, "")


def test_apply_precondition_failure(capsys):
    code, _, err = run(capsys, "apply", "--op", "invert-omega", "--n", "1", "dx1")
    assert code == 1 and "image of omega" in err


def test_pullback(capsys, tmp_path):
    m = tmp_path / "map.json"
    m.write_text(json.dumps({"n": 2, "xprime": ["x1", "x2 + x1^2"], "pprime": ["p1 - 2*x1*p2", "p2"]}))
    assert run(capsys, "pullback", "--map", str(m), "dx2") == (0, "dx2 + 2*x1*dx1", "")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "xprime": ["x1 +"], "pprime": ["p1"]}))
    assert run(capsys, "pullback", "--map", str(bad), "x1")[0] == 2


def test_check_text_and_json(capsys):
    code, out, _ = run(capsys, "check", "d3", "--n", "1", "--max-xdeg", "4")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "check", "manin", "--n", "2", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1 and rep["status"] == "pass"


def test_check_parameter_errors(capsys):
    assert run(capsys, "check", "d3", "--n", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["check", "nonsense", "--n", "1"])
    assert info.value.code == 2


def test_check_failure_exit_code(capsys, monkeypatch):
    import bvforms.suites as suites

    monkeypatch.setattr(suites, "bv_delta", lambda f: f)
    assert run(capsys, "check", "delta-squared", "--n", "1", "--max-xdeg", "2")[0] == 1


def test_reports_are_deterministic():
    a = run_suite("degeneration", 2, 2, seed=4).to_dict(timing=False)
    b = run_suite("degeneration", 2, 2, seed=4).to_dict(timing=False)
    assert a == b


def test_run_suite_errors():
    with pytest.raises(ValueError):
        run_suite("d3", 0)
    with pytest.raises(ValueError):
        run_suite("bogus", 1)


def test_run_suite_all_n2():
    rep = run_suite("all", 2, 3)
    assert rep.passed, rep.to_text()
