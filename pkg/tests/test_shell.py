import io
import json

import pytest
from hypothesis import given, settings

from dq.phasegrid import load_grid
from dq.shell.cli import run
from dq.shell.parser import ParseError, parse, parse_expr
from dq.shell.report import Check, Report, exact_check, numeric_check
from dq.symcore import I, Poly, coord_space, phase_space, to_text
from helpers import polys

S1, S2 = phase_space(1), phase_space(2)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# ---------------------------------------------------------------- parser
def test_parse_examples():
    u = parse("q1^2*p1 + (1/2)*hbar", S1)
    q, p = Poly.var(S1, "q1"), Poly.var(S1, "p1")
    assert u == q * q * p + Poly.hbar(S1, 1) / 2
    assert parse("i*hbar/2", S1) == Poly.hbar(S1, 1) * Poly.const(S1, I) / 2


def test_parse_error_column():
    with pytest.raises(ParseError) as info:
        parse("q1*(p1", S1)
    assert (info.value.line, info.value.column) == (1, 7)


def test_parse_precedence():
    assert parse("-q1^2", S1) == -(Poly.var(S1, "q1") ** 2)
    assert parse("2*q1 + 3", S1) == Poly.var(S1, "q1") * 2 + 3
    assert parse("hbar^-2*q1", S1) == Poly.hbar(S1, -2) * Poly.var(S1, "q1")


@pytest.mark.parametrize("bad", ["q2", "q1^-1", "q1/p1", "q1^(1/2)", "q1 +", "3 $ 4", ""])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse(bad, S1)


def test_parse_coordinate_space():
    S = coord_space(3)
    assert parse("x1*x3 - x2", S) == Poly.var(S, 0) * Poly.var(S, 2) - Poly.var(S, 1)


def test_parse_expr_positions():
    e = parse_expr("q1 +\n  p1")
    assert e.line == 1


@settings(max_examples=60, deadline=None)
@given(polys(S2, max_degree=4, hbar=True))
def test_roundtrip(u):
    text = to_text(u)
    v = parse(text, S2)
    assert v == u
    assert to_text(v) == text


# ---------------------------------------------------------------- report
def test_report_shape():
    rep = Report("x", {"b": 1, "a": 2})
    rep.add(exact_check("zero", Poly.zero(S1)))
    rep.add(numeric_check("small", 1e-12, 1e-9))
    d = json.loads(rep.to_json())
    assert d["schema"] == 1 and d["passed"] is True
    assert d["checks"][0] == {"name": "zero", "passed": True, "residual_norm": 0.0, "tolerance": 0.0,
                              "exact_zero": True}
    assert "timing" not in d
    bad = exact_check("nz", Poly.var(S1, "q1") * 3 + Poly.const(S1, 4))
    assert not bad.passed and bad.residual_norm == pytest.approx(5.0)
    assert not numeric_check("nan", float("nan"), 1.0).passed


def test_report_lists_and_check_serialization():
    c = exact_check("list", [Poly.zero(S1), Poly.const(S1, 2)])
    assert not c.passed and c.residual_norm == 2.0
    assert Check("inf", False, float("inf")).as_dict()["residual_norm"] == "inf"


# ---------------------------------------------------------------- cli
def test_cli_star_mul():
    code, out, _ = cli("star", "mul", "--ell", "1", "-u", "q1", "-v", "p1")
    d = json.loads(out)
    assert code == 0
    assert d["result"]["product"] == "q1*p1 + (1/2)*i*hbar"
    assert all(c["passed"] for c in d["checks"])


def test_cli_graphs_enumerate():
    code, out, _ = cli("graphs", "enumerate", "--n", "2")
    assert code == 0 and json.loads(out)["result"]["count"] == 36


def test_cli_spectrum_oscillator():
    code, out, _ = cli("spectrum", "oscillator", "--ell", "1", "--order", "8")
    d = json.loads(out)
    (check,) = [c for c in d["checks"] if c["name"] == "closed-form-match"]
    assert code == 0 and check["passed"] and check["residual_norm"] == 0.0 and check["exact_zero"]


@pytest.mark.parametrize("argv", [
    ("star", "bracket", "-u", "p1^2", "-v", "q1^2"),
    ("star", "exp", "-u", "p1*q1", "--order", "5"),
    ("star", "mul", "--ordering", "normal", "-u", "q1^2", "-v", "p1^2"),
    ("spectrum", "dilation", "--order", "8"),
    ("cohomology", "b"),
    ("cohomology", "d"),
    ("cohomology", "obstruction", "--r", "3"),
    ("cohomology", "obstruction", "--r", "2", "--theory", "chevalley"),
    ("schouten", "--tensor", "so3"),
    ("schouten", "--tensor", "canonical", "--ell", "2"),
    ("nambu", "bracket", "-f", "x1", "-f", "x2", "-f", "x3"),
    ("nambu", "fi", "-x", "x1^2", "-x", "x2*x3", "-y", "x1", "-y", "x2^2", "-y", "x1*x3"),
    ("nambu", "simulate", "--steps", "2000"),
    ("graphs", "operator", "--graph", "1; v1:(R,L)", "-u", "q1^2", "-v", "p1"),
    ("grid", "projector", "--n", "2"),
])
def test_cli_commands_pass(argv):
    code, out, err = cli(*argv)
    assert code == 0, out + err
    assert json.loads(out)["passed"]


def test_cli_failed_check_exit_one():
    code, out, _ = cli("schouten", "--tensor", "custom", "--dim", "3",
                       "--entry", "1,2=x3+x1", "--entry", "2,3=x1", "--entry", "1,3=-x2")
    d = json.loads(out)
    assert code == 1 and not d["passed"]
    assert d["result"]["schouten"] == {"1,2,3": "x2"}


def test_cli_nahm_blowup_reports_failure(tmp_path):
    traj = tmp_path / "t.ndjson"
    code, out, _ = cli("nambu", "simulate", "--system", "nahm", "--r0", "1,0.5,0.25", "--trajectory", str(traj))
    assert code == 1
    assert json.loads(out)["result"]["aborted_at_step"] == 1772
    assert traj.read_text().count("\n") > 10


def test_cli_usage_and_parse_errors():
    code, out, err = cli("bogus")
    assert code == 2 and out == "" and json.loads(err)["error"]["type"] == "usage"
    code, _, err = cli("star", "mul", "-u", "q1*(p1", "-v", "p1")
    e = json.loads(err)["error"]
    assert code == 2 and e["type"] == "parse" and e["column"] == 7
    code, _, err = cli("star", "mul", "-u", "q1")
    assert code == 2
    code, _, err = cli("graphs", "enumerate", "--n", "9")
    assert code == 2 and json.loads(err)["error"]["type"] == "GraphError"


def test_cli_byte_stable():
    argv = ("cohomology", "obstruction", "--r", "2")
    assert cli(*argv)[1] == cli(*argv)[1]
    code, out, _ = cli("--timing", *argv)
    assert "timing" in json.loads(out)


def test_cli_config_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "dq.cfg"
    cfg.write_text("# grid defaults\nN = 128\nL = 7\nmax_degree = 3\n")
    code, out, _ = cli("--config", str(cfg), "grid", "projector", "--n", "1")
    assert code == 0 and json.loads(out)["inputs"]["N"] == 128
    monkeypatch.setenv("DQ_MAX_DEGREE", "2")
    code, out, _ = cli("cohomology", "obstruction", "--r", "2")
    assert code == 0 and json.loads(out)["inputs"]["max_degree"] == 2
    cfg.write_text("colour = red\n")
    assert cli("--config", str(cfg), "cohomology", "b")[0] == 2


def test_cli_dump_grid(tmp_path):
    path = tmp_path / "pi.bin"
    code, _, _ = cli("grid", "projector", "--n", "0", "--N", "64", "--L", "6", "--dump-grid", str(path))
    assert code == 0
    g = load_grid(path)
    assert g.N == 64 and g.L == 6.0
