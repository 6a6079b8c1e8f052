from __future__ import annotations

import io
import subprocess
import sys

import pytest

from rpes.cli import cli_main
from rpes.textformat import FIXTURES, fixture_text, parse_rpes


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in FIXTURES:
        path = tmp_path / f"{name}.rpes"
        path.write_text(fixture_text(name))
        out[name] = str(path)
    return out


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_bisim_e2(files):
    assert run("bisim", files["e2"])[:2] == (0, "bisimilar: true\n")


def test_bisim_two_files(files):
    code, out, _ = run("bisim", files["e1"], files["e2"])
    assert code == 1
    assert out.startswith("bisimilar: false\ncounterexample: {a:1,b:1}")
    assert run("bisim", files["e2"], files["e2"], "--system", "te")[0] == 0


def test_classify(files):
    assert run("classify", files["e0"])[1] == "cause-respecting: false\ncausal: false\n"
    assert run("classify", files["e4"])[1] == "cause-respecting: true\ncausal: true\n"


def test_residual(files):
    code, out, _ = run("residual", files["e2"], "a,b|")
    assert code == 0
    r = parse_rpes(out)
    assert r.events == {"a"} and r.initial == {"a"} and not r.reversible


def test_trace(files):
    code, out, _ = run("trace", files["e0"], "b;d;|b;c;e;|c")
    assert code == 0
    assert out.splitlines() == ["{}", "{b}", "{b,d}", "{d}", "{c,d}", "{c,d,e}", "{d,e}"]


def test_trace_not_enabled(files):
    code, out, err = run("trace", files["e0"], "b;d;e")
    assert code == 1
    assert "step 3" in err


def test_configs(files):
    assert run("configs", files["e1"], "--forward-only")[1] == "{}\n{a}\n{a,b}\n"
    assert run("configs", files["e1"])[1] == "{}\n{a}\n{b}\n{a,b}\n"


def test_steps(files):
    assert run("steps", files["e2"], "--at", "{}")[1] == "a {a:1}\nb {b:1}\na,b {a:1,b:1}\n"
    assert run("steps", files["e0"], "--at", "a,b")[0] == 2


def test_tc_te_dot(files, tmp_path):
    code, out, _ = run("tc", files["e2"])
    assert code == 0 and "states 4" in out
    dest = tmp_path / "te.dot"
    assert run("te", files["e2"], "--dot", str(dest))[0] == 0
    assert dest.read_text().count("->") == 6
    assert run("tc", files["e2"], "--dot", "-")[1].startswith('digraph "TC"')


def test_iso(files):
    assert run("iso", files["e2"])[:2] == (1, "isomorphic: false\n")
    assert run("iso", files["e3"])[:2] == (0, "isomorphic: true\n")
    assert run("iso", files["e0"], files["e0"], "--system", "te")[0] == 0


def test_validate(files, tmp_path):
    assert run("validate", files["e0"])[:2] == (0, "valid\n")
    bad = tmp_path / "bad.rpes"
    bad.write_text("rpes bad\nevents a b\ncause a b\ncause b a\n")
    code, out, _ = run("validate", str(bad))
    assert code == 1
    assert out.startswith("invalid\n")
    assert "causality-irreflexive" in out


def test_audit(files):
    code, out, _ = run("audit", files["e2"], "--max-len", "3")
    assert code == 0 and "overall: ok" in out
    code, out, _ = run("audit", files["e0"], "--max-len", "3")
    assert code == 0 and "FAIL (not guaranteed)" in out


def test_gen_is_deterministic():
    a = run("gen", "--events", "5", "--mode", "any", "--seed", "9")
    b = run("gen", "--events", "5", "--mode", "any", "--seed", "9")
    assert a == b and a[0] == 0
    assert parse_rpes(a[1]).name == "gen9"


def test_input_errors(files, tmp_path):
    assert run("classify", str(tmp_path / "missing.rpes"))[0] == 2
    bad = tmp_path / "bad.rpes"
    bad.write_text("rpes bad\nevents a\ncause a a\n")
    assert run("classify", str(bad))[0] == 2
    assert run("trace", files["e0"], "q")[0] == 2
    assert run("gen", "--events", "3", "--seed", "1", "--conflict-density", "2")[0] == 2


def test_usage_errors(capsys):
    assert run("frobnicate")[0] == 2
    assert run("audit", "x.rpes")[0] == 2
    assert "usage" in capsys.readouterr().err


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "rpes.cli", "bisim", files["e2"]], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout == "bisimilar: true\n"
