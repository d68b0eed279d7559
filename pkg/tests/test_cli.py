import io
import json
import subprocess
import sys

import pytest

from vfx.cli import EXIT_FAILED, EXIT_FUEL, EXIT_OK, EXIT_REJECTED, EXIT_STUCK, EXIT_USAGE, SUCCESS, main

from conftest import CORPUS, VERIFIED


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("VFX_COLOR", "never")


def test_verify_countdown_emits_certificate(tmp_path):
    cert = tmp_path / "countdown.vfxcert"
    code, out, _ = run("verify", CORPUS / "countdown.c", "--emit-cert", cert)
    assert code == EXIT_OK and out.strip() == SUCCESS
    data = json.loads(cert.read_text())
    assert data["format_version"] == 1 and data["proof"]
    code, out, _ = run("check", cert, "--source", CORPUS / "countdown.c")
    assert code == EXIT_OK and out.startswith("accepted:")


@pytest.mark.parametrize("name", VERIFIED)
def test_verify_corpus(name):
    assert run("verify", CORPUS / f"{name}.c")[0] == EXIT_OK


@pytest.mark.parametrize("name, obligation, reason", [
    ("overflow", "upper bound", "overflow"),
    ("div_zero", "division by zero", "div-by-zero"),
    ("div_overflow", "division overflow", "div-overflow"),
])
def test_undefined_behavior(name, obligation, reason):
    code, _, err = run("verify", CORPUS / f"{name}.c")
    assert code == EXIT_FAILED and obligation in err
    assert err.startswith(f"{CORPUS / name}.c:5:")
    code, out, _ = run("run", CORPUS / f"{name}.c")
    assert code == EXIT_STUCK and out.strip() == f"stuck: {reason}"


def test_wrong_post_counterexample():
    code, _, err = run("verify", CORPUS / "wrong_post.c")
    assert code == EXIT_FAILED
    assert "postcondition" in err and "counterexample: s0 = 1" in err


def test_json_report():
    code, out, _ = run("verify", CORPUS / "wrong_post.c", "--format", "json")
    rep = json.loads(out)
    assert code == EXIT_FAILED and rep["status"] == "failed" and rep["failure"]["model"] == {"s0": 1}
    code, out, _ = run("verify", CORPUS / "max2.c", "--format", "json", "--trace")
    rep = json.loads(out)
    assert rep["status"] == "verified" and rep["steps"] == len(rep["trace"])


def test_run_countdown():
    code, out, err = run("run", CORPUS / "countdown.c", "--fuel", 500000, "--stats")
    assert code == EXIT_OK and out.strip() == "return 0"
    assert "loop iterations: 32767" in err


def test_run_fuel_exhausted():
    code, out, _ = run("run", CORPUS / "countdown.c", "--fuel", 100)
    assert code == EXIT_FUEL and out.strip() == "fuel exhausted after 100"


def test_run_with_arguments():
    assert run("run", CORPUS / "max2.c", "--arg", "a=3", "--arg", "b=9")[1].strip() == "return 9"
    assert run("run", CORPUS / "max2.c")[0] == EXIT_USAGE
    assert run("run", CORPUS / "max2.c", "--arg", "a=x", "--arg", "b=1")[0] == EXIT_USAGE


def test_usage_errors(tmp_path):
    assert run("verify", tmp_path / "missing.c")[0] == EXIT_USAGE
    assert run("run", CORPUS / "countdown.c", "--fuel", 0)[0] == EXIT_USAGE
    assert run()[0] == EXIT_USAGE
    bad = tmp_path / "bad.c"
    bad.write_text("int main() { for(;;) {} }")
    code, _, err = run("verify", bad)
    assert code == EXIT_USAGE and "error:" in err


def test_check_rejects_tampered(tmp_path):
    cert = tmp_path / "c.vfxcert"
    run("verify", CORPUS / "countdown.c", "--emit-cert", cert)
    data = json.loads(cert.read_text())
    data["proof"].pop()
    cert.write_text(json.dumps(data))
    code, _, err = run("check", cert)
    assert code == EXIT_REJECTED and "digest" in err
    cert.write_text("not json at all")
    assert run("check", cert)[0] == EXIT_REJECTED


def test_sep_outputs():
    code, out, _ = run("sep", CORPUS / "countdown.c", "--canonical")
    assert code == EXIT_OK and out.startswith("(=> true (/\\ (holds (<= 0 32767))")
    code, out, _ = run("sep", CORPUS / "countdown.c")
    assert "∀ s0: Z" in out


def test_color_always(monkeypatch):
    monkeypatch.setenv("VFX_COLOR", "always")
    _, _, err = run("verify", CORPUS / "overflow.c")
    assert "\033[" in err


def test_module_entry_point():
    p = subprocess.run(
        [sys.executable, "-m", "vfx", "verify", str(CORPUS / "countdown.c")], capture_output=True, text=True
    )
    assert p.returncode == 0 and p.stdout.strip() == SUCCESS
