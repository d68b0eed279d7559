import ast
import copy
import json
from pathlib import Path

import pytest

import vfx.checker

from vfx import cx_ast as A
from vfx.arith import Verified, prove_sep
from vfx.certificate import FORMAT_VERSION, Certificate, check, emit, seal, source_digest
from vfx.checker import Accepted, Rejected, check_proof
from vfx.parser import SourceProgram, parse_program
from vfx.symexec import sym_exec_func

from conftest import CORPUS, VERIFIED
from tamper import mutated_certs

CHECKER = Path(vfx.checker.__file__).parent


def certify(name):
    src = SourceProgram((CORPUS / f"{name}.c").read_text(), f"{name}.c")
    f = parse_program(src)
    r = prove_sep(sym_exec_func(f))
    assert isinstance(r, Verified)
    return emit(f, r.trace, src, timestamp="2026-01-01T00:00:00+00:00"), src


def test_countdown_proof_uses_three_tactics():
    cert, _ = certify("countdown")
    assert {p.split()[0] for p in cert.proof} == {"intro", "split", "arith"}


def test_trivial_function_proof():
    f = A.Func((), A.TrueE(), A.Seq(A.Return(A.IntLit(0)), A.Skip()), A.TrueE())
    r = prove_sep(sym_exec_func(f))
    cert = emit(f, r.trace)
    assert cert.proof == ["intro", "split", "arith 0 ok", "arith 1 ok"]
    assert check(cert) == Accepted(4)


def test_emission_is_deterministic():
    a, _ = certify("countdown")
    b, _ = certify("countdown")
    assert (a.format_version, a.source_digest, a.func, a.proof, a.digest) == (
        b.format_version, b.source_digest, b.func, b.proof, b.digest,
    )


def test_json_round_trip():
    cert, src = certify("countdown")
    back = Certificate.from_json(cert.to_json())
    assert back == cert
    assert list(json.loads(cert.to_json())) == ["format_version", "source_digest", "func", "proof", "digest", "metadata"]
    assert isinstance(check(back, src), Accepted)


@pytest.mark.parametrize("name", VERIFIED)
def test_corpus_certificates_accepted(name):
    cert, src = certify(name)
    assert isinstance(check(cert, src), Accepted)
    assert isinstance(check(cert), Accepted)


def test_deleted_step_rejected():
    cert, src = certify("countdown")
    last = max(i for i, p in enumerate(cert.proof) if p.startswith("arith"))
    cert.proof = cert.proof[:last] + cert.proof[last + 1:]
    verdict = check(cert.resealed(), src)
    assert isinstance(verdict, Rejected) and "open goals" in verdict.reason


def test_unsealed_edit_rejected():
    cert, src = certify("countdown")
    cert.proof = cert.proof[:-1]
    assert "digest" in check(cert, src).reason


def test_wrong_post_source_rejected():
    cert, src = certify("countdown")
    other = SourceProgram(src.text.replace("result == 0", "result == 1"), src.path)
    assert "source digest" in check(cert, other).reason
    cert.source_digest = source_digest(other.text)
    assert "AST mismatch" in check(cert.resealed(), other).reason


def test_forged_post_fails_replay():
    cert, _ = certify("countdown")
    cert.func = cert.func.replace("(eq (var result) (int 0))", "(eq (var result) (int 1))")
    verdict = check(cert.resealed())
    assert isinstance(verdict, Rejected) and verdict.step is not None


def test_version_and_shape_checks():
    cert, _ = certify("countdown")
    bad = copy.deepcopy(cert)
    bad.format_version = FORMAT_VERSION + 1
    assert "version" in check(bad).reason
    with pytest.raises(ValueError):
        Certificate.from_json("[]")
    with pytest.raises(ValueError):
        Certificate.from_json('{"func": "x"}')


def test_checker_rejects_malformed_func():
    assert isinstance(check_proof("(func", []), Rejected)
    assert isinstance(check_proof("(func (args) true (seq (return (int 0)) skip) true)", ["bogus"]), Rejected)


def test_seal_covers_fields():
    a = seal(1, None, "f", ["intro"])
    assert a != seal(1, None, "f", ["split"]) and a != seal(1, "00", "f", ["intro"])


@pytest.mark.parametrize("name", ["countdown", "early_exit", "max2"])
def test_mutations_rejected(name):
    cert, src = certify(name)
    muts = mutated_certs(cert)
    assert len(muts) > 20
    accepted = [label for label, c in muts if not isinstance(check(c, src), Rejected)]
    assert accepted == []


def test_checker_is_independent_of_verifier():
    banned = {"vfx.symexec", "vfx.arith", "vfx.cbsem", "vfx.transforms", "vfx.parser", "vfx.cx_ast", "vfx.store"}
    for path in CHECKER.glob("*.py"):
        tree = ast.parse(path.read_text())
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom):
                mod = ("." * node.level) + (node.module or "")
                assert node.level <= 1, f"{path.name} reaches outside the checker: {mod}"
                assert node.module not in banned, mod
            elif isinstance(node, ast.Import):
                for alias in node.names:
                    assert not alias.name.startswith("vfx") or alias.name.startswith("vfx.checker"), alias.name


def test_checker_survives_broken_verifier_solver(monkeypatch):
    # corrupt the verifier's decision procedure: the checker must still reject a false proof
    import vfx.arith as arith

    monkeypatch.setattr(arith, "entails", lambda ctx, goal: arith.YES)
    f = parse_program((CORPUS / "wrong_post.c").read_text())
    r = arith.prove_sep(sym_exec_func(f))
    assert isinstance(r, Verified)
    assert isinstance(check(emit(f, r.trace)), Rejected)
