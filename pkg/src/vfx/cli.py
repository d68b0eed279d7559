"""Command-line front end: ``vfx verify | check | run | sep``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from . import cx_ast as A
from .arith import Failed, prove_sep
from .cbsem import ExecStats, FuelExhausted, Returned, Stuck, Terminated, exec_stmt, run_program
from .certificate import Certificate, check, emit
from .parser import ParseError, SourceProgram, parse_program
from .store import Store, is_int
from .symexec import canonical, pretty, prop_str, sym_exec_func
from .transforms import programify, simplify

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_STUCK = 3
EXIT_FUEL = 4
EXIT_REJECTED = 5

SUCCESS = "verified: 0 errors found"


class _Out:
    def __init__(self, stdout, stderr):
        self.stdout = stdout
        self.stderr = stderr
        mode = os.environ.get("VFX_COLOR", "auto")
        if mode == "always":
            self.color = True
        elif mode == "never":
            self.color = False
        else:
            self.color = hasattr(stderr, "isatty") and stderr.isatty()

    def paint(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.color else text

    def out(self, text: str = "") -> None:
        print(text, file=self.stdout)

    def err(self, text: str) -> None:
        print(text, file=self.stderr)

    def error(self, where: str, msg: str) -> None:
        self.err(f"{where}: {self.paint('error:', '1;31')} {msg}")


class _UsageError(Exception):
    pass


def _load(path: str) -> SourceProgram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e.strerror}") from None
    return SourceProgram(text, path)


def _where(path: str, loc) -> str:
    return f"{path}:{loc[0]}:{loc[1]}" if loc else path


def _warn_scoping(o: _Out, path: str, f: A.Func) -> list[str]:
    notes = []
    for d in A.well_formed(f):
        msg = f"{_where(path, d.loc)}: {o.paint('warning:', '1;33')} {d}"
        notes.append(str(d))
        o.err(msg)
    return notes


def cmd_verify(args, o: _Out) -> int:
    src = _load(args.file)
    f = parse_program(src)
    warnings = _warn_scoping(o, src.path, f)
    result = prove_sep(sym_exec_func(f))
    report: dict = {"file": src.path, "warnings": warnings}
    if isinstance(result, Failed):
        leaf = result.leaf
        loc = getattr(leaf, "loc", None)
        detail = result.reason
        if leaf is not None and hasattr(leaf, "p"):
            detail += f": {prop_str(leaf.p)}"
        model = result.model
        if args.format == "json":
            report.update(
                status="failed",
                errors=1,
                failure={
                    "reason": result.reason,
                    "obligation": prop_str(leaf.p) if leaf is not None and hasattr(leaf, "p") else None,
                    "line": loc[0] if loc else None,
                    "column": loc[1] if loc else None,
                    "leaf": result.leaf_index,
                    "path": list(result.path),
                    "model": None if model is None else {f"s{k}": v for k, v in model.items()},
                },
            )
            o.out(json.dumps(report))
        else:
            o.error(_where(src.path, loc), f"verification failed: {detail}")
            if model is not None:
                shown = ", ".join(f"s{k} = {v}" for k, v in model.items()) or "any values"
                o.err(f"  counterexample: {shown}")
            o.err("verification failed: 1 error found")
        return EXIT_FAILED
    steps = [str(s) for s in result.trace]
    if args.emit_cert:
        cert = emit(f, result.trace, src)
        Path(args.emit_cert).write_text(cert.to_json(), encoding="utf-8")
    if args.format == "json":
        report.update(status="verified", errors=0, steps=len(steps))
        if args.trace:
            report["trace"] = steps
        if args.emit_cert:
            report["certificate"] = args.emit_cert
        o.out(json.dumps(report))
    else:
        if args.trace:
            for s in steps:
                o.out(s)
        o.out(o.paint(SUCCESS, "32") if o.color and o.stdout.isatty() else SUCCESS)
    return EXIT_OK


def cmd_check(args, o: _Out) -> int:
    try:
        text = Path(args.cert).read_text(encoding="utf-8")
    except OSError as e:
        raise _UsageError(f"cannot read {args.cert}: {e.strerror}") from None
    try:
        cert = Certificate.from_json(text)
    except ValueError as e:
        o.error(args.cert, f"certificate rejected: {e}")
        return EXIT_REJECTED
    source = _load(args.source) if args.source else None
    verdict = check(cert, source)
    if hasattr(verdict, "reason"):
        o.error(args.cert, f"certificate rejected: {verdict}")
        return EXIT_REJECTED
    o.out(f"accepted: {verdict.steps} proof steps replayed")
    return EXIT_OK


def _parse_bindings(pairs: list[str], f: A.Func) -> dict[str, int]:
    out = {}
    for item in pairs:
        name, sep, value = item.partition("=")
        try:
            z = int(value)
        except ValueError:
            z = None
        if not sep or z is None or not is_int(z):
            raise _UsageError(f"bad --arg {item!r}; expected NAME=INT")
        out[name] = z
    if set(out) != set(f.args):
        raise _UsageError(f"function takes ({', '.join(f.args)}); give each with --arg NAME=INT")
    return out


def cmd_run(args, o: _Out) -> int:
    if args.fuel <= 0:
        raise _UsageError("--fuel must be positive")
    src = _load(args.file)
    f = parse_program(src)
    stats = ExecStats()
    if f.args or args.arg:
        inputs = _parse_bindings(args.arg or [], f)
        res = exec_stmt(Store(inputs), programify(simplify(f.body)), args.fuel, stats)
    else:
        res = run_program(f.body, args.fuel, stats)
    match res:
        case Terminated(_, Returned(z)):
            o.out(f"return {z}")
            code = EXIT_OK
        case Terminated():
            o.out("return (none)")  # unreachable after programify
            code = EXIT_OK
        case Stuck(reason, loc):
            o.out(f"stuck: {reason.value}")
            if loc:
                o.err(f"{_where(src.path, loc)}: note: execution got stuck here")
            code = EXIT_STUCK
        case FuelExhausted():
            o.out(f"fuel exhausted after {args.fuel}")
            code = EXIT_FUEL
    if args.stats:
        o.err(f"loop iterations: {stats.iterations}")
    return code


def cmd_sep(args, o: _Out) -> int:
    src = _load(args.file)
    f = parse_program(src)
    sep = sym_exec_func(f)
    o.out(canonical(sep) if args.canonical else pretty(sep))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vfx", description="Certifying verifier for annotated C functions.")
    p.add_argument("--version", action="version", version=f"vfx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a function and optionally write a certificate")
    v.add_argument("file")
    v.add_argument("--emit-cert", metavar="PATH")
    v.add_argument("--trace", action="store_true", help="print one line per proof step")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check", help="re-check a certificate independently")
    c.add_argument("cert")
    c.add_argument("--source", metavar="FILE")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="execute with the reference interpreter")
    r.add_argument("file")
    r.add_argument("--fuel", type=int, default=1_000_000)
    r.add_argument("--arg", action="append", metavar="NAME=INT")
    r.add_argument("--stats", action="store_true", help="report loop iterations on stderr")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sep", help="print the symbolic execution proposition")
    s.add_argument("file")
    s.add_argument("--canonical", action="store_true", help="single-line prefix form")
    s.set_defaults(func=cmd_sep)
    return p


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    o = _Out(stdout or sys.stdout, stderr or sys.stderr)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, o)
    except ParseError as e:
        o.error(f"{e.path}:{e.line}:{e.col}", e.message)
        return EXIT_USAGE
    except _UsageError as e:
        o.err(f"vfx: {o.paint('error:', '1;31')} {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
