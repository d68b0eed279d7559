"""Rebuilds the SEP from a serialized function, as plain tuples.

This module reads the canonical S-expression text itself and shares no code
with the verifier's front end or builder.

Terms:  ("c", z) ("s", i) ("+", a, b) ("-", a, b) ("/", a, b)
Props:  ("tt",) ("ff",) (rel, a, b) for rel in < <= = !=, ("not", p) ("and", p, q) ("or", p, q)
Seps:   ("forall", i, rest) ("imp", p, rest) ("conj", l, r) ("holds", p) ("true",) ("false",)
"""

from __future__ import annotations

import re

LO = -(2**31)
HI = 2**31 - 1
TRUE = ("true",)
FALSE = ("false",)

_TOK = re.compile(r"\s*(\(|\)|[^\s()]+)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FormatError(ValueError):
    pass


def read(text: str):
    pos, out = 0, []
    stack = [out]
    text = text.strip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m is None:
            raise FormatError("unreadable function text")
        pos = m.end()
        tok = m.group(1)
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) < 2:
                raise FormatError("unbalanced parentheses")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1 or len(out) != 1:
        raise FormatError("function text must be exactly one form")
    return out[0]


_EXPR_ARITY = {
    "int": 1, "var": 1, "add": 2, "sub": 2, "div": 2, "lt": 2, "le": 2, "eq": 2, "ne": 2,
    "and": 2, "or": 2, "not": 1, "assign": 2,
}
_STMT_ARITY = {"seq": 2, "let": 3, "expr": 1, "if": 3, "return": 1, "while": 3, "block": 1}


def _check_expr(e) -> None:
    if e in ("true", "false"):
        return
    if not isinstance(e, list) or not e or e[0] not in _EXPR_ARITY or len(e) != _EXPR_ARITY[e[0]] + 1:
        raise FormatError(f"malformed expression {e!r}")
    tag = e[0]
    if tag == "int":
        if not isinstance(e[1], str) or not re.fullmatch(r"-?\d+", e[1]):
            raise FormatError(f"malformed integer {e[1]!r}")
    elif tag in ("var", "assign"):
        if not isinstance(e[1], str) or not _NAME.match(e[1]):
            raise FormatError(f"malformed name {e[1]!r}")
        if tag == "assign":
            _check_expr(e[2])
    else:
        for sub in e[1:]:
            _check_expr(sub)


def _check_stmt(s) -> None:
    if s == "skip":
        return
    if not isinstance(s, list) or not s or s[0] not in _STMT_ARITY or len(s) != _STMT_ARITY[s[0]] + 1:
        raise FormatError(f"malformed statement {s!r}")
    tag = s[0]
    if tag == "seq":
        _check_stmt(s[1])
        _check_stmt(s[2])
    elif tag == "let":
        if not isinstance(s[1], str) or not _NAME.match(s[1]):
            raise FormatError(f"malformed name {s[1]!r}")
        _check_expr(s[2])
        _check_stmt(s[3])
    elif tag in ("expr", "return"):
        _check_expr(s[1])
    elif tag in ("if", "while"):
        _check_expr(s[1])
        if tag == "if":
            _check_stmt(s[2])
        else:
            _check_expr(s[2])
        _check_stmt(s[3])
    else:
        _check_stmt(s[1])


def read_func(text: str):
    """Returns (args, pre, body, post) as nested lists."""
    f = read(text)
    if not isinstance(f, list) or len(f) != 5 or f[0] != "func":
        raise FormatError("expected (func (args ...) pre body post)")
    args = f[1]
    if not isinstance(args, list) or not args or args[0] != "args":
        raise FormatError("expected (args ...)")
    names = args[1:]
    for a in names:
        if not isinstance(a, str) or not _NAME.match(a):
            raise FormatError(f"malformed argument {a!r}")
    _check_expr(f[2])
    _check_stmt(f[3])
    _check_expr(f[4])
    return names, f[2], f[3], f[4]


def assigned(s, bound=frozenset()) -> list[str]:
    """Assignment targets of s not bound by an enclosing let, in first-seen order."""
    found: list[str] = []

    def exprs(e, bnd):
        if isinstance(e, list):
            if e[0] == "assign":
                if e[1] not in bnd and e[1] not in found:
                    found.append(e[1])
                exprs(e[2], bnd)
            elif e[0] not in ("int", "var"):
                for sub in e[1:]:
                    exprs(sub, bnd)

    def stmts(s, bnd):
        if s == "skip":
            return
        tag = s[0]
        if tag == "seq":
            stmts(s[1], bnd)
            stmts(s[2], bnd)
        elif tag == "let":
            exprs(s[2], bnd)
            stmts(s[3], bnd | {s[1]})
        elif tag in ("expr", "return"):
            exprs(s[1], bnd)
        elif tag == "if":
            exprs(s[1], bnd)
            stmts(s[2], bnd)
            stmts(s[3], bnd)
        elif tag == "while":
            exprs(s[1], bnd)
            exprs(s[2], bnd)
            stmts(s[3], bnd)
        elif tag == "block":
            stmts(s[1], bnd)

    stmts(s, bound)
    return found


def _without(env: dict, name: str) -> dict:
    return {k: v for k, v in env.items() if k != name}


_ARITH = {"add": "+", "sub": "-"}
_CMP = {"lt": "<", "le": "<=", "eq": "=", "ne": "!="}


class Builder:
    def __init__(self):
        self.counter = 0

    def value(self, e, env, k):
        if not isinstance(e, list):
            return FALSE
        tag = e[0]
        if tag == "int":
            v = int(e[1])
            return k(("c", v), env) if LO <= v <= HI else FALSE
        if tag == "var":
            return k(env[e[1]], env) if e[1] in env else FALSE
        if tag in _ARITH:
            def second(a, env1):
                def done(b, env2):
                    t = (_ARITH[tag], a, b)
                    return ("conj", ("holds", ("<=", ("c", LO), t)),
                            ("conj", ("holds", ("<=", t, ("c", HI))), k(t, env2)))
                return self.value(e[2], env1, done)
            return self.value(e[1], env, second)
        if tag == "div":
            def second(a, env1):
                def done(b, env2):
                    return ("conj", ("holds", ("!=", b, ("c", 0))),
                            ("conj", ("holds", ("or", ("!=", a, ("c", LO)), ("!=", b, ("c", -1)))),
                             k(("/", a, b), env2)))
                return self.value(e[2], env1, done)
            return self.value(e[1], env, second)
        return FALSE

    def cond(self, e, env, k):
        if e == "true":
            return k(("tt",), env)
        if e == "false":
            return k(("ff",), env)
        tag = e[0]
        if tag in _CMP:
            return self.value(e[1], env, lambda a, env1: self.value(e[2], env1, lambda b, env2: k((_CMP[tag], a, b), env2)))
        if tag in ("and", "or"):
            return self.cond(e[1], env, lambda p, env1: self.cond(e[2], env1, lambda q, env2: k((tag, p, q), env2)))
        if tag == "not":
            return self.cond(e[1], env, lambda p, env1: k(("not", p), env1))
        return FALSE

    def term(self, e, env):
        if not isinstance(e, list):
            return None
        tag = e[0]
        if tag == "int":
            return ("c", int(e[1]))
        if tag == "var":
            return env.get(e[1])
        if tag in ("add", "sub", "div"):
            a, b = self.term(e[1], env), self.term(e[2], env)
            if a is None or b is None:
                return None
            return ({"add": "+", "sub": "-", "div": "/"}[tag], a, b)
        return None

    def formula(self, e, env):
        if e == "true":
            return ("tt",)
        if e == "false":
            return ("ff",)
        tag = e[0]
        if tag in _CMP:
            a, b = self.term(e[1], env), self.term(e[2], env)
            return None if a is None or b is None else (_CMP[tag], a, b)
        if tag in ("and", "or"):
            p, q = self.formula(e[1], env), self.formula(e[2], env)
            return None if p is None or q is None else (tag, p, q)
        if tag == "not":
            p = self.formula(e[1], env)
            return None if p is None else ("not", p)
        return None

    def assume(self, e, env, k):
        p = self.formula(e, env)
        return FALSE if p is None else ("imp", p, k(env))

    def demand(self, e, env, k):
        p = self.formula(e, env)
        return FALSE if p is None else ("conj", ("holds", p), k(env))

    def quantify(self, names, env, k):
        if not names:
            return k(env)
        i = self.counter
        self.counter += 1
        s = ("s", i)
        inner = self.quantify(names[1:], {**env, names[0]: s}, k)
        return ("forall", i, ("imp", ("and", ("<=", ("c", LO), s), ("<=", s, ("c", HI))), inner))

    def stmt(self, s, env, normal, ret):
        if s == "skip":
            return normal(env)
        tag = s[0]
        if tag == "seq":
            return self.stmt(s[1], env, lambda env1: self.stmt(s[2], env1, normal, ret), ret)
        if tag == "return":
            return self.value(s[1], env, ret)
        if tag == "block":
            return self.stmt(s[1], env, normal, ret)
        if tag == "let":
            x = s[1]
            if x in env:
                return FALSE
            return self.value(
                s[2], env,
                lambda t, env1: self.stmt(
                    s[3], {**env1, x: t},
                    lambda env2: normal(_without(env2, x)),
                    lambda z, env2: ret(z, _without(env2, x)),
                ),
            )
        if tag == "expr":
            e = s[1]
            if isinstance(e, list) and e[0] == "assign":
                return self.value(e[2], env, lambda t, env1: normal({**env1, e[1]: t}))
            return FALSE
        if tag == "if":
            return self.cond(
                s[1], env,
                lambda p, env1: ("conj",
                                 ("imp", p, self.stmt(s[2], env1, normal, ret)),
                                 ("imp", ("not", p), self.stmt(s[3], env1, normal, ret))),
            )
        if tag == "while":
            c, inv, body = s[1], s[2], s[3]
            targets = assigned(body)

            def head(env0):
                if any(x not in env0 for x in targets):
                    return FALSE
                return self.quantify(targets, env0, lambda env1: self.assume(inv, env1, lambda env2: self.cond(
                    c, env2,
                    lambda p, env3: ("conj",
                                     ("imp", p, self.stmt(body, env3, lambda env4: self.demand(inv, env4, lambda _e: TRUE), ret)),
                                     ("imp", ("not", p), normal(env3))),
                )))

            return self.demand(inv, env, head)
        return FALSE


def build(func_text: str):
    """SEP of a serialized function."""
    args, pre, body, post = read_func(func_text)
    b = Builder()

    def after_pre(env):
        def ret(z, _env):
            return b.demand(post, {**env, "result": z}, lambda _e: TRUE)

        return b.stmt(body, env, lambda _e: FALSE, ret)

    return b.quantify(list(args), {}, lambda env: b.assume(pre, env, after_pre))
