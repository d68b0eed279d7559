"""Abstract syntax of the exported C subset (expressions, statements, functions).

Nodes are immutable dataclasses compared structurally.  The parser may attach a
source position to a node with :func:`with_loc`; positions never take part in
equality or hashing.

The canonical text form is a prefix S-expression, e.g.::

    (func (args) true (let x (int 1) (seq (return (var x)) skip)) true)

and ``loads(dumps(node)) == node`` holds for every node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESULT = "result"


class Node:
    loc: tuple[int, int] | None = None


def with_loc(node, line: int, col: int):
    object.__setattr__(node, "loc", (line, col))
    return node


# -- expressions --------------------------------------------------------------


class Expr(Node):
    pass


@dataclass(frozen=True)
class TrueE(Expr):
    pass


@dataclass(frozen=True)
class FalseE(Expr):
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class BinExpr(Expr):
    l: Expr
    r: Expr


class Add(BinExpr):
    pass


class Sub(BinExpr):
    pass


class Div(BinExpr):
    pass


class Lt(BinExpr):
    pass


class Le(BinExpr):
    pass


class EqE(BinExpr):
    pass


class Ne(BinExpr):
    pass


class AndB(BinExpr):
    pass


class OrB(BinExpr):
    pass


@dataclass(frozen=True)
class NotB(Expr):
    e: Expr


@dataclass(frozen=True)
class Assign(Expr):
    target: str
    rhs: Expr


ARITH_OPS = (Add, Sub, Div)
CMP_OPS = (Lt, Le, EqE, Ne)
LOGIC_OPS = (AndB, OrB)


# -- statements ---------------------------------------------------------------


class Stmt(Node):
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Seq(Stmt):
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class Let(Stmt):
    name: str
    init: Expr
    body: Stmt


@dataclass(frozen=True)
class ExprStmt(Stmt):
    e: Expr


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then_s: Stmt
    else_s: Stmt


@dataclass(frozen=True)
class Return(Stmt):
    e: Expr


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    invariant: Expr
    body: Stmt


@dataclass(frozen=True)
class Block(Stmt):
    inner: Stmt


@dataclass(frozen=True)
class Func:
    args: tuple[str, ...]
    pre: Expr
    body: Stmt
    post: Expr

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


AstNode = Union[Expr, Stmt, Func]


def seq_list(*stmts: Stmt) -> Stmt:
    """Right-nested ``Seq`` chain terminated by ``Skip``."""
    out: Stmt = Skip()
    for s in reversed(stmts):
        out = Seq(s, out)
    return out


# -- analyses -----------------------------------------------------------------


def sub_exprs(e: Expr) -> Iterator[Expr]:
    """Pre-order walk of an expression tree."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, BinExpr):
            stack.append(node.r)
            stack.append(node.l)
        elif isinstance(node, NotB):
            stack.append(node.e)
        elif isinstance(node, Assign):
            stack.append(node.rhs)


def free_targets(s: Stmt) -> list[str]:
    """Names assigned somewhere in ``s`` that are not bound by an enclosing ``Let``.

    First-occurrence order, no duplicates.
    """
    out: list[str] = []

    def on_expr(e: Expr, bound: frozenset[str]) -> None:
        for node in sub_exprs(e):
            if isinstance(node, Assign) and node.target not in bound and node.target not in out:
                out.append(node.target)

    def walk(s: Stmt, bound: frozenset[str]) -> None:
        match s:
            case Skip():
                pass
            case Seq(a, b):
                walk(a, bound)
                walk(b, bound)
            case Let(x, init, body):
                on_expr(init, bound)
                walk(body, bound | {x})
            case ExprStmt(e) | Return(e):
                on_expr(e, bound)
            case If(c, a, b):
                on_expr(c, bound)
                walk(a, bound)
                walk(b, bound)
            case While(c, inv, body):
                on_expr(c, bound)
                on_expr(inv, bound)
                walk(body, bound)
            case Block(inner):
                walk(inner, bound)
            case _:
                raise TypeError(f"not a statement: {s!r}")

    walk(s, frozenset())
    return out


@dataclass(frozen=True)
class Diagnostic:
    code: str
    name: str
    loc: tuple[int, int] | None = None

    def __str__(self) -> str:
        return f'{self.code} "{self.name}"'


def well_formed(f: Func) -> list[Diagnostic]:
    """Scoping pre-check; an empty list means the function is well formed."""
    diags: list[Diagnostic] = []
    seen: set[tuple[str, str]] = set()

    def report(code: str, name: str, node=None) -> None:
        if (code, name) not in seen:
            seen.add((code, name))
            diags.append(Diagnostic(code, name, getattr(node, "loc", None)))

    names: set[str] = set()
    for a in f.args:
        if a in names:
            report("duplicate-arg", a)
        names.add(a)
        if a == RESULT:
            report("reserved-arg", a)

    def check_expr(e: Expr, scope: frozenset[str]) -> None:
        for node in sub_exprs(e):
            if isinstance(node, Var) and node.name not in scope:
                report("unbound-identifier", node.name, node)
            elif isinstance(node, Assign) and node.target not in scope:
                report("unbound-identifier", node.target, node)

    def walk(s: Stmt, scope: frozenset[str]) -> None:
        match s:
            case Seq(a, b):
                walk(a, scope)
                walk(b, scope)
            case Let(x, init, body):
                check_expr(init, scope)
                walk(body, scope | {x})
            case ExprStmt(e) | Return(e):
                check_expr(e, scope)
            case If(c, a, b):
                check_expr(c, scope)
                walk(a, scope)
                walk(b, scope)
            case While(c, inv, body):
                check_expr(c, scope)
                check_expr(inv, scope)
                walk(body, scope)
            case Block(inner):
                walk(inner, scope)

    arg_scope = frozenset(f.args)
    check_expr(f.pre, arg_scope)
    walk(f.body, arg_scope)
    check_expr(f.post, arg_scope | {RESULT})
    return diags


# -- canonical text form ------------------------------------------------------

_EXPR_TAGS = {
    Add: "add", Sub: "sub", Div: "div",
    Lt: "lt", Le: "le", EqE: "eq", Ne: "ne",
    AndB: "and", OrB: "or",
}
_TAG_EXPRS = {v: k for k, v in _EXPR_TAGS.items()}


def dumps(node: AstNode) -> str:
    """Canonical S-expression text for an expression, statement or function."""
    parts: list[str] = []
    _emit(node, parts)
    return "".join(parts)


def _emit(node, out: list[str]) -> None:
    match node:
        case TrueE():
            out.append("true")
        case FalseE():
            out.append("false")
        case IntLit(v):
            out.append(f"(int {v})")
        case Var(x):
            out.append(f"(var {x})")
        case BinExpr(l, r):
            out.append(f"({_EXPR_TAGS[type(node)]} ")
            _emit(l, out)
            out.append(" ")
            _emit(r, out)
            out.append(")")
        case NotB(e):
            out.append("(not ")
            _emit(e, out)
            out.append(")")
        case Assign(x, rhs):
            out.append(f"(assign {x} ")
            _emit(rhs, out)
            out.append(")")
        case Skip():
            out.append("skip")
        case Seq(a, b):
            out.append("(seq ")
            _emit(a, out)
            out.append(" ")
            _emit(b, out)
            out.append(")")
        case Let(x, init, body):
            out.append(f"(let {x} ")
            _emit(init, out)
            out.append(" ")
            _emit(body, out)
            out.append(")")
        case ExprStmt(e):
            out.append("(expr ")
            _emit(e, out)
            out.append(")")
        case If(c, a, b):
            out.append("(if ")
            for i, part in enumerate((c, a, b)):
                if i:
                    out.append(" ")
                _emit(part, out)
            out.append(")")
        case Return(e):
            out.append("(return ")
            _emit(e, out)
            out.append(")")
        case While(c, inv, body):
            out.append("(while ")
            for i, part in enumerate((c, inv, body)):
                if i:
                    out.append(" ")
                _emit(part, out)
            out.append(")")
        case Block(inner):
            out.append("(block ")
            _emit(inner, out)
            out.append(")")
        case Func(args, pre, body, post):
            out.append("(func (args" + "".join(" " + a for a in args) + ") ")
            _emit(pre, out)
            out.append(" ")
            _emit(body, out)
            out.append(" ")
            _emit(post, out)
            out.append(")")
        case _:
            raise TypeError(f"cannot serialize {node!r}")


class SexprError(ValueError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _read(text: str):
    """Tokenize and build nested lists of atoms."""
    stack: list[list] = [[]]
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SexprError(f"unexpected character at offset {pos}")
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise SexprError(f"unbalanced ')' at offset {m.start(2)}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(m.group(3))
    if len(stack) != 1:
        raise SexprError("unbalanced '('")
    if len(stack[0]) != 1:
        raise SexprError("expected exactly one top-level form")
    return stack[0][0]


def _ident(tok) -> str:
    if not isinstance(tok, str) or not IDENT_RE.match(tok):
        raise SexprError(f"bad identifier {tok!r}")
    return tok


def _arity(form: list, n: int) -> None:
    if len(form) != n + 1:
        raise SexprError(f"'{form[0]}' expects {n} operands, got {len(form) - 1}")


def _expr(form) -> Expr:
    if form == "true":
        return TrueE()
    if form == "false":
        return FalseE()
    if not isinstance(form, list) or not form or not isinstance(form[0], str):
        raise SexprError(f"bad expression {form!r}")
    tag = form[0]
    if tag == "int":
        _arity(form, 1)
        try:
            return IntLit(int(form[1]))
        except (TypeError, ValueError):
            raise SexprError(f"bad integer {form[1]!r}") from None
    if tag == "var":
        _arity(form, 1)
        return Var(_ident(form[1]))
    if tag in _TAG_EXPRS:
        _arity(form, 2)
        return _TAG_EXPRS[tag](_expr(form[1]), _expr(form[2]))
    if tag == "not":
        _arity(form, 1)
        return NotB(_expr(form[1]))
    if tag == "assign":
        _arity(form, 2)
        return Assign(_ident(form[1]), _expr(form[2]))
    raise SexprError(f"unknown expression tag {tag!r}")


def _stmt(form) -> Stmt:
    if form == "skip":
        return Skip()
    if not isinstance(form, list) or not form or not isinstance(form[0], str):
        raise SexprError(f"bad statement {form!r}")
    tag = form[0]
    if tag == "seq":
        _arity(form, 2)
        return Seq(_stmt(form[1]), _stmt(form[2]))
    if tag == "let":
        _arity(form, 3)
        return Let(_ident(form[1]), _expr(form[2]), _stmt(form[3]))
    if tag == "expr":
        _arity(form, 1)
        return ExprStmt(_expr(form[1]))
    if tag == "if":
        _arity(form, 3)
        return If(_expr(form[1]), _stmt(form[2]), _stmt(form[3]))
    if tag == "return":
        _arity(form, 1)
        return Return(_expr(form[1]))
    if tag == "while":
        _arity(form, 3)
        return While(_expr(form[1]), _expr(form[2]), _stmt(form[3]))
    if tag == "block":
        _arity(form, 1)
        return Block(_stmt(form[1]))
    raise SexprError(f"unknown statement tag {tag!r}")


def _func(form) -> Func:
    if not isinstance(form, list) or not form or form[0] != "func":
        raise SexprError("expected (func ...)")
    _arity(form, 4)
    args = form[1]
    if not isinstance(args, list) or not args or args[0] != "args":
        raise SexprError("expected (args ...)")
    return Func(tuple(_ident(a) for a in args[1:]), _expr(form[2]), _stmt(form[3]), _expr(form[4]))


def loads(text: str, kind: str = "func") -> AstNode:
    """Parse canonical text; ``kind`` is one of ``func``, ``stmt``, ``expr``."""
    form = _read(text)
    if kind == "func":
        return _func(form)
    if kind == "stmt":
        return _stmt(form)
    if kind == "expr":
        return _expr(form)
    raise ValueError(f"unknown kind {kind!r}")
