"""Parser for the annotated C subset, lowering straight to the Cx syntax.

Lowering rules:

* ``int x = e; rest``      ->  ``Let(x, e, lower(rest))``
* ``s1; ...; sn``          ->  ``Seq(s1, Seq(..., Seq(sn, Skip)))``
* ``{ ... }``              ->  ``Block(lower(...))``
* ``while (c) //@ invariant i; { b }``  ->  ``While(c, i, Seq(Block(lower(b)), Skip))``

Annotations are written ``//@ clause;`` or ``/*@ clause; ... @*/``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from . import cx_ast as A
from .store import MAX_SIGNED, MIN_SIGNED


@dataclass(frozen=True)
class SourceProgram:
    text: str
    path: str = "<input>"


class ParseError(Exception):
    def __init__(self, path: str, line: int, col: int, message: str):
        super().__init__(f"{path}:{line}:{col}: error: {message}")
        self.path = path
        self.line = line
        self.col = col
        self.message = message


class Token(NamedTuple):
    kind: str  # int | ident | op | ann_start | ann_end | eof
    value: str
    line: int
    col: int


_OPS = (
    "<<=", ">>=",
    "&&", "||", "<=", ">=", "==", "!=", "++", "--", "+=", "-=", "*=", "/=", "%=", "->", "<<", ">>",
    "(", ")", "{", "}", ";", ",", "+", "-", "*", "/", "%", "<", ">", "!", "=", "&", "|", "^", "~",
    "[", "]", "?", ":", ".",
)

_UNSUPPORTED_STMT_KEYWORDS = {
    "for": "for loops", "do": "do-while loops", "break": "break statements",
    "continue": "continue statements", "goto": "goto statements", "switch": "switch statements",
}
_UNSUPPORTED_TYPES = {
    "char", "short", "long", "unsigned", "signed", "float", "double", "void", "struct",
    "union", "enum", "bool", "_Bool", "const", "static", "extern", "typedef",
}


def tokenize(text: str, path: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    in_ann: str | None = None  # "line" or "block"

    def error(msg: str):
        raise ParseError(path, line, col, msg)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch == "\n" and in_ann == "line":
            toks.append(Token("ann_end", "", line, col))
            in_ann = None
            advance(1)
            continue
        if ch.isspace():
            advance(1)
            continue
        if in_ann == "block" and text.startswith("@*/", i):
            toks.append(Token("ann_end", "", line, col))
            in_ann = None
            advance(3)
            continue
        if in_ann == "block" and text.startswith("*/", i):
            toks.append(Token("ann_end", "", line, col))
            in_ann = None
            advance(2)
            continue
        if text.startswith("//@", i) and in_ann is None:
            toks.append(Token("ann_start", "//@", line, col))
            in_ann = "line"
            advance(3)
            continue
        if text.startswith("/*@", i) and in_ann is None:
            toks.append(Token("ann_start", "/*@", line, col))
            in_ann = "block"
            advance(3)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                error("unterminated comment")
            advance(j + 2 - i)
            continue
        if ch == "#":
            error("preprocessor directives are not supported")
        if ch.isdigit():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            lit = text[i:j]
            if not lit.isdigit():
                error(f"unsupported integer literal '{lit}' (decimal only)")
            if len(lit) > 1 and lit[0] == "0":
                error(f"unsupported integer literal '{lit}' (decimal only)")
            toks.append(Token("int", lit, line, col))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            advance(j - i)
            continue
        for op in _OPS:
            if text.startswith(op, i):
                toks.append(Token("op", op, line, col))
                advance(len(op))
                break
        else:
            error(f"unexpected character {ch!r}")
    if in_ann == "line":
        toks.append(Token("ann_end", "", line, col))
    elif in_ann == "block":
        error("unterminated annotation")
    toks.append(Token("eof", "", line, col))
    return toks


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    if tok.kind == "ann_start":
        return "annotation"
    if tok.kind == "ann_end":
        return "end of annotation"
    return f"'{tok.value}'"


class _Parser:
    def __init__(self, toks: list[Token], path: str):
        self.toks = toks
        self.pos = 0
        self.path = path

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(self.path, tok.line, tok.col, msg)

    def next(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def at(self, value: str, kind: str | None = None) -> bool:
        tok = self.tok
        if kind is not None and tok.kind != kind:
            return False
        return tok.value == value and tok.kind in ("op", "ident")

    def accept(self, value: str) -> Token | None:
        if self.at(value):
            return self.next()
        return None

    def expect(self, value: str) -> Token:
        if self.at(value):
            return self.next()
        self.error(f"expected '{value}' but found {_describe(self.tok)}")

    def expect_ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident":
            self.error(f"expected identifier but found {_describe(tok)}")
        return self.next()

    # -- program structure

    def program(self) -> A.Func:
        if self.tok.kind == "eof":
            self.error("expected a function definition")
        func = self.function()
        if self.tok.kind != "eof":
            if self.at("int") or self.tok.value in _UNSUPPORTED_TYPES:
                self.error("multiple function definitions are not supported")
            self.error(f"expected end of input but found {_describe(self.tok)}")
        return func

    def function(self) -> A.Func:
        tok = self.tok
        if tok.kind == "ident" and tok.value in _UNSUPPORTED_TYPES:
            self.error(f"unsupported type '{tok.value}' (only int is supported)")
        self.expect("int")
        if self.at("*"):
            self.error("pointers are not supported")
        self.expect_ident()
        if self.at("=") or self.at(";"):
            self.error("global variables are not supported")
        self.expect("(")
        args: list[str] = []
        if self.at("void") and self.peek().value == ")":
            self.next()
        elif not self.at(")"):
            while True:
                if self.tok.kind == "ident" and self.tok.value in _UNSUPPORTED_TYPES:
                    self.error(f"unsupported parameter type '{self.tok.value}'")
                self.expect("int")
                if self.at("*"):
                    self.error("pointers are not supported")
                args.append(self.expect_ident().value)
                if not self.accept(","):
                    break
        self.expect(")")
        clauses = self.annotations({"requires", "ensures"})
        pre = self._single(clauses, "requires", tok)
        post = self._single(clauses, "ensures", tok)
        self.expect("{")
        body = self.lower(self.statements())
        self.expect("}")
        return A.Func(tuple(args), pre, body, post)

    def _single(self, clauses: list[tuple[str, A.Expr, Token]], kind: str, anchor: Token) -> A.Expr:
        found = [c for c in clauses if c[0] == kind]
        if not found:
            self.error(f"missing '{kind}' annotation", anchor)
        if len(found) > 1:
            self.error(f"duplicate '{kind}' annotation", found[1][2])
        return found[0][1]

    def annotations(self, allowed: set[str]) -> list[tuple[str, A.Expr, Token]]:
        """Consecutive annotation comments, each holding ``kw expr;`` clauses."""
        out = []
        while self.tok.kind == "ann_start":
            self.next()
            while self.tok.kind != "ann_end":
                kw = self.tok
                if kw.kind != "ident" or kw.value not in allowed:
                    want = " or ".join(f"'{a}'" for a in sorted(allowed))
                    self.error(f"expected {want} clause but found {_describe(kw)}")
                self.next()
                e = self.expr()
                self.expect(";")
                out.append((kw.value, e, kw))
            self.next()
        return out

    # -- statements

    def statements(self) -> list:
        items = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("expected '}' but found end of input")
            items.append(self.statement())
        return items

    def lower(self, items: list) -> A.Stmt:
        out: A.Stmt = A.Skip()
        for item in reversed(items):
            if isinstance(item, tuple):
                name, init, tok = item
                out = A.with_loc(A.Let(name, init, out), tok.line, tok.col)
            else:
                out = A.Seq(item, out)
        return out

    def braced(self, what: str) -> A.Stmt:
        if not self.at("{"):
            self.error(f"expected '{{' to open the {what} body but found {_describe(self.tok)}")
        tok = self.next()
        inner = self.lower(self.statements())
        self.expect("}")
        return A.with_loc(A.Block(inner), tok.line, tok.col)

    def statement(self):
        tok = self.tok
        if tok.kind == "ann_start":
            self.next()
            self.error(f"unexpected annotation {_describe(self.tok)} in statement position")
        if tok.kind == "ident":
            v = tok.value
            if v in _UNSUPPORTED_STMT_KEYWORDS:
                self.error(f"unsupported construct: {_UNSUPPORTED_STMT_KEYWORDS[v]}")
            if v in _UNSUPPORTED_TYPES:
                self.error(f"unsupported type '{v}' (only int is supported)")
            if v == "int":
                return self.declaration()
            if v == "while":
                return self.while_stmt()
            if v == "if":
                return self.if_stmt()
            if v == "return":
                self.next()
                e = self.expr()
                self.expect(";")
                return A.with_loc(A.Return(e), tok.line, tok.col)
        if self.at("{"):
            return self.braced("block")
        if self.at(";"):
            self.next()
            return A.with_loc(A.Skip(), tok.line, tok.col)
        e = self.expr()
        self.expect(";")
        return A.with_loc(A.ExprStmt(e), tok.line, tok.col)

    def declaration(self):
        self.expect("int")
        if self.at("*"):
            self.error("pointers are not supported")
        name = self.expect_ident()
        if self.at(";"):
            self.error(f"declaration of '{name.value}' without initializer is not supported")
        if self.at(","):
            self.error("multiple declarators in one declaration are not supported")
        if self.at("["):
            self.error("arrays are not supported")
        self.expect("=")
        init = self.expr()
        self.expect(";")
        return (name.value, init, name)

    def while_stmt(self) -> A.Stmt:
        tok = self.expect("while")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        clauses = self.annotations({"invariant"})
        if not clauses:
            self.error("missing loop invariant annotation", tok)
        if len(clauses) > 1:
            self.error("duplicate loop invariant annotation", clauses[1][2])
        body = self.braced("loop")
        return A.with_loc(A.While(cond, clauses[0][1], A.Seq(body, A.Skip())), tok.line, tok.col)

    def if_stmt(self) -> A.Stmt:
        tok = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then_s = self.braced("if")
        else_s: A.Stmt = A.Skip()
        if self.accept("else"):
            else_s = self.if_stmt() if self.at("if") else self.braced("else")
        return A.with_loc(A.If(cond, then_s, else_s), tok.line, tok.col)

    # -- expressions

    def expr(self) -> A.Expr:
        return self.assignment()

    def assignment(self) -> A.Expr:
        lhs = self.logic_or()
        if self.tok.kind == "op" and self.tok.value in ("+=", "-=", "*=", "/=", "%=", "<<=", ">>="):
            self.error(f"unsupported operator '{self.tok.value}'")
        if self.at("="):
            op = self.next()
            if not isinstance(lhs, A.Var):
                self.error("left-hand side of assignment must be a variable", op)
            rhs = self.assignment()
            return A.with_loc(A.Assign(lhs.name, rhs), op.line, op.col)
        return lhs

    def _binary(self, sub, table: dict):
        left = sub()
        while self.tok.kind == "op" and self.tok.value in table:
            op = self.next()
            right = sub()
            left = A.with_loc(table[op.value](left, right), op.line, op.col)
        return left

    def logic_or(self) -> A.Expr:
        return self._binary(self.logic_and, {"||": A.OrB})

    def logic_and(self) -> A.Expr:
        return self._binary(self.equality, {"&&": A.AndB})

    def equality(self) -> A.Expr:
        return self._binary(self.relational, {"==": A.EqE, "!=": A.Ne})

    def relational(self) -> A.Expr:
        left = self.additive()
        while self.tok.kind == "op" and self.tok.value in ("<", "<=", ">", ">="):
            op = self.next()
            right = self.additive()
            if op.value == "<":
                node = A.Lt(left, right)
            elif op.value == "<=":
                node = A.Le(left, right)
            elif op.value == ">":
                node = A.NotB(A.with_loc(A.Le(left, right), op.line, op.col))
            else:
                node = A.NotB(A.with_loc(A.Lt(left, right), op.line, op.col))
            left = A.with_loc(node, op.line, op.col)
        return left

    def additive(self) -> A.Expr:
        return self._binary(self.multiplicative, {"+": A.Add, "-": A.Sub})

    def multiplicative(self) -> A.Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.value in ("*", "/", "%"):
            if self.tok.value != "/":
                self.error(f"unsupported operator '{self.tok.value}'")
            op = self.next()
            right = self.unary()
            left = A.with_loc(A.Div(left, right), op.line, op.col)
        return left

    def unary(self) -> A.Expr:
        tok = self.tok
        if tok.kind == "op":
            if tok.value == "!":
                self.next()
                return A.with_loc(A.NotB(self.unary()), tok.line, tok.col)
            if tok.value == "-":
                self.next()
                if self.tok.kind == "int":
                    lit = self.next()
                    return self._literal(-int(lit.value), tok)
                operand = self.unary()
                zero = A.with_loc(A.IntLit(0), tok.line, tok.col)
                return A.with_loc(A.Sub(zero, operand), tok.line, tok.col)
            if tok.value == "+":
                self.next()
                return self.unary()
            if tok.value in ("*", "&"):
                self.error("pointers are not supported")
            if tok.value in ("++", "--"):
                self.error(f"unsupported operator '{tok.value}'")
            if tok.value == "~":
                self.error("unsupported operator '~'")
        return self.primary()

    def _literal(self, value: int, tok: Token) -> A.Expr:
        if not (MIN_SIGNED <= value <= MAX_SIGNED):
            self.error(f"integer literal {value} is out of range for int", tok)
        return A.with_loc(A.IntLit(value), tok.line, tok.col)

    def primary(self) -> A.Expr:
        tok = self.tok
        if tok.kind == "int":
            self.next()
            return self._literal(int(tok.value), tok)
        if tok.kind == "ident":
            self.next()
            if tok.value == "true":
                return A.with_loc(A.TrueE(), tok.line, tok.col)
            if tok.value == "false":
                return A.with_loc(A.FalseE(), tok.line, tok.col)
            if self.at("("):
                self.error(f"unsupported construct: call to function '{tok.value}'")
            if self.tok.kind == "op" and self.tok.value in ("++", "--"):
                self.error(f"unsupported operator '{self.tok.value}'")
            if self.at("[") or self.at(".") or self.at("->"):
                self.error(f"unsupported operator '{self.tok.value}'")
            return A.with_loc(A.Var(tok.value), tok.line, tok.col)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected expression but found {_describe(tok)}")


def parse_program(src: SourceProgram | str, path: str | None = None) -> A.Func:
    """Parse a single annotated function and lower it to Cx."""
    if isinstance(src, str):
        src = SourceProgram(src, path or "<input>")
    toks = tokenize(src.text, src.path)
    return _Parser(toks, src.path).program()


def parse_annotation_expr(text: str, path: str = "<annotation>") -> A.Expr:
    toks = tokenize(text, path)
    p = _Parser(toks, path)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {_describe(p.tok)} after expression")
    return e
