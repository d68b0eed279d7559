"""Statement transformations applied before comparing against compiled programs."""

from __future__ import annotations

from . import cx_ast as A


def simplify(s: A.Stmt) -> A.Stmt:
    """Remove ``Seq(_, Skip)`` wrappers.

    Equations are tried top to bottom, so ``Seq(s, Skip)`` yields ``s`` itself
    without simplifying inside it.
    """
    match s:
        case A.Seq(first, A.Skip()):
            return first
        case A.Seq(first, second):
            return A.Seq(simplify(first), simplify(second))
        case A.Let(x, e, body):
            return A.Let(x, e, simplify(body))
        case A.If(c, a, b):
            return A.If(c, simplify(a), simplify(b))
        case A.While(c, inv, body):
            return A.While(c, inv, simplify(body))
        case A.Block(inner):
            return A.Block(simplify(inner))
    return s


def check_simplify_rel(s1: A.Stmt, s2: A.Stmt) -> bool:
    """Derivability of ``s1 ~> s2`` in the inductive simplification relation.

    Rules: ``Seq(s, Skip) ~> s``; congruence for Seq (right operand not Skip),
    Let, If, While and Block; reflexivity for Skip, ExprStmt and Return.
    """
    match s1:
        case A.Seq(first, A.Skip()):
            return s2 == first
        case A.Seq(first, second):
            return (
                isinstance(s2, A.Seq)
                and check_simplify_rel(first, s2.first)
                and check_simplify_rel(second, s2.second)
            )
        case A.Let(x, e, body):
            return isinstance(s2, A.Let) and (s2.name, s2.init) == (x, e) and check_simplify_rel(body, s2.body)
        case A.If(c, a, b):
            return (
                isinstance(s2, A.If)
                and s2.cond == c
                and check_simplify_rel(a, s2.then_s)
                and check_simplify_rel(b, s2.else_s)
            )
        case A.While(c, inv, body):
            return (
                isinstance(s2, A.While)
                and (s2.cond, s2.invariant) == (c, inv)
                and check_simplify_rel(body, s2.body)
            )
        case A.Block(inner):
            return isinstance(s2, A.Block) and check_simplify_rel(inner, s2.inner)
        case A.Skip() | A.ExprStmt() | A.Return():
            return s1 == s2
    return False


def programify(s: A.Stmt) -> A.Stmt:
    return A.Seq(s, A.Return(A.IntLit(0)))
