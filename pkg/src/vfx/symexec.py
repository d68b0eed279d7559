"""Construction of the symbolic execution proposition (SEP) as an explicit tree.

The builder follows the CPS shape of the construction: every function takes a
continuation and returns the ``Sep`` produced by it, conjoined with whatever
side conditions arise on the way.  Continuations only exist while building;
the finished tree is plain data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

from . import cx_ast as A
from .store import EMPTY, MAX_SIGNED, MIN_SIGNED, Store, is_int

# -- terms --------------------------------------------------------------------


class Term:
    pass


@dataclass(frozen=True)
class Const(Term):
    z: int


@dataclass(frozen=True)
class Sym(Term):
    id: int


@dataclass(frozen=True)
class AddT(Term):
    l: Term
    r: Term


@dataclass(frozen=True)
class SubT(Term):
    l: Term
    r: Term


@dataclass(frozen=True)
class DivT(Term):
    """C division, truncating toward zero."""

    l: Term
    r: Term


# -- propositions -------------------------------------------------------------


class Prop:
    pass


@dataclass(frozen=True)
class TT(Prop):
    pass


@dataclass(frozen=True)
class FF(Prop):
    pass


RELS = ("<", "<=", "=", "!=")


@dataclass(frozen=True)
class Cmp(Prop):
    rel: str
    l: Term
    r: Term

    def __post_init__(self):
        if self.rel not in RELS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class NotP(Prop):
    p: Prop


@dataclass(frozen=True)
class AndP(Prop):
    l: Prop
    r: Prop


@dataclass(frozen=True)
class OrP(Prop):
    l: Prop
    r: Prop


# -- SEP ----------------------------------------------------------------------


class Sep:
    pass


@dataclass(frozen=True)
class Holds(Sep):
    """An obligation leaf.  ``why`` and ``loc`` are diagnostics only."""

    p: Prop
    why: str = field(default="", compare=False)
    loc: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class AndS(Sep):
    l: Sep
    r: Sep


@dataclass(frozen=True)
class ImpliesS(Sep):
    hyp: Prop
    rest: Sep


@dataclass(frozen=True)
class ForallInt(Sep):
    sym: int
    rest: Sep


@dataclass(frozen=True)
class TrueS(Sep):
    pass


@dataclass(frozen=True)
class FalseS(Sep):
    why: str = field(default="", compare=False)
    loc: tuple[int, int] | None = field(default=None, compare=False)


AnySep = Union[Holds, AndS, ImpliesS, ForallInt, TrueS, FalseS]

SymStore = Store[Term]
Cont = Callable[[SymStore], Sep]
ZCont = Callable[[Term, SymStore], Sep]
PCont = Callable[[Prop, SymStore], Sep]

MIN = Const(MIN_SIGNED)
MAX = Const(MAX_SIGNED)


def bounds(t: Term) -> Prop:
    return AndP(Cmp("<=", MIN, t), Cmp("<=", t, MAX))


def leak_check(_store: SymStore) -> Sep:
    return TrueS()


class SepBuilder:
    """Holds the fresh-symbol counter for one construction."""

    def __init__(self) -> None:
        self.next_sym = 0

    def fresh(self) -> int:
        s = self.next_sym
        self.next_sym += 1
        return s

    # -- expressions

    def eval_z(self, e: A.Expr, st: SymStore, k: ZCont) -> Sep:
        match e:
            case A.IntLit(z):
                if is_int(z):
                    return k(Const(z), st)
                return FalseS(f"literal {z} out of range", e.loc)
            case A.Var(x):
                t = st.lookup(x)
                if t is None:
                    return FalseS(f"unbound variable '{x}'", e.loc)
                return k(t, st)
            case A.Add(l, r) | A.Sub(l, r):
                ctor = AddT if isinstance(e, A.Add) else SubT

                def arith(t1: Term, st1: SymStore) -> Sep:
                    def arith2(t2: Term, st2: SymStore) -> Sep:
                        t = ctor(t1, t2)
                        return AndS(
                            Holds(Cmp("<=", MIN, t), "lower bound", e.loc),
                            AndS(Holds(Cmp("<=", t, MAX), "upper bound", e.loc), k(t, st2)),
                        )

                    return self.eval_z(r, st1, arith2)

                return self.eval_z(l, st, arith)
            case A.Div(l, r):

                def div(t1: Term, st1: SymStore) -> Sep:
                    def div2(t2: Term, st2: SymStore) -> Sep:
                        return AndS(
                            Holds(Cmp("!=", t2, Const(0)), "division by zero", e.loc),
                            AndS(
                                Holds(
                                    OrP(Cmp("!=", t1, MIN), Cmp("!=", t2, Const(-1))),
                                    "division overflow",
                                    e.loc,
                                ),
                                k(DivT(t1, t2), st2),
                            ),
                        )

                    return self.eval_z(r, st1, div2)

                return self.eval_z(l, st, div)
        return FalseS("not an arithmetic expression", getattr(e, "loc", None))

    def eval_prop(self, e: A.Expr, st: SymStore, k: PCont) -> Sep:
        match e:
            case A.TrueE():
                return k(TT(), st)
            case A.FalseE():
                return k(FF(), st)
            case A.Lt(l, r) | A.Le(l, r) | A.EqE(l, r) | A.Ne(l, r):
                rel = _REL_OF[type(e)]
                return self.eval_z(
                    l, st, lambda t1, st1: self.eval_z(r, st1, lambda t2, st2: k(Cmp(rel, t1, t2), st2))
                )
            case A.AndB(l, r) | A.OrB(l, r):
                ctor = AndP if isinstance(e, A.AndB) else OrP
                return self.eval_prop(
                    l, st, lambda p1, st1: self.eval_prop(r, st1, lambda p2, st2: k(ctor(p1, p2), st2))
                )
            case A.NotB(inner):
                return self.eval_prop(inner, st, lambda p, st1: k(NotP(p), st1))
        return FalseS("not a boolean expression", getattr(e, "loc", None))

    # -- side-condition-free translation of specifications

    def translate_z(self, e: A.Expr, st: SymStore) -> Term | FalseS:
        match e:
            case A.IntLit(z):
                return Const(z)
            case A.Var(x):
                t = st.lookup(x)
                return t if t is not None else FalseS(f"unbound variable '{x}'", e.loc)
            case A.Add(l, r) | A.Sub(l, r) | A.Div(l, r):
                a = self.translate_z(l, st)
                if isinstance(a, FalseS):
                    return a
                b = self.translate_z(r, st)
                if isinstance(b, FalseS):
                    return b
                return {A.Add: AddT, A.Sub: SubT, A.Div: DivT}[type(e)](a, b)
        return FalseS("not an arithmetic expression", getattr(e, "loc", None))

    def translate_p(self, e: A.Expr, st: SymStore) -> Prop | FalseS:
        match e:
            case A.TrueE():
                return TT()
            case A.FalseE():
                return FF()
            case A.Lt(l, r) | A.Le(l, r) | A.EqE(l, r) | A.Ne(l, r):
                a = self.translate_z(l, st)
                if isinstance(a, FalseS):
                    return a
                b = self.translate_z(r, st)
                if isinstance(b, FalseS):
                    return b
                return Cmp(_REL_OF[type(e)], a, b)
            case A.AndB(l, r) | A.OrB(l, r):
                a = self.translate_p(l, st)
                if isinstance(a, FalseS):
                    return a
                b = self.translate_p(r, st)
                if isinstance(b, FalseS):
                    return b
                return (AndP if isinstance(e, A.AndB) else OrP)(a, b)
            case A.NotB(inner):
                a = self.translate_p(inner, st)
                return a if isinstance(a, FalseS) else NotP(a)
        return FalseS("not a boolean expression", getattr(e, "loc", None))

    def translate_prop(self, e: A.Expr, st: SymStore, k: Callable[[Prop], Sep]) -> Sep:
        p = self.translate_p(e, st)
        return p if isinstance(p, FalseS) else k(p)

    def produce(self, e: A.Expr, k: Cont, st: SymStore) -> Sep:
        return self.translate_prop(e, st, lambda p: ImpliesS(p, k(st)))

    def consume(self, e: A.Expr, k: Cont, st: SymStore, why: str = "assertion") -> Sep:
        return self.translate_prop(e, st, lambda p: AndS(Holds(p, why, getattr(e, "loc", None)), k(st)))

    # -- symbols

    def for_zs(self, names: list[str] | tuple[str, ...], k: Cont, st: SymStore) -> Sep:
        if not names:
            return k(st)
        s = self.fresh()
        rest = self.for_zs(names[1:], k, st.update(names[0], Sym(s)))
        return ForallInt(s, ImpliesS(bounds(Sym(s)), rest))

    def havoc_zs(self, names: list[str] | tuple[str, ...], k: Cont, st: SymStore) -> Sep:
        for x in names:
            if x not in st:
                return FalseS(f"loop modifies unbound variable '{x}'")
        return self.for_zs(names, k, st)

    # -- statements

    def sym_exec_stmt(self, s: A.Stmt, kn: Cont, kr: ZCont, st: SymStore) -> Sep:
        match s:
            case A.Skip():
                return kn(st)
            case A.Seq(s1, s2):
                return self.sym_exec_stmt(s1, lambda st1: self.sym_exec_stmt(s2, kn, kr, st1), kr, st)
            case A.Return(e):
                return self.eval_z(e, st, kr)
            case A.Block(inner):
                return self.sym_exec_stmt(inner, kn, kr, st)
            case A.Let(x, e, body):
                if x in st:
                    return FalseS(f"declaration of '{x}' shadows a bound variable", s.loc)

                def bind(t: Term, st1: SymStore) -> Sep:
                    def kn2(st2: SymStore) -> Sep:
                        return kn(st2.update(x, None))

                    def kr2(z: Term, st2: SymStore) -> Sep:
                        return kr(z, st2.update(x, None))

                    return self.sym_exec_stmt(body, kn2, kr2, st1.update(x, t))

                return self.eval_z(e, st, bind)
            case A.ExprStmt(A.Assign(x, e)):
                return self.eval_z(e, st, lambda t, st1: kn(st1.update(x, t)))
            case A.If(c, s1, s2):
                return self.eval_prop(
                    c,
                    st,
                    lambda p, st1: AndS(
                        ImpliesS(p, self.sym_exec_stmt(s1, kn, kr, st1)),
                        ImpliesS(NotP(p), self.sym_exec_stmt(s2, kn, kr, st1)),
                    ),
                )
            case A.While(c, inv, body):
                return self._while(c, inv, body, kn, kr, st)
        return FalseS("unsupported statement", getattr(s, "loc", None))

    def _while(self, c, inv, body, kn: Cont, kr: ZCont, st: SymStore) -> Sep:
        def after_havoc(st1: SymStore) -> Sep:
            def branch(pc: Prop, st2: SymStore) -> Sep:
                def end_of_body(st3: SymStore) -> Sep:
                    return self.consume(inv, leak_check, st3, "loop invariant preservation")

                return AndS(
                    ImpliesS(pc, self.sym_exec_stmt(body, end_of_body, kr, st2)),
                    ImpliesS(NotP(pc), kn(st2)),
                )

            return self.produce(inv, lambda st2: self.eval_prop(c, st2, branch), st1)

        return self.consume(
            inv,
            lambda st0: self.havoc_zs(A.free_targets(body), after_havoc, st0),
            st,
            "loop invariant on entry",
        )

    # -- functions

    def ret(self, st0: SymStore, k: Cont) -> ZCont:
        return lambda z, _st: k(st0.update(A.RESULT, z))

    def sym_exec_func(self, f: A.Func) -> Sep:
        def body(st: SymStore) -> Sep:
            post = self.ret(st, lambda st1: self.consume(f.post, leak_check, st1, "postcondition"))
            return self.sym_exec_stmt(f.body, lambda _st: FalseS("function may end without return"), post, st)

        return self.for_zs(f.args, lambda st: self.produce(f.pre, body, st), EMPTY)


_REL_OF = {A.Lt: "<", A.Le: "<=", A.EqE: "=", A.Ne: "!="}


def sym_exec_func(f: A.Func) -> Sep:
    return SepBuilder().sym_exec_func(f)


# -- analyses -----------------------------------------------------------------


def term_syms(t: Term) -> Iterator[int]:
    match t:
        case Sym(i):
            yield i
        case AddT(l, r) | SubT(l, r) | DivT(l, r):
            yield from term_syms(l)
            yield from term_syms(r)


def prop_syms(p: Prop) -> Iterator[int]:
    match p:
        case Cmp(_, l, r):
            yield from term_syms(l)
            yield from term_syms(r)
        case NotP(q):
            yield from prop_syms(q)
        case AndP(l, r) | OrP(l, r):
            yield from prop_syms(l)
            yield from prop_syms(r)


def free_syms(sep: Sep) -> set[int]:
    """Symbols used in ``sep`` but not bound by an enclosing ``ForallInt``."""
    free: set[int] = set()
    stack: list[tuple[Sep, frozenset[int]]] = [(sep, frozenset())]
    while stack:
        node, bound = stack.pop()
        match node:
            case ForallInt(s, rest):
                stack.append((rest, bound | {s}))
            case ImpliesS(h, rest):
                free.update(i for i in prop_syms(h) if i not in bound)
                stack.append((rest, bound))
            case AndS(l, r):
                stack.append((l, bound))
                stack.append((r, bound))
            case Holds(p):
                free.update(i for i in prop_syms(p) if i not in bound)
    return free


def iter_nodes(sep: Sep) -> Iterator[Sep]:
    """Depth-first, left-to-right pre-order walk."""
    stack = [sep]
    while stack:
        node = stack.pop()
        yield node
        match node:
            case ForallInt(_, rest) | ImpliesS(_, rest):
                stack.append(rest)
            case AndS(l, r):
                stack.append(r)
                stack.append(l)


def leaves(sep: Sep) -> list[Sep]:
    return [n for n in iter_nodes(sep) if isinstance(n, (Holds, TrueS, FalseS))]


# -- printing -----------------------------------------------------------------


def term_str(t: Term, names: dict[int, str] | None = None) -> str:
    match t:
        case Const(z):
            if z == MIN_SIGNED:
                return "min_signed"
            if z == MAX_SIGNED:
                return "max_signed"
            return str(z)
        case Sym(i):
            return (names or {}).get(i, f"s{i}")
        case AddT(l, r):
            return f"{term_str(l, names)} + {_atom(r, names)}"
        case SubT(l, r):
            return f"{term_str(l, names)} - {_atom(r, names)}"
        case DivT(l, r):
            return f"{_atom(l, names)} / {_atom(r, names)}"
    raise TypeError(t)


def _atom(t: Term, names) -> str:
    s = term_str(t, names)
    return s if isinstance(t, (Const, Sym)) else f"({s})"


_REL_SYM = {"<": "<", "<=": "≤", "=": "=", "!=": "≠"}


def prop_str(p: Prop, names: dict[int, str] | None = None) -> str:
    match p:
        case TT():
            return "True"
        case FF():
            return "False"
        case Cmp(rel, l, r):
            return f"{term_str(l, names)} {_REL_SYM[rel]} {term_str(r, names)}"
        case NotP(q):
            return f"¬({prop_str(q, names)})"
        case AndP(Cmp("<=", l1, r1), Cmp("<=", l2, r2)) if r1 == l2:
            return f"{term_str(l1, names)} ≤ {term_str(r1, names)} ≤ {term_str(r2, names)}"
        case AndP(l, r):
            return f"({prop_str(l, names)}) ∧ ({prop_str(r, names)})"
        case OrP(l, r):
            return f"({prop_str(l, names)}) ∨ ({prop_str(r, names)})"
    raise TypeError(p)


def pretty(sep: Sep, indent: str = "  ") -> str:
    """Indented infix rendering, one connective per line."""
    lines: list[str] = []

    def go(node: Sep, depth: int) -> None:
        pad = indent * depth
        match node:
            case ForallInt(s, ImpliesS(h, rest)) if h == bounds(Sym(s)):
                lines.append(f"{pad}∀ s{s}: Z, ({prop_str(h)}) →")
                go(rest, depth + 1)
            case ForallInt(s, rest):
                lines.append(f"{pad}∀ s{s}: Z,")
                go(rest, depth + 1)
            case ImpliesS(h, rest):
                lines.append(f"{pad}({prop_str(h)}) →")
                go(rest, depth + 1)
            case AndS(l, r):
                lines.append(f"{pad}∧")
                go(l, depth + 1)
                go(r, depth + 1)
            case Holds(p):
                lines.append(f"{pad}({prop_str(p)})")
            case TrueS():
                lines.append(f"{pad}True")
            case FalseS():
                lines.append(f"{pad}False")

    go(sep, 0)
    return "\n".join(lines)


def _term_sexpr(t: Term) -> str:
    match t:
        case Const(z):
            return str(z)
        case Sym(i):
            return f"s{i}"
        case AddT(l, r):
            return f"(+ {_term_sexpr(l)} {_term_sexpr(r)})"
        case SubT(l, r):
            return f"(- {_term_sexpr(l)} {_term_sexpr(r)})"
        case DivT(l, r):
            return f"(/ {_term_sexpr(l)} {_term_sexpr(r)})"
    raise TypeError(t)


def _prop_sexpr(p: Prop) -> str:
    match p:
        case TT():
            return "true"
        case FF():
            return "false"
        case Cmp(rel, l, r):
            return f"({rel} {_term_sexpr(l)} {_term_sexpr(r)})"
        case NotP(q):
            return f"(not {_prop_sexpr(q)})"
        case AndP(l, r):
            return f"(and {_prop_sexpr(l)} {_prop_sexpr(r)})"
        case OrP(l, r):
            return f"(or {_prop_sexpr(l)} {_prop_sexpr(r)})"
    raise TypeError(p)


def canonical(sep: Sep) -> str:
    """Single-line prefix form; stable across runs."""
    match sep:
        case ForallInt(s, rest):
            return f"(forall s{s} {canonical(rest)})"
        case ImpliesS(h, rest):
            return f"(=> {_prop_sexpr(h)} {canonical(rest)})"
        case AndS(l, r):
            return f"(/\\ {canonical(l)} {canonical(r)})"
        case Holds(p):
            return f"(holds {_prop_sexpr(p)})"
        case TrueS():
            return "True"
        case FalseS():
            return "False"
    raise TypeError(sep)
