"""Fueled big-step reference interpreter.

Fuel is spent once per loop iteration whose guard evaluated true; every other
construct is structurally bounded by the size of the statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Union

from . import cx_ast as A
from .store import EMPTY, Store, is_int
from .transforms import programify, simplify


class StuckReason(str, Enum):
    UNBOUND_VAR = "unbound-var"
    OVERFLOW = "overflow"
    DIV_BY_ZERO = "div-by-zero"
    DIV_OVERFLOW = "div-overflow"
    SHADOWING = "shadowing"
    UNSUPPORTED_FORM = "unsupported-form"
    COND_UNDEFINED = "cond-undefined"


class Undefined(Exception):
    def __init__(self, reason: StuckReason, node=None):
        super().__init__(reason.value)
        self.reason = reason
        self.loc = getattr(node, "loc", None)


# -- outcomes and results -----------------------------------------------------


@dataclass(frozen=True)
class Normal:
    pass


@dataclass(frozen=True)
class Returned:
    z: int


Outcome = Union[Normal, Returned]
NORMAL = Normal()


@dataclass(frozen=True)
class Terminated:
    store: Store[int]
    outcome: Outcome


@dataclass(frozen=True)
class Stuck:
    reason: StuckReason
    loc: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FuelExhausted:
    pass


ExecResult = Union[Terminated, Stuck, FuelExhausted]


@dataclass
class ExecStats:
    iterations: int = 0


# -- expressions --------------------------------------------------------------


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def eval_z(e: A.Expr, st: Store[int]) -> int:
    """Value of an arithmetic expression; raises :class:`Undefined`."""
    t = type(e)
    if t is A.Var:
        z = st.lookup(e.name)
        if z is None:
            raise Undefined(StuckReason.UNBOUND_VAR, e)
        return z
    if t is A.IntLit:
        if not is_int(e.value):
            raise Undefined(StuckReason.OVERFLOW, e)
        return e.value
    if t is A.Add or t is A.Sub:
        a = eval_z(e.l, st)
        b = eval_z(e.r, st)
        z = a + b if t is A.Add else a - b
        if not is_int(z):
            raise Undefined(StuckReason.OVERFLOW, e)
        return z
    if t is A.Div:
        a = eval_z(e.l, st)
        b = eval_z(e.r, st)
        if b == 0:
            raise Undefined(StuckReason.DIV_BY_ZERO, e)
        if a == -2147483648 and b == -1:
            raise Undefined(StuckReason.DIV_OVERFLOW, e)
        return trunc_div(a, b)
    raise Undefined(StuckReason.UNSUPPORTED_FORM, e)


def eval_bool(e: A.Expr, st: Store[int]) -> bool:
    """Truth value of a boolean expression; both operands of && and || are evaluated."""
    match e:
        case A.TrueE():
            return True
        case A.FalseE():
            return False
        case A.Lt(l, r):
            return eval_z(l, st) < eval_z(r, st)
        case A.Le(l, r):
            return eval_z(l, st) <= eval_z(r, st)
        case A.EqE(l, r):
            return eval_z(l, st) == eval_z(r, st)
        case A.Ne(l, r):
            return eval_z(l, st) != eval_z(r, st)
        case A.AndB(l, r):
            a = eval_bool(l, st)
            b = eval_bool(r, st)
            return a and b
        case A.OrB(l, r):
            a = eval_bool(l, st)
            b = eval_bool(r, st)
            return a or b
        case A.NotB(inner):
            return not eval_bool(inner, st)
    raise Undefined(StuckReason.COND_UNDEFINED, e)


# -- statements ---------------------------------------------------------------


class _OutOfFuel(Exception):
    pass


class _Machine:
    def __init__(self, fuel: int, stats: ExecStats | None):
        self.fuel = fuel
        self.stats = stats if stats is not None else ExecStats()

    def run(self, st: Store[int], s: A.Stmt) -> tuple[Store[int], Outcome]:
        t = type(s)
        if t is A.Seq:
            st1, o = self.run(st, s.first)
            if o is not NORMAL:
                return st1, o
            return self.run(st1, s.second)
        if t is A.Skip:
            return st, NORMAL
        if t is A.ExprStmt:
            e = s.e
            if type(e) is not A.Assign:
                raise Undefined(StuckReason.UNSUPPORTED_FORM, s)
            return st.update(e.target, eval_z(e.rhs, st)), NORMAL
        if t is A.Block:
            return self.run(st, s.inner)
        if t is A.If:
            return self.run(st, s.then_s if eval_bool(s.cond, st) else s.else_s)
        if t is A.Return:
            return st, Returned(eval_z(s.e, st))
        if t is A.Let:
            x = s.name
            if x in st:
                raise Undefined(StuckReason.SHADOWING, s)
            z = eval_z(s.init, st)
            st1, o = self.run(st.update(x, z), s.body)
            return st1.update(x, None), o
        if t is A.While:
            c, body = s.cond, s.body
            while eval_bool(c, st):
                if self.fuel <= 0:
                    raise _OutOfFuel
                self.fuel -= 1
                self.stats.iterations += 1
                st, o = self.run(st, body)
                if o is not NORMAL:
                    return st, o
            return st, NORMAL
        raise Undefined(StuckReason.UNSUPPORTED_FORM, s)


def exec_stmt(st: Store[int], s: A.Stmt, fuel: int, stats: ExecStats | None = None) -> ExecResult:
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    m = _Machine(fuel, stats)
    try:
        st1, o = m.run(st, s)
    except Undefined as u:
        return Stuck(u.reason, u.loc)
    except _OutOfFuel:
        return FuelExhausted()
    return Terminated(st1, o)


def run_program(body: A.Stmt, fuel: int, stats: ExecStats | None = None) -> ExecResult:
    return exec_stmt(EMPTY, programify(simplify(body)), fuel, stats)


# -- specifications -----------------------------------------------------------
# Pre- and postconditions are logical formulas over mathematical integers:
# no overflow, and division is total (x / 0 = 0).  None means an identifier
# was unbound or the formula is not boolean.


def spec_z(e: A.Expr, st: Mapping[str, int]) -> int | None:
    match e:
        case A.IntLit(z):
            return z
        case A.Var(x):
            return st.get(x)
        case A.Add(l, r) | A.Sub(l, r) | A.Div(l, r):
            a, b = spec_z(l, st), spec_z(r, st)
            if a is None or b is None:
                return None
            if isinstance(e, A.Add):
                return a + b
            if isinstance(e, A.Sub):
                return a - b
            return 0 if b == 0 else trunc_div(a, b)
    return None


def spec_bool(e: A.Expr, st: Mapping[str, int]) -> bool | None:
    match e:
        case A.TrueE():
            return True
        case A.FalseE():
            return False
        case A.Lt(l, r) | A.Le(l, r) | A.EqE(l, r) | A.Ne(l, r):
            a, b = spec_z(l, st), spec_z(r, st)
            if a is None or b is None:
                return None
            return {A.Lt: a < b, A.Le: a <= b, A.EqE: a == b, A.Ne: a != b}[type(e)]
        case A.AndB(l, r) | A.OrB(l, r):
            a, b = spec_bool(l, st), spec_bool(r, st)
            if a is None or b is None:
                return None
            return (a and b) if isinstance(e, A.AndB) else (a or b)
        case A.NotB(inner):
            a = spec_bool(inner, st)
            return None if a is None else not a
    return None


# -- function correctness -----------------------------------------------------


@dataclass(frozen=True)
class FuncVerdict:
    """``kind`` is return-ok, post-violated, normal-termination, stuck, diverged or skipped."""

    kind: str
    value: object = None

    @property
    def acceptable(self) -> bool:
        return self.kind in ("return-ok", "diverged", "skipped")


def check_func(f: A.Func, inputs: list[Mapping[str, int]], fuel: int) -> list[FuncVerdict]:
    out = []
    seen: dict[frozenset, FuncVerdict] = {}  # execution is deterministic
    for inp in inputs:
        key = frozenset(inp.items())
        if key in seen:
            out.append(seen[key])
            continue
        if set(inp) != set(f.args):
            raise ValueError(f"input {dict(inp)!r} must bind exactly {list(f.args)!r}")
        for k, v in inp.items():
            if isinstance(v, bool) or not isinstance(v, int) or not is_int(v):
                raise ValueError(f"input value for {k!r} is not a 32-bit integer: {v!r}")
        if spec_bool(f.pre, inp) is not True:
            out.append(FuncVerdict("skipped"))
            continue
        res = exec_stmt(Store(inp), f.body, fuel)
        match res:
            case Terminated(_, Returned(z)):
                ok = spec_bool(f.post, {**inp, A.RESULT: z})
                out.append(FuncVerdict("return-ok" if ok is True else "post-violated", z))
            case Terminated(_, Normal()):
                out.append(FuncVerdict("normal-termination"))
            case Stuck(reason):
                out.append(FuncVerdict("stuck", reason))
            case FuelExhausted():
                out.append(FuncVerdict("diverged", fuel))
        seen[key] = out[-1]
    return out
