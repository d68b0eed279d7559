"""Linear integer arithmetic for SEP obligations, and the proof search over a SEP.

Atoms are normalized to ``sum(c_i * v_i) + k <= 0`` or ``= 0`` with integer
coefficients.  A conjunction of such constraints is decided by Fourier-Motzkin
elimination with gcd tightening; a rational model found by back-substitution is
pushed to an integer one by branch and bound.  Disjunctions are handled by
case splitting on the first clause the current model violates.

Anything the engine cannot express (division by a symbolic or zero divisor,
an oversized CNF) is dropped from the constraint set.  Dropping only weakens
the set, so an ``unsat`` answer stays sound; a ``sat`` answer then becomes
``unknown`` because the model may violate what was dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Union

from .symexec import (
    AddT, AndP, AndS, Cmp, Const, DivT, FalseS, FF, ForallInt, Holds, ImpliesS, NotP, OrP, Prop,
    Sep, SubT, Sym, TrueS, TT, Term,
)

BRANCH_BUDGET = 256
BNB_BUDGET = 200
CNF_CAP = 256
FM_ROW_CAP = 4000


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


# -- linear constraints -------------------------------------------------------


@dataclass(frozen=True)
class LinConstraint:
    """``sum(coeffs) + const  (<= | =)  0`` over integer variables."""

    coeffs: tuple[tuple[str, int], ...]
    const: int
    rel: str  # "le" or "eq"

    def value(self, model: dict[str, int]) -> int:
        return sum(c * model.get(v, 0) for v, c in self.coeffs) + self.const

    def holds(self, model: dict[str, int]) -> bool:
        v = self.value(model)
        return v <= 0 if self.rel == "le" else v == 0

    def __str__(self) -> str:
        terms = " + ".join(f"{c}*{v}" for v, c in self.coeffs) or "0"
        return f"{terms} + {self.const} {'<=' if self.rel == 'le' else '='} 0"


Constraint = Union[LinConstraint, bool]


def make(coeffs: dict[str, int], const: int, rel: str) -> Constraint:
    """Normalize; returns a bool when the constraint has no variables or is trivially decided."""
    items = sorted((v, c) for v, c in coeffs.items() if c)
    if not items:
        return const <= 0 if rel == "le" else const == 0
    g = 0
    for _, c in items:
        g = gcd(g, c)
    if rel == "eq":
        if const % g:
            return False
        if items[0][1] < 0:
            g = -g
        return LinConstraint(tuple((v, c // g) for v, c in items), const // g, "eq")
    # a.x + k <= 0 with g | a tightens to (a/g).x + ceil(k/g) <= 0
    return LinConstraint(tuple((v, c // g) for v, c in items), -((-const) // g), "le")


def _sub(a: dict[str, int], b: dict[str, int], scale: int = 1) -> dict[str, int]:
    out = dict(a)
    for v, c in b.items():
        out[v] = out.get(v, 0) - scale * c
    return out


# -- formulas -----------------------------------------------------------------
# NNF formulas are True, False, ("lit", c), ("and", [...]) or ("or", [...]).


class Normalizer:
    """Turns ``Prop`` values into clause sets; owns the division quotients."""

    def __init__(self) -> None:
        self.quotients: dict[tuple, str] = {}
        self.axioms: list[list[LinConstraint]] = []
        self.incomplete = False

    # linear forms are (coeffs, const); None means "not expressible"
    def lin(self, t: Term) -> tuple[dict[str, int], int] | None:
        match t:
            case Const(z):
                return {}, z
            case Sym(i):
                return {f"s{i}": 1}, 0
            case AddT(l, r) | SubT(l, r):
                a, b = self.lin(l), self.lin(r)
                if a is None or b is None:
                    return None
                sign = 1 if isinstance(t, AddT) else -1
                return _sub(a[0], b[0], -sign), a[1] + sign * b[1]
            case DivT(l, r):
                b = self.lin(r)
                if b is None or b[0] or b[1] == 0:
                    return None
                a = self.lin(l)
                if a is None:
                    return None
                return self._div(a, b[1])
        raise TypeError(t)

    def _div(self, a: tuple[dict[str, int], int], c: int) -> tuple[dict[str, int], int]:
        coeffs, k = a
        coeffs = {v: x for v, x in coeffs.items() if x}
        if not coeffs:
            return {}, trunc_div(k, c)
        if c == 1:
            return coeffs, k
        if c == -1:
            return {v: -x for v, x in coeffs.items()}, -k
        key = (tuple(sorted(coeffs.items())), k, c)
        q = self.quotients.get(key)
        if q is None:
            q = f"q{len(self.quotients)}"
            self.quotients[key] = q
            m = abs(c)
            rem = _sub(coeffs, {q: c})  # a - c*q, constant k
            neg_a = make(coeffs, k + 1, "le")  # a <= -1
            nonneg_a = make({v: -x for v, x in coeffs.items()}, -k, "le")  # a >= 0
            rem_ge0 = make({v: -x for v, x in rem.items()}, -k, "le")
            rem_le_hi = make(rem, k - (m - 1), "le")
            rem_le0 = make(rem, k, "le")
            rem_ge_lo = make({v: -x for v, x in rem.items()}, -k - (m - 1), "le")
            for clause in ((neg_a, rem_ge0), (neg_a, rem_le_hi), (nonneg_a, rem_le0), (nonneg_a, rem_ge_lo)):
                if True in clause:
                    continue
                self.axioms.append([x for x in clause if x is not False])
        return {q: 1}, 0

    def atom(self, rel: str, l: Term, r: Term, positive: bool):
        a, b = self.lin(l), self.lin(r)
        if a is None or b is None:
            self.incomplete = True
            return True
        d = _sub(a[0], b[0])  # l - r
        k = a[1] - b[1]
        nd = {v: -c for v, c in d.items()}
        if not positive:
            rel = {"<": ">=", "<=": ">", "=": "!=", "!=": "="}[rel]
        if rel == "<":
            return _lit(make(d, k + 1, "le"))
        if rel == "<=":
            return _lit(make(d, k, "le"))
        if rel == ">":
            return _lit(make(nd, -k + 1, "le"))
        if rel == ">=":
            return _lit(make(nd, -k, "le"))
        if rel == "=":
            return _lit(make(d, k, "eq"))
        return _or([_lit(make(d, k + 1, "le")), _lit(make(nd, -k + 1, "le"))])

    def nnf(self, p: Prop, positive: bool = True):
        match p:
            case TT():
                return positive
            case FF():
                return not positive
            case Cmp(rel, l, r):
                return self.atom(rel, l, r, positive)
            case NotP(q):
                return self.nnf(q, not positive)
            case AndP(l, r) | OrP(l, r):
                parts = [self.nnf(l, positive), self.nnf(r, positive)]
                conj = isinstance(p, AndP) == positive
                return _and(parts) if conj else _or(parts)
        raise TypeError(p)

    def clauses(self, p: Prop, positive: bool = True) -> list[list[LinConstraint]]:
        f = self.nnf(p, positive)
        try:
            return _cnf(f)
        except _Blowup:
            self.incomplete = True
            return []


def _lit(c: Constraint):
    return c if isinstance(c, bool) else ("lit", c)


def _and(parts: list):
    out = []
    for x in parts:
        if x is False:
            return False
        if x is True:
            continue
        out.extend(x[1] if x[0] == "and" else [x])
    return ("and", out) if out else True


def _or(parts: list):
    out = []
    for x in parts:
        if x is True:
            return True
        if x is False:
            continue
        out.extend(x[1] if x[0] == "or" else [x])
    return ("or", out) if out else False


class _Blowup(Exception):
    pass


def _cnf(f) -> list[list[LinConstraint]]:
    if f is True:
        return []
    if f is False:
        return [[]]
    if f[0] == "lit":
        return [[f[1]]]
    if f[0] == "and":
        out = []
        for g in f[1]:
            out.extend(_cnf(g))
            if len(out) > CNF_CAP:
                raise _Blowup
        return out
    acc: list[list[LinConstraint]] = [[]]
    for g in f[1]:
        sub = _cnf(g)
        acc = [a + [x for x in b if x not in a] for a in acc for b in sub]
        if len(acc) > CNF_CAP:
            raise _Blowup
    return acc


# -- conjunction solver -------------------------------------------------------


class _TooBig(Exception):
    pass


Row = tuple[dict[str, int], int]  # coeffs . x + const <= 0


def _row(c: LinConstraint) -> Row:
    return dict(c.coeffs), c.const


def _tighten(coeffs: dict[str, int], const: int) -> Row | bool:
    c = make(coeffs, const, "le")
    return c if isinstance(c, bool) else _row(c)


def _dedupe(rows: list[Row]) -> list[Row]:
    best: dict[tuple, int] = {}
    for coeffs, k in rows:
        key = tuple(sorted(coeffs.items()))
        if key not in best or k > best[key]:
            best[key] = k
    return [(dict(key), k) for key, k in best.items()]


def _fm(rows: list[Row]) -> tuple[dict[str, Fraction], str | None] | None:
    """Rational feasibility with integer tightening.

    Returns None when infeasible, otherwise a model (integral where the bounds
    allow) and the first variable forced to a fractional value, if any.
    """
    rows = _dedupe(rows)
    elim: list[tuple[str, list[Row], list[Row]]] = []
    while True:
        counts: dict[str, list[int]] = {}
        for coeffs, _ in rows:
            for v, c in coeffs.items():
                counts.setdefault(v, [0, 0])[0 if c > 0 else 1] += 1
        if not counts:
            break
        x = min(sorted(counts), key=lambda v: counts[v][0] * counts[v][1] - counts[v][0] - counts[v][1])
        pos = [r for r in rows if r[0].get(x, 0) > 0]
        neg = [r for r in rows if r[0].get(x, 0) < 0]
        new = [r for r in rows if x not in r[0]]
        for pc, pk in pos:
            a = pc[x]
            for nc, nk in neg:
                b = -nc[x]
                coeffs = {v: b * pc.get(v, 0) + a * nc.get(v, 0) for v in set(pc) | set(nc)}
                coeffs.pop(x, None)
                r = _tighten(coeffs, b * pk + a * nk)
                if r is False:
                    return None
                if r is not True:
                    new.append(r)
        rows = _dedupe(new)
        if len(rows) > FM_ROW_CAP:
            raise _TooBig
        elim.append((x, pos, neg))
    for coeffs, k in rows:
        if k > 0:
            return None

    model: dict[str, Fraction] = {}
    frac: str | None = None
    for x, pos, neg in reversed(elim):
        # a variable cancelled out of every projected row is unconstrained there
        for coeffs, _ in pos + neg:
            for v in coeffs:
                if v != x and v not in model:
                    model[v] = Fraction(0)
        lo: Fraction | None = None
        hi: Fraction | None = None
        for coeffs, k in pos:
            rest = k + sum(c * model[v] for v, c in coeffs.items() if v != x)
            bound = Fraction(-rest, 1) / coeffs[x]
            hi = bound if hi is None else min(hi, bound)
        for coeffs, k in neg:
            rest = k + sum(c * model[v] for v, c in coeffs.items() if v != x)
            bound = Fraction(-rest, 1) / coeffs[x]
            lo = bound if lo is None else max(lo, bound)
        ilo = None if lo is None else ceil(lo)
        ihi = None if hi is None else floor(hi)
        if ilo is None or ihi is None or ilo <= ihi:
            v = 0
            if ilo is not None and v < ilo:
                v = ilo
            if ihi is not None and v > ihi:
                v = ihi
            model[x] = Fraction(v)
        else:
            model[x] = lo
            if frac is None:
                frac = x
    return model, frac


def solve_conj(cons: list[LinConstraint]) -> tuple[str, dict[str, int] | None]:
    """Decide a conjunction.  Returns ("sat", model), ("unsat", None) or ("unknown", None)."""
    eqs = [(dict(c.coeffs), c.const) for c in cons if c.rel == "eq"]
    rows = [_row(c) for c in cons if c.rel == "le"]
    subst: list[tuple[str, dict[str, int], int]] = []

    # eliminate equalities that have a unit coefficient
    while True:
        pick = None
        for i, (coeffs, k) in enumerate(eqs):
            for v, c in sorted(coeffs.items()):
                if abs(c) == 1:
                    pick = (i, v, c)
                    break
            if pick:
                break
        if pick is None:
            break
        i, x, a = pick
        coeffs, k = eqs.pop(i)
        # x = -a * (rest + k)
        expr = {v: -a * c for v, c in coeffs.items() if v != x}
        ek = -a * k
        subst.append((x, expr, ek))

        def apply(row_c: dict[str, int], row_k: int) -> tuple[dict[str, int], int]:
            m = row_c.get(x, 0)
            if not m:
                return row_c, row_k
            out = {v: c for v, c in row_c.items() if v != x}
            for v, c in expr.items():
                out[v] = out.get(v, 0) + m * c
            return out, row_k + m * ek

        new_eqs = []
        for ec, ekk in eqs:
            c = make(*apply(ec, ekk), "eq")
            if c is False:
                return "unsat", None
            if c is not True:
                new_eqs.append((dict(c.coeffs), c.const))
        eqs = new_eqs
        new_rows = []
        for rc, rk in rows:
            r = _tighten(*apply(rc, rk))
            if r is False:
                return "unsat", None
            if r is not True:
                new_rows.append(r)
        rows = new_rows
    for coeffs, k in eqs:
        rows.append((coeffs, k))
        rows.append(({v: -c for v, c in coeffs.items()}, -k))

    stack: list[list[Row]] = [[]]
    nodes = 0
    while stack:
        extra = stack.pop()
        nodes += 1
        if nodes > BNB_BUDGET:
            return "unknown", None
        try:
            res = _fm(rows + extra)
        except _TooBig:
            return "unknown", None
        if res is None:
            continue
        model, frac = res
        if frac is None:
            out = {v: int(z) for v, z in model.items()}
            for x, expr, ek in reversed(subst):
                out[x] = sum(c * out.get(v, 0) for v, c in expr.items()) + ek
            return "sat", out
        val = model[frac]
        stack.append(extra + [({frac: -1}, ceil(val))])  # x >= ceil
        stack.append(extra + [({frac: 1}, -floor(val))])  # x <= floor
    return "unsat", None


def solve(clauses: list[list[LinConstraint]]) -> tuple[str, dict[str, int] | None]:
    """Decide a CNF by splitting on clauses violated by the current model."""
    units: list[LinConstraint] = []
    rest: list[list[LinConstraint]] = []
    for cl in clauses:
        if not cl:
            return "unsat", None
        if len(cl) == 1:
            if cl[0] not in units:
                units.append(cl[0])
        else:
            rest.append(cl)
    budget = [BRANCH_BUDGET]
    return _search(units, rest, budget)


def _search(units, clauses, budget) -> tuple[str, dict[str, int] | None]:
    if budget[0] <= 0:
        return "unknown", None
    budget[0] -= 1
    status, model = solve_conj(units)
    if status != "sat":
        return status, None
    for i, cl in enumerate(clauses):
        if not any(lit.holds(model) for lit in cl):
            break
    else:
        return "sat", model
    others = clauses[:i] + clauses[i + 1:]
    unknown = False
    for lit in reversed(cl):
        status, m = _search(units + [lit], others, budget)
        if status == "sat":
            return status, m
        unknown = unknown or status == "unknown"
    return ("unknown" if unknown else "unsat"), None


# -- contexts and verdicts ----------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    kind: str  # "yes" | "no" | "unknown"
    model: dict[int, int] | None = None

    @property
    def yes(self) -> bool:
        return self.kind == "yes"


YES = Verdict("yes")
UNKNOWN = Verdict("unknown")


class Context:
    """Stack of hypothesis frames mirroring the branch structure of a SEP."""

    def __init__(self) -> None:
        self.norm = Normalizer()
        self.frames: list[list[tuple[list[list[LinConstraint]], bool]]] = [[]]

    def push(self) -> None:
        self.frames.append([])

    def pop(self) -> None:
        if len(self.frames) == 1:
            raise IndexError("pop from the base frame")
        self.frames.pop()

    def assume(self, p: Prop) -> None:
        self.norm.incomplete = False
        cls = self.norm.clauses(p, True)
        self.frames[-1].append((cls, self.norm.incomplete))

    def _gather(self) -> tuple[list[list[LinConstraint]], bool]:
        out: list[list[LinConstraint]] = []
        partial = False
        for frame in self.frames:
            for cls, inc in frame:
                out.extend(cls)
                partial = partial or inc
        return out, partial

    def _decide(self, extra: list[list[LinConstraint]], partial: bool) -> Verdict:
        cls, p2 = self._gather()
        status, model = solve(cls + extra + list(self.norm.axioms))
        if status == "unsat":
            return YES
        if status == "sat" and not (partial or p2):
            return Verdict("no", {int(v[1:]): z for v, z in sorted(model.items()) if v.startswith("s")})
        return UNKNOWN


def entails(ctx: Context, goal: Prop) -> Verdict:
    """``yes`` iff every integer model of the context satisfies ``goal``."""
    ctx.norm.incomplete = False
    neg = ctx.norm.clauses(goal, False)
    return ctx._decide(neg, ctx.norm.incomplete)


def unsat(ctx: Context) -> Verdict:
    """``yes`` iff the context has no integer model."""
    return ctx._decide([], False)


# -- proof search -------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    kind: str  # "intro" | "split" | "arith"
    leaf: int | None = None
    result: str | None = None  # "ok" | "contradiction"

    def __str__(self) -> str:
        if self.kind == "arith":
            return f"arith {self.leaf} {self.result}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> Step:
        parts = text.split()
        if parts == ["intro"] or parts == ["split"]:
            return cls(parts[0])
        if len(parts) == 3 and parts[0] == "arith" and parts[1].isdigit() and parts[2] in ("ok", "contradiction"):
            return cls("arith", int(parts[1]), parts[2])
        raise ValueError(f"bad proof step {text!r}")


@dataclass(frozen=True)
class Verified:
    trace: tuple[Step, ...]


@dataclass(frozen=True)
class Failed:
    path: tuple[str, ...]
    reason: str
    model: dict[int, int] | None = None
    leaf: Sep | None = field(default=None, compare=False)
    leaf_index: int = -1


class _Fail(Exception):
    def __init__(self, failed: Failed):
        self.failed = failed


def prove_sep(sep: Sep) -> Verified | Failed:
    """Depth-first, left-to-right discharge of every leaf, recording the trace."""
    ctx = Context()
    trace: list[Step] = []
    counter = [0]

    def go(node: Sep, path: tuple[str, ...]) -> None:
        match node:
            case ForallInt(_, rest):
                trace.append(Step("intro"))
                go(rest, path + ("forall",))
            case ImpliesS(h, rest):
                trace.append(Step("intro"))
                ctx.push()
                ctx.assume(h)
                go(rest, path + ("implies",))
                ctx.pop()
            case AndS(l, r):
                trace.append(Step("split"))
                go(l, path + ("left",))
                go(r, path + ("right",))
            case Holds(p):
                idx = counter[0]
                counter[0] += 1
                # the two tags are exclusive: "ok" is only used under consistent hypotheses
                if unsat(ctx).yes:
                    trace.append(Step("arith", idx, "contradiction"))
                    return
                v = entails(ctx, p)
                if v.yes:
                    trace.append(Step("arith", idx, "ok"))
                    return
                what = "cannot prove" if v.kind == "unknown" else "refuted"
                raise _Fail(Failed(path, f"{what} {node.why or 'obligation'}", v.model, node, idx))
            case TrueS():
                trace.append(Step("arith", counter[0], "ok"))
                counter[0] += 1
            case FalseS(why):
                idx = counter[0]
                counter[0] += 1
                v = unsat(ctx)
                if v.yes:
                    trace.append(Step("arith", idx, "contradiction"))
                    return
                raise _Fail(Failed(path, why or "path reaches False", v.model, node, idx))
            case _:
                raise TypeError(node)

    try:
        go(sep, ())
    except _Fail as e:
        return e.failed
    return Verified(tuple(trace))
