"""Integer feasibility for the checker: exact simplex with branch and bound.

Only "provably infeasible" answers are trusted by the replayer, so anything
this module cannot encode is dropped (which can only make a constraint set
easier to satisfy) and any exhausted budget counts as "feasible".
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd

NODE_LIMIT = 300
SPLIT_LIMIT = 256
CLAUSE_LIMIT = 256


def _tdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


class Encoder:
    """Prop tuples to clause lists over rows ``(coeffs, const, is_eq)`` meaning coeffs.x + const (= | <=) 0."""

    def __init__(self):
        self.quots: dict = {}
        self.defs: list[list[tuple]] = []

    def linear(self, t):
        tag = t[0]
        if tag == "c":
            return {}, t[1]
        if tag == "s":
            return {("s", t[1]): 1}, 0
        a = self.linear(t[1])
        b = self.linear(t[2])
        if a is None or b is None:
            return None
        if tag in ("+", "-"):
            sgn = 1 if tag == "+" else -1
            out = dict(a[0])
            for v, c in b[0].items():
                out[v] = out.get(v, 0) + sgn * c
            return {v: c for v, c in out.items() if c}, a[1] + sgn * b[1]
        # division: constant nonzero divisor only
        if b[0] or b[1] == 0:
            return None
        d = b[1]
        if not a[0]:
            return {}, _tdiv(a[1], d)
        key = (tuple(sorted(a[0].items())), a[1], d)
        if key not in self.quots:
            q = ("q", len(self.quots))
            self.quots[key] = q
            m = abs(d) - 1
            # r = a - d*q ; a >= 0 -> 0 <= r <= m ; a < 0 -> -m <= r <= 0
            r = dict(a[0])
            r[q] = -d
            rk = a[1]
            neg_r = {v: -c for v, c in r.items()}
            a_neg = (dict(a[0]), a[1] + 1, False)
            a_nonneg = ({v: -c for v, c in a[0].items()}, -a[1], False)
            self.defs.append([a_neg, (neg_r, -rk, False)])
            self.defs.append([a_neg, (r, rk - m, False)])
            self.defs.append([a_nonneg, (r, rk, False)])
            self.defs.append([a_nonneg, (neg_r, -rk - m, False)])
        return {self.quots[key]: 1}, 0

    def literal(self, rel, l, r, pos):
        a, b = self.linear(l), self.linear(r)
        if a is None or b is None:
            return "top"
        diff = dict(a[0])
        for v, c in b[0].items():
            diff[v] = diff.get(v, 0) - c
        diff = {v: c for v, c in diff.items() if c}
        k = a[1] - b[1]
        flip = {v: -c for v, c in diff.items()}
        if not pos:
            rel = {"<": ">=", "<=": ">", "=": "!=", "!=": "="}[rel]
        table = {
            "<": [[(diff, k + 1, False)]],
            "<=": [[(diff, k, False)]],
            ">": [[(flip, 1 - k, False)]],
            ">=": [[(flip, -k, False)]],
            "=": [[(diff, k, True)]],
            "!=": [[(diff, k + 1, False), (flip, 1 - k, False)]],
        }
        return table[rel]

    def cnf(self, p, pos=True):
        """List of clauses, "top" for trivially true."""
        tag = p[0]
        if tag == "tt":
            return "top" if pos else [[]]
        if tag == "ff":
            return [[]] if pos else "top"
        if tag == "not":
            return self.cnf(p[1], not pos)
        if tag in ("and", "or"):
            a, b = self.cnf(p[1], pos), self.cnf(p[2], pos)
            conj = (tag == "and") == pos
            if conj:
                if a == "top":
                    return b
                if b == "top":
                    return a
                return a + b
            if a == "top" or b == "top":
                return "top"
            if len(a) * len(b) > CLAUSE_LIMIT:
                return "top"
            return [x + y for x in a for y in b]
        return self.literal(tag, p[1], p[2], pos)


def _normalize(coeffs, const, is_eq):
    """Integer tightening; returns a row, or True/False when decided."""
    coeffs = {v: c for v, c in coeffs.items() if c}
    if not coeffs:
        return const == 0 if is_eq else const <= 0
    g = 0
    for c in coeffs.values():
        g = gcd(g, c)
    if is_eq:
        if const % g:
            return False
        return {v: c // g for v, c in coeffs.items()}, const // g, True
    return {v: c // g for v, c in coeffs.items()}, -((-const) // g), False


def _lp(rows, names):
    """Phase-one simplex with Bland's rule over free variables; returns a rational point or None."""
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    m = len(rows)
    slack_cols = [i for i, r in enumerate(rows) if not r[2]]
    ncol = 2 * n + len(slack_cols) + m
    art0 = 2 * n + len(slack_cols)
    tab = []
    for i, (coeffs, const, is_eq) in enumerate(rows):
        row = [Fraction(0)] * (ncol + 1)
        for v, c in coeffs.items():
            j = index[v]
            row[2 * j] = Fraction(c)
            row[2 * j + 1] = Fraction(-c)
        if not is_eq:
            row[2 * n + slack_cols.index(i)] = Fraction(1)
        row[ncol] = Fraction(-const)
        if row[ncol] < 0:
            row = [-x for x in row]
        row[art0 + i] = Fraction(1)
        tab.append(row)
    basis = [art0 + i for i in range(m)]
    cost = [Fraction(0)] * (ncol + 1)
    for row in tab:
        for j in range(art0):
            cost[j] -= row[j]
        cost[ncol] -= row[ncol]
    while True:
        enter = next((j for j in range(ncol) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(tab):
            if row[enter] > 0:
                ratio = row[ncol] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break  # unbounded direction; cannot happen in phase one
        p = best[1]
        piv = tab[p][enter]
        tab[p] = [x / piv for x in tab[p]]
        for i, row in enumerate(tab):
            if i != p and row[enter] != 0:
                f = row[enter]
                tab[i] = [x - f * y for x, y in zip(row, tab[p])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [x - f * y for x, y in zip(cost, tab[p])]
        basis[p] = enter
    if cost[ncol] != 0:
        return None
    val = [Fraction(0)] * ncol
    for i, b in enumerate(basis):
        val[b] = tab[i][ncol]
    return {v: val[2 * index[v]] - val[2 * index[v] + 1] for v in names}


def _substitute(rows, solved):
    """Eliminate equalities with a unit coefficient, recording each solved variable.

    Returns the remaining rows, or None if infeasible.
    """
    rows = list(rows)
    while True:
        pick = None
        for i, (coeffs, const, is_eq) in enumerate(rows):
            if is_eq:
                for v in sorted(coeffs):
                    if abs(coeffs[v]) == 1:
                        pick = (i, v)
                        break
            if pick:
                break
        if pick is None:
            return rows
        i, x = pick
        coeffs, const, _ = rows.pop(i)
        a = coeffs[x]
        # x = -a * (others + const)
        repl = {v: -a * c for v, c in coeffs.items() if v != x}
        rk = -a * const
        solved.append((x, repl, rk))
        out = []
        for c2, k2, e2 in rows:
            f = c2.get(x, 0)
            if f:
                c2 = {v: c for v, c in c2.items() if v != x}
                for v, c in repl.items():
                    c2[v] = c2.get(v, 0) + f * c
                k2 = k2 + f * rk
            r = _normalize(c2, k2, e2)
            if r is False:
                return None
            if r is not True:
                out.append(r)
        rows = out


def integer_point(rows):
    """An integer solution of the rows, None if there is none, or "budget" if undecided."""
    base = []
    for r in rows:
        nr = _normalize(*r)
        if nr is False:
            return None
        if nr is not True:
            base.append(nr)
    solved: list = []
    base = _substitute(base, solved)
    if base is None:
        return None
    names = sorted({v for c, _, _ in base for v in c})
    todo = [[]]
    nodes = 0
    while todo:
        extra = todo.pop()
        nodes += 1
        if nodes > NODE_LIMIT:
            return "budget"
        point = _lp(base + extra, names)
        if point is None:
            continue
        frac = next((v for v in names if point[v].denominator != 1), None)
        if frac is None:
            out = {v: int(x) for v, x in point.items()}
            for x, repl, rk in reversed(solved):
                out[x] = sum(c * out.get(v, 0) for v, c in repl.items()) + rk
            return out
        x = point[frac]
        todo.append(extra + [({frac: -1}, ceil(x), False)])
        todo.append(extra + [({frac: 1}, -floor(x), False)])
    return None


def _holds(row, point):
    coeffs, const, is_eq = row
    s = sum(c * point.get(v, 0) for v, c in coeffs.items()) + const
    return s == 0 if is_eq else s <= 0


def infeasible(clauses) -> bool:
    """True only when the clause set provably has no integer model."""
    units, rest = [], []
    for cl in clauses:
        if not cl:
            return True
        (units if len(cl) == 1 else rest).append(cl)
    budget = [SPLIT_LIMIT]

    def dfs(fixed, open_):
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        pt = integer_point(fixed)
        if pt is None:
            return True
        if pt == "budget":
            return False
        for i, cl in enumerate(open_):
            if not any(_holds(r, pt) for r in cl):
                others = open_[:i] + open_[i + 1:]
                return all(dfs(fixed + [r], others) for r in cl)
        return False

    return dfs([cl[0] for cl in units], rest)


def refutes(hyps, negated_goal=None) -> bool:
    """Whether the hypotheses (plus the negation of a goal, if given) are contradictory."""
    enc = Encoder()
    clauses = []
    for h in hyps:
        c = enc.cnf(h, True)
        if c != "top":
            clauses.extend(c)
    if negated_goal is not None:
        c = enc.cnf(negated_goal, False)
        if c != "top":
            clauses.extend(c)
    clauses.extend(enc.defs)
    return infeasible(clauses)
