"""Exhaustive evaluation of terms and props over a box of integers, with numpy."""

from __future__ import annotations

import numpy as np

from vfx.symexec import AddT, AndP, Cmp, Const, DivT, FF, NotP, OrP, SubT, Sym, TT

LO, HI = -50, 50


def grid(nsyms: int):
    axes = [np.arange(LO, HI + 1, dtype=np.int64)] * nsyms
    return np.meshgrid(*axes, indexing="ij") if nsyms else []


def term(t, g):
    match t:
        case Const(z):
            return np.int64(z)
        case Sym(i):
            return g[i]
        case AddT(a, b):
            return term(a, g) + term(b, g)
        case SubT(a, b):
            return term(a, g) - term(b, g)
        case DivT(a, b):
            x, y = term(a, g), term(b, g)
            safe = np.where(y == 0, 1, y)
            q = np.abs(x) // np.abs(safe)
            return np.where(y == 0, 0, np.where((x < 0) != (safe < 0), -q, q))
    raise TypeError(t)


def prop(p, g, shape):
    match p:
        case TT():
            return np.ones(shape, dtype=bool)
        case FF():
            return np.zeros(shape, dtype=bool)
        case Cmp(rel, a, b):
            x, y = term(a, g), term(b, g)
            r = {"<": x < y, "<=": x <= y, "=": x == y, "!=": x != y}[rel]
            return np.broadcast_to(r, shape)
        case NotP(q):
            return ~prop(q, g, shape)
        case AndP(a, b):
            return prop(a, g, shape) & prop(b, g, shape)
        case OrP(a, b):
            return prop(a, g, shape) | prop(b, g, shape)
    raise TypeError(p)


def box(nsyms: int):
    """Hypotheses confining every symbol to [LO, HI]."""
    return [AndP(Cmp("<=", Const(LO), Sym(i)), Cmp("<=", Sym(i), Const(HI))) for i in range(nsyms)]


def enumerate_sat(props, nsyms: int) -> bool:
    g = grid(nsyms)
    shape = g[0].shape if g else ()
    m = np.ones(shape, dtype=bool)
    for p in props:
        m &= prop(p, g, shape)
    return bool(m.any())


def point_satisfies(props, model: dict[int, int]) -> bool:
    g = [np.int64(model.get(i, 0)) for i in range(3)]
    return all(bool(prop(p, g, ())) for p in props)
