"""Fixed mutation corpus for certificates."""

from __future__ import annotations

import copy
import dataclasses

from vfx import cx_ast as A

INSERTABLE = ("intro", "split", "arith 0 ok", "arith 0 contradiction")

_SWAP = {
    A.Add: A.Sub, A.Sub: A.Add, A.Div: A.Add,
    A.Lt: A.Le, A.Le: A.Lt, A.EqE: A.Ne, A.Ne: A.EqE,
    A.AndB: A.OrB, A.OrB: A.AndB,
}


def proof_mutations(proof: list[str]):
    """Every single-step deletion, insertion and adjacent swap, without duplicates."""
    seen = {tuple(proof)}
    out = []

    def add(label, p):
        if tuple(p) not in seen:
            seen.add(tuple(p))
            out.append((label, p))

    for i in range(len(proof)):
        add(f"delete {i}", proof[:i] + proof[i + 1:])
    for i in range(len(proof) + 1):
        for step in INSERTABLE + tuple(f"arith {k} ok" for k in range(1, 3)):
            add(f"insert {step!r} at {i}", proof[:i] + [step] + proof[i:])
    for i in range(len(proof) - 1):
        p = list(proof)
        p[i], p[i + 1] = p[i + 1], p[i]
        add(f"swap {i}", p)
    for i, step in enumerate(proof):
        if step.endswith(" ok"):
            add(f"retag {i}", proof[:i] + [step[:-2] + "contradiction"] + proof[i + 1:])
    return out


def _replace_node(node):
    """Alternatives for a single node, leaving its children alone."""
    match node:
        case A.IntLit(v):
            return [A.IntLit(v + 1)]
        case A.Var(x):
            return [A.Var(x + "_")]
        case A.TrueE():
            return [A.FalseE()]
        case A.FalseE():
            return [A.TrueE()]
        case A.NotB(e):
            return [e]
        case A.Assign(x, e):
            return [A.Assign(x + "_", e)]
        case A.BinExpr():
            return [_SWAP[type(node)](node.l, node.r)]
        case A.Return(e):
            return [A.Return(A.Add(e, A.IntLit(1)))]
        case A.Let(x, e, body):
            return [A.Let(x + "_", e, body)]
        case A.While(c, inv, body):
            return [A.While(c, A.FalseE() if inv == A.TrueE() else A.TrueE(), body)]
        case A.Seq(a, b):
            return [A.Seq(b, a)] if a != b else []
        case A.Block(inner):
            return [inner]
        case A.ExprStmt(e):
            return [A.Skip()]
    return []


def _children(node):
    if isinstance(node, (A.Expr, A.Stmt)):
        return [f.name for f in dataclasses.fields(node) if isinstance(getattr(node, f.name), (A.Expr, A.Stmt))]
    return []


def _mutants(node):
    yield from _replace_node(node)
    for name in _children(node):
        for m in _mutants(getattr(node, name)):
            yield dataclasses.replace(node, **{name: m})


def func_mutations(f: A.Func):
    """Every single-node mutation of a function, as distinct canonical texts."""
    base = A.dumps(f)
    seen = {base}
    out = []

    def add(label, g):
        text = A.dumps(g)
        if text not in seen:
            seen.add(text)
            out.append((label, text))

    for part in ("pre", "body", "post"):
        for m in _mutants(getattr(f, part)):
            add(part, dataclasses.replace(f, **{part: m}))
    for i in range(len(f.args)):
        add("args", dataclasses.replace(f, args=f.args[:i] + f.args[i + 1:]))
    return out


def mutated_certs(cert):
    """(label, certificate) pairs, each resealed so the digest check passes."""
    from vfx.cx_ast import loads

    out = []
    for label, proof in proof_mutations(cert.proof):
        c = copy.deepcopy(cert)
        c.proof = proof
        out.append((f"proof {label}", c.resealed()))
    for label, text in func_mutations(loads(cert.func)):
        c = copy.deepcopy(cert)
        c.func = text
        out.append((f"func {label}", c.resealed()))
    return out
