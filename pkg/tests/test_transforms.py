import random

from hypothesis import given, settings, strategies as st

from vfx import cx_ast as A
from vfx.cbsem import FuelExhausted, Normal, Returned, Stuck, Terminated, exec_stmt
from vfx.parser import parse_program
from vfx.store import EMPTY, Store
from vfx.transforms import check_simplify_rel, programify, simplify

from conftest import CORPUS
from generators import random_stmt, random_store

rx = A.Return(A.Var("x"))
ry = A.Return(A.Var("y"))
zero = A.Return(A.IntLit(0))


def test_simplify_examples():
    assert simplify(A.Seq(rx, A.Skip())) == rx
    assert simplify(A.Skip()) == A.Skip()
    assert simplify(A.Seq(A.Seq(rx, A.Skip()), A.Seq(ry, A.Skip()))) == A.Seq(rx, ry)


def test_first_equation_does_not_recurse():
    inner = A.Seq(A.Seq(rx, A.Skip()), A.Skip())
    assert simplify(inner) == A.Seq(rx, A.Skip())


def test_simplify_recurses_under_binders():
    s = A.Let("x", A.IntLit(1), A.While(A.TrueE(), A.TrueE(), A.Block(A.Seq(rx, A.Skip()))))
    assert simplify(s) == A.Let("x", A.IntLit(1), A.While(A.TrueE(), A.TrueE(), A.Block(rx)))


def test_relation_examples():
    assert check_simplify_rel(A.Seq(rx, A.Skip()), rx)
    assert check_simplify_rel(A.Skip(), A.Skip())
    assert not check_simplify_rel(A.Skip(), zero)
    assert not check_simplify_rel(A.Seq(rx, A.Skip()), A.Seq(rx, A.Skip()))


def test_programify_examples():
    assert programify(A.Skip()) == A.Seq(A.Skip(), zero)
    body = parse_program((CORPUS / "countdown.c").read_text()).body
    assert programify(simplify(body)) == A.Seq(simplify(body), zero)
    seven = programify(A.Return(A.IntLit(7)))
    assert seven == A.Seq(A.Return(A.IntLit(7)), zero)
    assert exec_stmt(EMPTY, seven, 0).outcome == Returned(7)


def _case(seed):
    rng = random.Random(seed)
    return random_stmt(rng), Store(random_store(rng)), rng.randint(0, 12)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_relation_introduction(seed):
    s, _, _ = _case(seed)
    assert check_simplify_rel(s, simplify(s))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_simplify_preserves_termination(seed):
    s, st0, fuel = _case(seed)
    r = exec_stmt(st0, s, fuel)
    r2 = exec_stmt(st0, simplify(s), fuel)
    if isinstance(r, Terminated):
        assert r2 == r
    elif isinstance(r, FuelExhausted):
        assert not isinstance(r2, Stuck)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_programify_preserves_returns(seed):
    s, st0, fuel = _case(seed)
    r = exec_stmt(st0, s, fuel)
    r2 = exec_stmt(st0, programify(s), fuel + 2)
    match r:
        case Terminated(st1, Returned(z)):
            assert r2 == Terminated(st1, Returned(z))
        case Terminated(st1, Normal()):
            assert r2 == Terminated(st1, Returned(0))
        case FuelExhausted():
            assert not isinstance(exec_stmt(st0, programify(s), fuel), Stuck)
