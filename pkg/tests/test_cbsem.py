import random

import pytest
from hypothesis import given, settings, strategies as st

from vfx import cx_ast as A
from vfx.cbsem import (
    ExecStats, FuelExhausted, FuncVerdict, Normal, Returned, Stuck, StuckReason, Terminated, Undefined,
    check_func, eval_bool, eval_z, exec_stmt, run_program, spec_bool,
)
from vfx.parser import parse_program
from vfx.store import EMPTY, Store

from conftest import CORPUS
from generators import random_stmt, random_store

I = A.IntLit


def countdown():
    return parse_program((CORPUS / "countdown.c").read_text())


def test_eval_z_examples():
    assert eval_z(A.Sub(A.Var("x"), I(1)), Store({"x": 32767})) == 32766
    assert eval_z(A.Div(I(-7), I(2)), EMPTY) == -3
    assert eval_z(A.Div(I(7), I(-2)), EMPTY) == -3
    with pytest.raises(Undefined) as info:
        eval_z(A.Add(I(2147483647), I(1)), EMPTY)
    assert info.value.reason is StuckReason.OVERFLOW


@pytest.mark.parametrize("e, reason", [
    (A.Div(I(1), I(0)), StuckReason.DIV_BY_ZERO),
    (A.Div(I(-2147483648), I(-1)), StuckReason.DIV_OVERFLOW),
    (A.Sub(I(-2147483648), I(1)), StuckReason.OVERFLOW),
    (A.Var("nope"), StuckReason.UNBOUND_VAR),
    (I(2**31), StuckReason.OVERFLOW),
])
def test_eval_z_undefined(e, reason):
    with pytest.raises(Undefined) as info:
        eval_z(e, EMPTY)
    assert info.value.reason is reason


def test_eval_bool_examples():
    guard = A.Lt(I(0), A.Var("x"))
    assert eval_bool(guard, Store({"x": 32767})) is True
    assert eval_bool(guard, Store({"x": 0})) is False
    with pytest.raises(Undefined) as info:
        eval_bool(A.Lt(A.Div(I(1), I(0)), I(5)), EMPTY)
    assert info.value.reason is StuckReason.DIV_BY_ZERO


def test_eval_bool_is_strict():
    # both operands are evaluated, so a faulting right side is stuck even when the left decides
    with pytest.raises(Undefined):
        eval_bool(A.AndB(A.FalseE(), A.Lt(A.Div(I(1), I(0)), I(1))), EMPTY)
    with pytest.raises(Undefined) as info:
        eval_bool(I(1), EMPTY)
    assert info.value.reason is StuckReason.COND_UNDEFINED


def test_countdown_runs():
    stats = ExecStats()
    r = exec_stmt(EMPTY, countdown().body, 40000, stats)
    assert isinstance(r, Terminated) and r.outcome == Returned(0)
    assert stats.iterations == 32767
    assert r.store == EMPTY  # the Let unbinds x


def test_countdown_fuel_boundary():
    assert isinstance(exec_stmt(EMPTY, countdown().body, 32767), Terminated)
    assert exec_stmt(EMPTY, countdown().body, 32766) == FuelExhausted()


def test_infinite_loop_exhausts_fuel():
    loop = A.While(A.TrueE(), A.TrueE(), A.Seq(A.Skip(), A.Skip()))
    assert exec_stmt(EMPTY, loop, 1000) == FuelExhausted()


def test_return_propagates_past_rest():
    s = A.Seq(A.Return(I(7)), A.ExprStmt(A.Assign("x", A.Div(I(1), I(0)))))
    assert exec_stmt(EMPTY, s, 0) == Terminated(EMPTY, Returned(7))


def test_shadowing_is_stuck():
    s = A.Let("x", I(1), A.Skip())
    assert exec_stmt(Store({"x": 0}), s, 10) == Stuck(StuckReason.SHADOWING)


def test_assign_needs_no_binding():
    r = exec_stmt(EMPTY, A.ExprStmt(A.Assign("x", I(1))), 0)
    assert r == Terminated(Store({"x": 1}), Normal())


def test_check_func_examples():
    assert check_func(countdown(), [{}], 200000) == [FuncVerdict("return-ok", 0)]
    ident = A.Func(("a",), A.TrueE(), A.Seq(A.Return(A.Var("a")), A.Skip()), A.EqE(A.Var("result"), I(0)))
    assert check_func(ident, [{"a": 1}], 10) == [FuncVerdict("post-violated", 1)]
    skip = A.Func((), A.TrueE(), A.Seq(A.Skip(), A.Skip()), A.TrueE())
    assert check_func(skip, [{}], 10) == [FuncVerdict("normal-termination")]


def test_check_func_skips_inputs_violating_pre():
    f = A.Func(("a",), A.Lt(A.Var("a"), I(0)), A.Seq(A.Return(A.Var("a")), A.Skip()), A.TrueE())
    assert check_func(f, [{"a": 3}, {"a": -3}], 10) == [FuncVerdict("skipped"), FuncVerdict("return-ok", -3)]


def test_check_func_rejects_bad_inputs():
    f = A.Func(("a",), A.TrueE(), A.Seq(A.Return(A.Var("a")), A.Skip()), A.TrueE())
    with pytest.raises(ValueError):
        check_func(f, [{"b": 1}], 10)
    with pytest.raises(ValueError):
        check_func(f, [{"a": 2**31}], 10)


def test_spec_semantics_use_mathematical_integers():
    assert spec_bool(A.Lt(A.Var("a"), A.Add(A.Var("a"), I(1))), {"a": 2147483647}) is True
    assert spec_bool(A.EqE(A.Div(I(5), I(0)), I(0)), {}) is True
    assert spec_bool(A.Lt(A.Var("q"), I(0)), {}) is None


def test_run_program_examples():
    assert run_program(countdown().body, 40000).outcome == Returned(0)
    assert run_program(A.Skip(), 0).outcome == Returned(0)
    assert run_program(A.ExprStmt(A.Assign("x", I(1))), 0).outcome == Returned(0)


def test_negative_fuel_rejected():
    with pytest.raises(ValueError):
        exec_stmt(EMPTY, A.Skip(), -1)


def _run(seed, fuel):
    rng = random.Random(seed)
    s = random_stmt(rng)
    st0 = Store(random_store(rng))
    return s, st0, exec_stmt(st0, s, fuel)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 20))
def test_fuel_monotonicity(seed, fuel):
    s, st0, r = _run(seed, fuel)
    bigger = exec_stmt(st0, s, fuel + 50)
    if not isinstance(r, FuelExhausted):
        assert bigger == r


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_determinism_and_well_boundedness(seed):
    s, st0, r = _run(seed, 30)
    assert exec_stmt(st0, s, 30) == r
    if isinstance(r, Terminated):
        assert all(-2**31 <= v < 2**31 for v in r.store.values())
