from hypothesis import given, strategies as st

from vfx.store import EMPTY, MAX_SIGNED, MIN_SIGNED, Store, binds, eq_mod, is_int, update, well_bounded


def test_bounds():
    assert (MIN_SIGNED, MAX_SIGNED) == (-2147483648, 2147483647)
    assert is_int(MAX_SIGNED) and not is_int(MAX_SIGNED + 1) and not is_int(MIN_SIGNED - 1)


def test_update_and_lookup():
    assert update(EMPTY, "x", 32767).lookup("x") == 32767
    s = Store({"x": 1})
    assert update(s, "x", None).lookup("x") is None
    assert update(update(EMPTY, "x", 1), "x", 2).lookup("x") == 2


def test_update_is_functional():
    s = Store({"x": 1})
    s.update("x", 5)
    assert s["x"] == 1


def test_well_bounded():
    assert well_bounded(Store({"x": 32767}))
    assert well_bounded(EMPTY)
    assert not well_bounded(Store({"x": 2147483648}))


def test_eq_mod():
    assert eq_mod(EMPTY, Store({"a": 5}), ["a"])
    assert not eq_mod(EMPTY, Store({"b": 5}), ["a"])
    s = Store({"a": 1, "b": 2})
    assert eq_mod(s, s, []) and eq_mod(s, s, ["q"])


def test_binds():
    assert binds(Store({"x": 0}), ["x"])
    assert not binds(EMPTY, ["x"])
    assert binds(Store({"x": 0}), [])


maps = st.dictionaries(st.sampled_from("abcde"), st.integers(-10, 10), max_size=5)


@given(maps, st.sampled_from("abcde"), st.one_of(st.none(), st.integers(-10, 10)))
def test_update_matches_dict(m, k, v):
    ref = dict(m)
    if v is None:
        ref.pop(k, None)
    else:
        ref[k] = v
    assert dict(update(Store(m), k, v)) == ref


@given(maps, maps)
def test_eq_mod_symmetric(a, b):
    names = set(a) | set(b)
    diff = [k for k in names if a.get(k) != b.get(k)]
    assert eq_mod(Store(a), Store(b), diff) and eq_mod(Store(b), Store(a), diff)
    assert eq_mod(Store(a), Store(b), []) == (a == b)
