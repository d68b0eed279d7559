"""Persistent finite-map stores shared by the symbolic engine and the interpreter."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from typing import Generic, TypeVar

MIN_SIGNED = -2147483648
MAX_SIGNED = 2147483647

V = TypeVar("V")


def is_int(z: int) -> bool:
    return MIN_SIGNED <= z <= MAX_SIGNED


class Store(Mapping[str, V], Generic[V]):
    """Immutable map from identifiers to values.

    Absent keys are unbound.  ``update`` returns a new store; passing ``None``
    as the value deletes the key.
    """

    __slots__ = ("_d", "_hash")

    def __init__(self, bindings: Mapping[str, V] | Iterable[tuple[str, V]] = ()):
        self._d: dict[str, V] = dict(bindings)
        self._hash: int | None = None

    def __getitem__(self, name: str) -> V:
        return self._d[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __eq__(self, other) -> bool:
        if isinstance(other, Store):
            return self._d == other._d
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k} ↦ {v!r}" for k, v in self._d.items())
        return f"Store({{{inner}}})"

    def lookup(self, name: str) -> V | None:
        return self._d.get(name)

    def update(self, name: str, value: V | None) -> Store[V]:
        d = dict(self._d)
        if value is None:
            d.pop(name, None)
        else:
            d[name] = value
        return Store(d)


EMPTY: Store = Store()


def update(store: Store[V], name: str, value: V | None) -> Store[V]:
    return store.update(name, value)


def well_bounded(store: Store[int]) -> bool:
    return all(is_int(z) for z in store.values())


def eq_mod(s1: Store, s2: Store, names: Iterable[str]) -> bool:
    """True iff the stores agree on every identifier outside ``names``."""
    excused = set(names)
    for key in set(s1) | set(s2):
        if key not in excused and s1.lookup(key) != s2.lookup(key):
            return False
    return True


def binds(store: Store, names: Iterable[str]) -> bool:
    return all(name in store for name in names)
