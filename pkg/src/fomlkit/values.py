"""Runtime representation of data values held by models.

Element identifiers are plain ``str``. Enumeration constants are :class:`Sym`,
naturals are ``int``, products are ``tuple``, lists are :class:`ListValue` and
finite sets are ``frozenset``. Everything is hashable so values can sit inside
sets and relation tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True, order=True)
class Sym:
    """An enumeration constant."""

    name: str

    def __str__(self) -> str:
        return self.name


class ListValue(tuple):
    """A finite sequence value (``list of`` domains)."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "ListValue(%s)" % (tuple.__repr__(self),)


def value_sort_key(value: Any) -> tuple:
    """Total order over heterogeneous values, used for deterministic output."""
    if isinstance(value, Sym):
        return (0, value.name)
    if isinstance(value, bool):
        raise TypeError("booleans are not model values")
    if isinstance(value, int):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, ListValue):
        return (4, tuple(value_sort_key(v) for v in value))
    if isinstance(value, tuple):
        return (3, tuple(value_sort_key(v) for v in value))
    if isinstance(value, frozenset):
        return (5, tuple(sorted(value_sort_key(v) for v in value)))
    raise TypeError("not a model value: %r" % (value,))


def sorted_values(values) -> list:
    return sorted(values, key=value_sort_key)


def element_refs(value: Any):
    """Yield every element identifier occurring inside ``value``."""
    if isinstance(value, str):
        yield value
    elif isinstance(value, (tuple, frozenset)):
        for v in value:
            yield from element_refs(v)


def rename_elements(value: Any, mapping: dict[str, str]) -> Any:
    if isinstance(value, str):
        return mapping.get(value, value)
    if isinstance(value, ListValue):
        return ListValue(rename_elements(v, mapping) for v in value)
    if isinstance(value, tuple):
        return tuple(rename_elements(v, mapping) for v in value)
    if isinstance(value, frozenset):
        return frozenset(rename_elements(v, mapping) for v in value)
    return value
