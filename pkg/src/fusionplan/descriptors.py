"""Sensitivity descriptors, filter operations and filtering schemas.

A sensitivity descriptor records which databases (or correlations between
databases) carry sensitive information.  It is a set of *groups*, each group
a non-empty set of 1-based database indices: ``{DB1; [DB1,DB2]}`` declares
individual sensitivity in database 1 plus sensitivity that only arises from
combining databases 1 and 2.

Filter operations ``E(...)`` name the groups a single atomic filtering step
removes, and a filtering schema is an ordered sequence of such operations
(applied rightmost first).

Everything here is an immutable value with a text surface syntax; parsing
and printing round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

Group = frozenset  # frozenset of 1-based database indices


class ParseError(ValueError):
    """Syntax error in a descriptor, schema or formula string."""

    def __init__(self, message: str, text: str, position: int):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}: {text!r}")


def group_key(group: Group) -> tuple:
    """Canonical sort key: singletons by index first, then larger groups
    in lexicographic order of their sorted index lists."""
    return (len(group), tuple(sorted(group)))


def sort_groups(groups: Iterable[Group]) -> tuple[Group, ...]:
    return tuple(sorted(set(map(frozenset, groups)), key=group_key))


def format_group(group: Group, db_prefix: bool = True) -> str:
    names = [f"DB{i}" if db_prefix else str(i) for i in sorted(group)]
    if len(names) == 1:
        return names[0]
    return "[" + ",".join(names) + "]"


def _check_group(group: Group) -> Group:
    group = frozenset(group)
    if not group:
        raise ValueError("group must not be empty")
    for i in group:
        if not isinstance(i, int) or i < 1:
            raise ValueError(f"database index must be a positive integer, got {i!r}")
    return group


@dataclass(frozen=True)
class SensitivityDescriptor:
    """An immutable set of sensitivity groups in canonical order.

    ``m`` is the total database count the descriptor ranges over; when not
    given it is inferred as the largest index mentioned (0 for the null
    descriptor).  Equality and hashing consider the groups only.
    """

    groups: tuple[Group, ...]
    m: int = field(default=0, compare=False)

    def __init__(self, groups: Iterable[Group] = (), m: int | None = None):
        canon = sort_groups(_check_group(g) for g in groups)
        inferred = max((max(g) for g in canon), default=0)
        if m is None:
            m = inferred
        elif m < inferred:
            raise ValueError(f"group index {inferred} exceeds database count {m}")
        object.__setattr__(self, "groups", canon)
        object.__setattr__(self, "m", m)

    @property
    def is_null(self) -> bool:
        return not self.groups

    def __contains__(self, group: Group) -> bool:
        return frozenset(group) in set(self.groups)

    def __len__(self) -> int:
        return len(self.groups)

    def without(self, groups: Iterable[Group]) -> "SensitivityDescriptor":
        removed = set(map(frozenset, groups))
        return SensitivityDescriptor(
            (g for g in self.groups if g not in removed), m=self.m
        )

    def __str__(self) -> str:
        return format_descriptor(self)

    def __repr__(self) -> str:
        return f"SensitivityDescriptor({format_descriptor(self)!r})"


@dataclass(frozen=True)
class FilterOp:
    """One atomic filtering operation; ``args`` are the groups it removes."""

    args: tuple[Group, ...]

    def __init__(self, args: Iterable[Group]):
        canon = sort_groups(_check_group(g) for g in args)
        if not canon:
            raise ValueError("filter operation needs at least one group argument")
        object.__setattr__(self, "args", canon)

    def __str__(self) -> str:
        return "E(" + ";".join(format_group(g, db_prefix=False) for g in self.args) + ")"

    def __repr__(self) -> str:
        return f"FilterOp({str(self)!r})"


@dataclass(frozen=True)
class FilteringSchema:
    """An ordered sequence of filter operations, applied RIGHTMOST FIRST.

    ``E(2)E(1)`` therefore removes group {1} before group {2}; this matches
    the right-to-left temporal reading of serial composition.
    """

    ops: tuple[FilterOp, ...]

    def __init__(self, ops: Iterable[FilterOp]):
        ops = tuple(ops)
        if not ops:
            raise ValueError("filtering schema must contain at least one operation")
        object.__setattr__(self, "ops", ops)

    def applied_order(self) -> tuple[FilterOp, ...]:
        """Operations in temporal order (rightmost written op first)."""
        return tuple(reversed(self.ops))

    def __len__(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return format_schema(self)

    def __repr__(self) -> str:
        return f"FilteringSchema({format_schema(self)!r})"


# ---------------------------------------------------------------------------
# Text surface syntax
# ---------------------------------------------------------------------------


class _Scanner:
    """Tiny cursor over a string; whitespace is insignificant."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str) -> None:
        self.skip_ws()
        if not self.text.startswith(expected, self.pos):
            raise ParseError(f"expected {expected!r}", self.text, self.pos)
        self.pos += len(expected)

    def try_take(self, expected: str) -> bool:
        self.skip_ws()
        if self.text.startswith(expected, self.pos):
            self.pos += len(expected)
            return True
        return False

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.text, self.pos)

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected an integer", self.text, start)
        return int(self.text[start : self.pos])

    def dbref(self) -> int:
        self.skip_ws()
        if not self.text.startswith("DB", self.pos):
            raise ParseError("expected a database reference like 'DB1'", self.text, self.pos)
        self.pos += 2
        value = self.integer()
        if value < 1:
            raise ParseError("database index must be >= 1", self.text, self.pos)
        return value


def _scan_group(sc: _Scanner, db_prefix: bool) -> Group:
    """``group := dbref | "[" dbref ("," dbref)+ "]"`` (bare ints without prefix)."""
    read = sc.dbref if db_prefix else sc.integer
    if sc.try_take("["):
        indices = [read()]
        while sc.try_take(","):
            indices.append(read())
        sc.take("]")
        if len(indices) < 2:
            raise sc.error("bracketed group needs at least two databases")
    else:
        indices = [read()]
    if any(i < 1 for i in indices):
        raise sc.error("database index must be >= 1")
    if len(set(indices)) != len(indices):
        raise sc.error("duplicate database index within a group")
    return frozenset(indices)


def parse_group(text: str, db_prefix: bool = True) -> Group:
    sc = _Scanner(text)
    group = _scan_group(sc, db_prefix)
    if not sc.at_end():
        raise sc.error("unexpected trailing input")
    return group


def parse_descriptor(text: str, m: int | None = None) -> SensitivityDescriptor:
    """Parse ``"{DB1; [DB1,DB2]}"`` style text into a canonical descriptor.

    Groups may appear in any order; textual duplicates are rejected.
    """
    sc = _Scanner(text)
    sc.take("{")
    groups: list[Group] = []
    if not sc.try_take("}"):
        groups.append(_scan_group(sc, db_prefix=True))
        while sc.try_take(";"):
            groups.append(_scan_group(sc, db_prefix=True))
        sc.take("}")
    if not sc.at_end():
        raise sc.error("unexpected trailing input")
    if len(set(groups)) != len(groups):
        raise sc.error("duplicate group in descriptor")
    return SensitivityDescriptor(groups, m=m)


def format_descriptor(d: SensitivityDescriptor) -> str:
    """Canonical text; ``parse_descriptor(format_descriptor(d)) == d``."""
    return "{" + "; ".join(format_group(g) for g in d.groups) + "}"


def _scan_filter_args(sc: _Scanner) -> tuple[Group, ...]:
    """Arguments of one E(...): groups separated by ";" or ",", printed ";"."""
    args = [_scan_group(sc, db_prefix=False)]
    while sc.try_take(";") or (sc.peek() == "," and sc.try_take(",")):
        args.append(_scan_group(sc, db_prefix=False))
    if len(set(args)) != len(args):
        raise sc.error("duplicate group in filter arguments")
    return tuple(args)


def parse_schema(text: str) -> FilteringSchema:
    """Parse a schema such as ``"E(2)E(1)"`` or ``"E(1;[1,2])"``."""
    sc = _Scanner(text)
    ops: list[FilterOp] = []
    while not sc.at_end():
        sc.take("E")
        sc.take("(")
        args = _scan_filter_args(sc)
        sc.take(")")
        ops.append(FilterOp(args))
    if not ops:
        raise sc.error("schema must contain at least one filter operation")
    return FilteringSchema(ops)


def format_schema(s: FilteringSchema) -> str:
    return "".join(str(op) for op in s.ops)
