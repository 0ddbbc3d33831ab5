"""Exhaustive generation of sensitivity descriptors with derivation traces.

For m databases the group universe contains every non-empty subset of
{1..m}; a descriptor is any subset of that universe, so there are
2^(2^m - 1) descriptors.  Descriptors are produced duplicate-free, each in
canonical form, ordered by binary counting over the canonically ordered
group universe (so the null descriptor comes first and the all-groups
descriptor last).

Each descriptor can also be derived step by step: start from "S", open the
braces, append one group variable at a time in non-decreasing (size, rank)
order, then replace every variable by its terminal group text.  Variables
are written ``<k>d<i>`` for the i-th size-k group in lexicographic order
(ASCII rendering of a super/subscripted symbol).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .descriptors import Group, SensitivityDescriptor, format_descriptor, format_group

MAX_DATABASES = 5  # 2^(2^5 - 1) descriptors; beyond this the space is absurd


@dataclass(frozen=True)
class GroupIndexing:
    """Lexicographically ordered size-k group lists for a database count."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("database count must be >= 1")

    def groups_of_size(self, k: int) -> list[Group]:
        return [frozenset(c) for c in combinations(range(1, self.m + 1), k)]

    def universe(self) -> list[Group]:
        """All non-empty groups in (size, lexicographic) order."""
        out: list[Group] = []
        for k in range(1, self.m + 1):
            out.extend(self.groups_of_size(k))
        return out

    def rank(self, group: Group) -> tuple[int, int]:
        """(size k, 1-based index i) of a group among the size-k groups."""
        k = len(group)
        ordered = sorted(group)
        for i, candidate in enumerate(combinations(range(1, self.m + 1), k), 1):
            if list(candidate) == ordered:
                return k, i
        raise ValueError(f"group {sorted(group)} is not over 1..{self.m}")

    def variable(self, group: Group) -> str:
        k, i = self.rank(group)
        return f"{k}d{i}"


@dataclass(frozen=True)
class DerivationTrace:
    """Production applications leading from "S" to a terminal descriptor.

    ``steps`` holds (production, resulting sentential form) pairs; the
    implied first form is "S" and the last form is the canonical descriptor
    text.
    """

    steps: tuple[tuple[str, str], ...]

    @property
    def final_form(self) -> str:
        return self.steps[-1][1] if self.steps else "S"


def count_descriptors(m: int) -> int:
    """2^(2^m - 1): every subset of the non-empty-group universe."""
    if m < 1:
        raise ValueError("database count must be >= 1")
    if m > MAX_DATABASES:
        raise ValueError(f"database count {m} exceeds the supported maximum {MAX_DATABASES}")
    return 2 ** (2**m - 1)


def enumerate_descriptors(m: int) -> list[SensitivityDescriptor]:
    """All sensitivity descriptors for m databases, duplicate-free.

    Ordered by binary counting over the group universe (null descriptor
    first); for two databases this reproduces the standard eight-descriptor
    listing exactly.
    """
    if m < 1 or m > MAX_DATABASES:
        raise ValueError(f"database count must be in 1..{MAX_DATABASES}, got {m}")
    universe = GroupIndexing(m).universe()
    out = []
    for mask in range(2 ** len(universe)):
        groups = [g for j, g in enumerate(universe) if mask >> j & 1]
        out.append(SensitivityDescriptor(groups, m=m))
    return out


def derive(d: SensitivityDescriptor, m: int | None = None) -> DerivationTrace:
    """Derivation of a descriptor, one production application per step.

    Group variables are emitted in non-decreasing size order and, within one
    size, in strictly increasing rank order; this matches the canonical
    printing order, so the final form equals ``format_descriptor(d)``.
    """
    if m is None:
        m = max(d.m, 1)
    indexing = GroupIndexing(m)
    steps: list[tuple[str, str]] = [("S -> {}", "{}")]
    if d.is_null:
        return DerivationTrace(tuple(steps))

    variables = [indexing.variable(g) for g in d.groups]  # canonical = (k, i) order
    form = "{" + variables[0] + "}"
    steps.append(("{} -> {" + variables[0] + "}", form))
    for prev, new in zip(variables, variables[1:]):
        production = f"{prev} -> {prev}; {new}"
        form = form.replace(prev, f"{prev}; {new}", 1)
        steps.append((production, form))
    for var, group in zip(variables, d.groups):
        terminal = format_group(group)
        form = form.replace(var, terminal, 1)
        steps.append((f"{var} -> {terminal}", form))
    assert form == format_descriptor(d)
    return DerivationTrace(tuple(steps))
