"""Reduction algebra for filtering schemas.

Applying a filter operation to a sensitivity descriptor removes exactly the
argument groups (a correlated group like [DB1,DB2] is matched as a whole,
never by subset or superset).  A schema is valid for a descriptor when its
rightmost-first application reduces the descriptor to the null descriptor
``{}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .descriptors import (
    FilteringSchema,
    FilterOp,
    SensitivityDescriptor,
    format_descriptor,
)

MAX_SCHEMA_GROUPS = 6  # ordered-set-partition counts explode beyond this


@dataclass(frozen=True)
class ReductionTrace:
    """Right-to-left application record of a schema on a descriptor."""

    initial: SensitivityDescriptor
    steps: tuple[tuple[FilterOp, SensitivityDescriptor], ...]

    @property
    def final(self) -> SensitivityDescriptor:
        return self.steps[-1][1] if self.steps else self.initial

    @property
    def is_valid(self) -> bool:
        """True iff the schema reduced the descriptor to ``{}``."""
        return self.final.is_null

    def arrow_chain(self, schema: FilteringSchema, unicode_arrow: bool = False) -> str:
        """Render the chain, e.g. ``E(2)E(1){DB1; DB2} -> E(2){DB2} -> {}``."""
        arrow = " → " if unicode_arrow else " -> "
        remaining = list(schema.ops)
        parts = ["".join(map(str, remaining)) + format_descriptor(self.initial)]
        for _, result in self.steps:
            remaining = remaining[:-1]
            parts.append("".join(map(str, remaining)) + format_descriptor(result))
        return arrow.join(parts)


def apply_filter(
    op: FilterOp, d: SensitivityDescriptor, strict: bool = True
) -> SensitivityDescriptor:
    """Remove exactly ``op.args`` from the descriptor.

    In strict mode (the default) every argument group must be present;
    a filter that targets nothing signals a mis-planned schema.  Lenient
    mode ignores absent groups.
    """
    present = set(d.groups)
    missing = [g for g in op.args if g not in present]
    if missing and strict:
        raise ValueError(
            f"filter {op} targets nothing: group "
            f"{format_descriptor(SensitivityDescriptor(missing))} absent from "
            f"{format_descriptor(d)}"
        )
    return d.without(op.args)


def reduce_schema(
    schema: FilteringSchema, d: SensitivityDescriptor, strict: bool = True
) -> ReductionTrace:
    """Apply a schema rightmost-first and record every intermediate result."""
    steps = []
    current = d
    for op in schema.applied_order():
        current = apply_filter(op, current, strict=strict)
        steps.append((op, current))
    return ReductionTrace(d, tuple(steps))


def is_valid_schema(schema: FilteringSchema, d: SensitivityDescriptor) -> bool:
    try:
        return reduce_schema(schema, d).is_valid
    except ValueError:
        return False


def merge(schema: FilteringSchema, position: int) -> FilteringSchema:
    """Merge the adjacent operations at ``position`` and ``position + 1``.

    The merged operation removes the union of both argument sets in one
    atomic step; overlapping argument groups are rejected.
    """
    ops = list(schema.ops)
    if position < 0 or position + 1 >= len(ops):
        raise IndexError(f"no adjacent pair at position {position} in {schema}")
    left, right = ops[position], ops[position + 1]
    overlap = set(left.args) & set(right.args)
    if overlap:
        raise ValueError(f"cannot merge {left} and {right}: overlapping arguments")
    merged = FilterOp(left.args + right.args)
    return FilteringSchema(ops[:position] + [merged] + ops[position + 2 :])


def _ordered_partitions(items: tuple) -> list[list[tuple]]:
    """All ordered partitions of ``items`` into non-empty blocks."""
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for partition in _ordered_partitions(rest):
        # first joins an existing block
        for i in range(len(partition)):
            copy = [tuple(b) for b in partition]
            copy[i] = (first,) + copy[i]
            out.append(copy)
        # first forms a new block, inserted at every position
        for i in range(len(partition) + 1):
            copy = [tuple(b) for b in partition]
            copy.insert(i, (first,))
            out.append(copy)
    return out


def enumerate_schemas(
    d: SensitivityDescriptor, include_merged: bool = False
) -> list[FilteringSchema]:
    """All filtering schemas that reduce ``d`` to the null descriptor.

    Without merging these are the n! orderings of one single-group
    operation per group; with merging every ordered set partition of the
    groups becomes a schema.  Output is deduplicated and sorted by text.
    """
    if d.is_null:
        raise ValueError("the null descriptor has no filtering schemas")
    if len(d.groups) > MAX_SCHEMA_GROUPS:
        raise ValueError(
            f"descriptor has {len(d.groups)} groups; schema enumeration is "
            f"guarded at {MAX_SCHEMA_GROUPS}"
        )
    schemas: dict[str, FilteringSchema] = {}
    if include_merged:
        for partition in _ordered_partitions(d.groups):
            schema = FilteringSchema([FilterOp(block) for block in partition])
            schemas[str(schema)] = schema
    else:
        for order in permutations(d.groups):
            schema = FilteringSchema([FilterOp([g]) for g in order])
            schemas[str(schema)] = schema
    return [schemas[key] for key in sorted(schemas)]
