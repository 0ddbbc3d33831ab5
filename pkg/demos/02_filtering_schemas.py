"""Filtering schemas: ordered removal plans for sensitivity groups.

A schema is a sequence of filter operations applied rightmost first; it is
valid for a descriptor when the sequence removes every declared group.
Adjacent operations can merge into one atomic operation.
"""

from fusionplan import (
    enumerate_schemas,
    merge,
    parse_descriptor,
    parse_schema,
    reduce_schema,
)

print("Reduction chains")
print("-" * 60)
for schema_text, descriptor_text in (
    ("E(2)E(1)", "{DB1; DB2}"),
    ("E([1,2])E(1)", "{DB1; [DB1,DB2]}"),
    ("E(1)E([1,2])", "{DB1; [DB1,DB2]}"),
    ("E(1;[1,2])", "{DB1; [DB1,DB2]}"),
):
    schema = parse_schema(schema_text)
    trace = reduce_schema(schema, parse_descriptor(descriptor_text))
    print(" ", trace.arrow_chain(schema))
print()

print("Merging adjacent operations")
print("-" * 60)
schema = parse_schema("E(1)E([1,2])")
print(f"  {schema}  --merge(0)-->  {merge(schema, 0)}")
print()

print("All schemas of {DB1; [DB1,DB2]}")
print("-" * 60)
d = parse_descriptor("{DB1; [DB1,DB2]}")
print("  one operation per group:",
      ", ".join(str(s) for s in enumerate_schemas(d)))
print("  with merged operations: ",
      ", ".join(str(s) for s in enumerate_schemas(d, include_merged=True)))
print()

print("Schema counts grow as ordered set partitions")
print("-" * 60)
d3 = parse_descriptor("{DB1; DB2; [DB1,DB2]}")
print(f"  {d3}: {len(enumerate_schemas(d3))} unmerged, "
      f"{len(enumerate_schemas(d3, include_merged=True))} with merging")
