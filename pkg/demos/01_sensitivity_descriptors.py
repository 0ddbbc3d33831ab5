"""Sensitivity descriptors: declaring what is sensitive, and where.

A descriptor lists groups of databases.  A singleton group means the
database carries sensitive information on its own; a bracketed group means
the sensitivity only arises when those databases are combined.
"""

from fusionplan import (
    count_descriptors,
    derive,
    enumerate_descriptors,
    format_descriptor,
    parse_descriptor,
)

print("Parsing and canonical printing")
print("-" * 60)
for text in ("{DB1; DB2}", "{[DB2,DB1]; DB1}", "{}"):
    d = parse_descriptor(text)
    print(f"  {text!r:28} -> {format_descriptor(d)}")
print()

print("Every descriptor over two databases")
print("-" * 60)
for i, d in enumerate(enumerate_descriptors(2), 1):
    print(f"  #{i}: {d}")
print(f"  total {count_descriptors(2)}; "
      f"three databases would give {count_descriptors(3)}")
print()

print("Derivation trace for {DB1; [DB1,DB2]}")
print("-" * 60)
trace = derive(parse_descriptor("{DB1; [DB1,DB2]}"))
form = "S"
for production, result in trace.steps:
    print(f"  {form:28} --[{production}]--> {result}")
    form = result
