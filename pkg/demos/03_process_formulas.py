"""Process formulas: build/filter/fuse pipelines and their workability.

Serial steps apply right to left, parallel branches left to right over the
databases.  A formula is workable for a descriptor when its filter atoms
can be assigned groups such that nothing sensitive survives; correlated
groups can only be removed after the databases carrying them are fused.
"""

from fusionplan import (
    enumerate_formulas,
    execute,
    filter_workable,
    is_workable,
    parse_descriptor,
    parse_formula,
    validate,
)

print("Validation")
print("-" * 60)
for text, m in (("B.E.F", 2), ("F.(BxE).(ExB)", 2), ("B.B", 1), ("B.E", 2)):
    diagnostics = validate(parse_formula(text), m)
    verdict = "ok" if not diagnostics else "; ".join(str(d) for d in diagnostics)
    print(f"  {text:18} m={m}: {verdict}")
print()

print("Symbolic execution of B.E([1,2]).F on {[DB1,DB2]}")
print("-" * 60)
state = execute(parse_formula("B.E([1,2]).F"), parse_descriptor("{[DB1,DB2]}"))
print(f"  final state {state.label()}, residuals empty: {state.residuals_empty}")
print()

print("The eight two-database pipelines")
print("-" * 60)
formulas = enumerate_formulas(2)
for f in formulas:
    print("  " + f.text)
print()

print("Workability against {[DB1,DB2]} (correlated sensitivity)")
print("-" * 60)
d = parse_descriptor("{[DB1,DB2]}")
for f in formulas:
    ok, witness = is_workable(f, d, m=2)
    mark = "workable" if ok else "rejected (no filter sees the fused data)"
    print(f"  {f.text:18} {mark}")
print()
print("  kept:", ", ".join(f.text for f in filter_workable(formulas, d, m=2)))
print()

print("Three databases, mixed sensitivity {DB3; [DB1,DB2]}")
print("-" * 60)
f = parse_formula("F.((B.E.F)x(E.B))")
ok, witness = is_workable(f, parse_descriptor("{DB3; [DB1,DB2]}"), m=3)
print(f"  {f.text}: workable={ok}")
print(f"  filter assignment (atom index -> groups): "
      f"{ {k: [sorted(g) for g in v] for k, v in witness.assignment.items()} }")
print(f"  {len(enumerate_formulas(3))} admissible three-database pipelines exist")
