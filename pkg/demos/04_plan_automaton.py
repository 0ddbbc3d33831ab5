"""Plan automata: from a filtering schema to the feasible processing steps.

The automaton's states are artifact states (databases, fused databases,
classifiers); transitions are builds, filters and fuses, with a null action
T bridging one schema component to the next.  Marking sensitive states and
applying actor trust and competence constraints prunes the automaton; its
accepted language is the set of feasible pipelines.
"""

from pathlib import Path

from fusionplan import (
    TrustModel,
    accepted_language,
    apply_trust,
    build_automaton,
    mark_sensitive,
    parse_descriptor,
    parse_schema,
    to_dot,
)

d = parse_descriptor("{[DB1,DB2]}")
automaton = build_automaton(parse_schema("E([1,2])"), d, 2)
print(f"Automaton for schema E([1,2]) on {d}")
print("-" * 60)
print(f"  {len(automaton.states)} states, {len(automaton.transitions)} transitions, "
      f"{len(automaton.accepts)} accepting")
print("  accepted pipelines:",
      ", ".join(f.text for f in accepted_language(automaton)))
print()

marked = mark_sensitive(automaton, d)
print("Sensitive states (unfiltered fused content)")
print("-" * 60)
for label in sorted({s.label() for s in marked.sensitive}):
    print("  " + label)
print()

trust = TrustModel.load(Path(__file__).parent / "configs" /
                        "trust_no_build_at_fused.json")
pruned = apply_trust(marked, trust)
print("After trust and competence constraints (nobody may build from the")
print("fused raw database):")
print("-" * 60)
print("  feasible pipelines:",
      ", ".join(f.text for f in accepted_language(pruned)))
print()

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
(out / "plan_unconstrained.dot").write_text(to_dot(marked), encoding="utf-8")
(out / "plan_constrained.dot").write_text(to_dot(pruned), encoding="utf-8")
print(f"Graphviz renderings written to {out}/plan_*.dot")
print("(render with: dot -Tpng plan_constrained.dot -o plan.png)")
print()

print("A two-component schema keeps a T bridge between its parts:")
bridged = build_automaton(parse_schema("E(1)E([1,2])"),
                          parse_descriptor("{DB1; [DB1,DB2]}"), 2)
print(f"  E(1)E([1,2]): {len(bridged.component_boundaries)} bridge transitions, "
      f"accepted language {[f.text for f in accepted_language(bridged)]}")
print("  (no admissible pipeline passes one path through two filters, so")
print("   only the merged schema E(1;[1,2]) yields plans for this descriptor)")
