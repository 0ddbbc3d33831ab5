"""Plan selection: feasible set, risk/efficiency trade-off, frontier.

The planner chains descriptor -> schemas -> automata -> trust pruning into
the feasible plan set.  Evaluated plans are then selected under a risk cap
or an efficiency floor, or inspected as a non-dominated frontier.
"""

from pathlib import Path

from fusionplan import (
    PlanEvaluation,
    PlanProblem,
    RiskContext,
    TrustModel,
    feasible_set,
    pareto_frontier,
    parse_descriptor,
    parse_formula,
    select_max_efficiency,
    select_min_risk,
)

d = parse_descriptor("{[DB1,DB2]}")
trust = TrustModel.load(Path(__file__).parent / "configs" /
                        "trust_no_build_at_fused.json")

print("Feasible plans")
print("-" * 60)
permissive = PlanProblem(2, d, TrustModel.permissive())
constrained = PlanProblem(2, d, trust)
print("  permissive trust: ",
      ", ".join(f.text for f in feasible_set(permissive)))
print("  constrained trust:",
      ", ".join(f.text for f in feasible_set(constrained)))
print()

# hand-crafted evaluations: remapping outputs is cheap but limits accuracy,
# editing the classifier costs accuracy near the sensitive region only
evals = [
    PlanEvaluation(parse_formula("B.E.F"), efficiency=0.86, risk=0.0,
                   context=RiskContext(damage=1.0)),
    PlanEvaluation(parse_formula("E.F.(BxB)"), efficiency=0.92, risk=0.005,
                   context=RiskContext(damage=1.0)),
    PlanEvaluation(parse_formula("E.B.F"), efficiency=0.90, risk=0.02,
                   context=RiskContext(damage=1.0)),
]

print("Evaluations (efficiency up, risk down)")
print("-" * 60)
for e in evals:
    print(f"  {e.formula.text:12} efficiency={e.efficiency:.3f} risk={e.risk:.3f}")
print()

print("Constrained selections")
print("-" * 60)
best = select_max_efficiency(evals, r_star=0.01)
print(f"  max efficiency with risk < 0.01: {best.formula.text} "
      f"(F={best.efficiency}, R={best.risk})")
safest = select_min_risk(evals, f_star=0.9)
print(f"  min risk with efficiency > 0.90: {safest.formula.text} "
      f"(F={safest.efficiency}, R={safest.risk})")
print()

print("Non-dominated frontier (ascending risk)")
print("-" * 60)
for e in pareto_frontier(evals):
    print(f"  {e.formula.text:12} F={e.efficiency:.3f} R={e.risk:.3f}")
print()
print("E.B.F is dominated by E.F.(BxB); the final choice between the")
print("frontier plans stays with the human planner.")
