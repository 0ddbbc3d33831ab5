"""End-to-end plan search and risk/efficiency selection.

Wires a sensitivity descriptor through schema enumeration, automaton
construction and trust pruning into the feasible plan set, then selects
among evaluated plans under a risk cap or an efficiency floor, or exposes
the whole non-dominated frontier for human judgment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import enumerate_schemas
from .automaton import TrustModel, accepted_language, apply_trust, build_automaton, mark_sensitive
from .descriptors import SensitivityDescriptor
from .formulas import ProcessFormula

SCHEMA_SCOPES = ("unmerged", "merged", "all")


@dataclass(frozen=True)
class PlanProblem:
    """What to plan for: databases, sensitivity, trust, schema scope."""

    m: int
    descriptor: SensitivityDescriptor
    trust: TrustModel
    schema_scope: str = "all"

    def __post_init__(self):
        if self.schema_scope not in SCHEMA_SCOPES:
            raise ValueError(f"schema scope must be one of {SCHEMA_SCOPES}")
        if self.descriptor.m > self.m:
            raise ValueError("descriptor mentions databases beyond the problem size")


@dataclass(frozen=True)
class RiskContext:
    """Adversary context: their data D, their goals V, and the damage done
    if they learn the sensitive information."""

    adversary_data: object = None
    adversary_goals: object = None
    damage: float = 0.0

    def __post_init__(self):
        if self.damage < 0:
            raise ValueError("damage must be non-negative")


@dataclass(frozen=True)
class PlanEvaluation:
    """A plan with its efficiency (higher is better) and risk (lower is
    better); the risk context records what the risk was judged against."""

    formula: ProcessFormula
    efficiency: float
    risk: float
    context: RiskContext = field(default_factory=RiskContext)

    def __post_init__(self):
        for value, name in ((self.efficiency, "efficiency"), (self.risk, "risk")):
            if value != value or value in (float("inf"), float("-inf")):
                raise ValueError(f"{name} must be finite")
        if self.risk < 0:
            raise ValueError("risk must be non-negative")


def feasible_set(p: PlanProblem) -> list[ProcessFormula]:
    """All plans accepted by some trust-constrained schema automaton.

    The union runs over every schema of the descriptor in scope ("unmerged"
    restricts to one operation per group).  A null descriptor has no
    schemas, so planning degenerates to the empty set.
    """
    if p.descriptor.is_null:
        return []
    include_merged = p.schema_scope in ("merged", "all")
    formulas: dict[str, ProcessFormula] = {}
    for schema in enumerate_schemas(p.descriptor, include_merged=include_merged):
        automaton = build_automaton(schema, p.descriptor, p.m)
        marked = mark_sensitive(
            automaton, p.descriptor,
            joint_state_sensitive=p.trust.joint_state_sensitive)
        constrained = apply_trust(marked, p.trust)
        for formula in accepted_language(constrained):
            formulas.setdefault(formula.text, formula)
    return [formulas[key] for key in sorted(formulas)]


def select_max_efficiency(
    evals: list[PlanEvaluation], r_star: float
) -> PlanEvaluation | None:
    """Best efficiency among plans with risk strictly below the cap.

    Ties break toward lower risk, then canonical formula order; None when
    no plan qualifies.
    """
    candidates = [e for e in evals if e.risk < r_star]
    if not candidates:
        return None
    return min(candidates, key=lambda e: (-e.efficiency, e.risk, e.formula.text))


def select_min_risk(
    evals: list[PlanEvaluation], f_star: float
) -> PlanEvaluation | None:
    """Lowest risk among plans with efficiency strictly above the floor.

    Ties break toward higher efficiency, then canonical formula order.
    """
    candidates = [e for e in evals if e.efficiency > f_star]
    if not candidates:
        return None
    return min(candidates, key=lambda e: (e.risk, -e.efficiency, e.formula.text))


def _dominates(a: PlanEvaluation, b: PlanEvaluation) -> bool:
    return (a.efficiency >= b.efficiency and a.risk <= b.risk
            and (a.efficiency > b.efficiency or a.risk < b.risk))


def pareto_frontier(evals: list[PlanEvaluation]) -> list[PlanEvaluation]:
    """Evaluations not strictly dominated in the (efficiency, risk) plane,
    sorted by ascending risk."""
    frontier = [
        e for e in evals
        if not any(_dominates(other, e) for other in evals if other is not e)
    ]
    return sorted(frontier, key=lambda e: (e.risk, -e.efficiency, e.formula.text))
