"""Planning toolkit for secrecy-preserving information fusion pipelines.

The library models databases with declared sensitivity relations, the
build/filter/fuse pipelines that can process them, and the trust and
competence constraints of the stakeholders involved.  It enumerates and
validates the secrecy-preserving plans, helps select one under risk and
efficiency constraints, and includes a small paired-classifier workbench
demonstrating black-box and white-box secrecy filtering of support vector
machines.
"""

from .descriptors import (
    FilteringSchema,
    FilterOp,
    ParseError,
    SensitivityDescriptor,
    format_descriptor,
    format_schema,
    parse_descriptor,
    parse_schema,
)
from .formulas import (
    Atom,
    Parallel,
    ProcessFormula,
    Serial,
    format_formula,
    parse_formula,
)
from .grammar import (
    DerivationTrace,
    GroupIndexing,
    count_descriptors,
    derive,
    enumerate_descriptors,
)
from .algebra import (
    ReductionTrace,
    apply_filter,
    enumerate_schemas,
    is_valid_schema,
    merge,
    reduce_schema,
)
from .semantics import (
    Artifact,
    ArtifactState,
    Diagnostic,
    ExecutionError,
    WorkabilityWitness,
    enumerate_formulas,
    execute,
    filter_workable,
    is_workable,
    validate,
)
from .automaton import (
    ProcessAutomaton,
    TrustModel,
    accepted_language,
    apply_trust,
    build_automaton,
    mark_sensitive,
    to_dot,
)
from .planning import (
    PlanEvaluation,
    PlanProblem,
    RiskContext,
    feasible_set,
    pareto_frontier,
    select_max_efficiency,
    select_min_risk,
)

__version__ = "0.1.0"

__all__ = [
    "Artifact",
    "ArtifactState",
    "Atom",
    "DerivationTrace",
    "Diagnostic",
    "ExecutionError",
    "FilterOp",
    "FilteringSchema",
    "GroupIndexing",
    "Parallel",
    "ParseError",
    "PlanEvaluation",
    "PlanProblem",
    "ProcessAutomaton",
    "ProcessFormula",
    "ReductionTrace",
    "RiskContext",
    "SensitivityDescriptor",
    "Serial",
    "TrustModel",
    "WorkabilityWitness",
    "accepted_language",
    "apply_filter",
    "apply_trust",
    "build_automaton",
    "count_descriptors",
    "derive",
    "enumerate_descriptors",
    "enumerate_formulas",
    "enumerate_schemas",
    "execute",
    "feasible_set",
    "filter_workable",
    "format_descriptor",
    "format_formula",
    "format_schema",
    "is_valid_schema",
    "is_workable",
    "mark_sensitive",
    "merge",
    "pareto_frontier",
    "parse_descriptor",
    "parse_formula",
    "parse_schema",
    "reduce_schema",
    "select_max_efficiency",
    "select_min_risk",
    "to_dot",
    "validate",
]
