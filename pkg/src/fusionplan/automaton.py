"""Plan automata: feasible operation sequences for a filtering schema.

Given a filtering schema for a sensitivity descriptor, the automaton's
states are artifact states and its transitions are the build, filter and
fuse steps (plus a null action T bridging the component of one schema
operation to the next).  Accepted paths are exactly the admissible
operation sequences that realize the schema's filter operations in order:
one build and one filter per database path, ending in a single clean
classifier over every database.

Sensitive states can then be marked, actor trust and competence constraints
applied, and the surviving accepted language extracted as process formulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from itertools import combinations

from .descriptors import (
    Group,
    SensitivityDescriptor,
    FilteringSchema,
    parse_group,
    format_group,
)
from .algebra import reduce_schema
from .formulas import Atom, Node, Parallel, ProcessFormula, Serial, BUILD, FILTER, FUSE
from .semantics import (
    Artifact,
    ArtifactState,
    CLASSIFIER,
    DATABASE,
)

NULL_ACTION = "T"

# Customary trust requirements per stakeholder role: which of the sensitive
# information (SI), the classifier internals (CL-WB) and the classifier
# input/output behaviour (CL-BB) the role must be trusted with.  Anyone
# trusted with CL-WB implicitly has CL-BB access.  Blank cells of the
# customary table are free choices and are therefore absent here.
ROLE_TRUST_REQUIREMENTS = {
    "DBO": frozenset({"SI"}),
    "CLP": frozenset({"CL-BB", "CL-WB"}),
    "CTF": frozenset({"SI", "CL-BB", "CL-WB"}),
    "CLU": frozenset({"CL-BB"}),
}


@dataclass(frozen=True)
class PlanState:
    """Automaton state: the artifacts plus schema progress.

    ``fired`` counts schema filter operations already performed;
    ``pending_bridge`` is set right after a non-final schema operation, when
    the only available move is the null action T into the next component.
    """

    artifacts: tuple[Artifact, ...]
    fired: int = 0
    pending_bridge: bool = False

    def label(self) -> str:
        return ArtifactState(self.artifacts).label()


@dataclass(frozen=True)
class ActionLabel:
    """Transition label: kind B, E, F or T plus target source sets."""

    kind: str
    targets: tuple[frozenset, ...] = ()
    args: tuple[Group, ...] = ()

    def __str__(self) -> str:
        if self.kind == NULL_ACTION:
            return NULL_ACTION
        names = ",".join(
            "+".join(str(i) for i in sorted(t)) for t in self.targets)
        if self.kind == FILTER and self.args:
            inner = ";".join(format_group(g, db_prefix=False) for g in self.args)
            return f"E({inner})@{names}"
        return f"{self.kind}@{names}"


@dataclass(frozen=True)
class ProcessAutomaton:
    """A finite, acyclic labeled transition system over plan states."""

    m: int
    descriptor: SensitivityDescriptor
    schema: FilteringSchema | None
    start: PlanState
    states: tuple[PlanState, ...]
    transitions: tuple[tuple[PlanState, ActionLabel, PlanState], ...]
    accepts: frozenset = frozenset()
    sensitive: frozenset = frozenset()

    def successors(self, state: PlanState):
        return [(label, dst) for src, label, dst in self.transitions if src == state]

    @property
    def component_boundaries(self) -> tuple[tuple[PlanState, PlanState], ...]:
        """The (source, destination) pairs of the null-action bridges."""
        return tuple((s, d) for s, l, d in self.transitions if l.kind == NULL_ACTION)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _initial_state(d: SensitivityDescriptor, m: int) -> PlanState:
    artifacts = []
    for i in range(1, m + 1):
        singleton = frozenset([i])
        residual = frozenset(g for g in d.groups if g <= singleton)
        artifacts.append(Artifact(DATABASE, singleton, residual))
    return PlanState(tuple(artifacts))


def _sorted_artifacts(arts) -> tuple[Artifact, ...]:
    return tuple(sorted(arts, key=lambda a: min(a.sources)))


def _fusable(group: tuple[Artifact, ...], others: list[Artifact]) -> bool:
    """Same kind, all raw or all processed, and contiguous database span."""
    kinds = {a.kind for a in group}
    if len(kinds) != 1:
        return False
    raw = [a.is_raw for a in group]
    if any(raw) and not all(raw):
        return False
    span = set()
    for a in group:
        span |= a.sources
    low, high = min(span), max(span)
    for other in others:
        if any(low < s < high for s in other.sources):
            return False
    return True


def _fuse(group: tuple[Artifact, ...], d: SensitivityDescriptor) -> Artifact:
    sources = frozenset().union(*(a.sources for a in group))
    residual = frozenset().union(*(a.residual for a in group))
    materialized = frozenset(
        g for g in d.groups
        if g <= sources and not any(g <= a.sources for a in group))
    filtered = frozenset().union(*(a.filtered for a in group))
    return Artifact(group[0].kind, sources, residual | materialized, filtered)


def build_automaton(
    schema: FilteringSchema, d: SensitivityDescriptor, m: int
) -> ProcessAutomaton:
    """Construct the plan automaton for a schema that reduces ``d`` to {}.

    Paths interleave builds and fuses freely around the schema's filter
    operations (applied rightmost first); filters that remove nothing are
    allowed on not-yet-filtered artifacts so that every database path can
    pass through exactly one filter step.  A null action T bridges the end
    of one schema component to the start of the next.
    """
    trace = reduce_schema(schema, d)  # raises if some op targets nothing
    if not trace.is_valid:
        raise ValueError(
            f"schema {schema} does not reduce {d} to the null descriptor")
    ops = schema.applied_order()
    total_ops = len(ops)
    full = frozenset(range(1, m + 1))

    start = _initial_state(d, m)
    states: dict[PlanState, None] = {start: None}
    transitions: list[tuple[PlanState, ActionLabel, PlanState]] = []
    queue = [start]
    while queue:
        state = queue.pop()
        arts = state.artifacts

        def add(label: ActionLabel, new_arts, fired=None, bridge=None):
            dst = PlanState(
                _sorted_artifacts(new_arts),
                state.fired if fired is None else fired,
                state.pending_bridge if bridge is None else bridge,
            )
            transitions.append((state, label, dst))
            if dst not in states:
                states[dst] = None
                queue.append(dst)

        if state.pending_bridge:
            add(ActionLabel(NULL_ACTION), arts, bridge=False)
            continue

        for idx, art in enumerate(arts):
            rest = arts[:idx] + arts[idx + 1 :]
            if art.is_database:
                built = Artifact(CLASSIFIER, art.sources, art.residual, art.filtered)
                add(ActionLabel(BUILD, (art.sources,)), rest + (built,))
            if not art.filtered:
                if not art.residual:
                    # a filter step that has nothing to remove here
                    cleaned = replace(art, filtered=art.sources)
                    add(ActionLabel(FILTER, (art.sources,)), rest + (cleaned,))
                if state.fired < total_ops:
                    op = ops[state.fired]
                    if all(g in art.residual for g in op.args):
                        cleaned = Artifact(
                            art.kind,
                            art.sources,
                            art.residual - frozenset(op.args),
                            art.sources,
                        )
                        fired = state.fired + 1
                        add(
                            ActionLabel(FILTER, (art.sources,), op.args),
                            rest + (cleaned,),
                            fired=fired,
                            bridge=fired < total_ops,
                        )
        for size in range(2, len(arts) + 1):
            for chosen in combinations(range(len(arts)), size):
                group = tuple(arts[i] for i in chosen)
                others = [a for i, a in enumerate(arts) if i not in chosen]
                if _fusable(group, others):
                    fused = _fuse(group, d)
                    add(
                        ActionLabel(FUSE, tuple(a.sources for a in group)),
                        tuple(others) + (fused,),
                    )

    accepts = frozenset(
        s for s in states
        if s.fired == total_ops
        and not s.pending_bridge
        and len(s.artifacts) == 1
        and s.artifacts[0].is_classifier
        and s.artifacts[0].sources == full
        and not s.artifacts[0].residual
        and s.artifacts[0].filtered == full
    )
    return ProcessAutomaton(
        m=m,
        descriptor=d,
        schema=schema,
        start=start,
        states=tuple(states),
        transitions=tuple(transitions),
        accepts=accepts,
    )


# ---------------------------------------------------------------------------
# Sensitivity marking and trust constraints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArtifactPattern:
    """Matches one artifact by kind, source set and filtered status."""

    kind: str | None = None        # "database" / "classifier" / None = any
    sources: frozenset | None = None
    filtered: bool | None = None   # True: residual gone & path filtered

    def matches(self, artifact: Artifact) -> bool:
        if self.kind is not None and artifact.kind != self.kind:
            return False
        if self.sources is not None and artifact.sources != self.sources:
            return False
        if self.filtered is not None:
            is_filtered = artifact.filtered >= artifact.sources and not artifact.residual
            if is_filtered != self.filtered:
                return False
        return True

    @staticmethod
    def from_json(obj: dict) -> "ArtifactPattern":
        kind = obj.get("kind")
        if kind is not None:
            kind = {"database": DATABASE, "db": DATABASE,
                    "classifier": CLASSIFIER, "c": CLASSIFIER}.get(kind.lower())
            if kind is None:
                raise ValueError(f"unknown artifact kind {obj.get('kind')!r}")
        sources = obj.get("sources")
        if sources is not None and sources != "*":
            sources = parse_group(sources)
        else:
            sources = None
        filtered = obj.get("filtered")
        if filtered == "*":
            filtered = None
        return ArtifactPattern(kind, sources, filtered)


@dataclass(frozen=True)
class StatePattern:
    """Matches a state containing distinct artifacts for all sub-patterns."""

    artifacts: tuple[ArtifactPattern, ...]

    def matches(self, state: PlanState) -> bool:
        def assign(patterns, available):
            if not patterns:
                return True
            head, tail = patterns[0], patterns[1:]
            for i, artifact in enumerate(available):
                if head.matches(artifact):
                    if assign(tail, available[:i] + available[i + 1 :]):
                        return True
            return False

        return assign(self.artifacts, list(state.artifacts))

    @staticmethod
    def from_json(obj: dict) -> "StatePattern":
        if "artifacts" in obj:
            return StatePattern(
                tuple(ArtifactPattern.from_json(p) for p in obj["artifacts"]))
        return StatePattern((ArtifactPattern.from_json(obj),))


@dataclass(frozen=True)
class CompetenceRule:
    actor: str
    action: str                      # "B", "E", "F" or "T"
    ok: bool
    target: ArtifactPattern | None = None


@dataclass(frozen=True)
class TrustModel:
    """Stakeholder trust and competence configuration.

    ``actors`` maps actor ids to roles (DBO database owner, CLP classifier
    producer, CTF certifier, CLU classifier user).  ``trusted`` lists which
    actors may be exposed to states matching a pattern.  Competence defaults
    to True; rules with ok=False withdraw an actor's competence for an
    action kind, optionally only at targets matching a pattern.
    """

    actors: tuple[tuple[str, str], ...] = ()
    trusted: tuple[tuple[StatePattern, tuple[str, ...]], ...] = ()
    competence: tuple[CompetenceRule, ...] = ()
    joint_state_sensitive: bool = False

    ROLES = ("DBO", "CLP", "CTF", "CLU")

    def __post_init__(self):
        ids = {a for a, _ in self.actors}
        for _, role in self.actors:
            if role not in self.ROLES:
                raise ValueError(f"unknown stakeholder role {role!r}")
        for _, actors in self.trusted:
            for a in actors:
                if a not in ids:
                    raise ValueError(f"trusted list references unknown actor {a!r}")
        for rule in self.competence:
            if rule.actor not in ids:
                raise ValueError(f"competence rule references unknown actor {rule.actor!r}")
            if rule.action not in (BUILD, FILTER, FUSE, NULL_ACTION):
                raise ValueError(f"unknown action kind {rule.action!r}")

    def trusted_actors(self, state: PlanState) -> frozenset:
        out = set()
        for pattern, actors in self.trusted:
            if pattern.matches(state):
                out.update(actors)
        return frozenset(out)

    def is_competent(self, actor: str, label: ActionLabel,
                     state: PlanState) -> bool:
        for rule in self.competence:
            if rule.actor != actor or rule.action != label.kind:
                continue
            if rule.target is not None:
                hit = any(
                    artifact.sources in label.targets and rule.target.matches(artifact)
                    for artifact in state.artifacts)
                if not hit:
                    continue
            if not rule.ok:
                return False
        return True

    @staticmethod
    def permissive(actors=(("A1", "DBO"), ("A2", "CLP"), ("A3", "CTF"))) -> "TrustModel":
        """Everyone is trusted with everything and competent for everything."""
        anything = StatePattern((ArtifactPattern(),))
        return TrustModel(
            actors=tuple(actors),
            trusted=((anything, tuple(a for a, _ in actors)),),
        )

    @staticmethod
    def from_json(obj: dict) -> "TrustModel":
        actors = tuple((a["id"], a["role"]) for a in obj.get("actors", ()))
        trusted = tuple(
            (StatePattern.from_json(entry["pattern"]), tuple(entry["actors"]))
            for entry in obj.get("trusted", ()))
        competence = tuple(
            CompetenceRule(
                entry["actor"],
                entry["action"],
                bool(entry["ok"]),
                ArtifactPattern.from_json(entry["target"]) if "target" in entry else None,
            )
            for entry in obj.get("competence", ()))
        return TrustModel(
            actors=actors,
            trusted=trusted,
            competence=competence,
            joint_state_sensitive=bool(obj.get("joint_state_sensitive", False)),
        )

    @staticmethod
    def load(path) -> "TrustModel":
        with open(path, "r", encoding="utf-8") as fh:
            return TrustModel.from_json(json.load(fh))


def mark_sensitive(
    a: ProcessAutomaton,
    d: SensitivityDescriptor | None = None,
    joint_state_sensitive: bool = False,
) -> ProcessAutomaton:
    """Mark states whose artifacts expose unfiltered correlated sensitivity.

    A state is sensitive when some artifact still carries a multi-database
    group in its residual.  With ``joint_state_sensitive``, states holding
    two or more classifiers whose combined sources span a declared
    correlated group are marked as well (their holders could collude).
    The start state is never marked: database owners hold their own data by
    prerequisite.
    """
    if d is None:
        d = a.descriptor
    sensitive = set()
    for state in a.states:
        if state == a.start:
            continue
        if any(any(len(g) > 1 for g in art.residual) for art in state.artifacts):
            sensitive.add(state)
            continue
        if joint_state_sensitive:
            classifiers = [art for art in state.artifacts if art.is_classifier]
            if len(classifiers) >= 2:
                union = frozenset().union(*(c.sources for c in classifiers))
                for g in d.groups:
                    if len(g) > 1 and g <= union and not any(
                            g <= art.sources for art in state.artifacts):
                        sensitive.add(state)
                        break
    return replace(a, sensitive=frozenset(sensitive))


def _prune_connected(a: ProcessAutomaton) -> ProcessAutomaton:
    """Drop states not on any start-to-accept path (the start state stays)."""
    forward = {a.start}
    changed = True
    while changed:
        changed = False
        for src, _, dst in a.transitions:
            if src in forward and dst not in forward:
                forward.add(dst)
                changed = True
    backward = set(a.accepts)
    changed = True
    while changed:
        changed = False
        for src, _, dst in a.transitions:
            if dst in backward and src not in backward:
                backward.add(src)
                changed = True
    alive = (forward & backward) | {a.start}
    transitions = tuple(
        (s, l, t) for s, l, t in a.transitions if s in alive and t in alive)
    return replace(
        a,
        states=tuple(s for s in a.states if s in alive),
        transitions=transitions,
        accepts=frozenset(s for s in a.accepts if s in alive),
        sensitive=frozenset(s for s in a.sensitive if s in alive),
    )


def apply_trust(a: ProcessAutomaton, t: TrustModel) -> ProcessAutomaton:
    """Remove what no trusted, competent actor can hold or perform.

    Sensitive states without trusted actors disappear with all incident
    transitions; transitions out of the remaining sensitive states survive
    only if some trusted actor is competent for the action; finally states
    off every start-to-accept path are pruned.
    """
    removed = {s for s in a.sensitive if not t.trusted_actors(s)}
    transitions = []
    for src, label, dst in a.transitions:
        if src in removed or dst in removed:
            continue
        if src in a.sensitive:
            actors = t.trusted_actors(src)
            if not any(t.is_competent(actor, label, src) for actor in actors):
                continue
        transitions.append((src, label, dst))
    pruned = replace(
        a,
        states=tuple(s for s in a.states if s not in removed),
        transitions=tuple(transitions),
        accepts=frozenset(s for s in a.accepts if s not in removed),
        sensitive=frozenset(s for s in a.sensitive if s not in removed),
    )
    return _prune_connected(pruned)


# ---------------------------------------------------------------------------
# Language extraction
# ---------------------------------------------------------------------------


class _Expr:
    """Reconstruction record for one artifact: fused children + op chain."""

    __slots__ = ("children", "chain")

    def __init__(self, children=None, chain=None):
        self.children = children  # None for a raw database, else list of _Expr
        self.chain = chain or []  # atoms in application order


def _render(expr: _Expr) -> Node | None:
    """Canonical AST for one artifact expression.

    Sibling branches that are flat single-database chains render as
    cross-product stages; anything nested renders as parallel sub-formulas.
    """
    elements: list[Node] = []
    if expr.children is not None:
        flat = all(c.children is None for c in expr.children)
        chains = [c.chain for c in expr.children]
        if flat and all(not c for c in chains):
            elements.append(Atom(FUSE))
        elif flat and all(len(c) == len(chains[0]) for c in chains):
            stages = [
                Parallel([Atom(chain[t]) for chain in chains])
                for t in range(len(chains[0]))
            ]
            elements = [Atom(FUSE)] + list(reversed(stages))
        else:
            rendered = [_render(c) for c in expr.children]
            if any(r is None for r in rendered):
                raise ValueError("raw database fused with processed artifacts "
                                 "is not expressible as a formula")
            elements = [Atom(FUSE), Parallel(rendered)]
    post = [Atom(kind) for kind in reversed(expr.chain)]
    elements = post + elements
    if not elements:
        return None  # raw, untouched database
    return elements[0] if len(elements) == 1 else Serial(elements)


def reconstruct_formula(labels) -> ProcessFormula:
    """Fold an accepted label sequence back into a canonical formula."""
    exprs: dict[frozenset, _Expr] = {}

    def expr_for(sources: frozenset) -> _Expr:
        if sources not in exprs:
            exprs[sources] = _Expr()  # raw database
        return exprs[sources]

    current: _Expr | None = None
    for label in labels:
        if label.kind == NULL_ACTION:
            continue
        if label.kind == FUSE:
            children = [expr_for(t) for t in sorted(label.targets, key=min)]
            merged = frozenset().union(*label.targets)
            for t in label.targets:
                exprs.pop(t, None)
            fused = _Expr(children=children)
            exprs[merged] = fused
            current = fused
        else:
            target = expr_for(label.targets[0])
            target.chain.append(BUILD if label.kind == BUILD else FILTER)
            current = target
    if current is None:
        raise ValueError("empty label sequence")
    root = _render(current)
    if root is None:
        raise ValueError("label sequence applies no operations")
    return ProcessFormula(root)


def accepted_paths(a: ProcessAutomaton):
    """Every start-to-accept label sequence (the automaton is acyclic)."""
    adjacency: dict[PlanState, list] = {}
    for src, label, dst in a.transitions:
        adjacency.setdefault(src, []).append((label, dst))
    for neighbours in adjacency.values():
        neighbours.sort(key=lambda pair: str(pair[0]))

    paths = []
    stack = [(a.start, [])]
    guard = 0
    while stack:
        state, prefix = stack.pop()
        guard += 1
        if guard > 1_000_000:
            raise RuntimeError("path explosion: automaton is unexpectedly large")
        if state in a.accepts:
            paths.append(tuple(prefix))
        for label, dst in adjacency.get(state, ()):
            stack.append((dst, prefix + [label]))
    return paths


def accepted_language(a: ProcessAutomaton) -> list[ProcessFormula]:
    """All feasible plans as canonical process formulas, sorted by text."""
    formulas: dict[str, ProcessFormula] = {}
    for path in accepted_paths(a):
        formula = reconstruct_formula(path)
        formulas.setdefault(formula.text, formula)
    return [formulas[key] for key in sorted(formulas)]


# ---------------------------------------------------------------------------
# DOT rendering
# ---------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace('"', r"\"") + '"'


def to_dot(a: ProcessAutomaton) -> str:
    """Graphviz rendering; sensitive states are filled red, accepting states
    double-circled, null-action bridges dashed."""
    multi = any(s.fired or s.pending_bridge for s in a.states)

    def name(state: PlanState) -> str:
        text = state.label()
        if multi:
            text += f" #{state.fired}"
            if state.pending_bridge:
                text += "*"
        return text

    lines = ["digraph plan {", "  rankdir=LR;", '  node [shape=ellipse];']
    order = {s: i for i, s in enumerate(a.states)}
    for state in sorted(a.states, key=order.get):
        attrs = []
        if state in a.accepts:
            attrs.append("shape=doublecircle")
        if state in a.sensitive:
            attrs.append('style=filled fillcolor="#ff9896"')
        suffix = f" [{' '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(name(state))}{suffix};")
    lines.append('  __start [shape=point];')
    lines.append(f"  __start -> {_quote(name(a.start))};")
    for src, label, dst in sorted(
            a.transitions, key=lambda t: (order[t[0]], str(t[1]), order[t[2]])):
        style = " style=dashed" if label.kind == NULL_ACTION else ""
        lines.append(
            f"  {_quote(name(src))} -> {_quote(name(dst))}"
            f" [label={_quote(str(label))}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
