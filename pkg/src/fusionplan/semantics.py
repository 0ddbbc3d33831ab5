"""Semantics of process formulas over artifact states.

A formula is executed symbolically on one artifact per database.  Build
turns a database into a classifier, fuse merges same-kind artifacts, and
filter removes sensitivity groups from the residual of its input artifact.
Correlated groups only materialize in an artifact that covers all their
databases, which is why correlated sensitivity forces fusion before
filtering.

Workability asks whether some assignment of descriptor groups to the
formula's filter atoms leaves every residual empty at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .descriptors import SensitivityDescriptor
from .formulas import (
    BUILD,
    FILTER,
    FUSE,
    Atom,
    Node,
    Parallel,
    ProcessFormula,
    Serial,
    format_formula,
)

DATABASE = "database"
CLASSIFIER = "classifier"

MAX_ENUM_DATABASES = 3


class ExecutionError(ValueError):
    """An operation was applied to artifacts that cannot accept it."""


@dataclass(frozen=True)
class Artifact:
    """One intermediate artifact: a database or a classifier.

    ``sources`` are the database indices whose data flowed in, ``residual``
    the sensitivity groups still present, and ``filtered`` the sources whose
    processing path has already passed through a filter step.
    """

    kind: str
    sources: frozenset
    residual: frozenset = frozenset()
    filtered: frozenset = frozenset()

    @property
    def is_database(self) -> bool:
        return self.kind == DATABASE

    @property
    def is_classifier(self) -> bool:
        return self.kind == CLASSIFIER

    @property
    def is_raw(self) -> bool:
        """An untouched input database."""
        return self.is_database and len(self.sources) == 1 and not self.filtered

    def label(self) -> str:
        prefix = "DB" if self.is_database else "C"
        name = prefix + "+".join(str(i) for i in sorted(self.sources))
        if self.filtered >= self.sources and not self.residual:
            name += "'"  # fully filtered and clean
        elif self.filtered:
            name += "~"  # some paths filtered, yet sensitivity remains
        return name


@dataclass(frozen=True)
class ArtifactState:
    """An ordered collection of disjoint artifacts."""

    artifacts: tuple[Artifact, ...]

    @property
    def residuals_empty(self) -> bool:
        return all(not a.residual for a in self.artifacts)

    def label(self) -> str:
        names = [a.label() for a in self.artifacts]
        return names[0] if len(names) == 1 else "[" + ", ".join(names) + "]"

    def __len__(self) -> int:
        return len(self.artifacts)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    node: Node | None = None

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class WorkabilityWitness:
    """Which groups each filter atom removes, plus the resulting state.

    Keys of ``assignment`` are preorder indices of atoms in the formula
    (see ``ProcessFormula.atoms``); values are the removed groups.
    """

    assignment: dict = field(hash=False)
    final_state: ArtifactState = None


# ---------------------------------------------------------------------------
# Shape analysis (how many input artifacts a node consumes)
# ---------------------------------------------------------------------------


def _min_arity(node: Node) -> int:
    if isinstance(node, Atom):
        return 2 if node.kind == FUSE else 1
    if isinstance(node, Serial):
        return _min_arity(node.children[-1])
    return sum(_min_arity(c) for c in node.children)


def _is_flexible(node: Node) -> bool:
    """Whether the node's first-applied element is a fuse, which can absorb
    any number of extra inputs."""
    if isinstance(node, Atom):
        return node.kind == FUSE
    if isinstance(node, Serial):
        return _is_flexible(node.children[-1])
    return any(_is_flexible(c) for c in node.children)


def _out_count(node: Node) -> int:
    if isinstance(node, Atom):
        return 1
    if isinstance(node, Serial):
        return _out_count(node.children[0])
    return sum(_out_count(c) for c in node.children)


def _can_consume(node: Node, n: int) -> bool:
    if isinstance(node, Atom):
        return n >= 2 if node.kind == FUSE else n == 1
    if isinstance(node, Serial):
        if not _can_consume(node.children[-1], n):
            return False
        count = _out_count(node.children[-1])
        for child in reversed(node.children[:-1]):
            if not _can_consume(child, count):
                return False
            count = _out_count(child)
        return True
    minimum = _min_arity(node)
    return n >= minimum and (n == minimum or _is_flexible(node))


def _split_arities(node: Parallel, n: int) -> list[int]:
    """Deterministic input split: extras go to the first flexible branch."""
    minima = [_min_arity(c) for c in node.children]
    extra = n - sum(minima)
    if extra < 0:
        raise ExecutionError(f"parallel node needs at least {sum(minima)} inputs, got {n}")
    arities = list(minima)
    if extra:
        for i, child in enumerate(node.children):
            if _is_flexible(child) and _can_consume(child, minima[i] + extra):
                arities[i] += extra
                extra = 0
                break
        if extra:
            raise ExecutionError(f"cannot distribute {n} inputs over parallel branches")
    return arities


def resolve_arity(f: ProcessFormula, d: SensitivityDescriptor | None = None,
                  m: int | None = None) -> int:
    """Number of input databases the formula consumes.

    Explicit ``m`` wins, then the binding length, then the descriptor's
    database count when compatible, then the structural minimum.
    """
    if m is not None:
        if not _can_consume(f.root, m):
            raise ExecutionError(f"formula {f.text} cannot consume {m} databases")
        return m
    if f.binding is not None:
        return len(f.binding)
    if d is not None and d.m >= 1 and _can_consume(f.root, d.m):
        return d.m
    return _min_arity(f.root)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(f: ProcessFormula, m: int) -> list[Diagnostic]:
    """Structural diagnostics; an admissible formula yields an empty list.

    Checks: the formula consumes exactly m databases; every input's path
    passes through exactly one build and one filter; every fuse merges at
    least two same-kind artifacts; the result is one classifier covering
    all m databases.
    """
    diagnostics: list[Diagnostic] = []
    if f.binding is not None:
        if len(f.binding) != m:
            diagnostics.append(Diagnostic(
                f"binding lists {len(f.binding)} databases but m={m}", f.root))
        elif sorted(f.binding) != list(range(1, m + 1)):
            diagnostics.append(Diagnostic(
                "binding must mention each of DB1..DB%d exactly once" % m, f.root))
    if not _can_consume(f.root, m):
        diagnostics.append(Diagnostic(
            f"formula consumes {_min_arity(f.root)}+ databases, not {m}", f.root))
        return diagnostics

    # tolerant symbolic run tracking per-path build/filter multiplicity
    def run(node: Node, arts: list[dict]) -> list[dict]:
        if isinstance(node, Atom):
            if node.kind == BUILD:
                art = arts[0]
                if art["kind"] == CLASSIFIER:
                    diagnostics.append(Diagnostic(
                        "a path passes through more than one build", node))
                return [{**art, "kind": CLASSIFIER}]
            if node.kind == FILTER:
                art = arts[0]
                counts = dict(art["filters"])
                for leaf in art["sources"]:
                    counts[leaf] = counts.get(leaf, 0) + 1
                return [{**art, "filters": counts}]
            # fuse
            kinds = {a["kind"] for a in arts}
            if len(kinds) > 1:
                diagnostics.append(Diagnostic(
                    "fuse applied across databases and classifiers", node))
            merged_filters: dict = {}
            for a in arts:
                merged_filters.update(a["filters"])
            return [{
                "kind": CLASSIFIER if kinds == {CLASSIFIER} else DATABASE,
                "sources": frozenset().union(*(a["sources"] for a in arts)),
                "filters": merged_filters,
            }]
        if isinstance(node, Serial):
            for child in reversed(node.children):
                arts = run(child, arts)
            return arts
        out: list[dict] = []
        start = 0
        for child, take in zip(node.children, _split_arities(node, len(arts))):
            out.extend(run(child, arts[start : start + take]))
            start += take
        return out

    initial = [{"kind": DATABASE, "sources": frozenset([i]), "filters": {}}
               for i in range(1, m + 1)]
    final = run(f.root, initial)

    if len(final) != 1:
        diagnostics.append(Diagnostic(
            f"formula leaves {len(final)} artifacts instead of one", f.root))
    else:
        art = final[0]
        if art["kind"] != CLASSIFIER:
            diagnostics.append(Diagnostic("final artifact is not a classifier", f.root))
        if art["sources"] != frozenset(range(1, m + 1)):
            diagnostics.append(Diagnostic(
                "final artifact does not cover all databases", f.root))
        for leaf in sorted(art["sources"]):
            count = art["filters"].get(leaf, 0)
            if count != 1:
                diagnostics.append(Diagnostic(
                    f"path of DB{leaf} passes through {count} filters, expected 1",
                    f.root))
    return diagnostics


def is_valid(f: ProcessFormula, m: int) -> bool:
    return not validate(f, m)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _atom_index_by_path(f: ProcessFormula) -> dict[tuple, int]:
    """Preorder index for every atom, keyed by its tree path."""
    indices: dict[tuple, int] = {}
    counter = [0]

    def walk(node: Node, path: tuple) -> None:
        if isinstance(node, Atom):
            indices[path] = counter[0]
            counter[0] += 1
        else:
            for i, child in enumerate(node.children):
                walk(child, path + (i,))

    walk(f.root, ())
    return indices


def execute(
    f: ProcessFormula,
    d: SensitivityDescriptor,
    witness: dict | None = None,
    m: int | None = None,
) -> ArtifactState:
    """Run a formula symbolically against a sensitivity descriptor.

    ``witness`` maps preorder atom indices of bare filter atoms to the
    groups they remove; filter atoms with explicit arguments use those.
    Structural validity is not enforced here, so degenerate pipelines
    (e.g. no filter at all on an empty descriptor) can still be executed.
    """
    witness = witness or {}
    n = resolve_arity(f, d, m)
    atom_index = _atom_index_by_path(f)
    binding = f.binding if f.binding is not None else tuple(range(1, n + 1))
    groups = set(d.groups)

    def initial(db: int) -> Artifact:
        singleton = frozenset([db])
        residual = frozenset(g for g in groups if g <= singleton)
        return Artifact(DATABASE, singleton, residual)

    def run(node: Node, arts: list[Artifact], path: tuple) -> list[Artifact]:
        if isinstance(node, Atom):
            if node.kind == BUILD:
                art = arts[0]
                if not art.is_database:
                    raise ExecutionError("build applied to a classifier")
                return [Artifact(CLASSIFIER, art.sources, art.residual, art.filtered)]
            if node.kind == FILTER:
                art = arts[0]
                if node.args is not None:
                    args = node.args
                else:
                    args = tuple(witness.get(atom_index[path], ()))
                residual = set(art.residual)
                for g in args:
                    g = frozenset(g)
                    if g not in residual:
                        raise ExecutionError(
                            f"filter assigned group not present in residual of "
                            f"{art.label()}")
                    residual.discard(g)
                return [Artifact(art.kind, art.sources, frozenset(residual),
                                 art.filtered | art.sources)]
            # fuse
            kinds = {a.kind for a in arts}
            if len(kinds) != 1:
                raise ExecutionError("fuse applied across databases and classifiers")
            sources = frozenset().union(*(a.sources for a in arts))
            residual = frozenset().union(*(a.residual for a in arts))
            materialized = frozenset(
                g for g in groups
                if g <= sources and not any(g <= a.sources for a in arts))
            filtered = frozenset().union(*(a.filtered for a in arts))
            return [Artifact(kinds.pop(), sources, residual | materialized, filtered)]
        if isinstance(node, Serial):
            for i in reversed(range(len(node.children))):
                arts = run(node.children[i], arts, path + (i,))
            return arts
        out: list[Artifact] = []
        start = 0
        for i, (child, take) in enumerate(
                zip(node.children, _split_arities(node, len(arts)))):
            out.extend(run(child, arts[start : start + take], path + (i,)))
            start += take
        return out

    final = run(f.root, [initial(db) for db in binding], ())
    return ArtifactState(tuple(final))


# ---------------------------------------------------------------------------
# Workability
# ---------------------------------------------------------------------------


def is_workable(
    f: ProcessFormula, d: SensitivityDescriptor, m: int | None = None
) -> tuple[bool, WorkabilityWitness | None]:
    """Search exhaustively for a filter assignment that clears all residuals.

    Assumes the formula itself is admissible (see ``validate``).  Filter
    atoms with explicit arguments are held fixed; remaining groups are
    distributed over the bare filter atoms in every possible way.
    """
    filter_atoms = f.filter_atoms()
    fixed: dict[int, tuple] = {
        i: a.args for i, a in filter_atoms if a.args is not None}
    bare = [i for i, a in filter_atoms if a.args is None]
    explicit_groups = {g for args in fixed.values() for g in args}
    remaining = [g for g in d.groups if g not in explicit_groups]

    if remaining and not bare:
        return False, None

    choices = [bare for _ in remaining] if remaining else [[None]]
    for combo in product(*choices):
        assignment: dict[int, list] = {i: [] for i in bare}
        if remaining:
            for g, atom_idx in zip(remaining, combo):
                assignment[atom_idx].append(g)
        witness = {i: tuple(gs) for i, gs in assignment.items()}
        try:
            state = execute(f, d, witness=witness, m=m)
        except ExecutionError:
            continue
        if state.residuals_empty:
            full = dict(witness)
            full.update(fixed)
            return True, WorkabilityWitness(full, state)
    return False, None


def filter_workable(
    formulas: list[ProcessFormula],
    d: SensitivityDescriptor,
    m: int | None = None,
) -> list[ProcessFormula]:
    """Keep the formulas that are admissible and workable for a descriptor."""
    out = []
    for f in formulas:
        arity = resolve_arity(f, d, m)
        if validate(f, arity):
            continue
        if is_workable(f, d, m=arity)[0]:
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _chains(need_build: bool, need_filter: bool) -> list[tuple[str, ...]]:
    """Single-artifact op sequences in application order."""
    if need_build and need_filter:
        return [(FILTER, BUILD), (BUILD, FILTER)]
    if need_build:
        return [(BUILD,)]
    if need_filter:
        return [(FILTER,)]
    return []


def _chain_ast(chain: tuple[str, ...]) -> Node:
    atoms = [Atom(kind) for kind in chain]
    if len(atoms) == 1:
        return atoms[0]
    return Serial(tuple(reversed(atoms)))  # leftmost child is applied last


def _compositions(n: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(n,)]
    out = []
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            out.append((first,) + rest)
    return out


def _suffixes(need_build: bool, need_filter: bool) -> list[tuple[str, ...]]:
    """Op sequences applied after the top fuse, in application order."""
    options: list[tuple[str, ...]] = [()]
    if need_build:
        options.append((BUILD,))
    if need_filter:
        options.append((FILTER,))
    if need_build and need_filter:
        options.extend([(BUILD, FILTER), (FILTER, BUILD)])
    return options


def _generate(n: int, need_build: bool, need_filter: bool) -> list[Node]:
    if n == 1:
        return [_chain_ast(c) for c in _chains(need_build, need_filter)]

    results: list[Node] = []
    for suffix in _suffixes(need_build, need_filter):
        rem_build = need_build and BUILD not in suffix
        rem_filter = need_filter and FILTER not in suffix
        suffix_atoms = [Atom(kind) for kind in reversed(suffix)]

        def emit(core: list[Node]) -> None:
            elements = suffix_atoms + core
            results.append(elements[0] if len(elements) == 1 else Serial(elements))

        if not rem_build and not rem_filter:
            # all inputs fused raw in one step
            emit([Atom(FUSE)])

        for parts in range(2, n + 1):
            for comp in _compositions(n, parts):
                if all(size == 1 for size in comp):
                    chains = _chains(rem_build, rem_filter)
                    if not chains:
                        continue  # identity branches are inexpressible
                    length = len(chains[0])
                    for combo in product(chains, repeat=parts):
                        stages = [
                            Parallel([Atom(branch[t]) for branch in combo])
                            for t in range(length)
                        ]
                        emit([Atom(FUSE)] + list(reversed(stages)))
                else:
                    branch_options = []
                    for size in comp:
                        if size == 1:
                            asts = [_chain_ast(c)
                                    for c in _chains(rem_build, rem_filter)]
                        else:
                            asts = _generate(size, rem_build, rem_filter)
                        branch_options.append(asts)
                    if any(not opts for opts in branch_options):
                        continue
                    for combo in product(*branch_options):
                        emit([Atom(FUSE), Parallel(list(combo))])
    return results


def enumerate_formulas(m: int) -> list[ProcessFormula]:
    """All admissible process formulas for m databases, in canonical order.

    Parallel stages of single atoms are rendered cross-product style
    (``F.(BxE).(ExB)``), branches with internal fusions as sub-formulas
    (``F.((B.E.F)x(B.E))``); mirror-image branch permutations are distinct.
    """
    if m < 1 or m > MAX_ENUM_DATABASES:
        raise ValueError(f"database count must be in 1..{MAX_ENUM_DATABASES}, got {m}")
    seen: dict[str, ProcessFormula] = {}
    for root in _generate(m, True, True):
        formula = ProcessFormula(root)
        seen.setdefault(format_formula(formula), formula)
    return [seen[key] for key in sorted(seen)]
