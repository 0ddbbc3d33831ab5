"""Process formulas: build/filter/fuse pipelines as small ASTs.

A formula combines the atoms B (build a classifier), E (filter sensitive
content) and F (fuse artifacts) serially and in parallel.  Serial steps are
written right-to-left in temporal order, so ``B.E.F`` fuses first, filters
second and builds last.  Parallel branches apply left-to-right to the
argument databases.

The ASCII surface syntax uses "." for serial composition and "x" for
parallel composition; the typographic characters "∘" and "×" are accepted
on input and can be emitted with ``unicode_ops=True``.  An optional binding
suffix such as ``{DB1;DB2}`` names the databases the formula is applied to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .descriptors import (
    Group,
    _Scanner,
    _scan_filter_args,
    format_group,
    sort_groups,
)

BUILD = "B"
FILTER = "E"
FUSE = "F"


@dataclass(frozen=True)
class Atom:
    """A single operation; filter atoms may carry explicit group arguments."""

    kind: str
    args: tuple[Group, ...] | None = None

    def __post_init__(self):
        if self.kind not in (BUILD, FILTER, FUSE):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.args is not None:
            if self.kind != FILTER:
                raise ValueError("only filter atoms take group arguments")
            object.__setattr__(self, "args", sort_groups(self.args))


@dataclass(frozen=True)
class Serial:
    """Serial composition; children in source order, rightmost applied first."""

    children: tuple

    def __init__(self, children: Iterable):
        children = tuple(children)
        if len(children) < 2:
            raise ValueError("serial node needs at least two children")
        if any(isinstance(c, Serial) for c in children):
            flat = []
            for c in children:
                flat.extend(c.children if isinstance(c, Serial) else (c,))
            children = tuple(flat)
        object.__setattr__(self, "children", children)


@dataclass(frozen=True)
class Parallel:
    """Parallel composition; children apply left-to-right to the arguments."""

    children: tuple

    def __init__(self, children: Iterable):
        children = tuple(children)
        if len(children) < 2:
            raise ValueError("parallel node needs at least two children")
        object.__setattr__(self, "children", children)


Node = Atom | Serial | Parallel


@dataclass(frozen=True)
class ProcessFormula:
    """A formula AST plus an optional database binding."""

    root: Node
    binding: tuple[int, ...] | None = None

    @property
    def text(self) -> str:
        return format_formula(self)

    def atoms(self) -> Iterator[tuple[int, Atom]]:
        """All atoms with their preorder index (stable atom identity)."""
        counter = [0]

        def walk(node: Node) -> Iterator[tuple[int, Atom]]:
            if isinstance(node, Atom):
                yield counter[0], node
                counter[0] += 1
            else:
                for child in node.children:
                    yield from walk(child)

        yield from walk(self.root)

    def filter_atoms(self) -> list[tuple[int, Atom]]:
        return [(i, a) for i, a in self.atoms() if a.kind == FILTER]

    def __str__(self) -> str:
        return format_formula(self)

    def __repr__(self) -> str:
        return f"ProcessFormula({format_formula(self)!r})"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_SERIAL_CHARS = (".", "∘")   # "." or "∘"
_PARALLEL_CHARS = ("x", "×")  # "x" or "×"


def _try_take_any(sc: _Scanner, options: tuple[str, ...]) -> bool:
    return any(sc.try_take(ch) for ch in options)


def _scan_atom(sc: _Scanner) -> Atom:
    ch = sc.peek()
    if ch == "B":
        sc.take("B")
        return Atom(BUILD)
    if ch == "F":
        sc.take("F")
        return Atom(FUSE)
    if ch == "E":
        sc.take("E")
        if sc.try_take("("):
            args = _scan_filter_args(sc)
            sc.take(")")
            return Atom(FILTER, args)
        return Atom(FILTER)
    raise sc.error("expected an operator B, E or F")


def _scan_term(sc: _Scanner):
    if sc.try_take("("):
        node = _scan_parallel(sc)
        sc.take(")")
        return node
    return _scan_atom(sc)


def _scan_serial(sc: _Scanner):
    terms = [_scan_term(sc)]
    while _try_take_any(sc, _SERIAL_CHARS):
        terms.append(_scan_term(sc))
    return terms[0] if len(terms) == 1 else Serial(terms)


def _scan_parallel(sc: _Scanner):
    if sc.peek() == ")":
        raise sc.error("empty parallel branch")
    branches = [_scan_serial(sc)]
    while _try_take_any(sc, _PARALLEL_CHARS):
        if sc.peek() == ")" or sc.at_end():
            raise sc.error("empty parallel branch")
        branches.append(_scan_serial(sc))
    return branches[0] if len(branches) == 1 else Parallel(branches)


def parse_formula(text: str) -> ProcessFormula:
    """Parse e.g. ``"F.(ExB).(BxE){DB1;DB2}"`` into an AST.

    Serial children stay in source order (rightmost is applied first);
    parallel children apply left-to-right.  The binding suffix is optional.
    """
    sc = _Scanner(text)
    root = _scan_serial(sc)
    binding: tuple[int, ...] | None = None
    if sc.try_take("{"):
        refs = [sc.dbref()]
        while sc.try_take(";") or sc.try_take(","):
            refs.append(sc.dbref())
        sc.take("}")
        if len(set(refs)) != len(refs):
            raise sc.error("duplicate database in binding")
        binding = tuple(refs)
    if not sc.at_end():
        raise sc.error("unexpected trailing input")
    return ProcessFormula(root, binding)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _format_node(node: Node, serial_sep: str, parallel_sep: str) -> str:
    if isinstance(node, Atom):
        if node.kind == FILTER and node.args is not None:
            inner = ";".join(format_group(g, db_prefix=False) for g in node.args)
            return f"E({inner})"
        return node.kind
    if isinstance(node, Serial):
        parts = []
        for child in node.children:
            text = _format_node(child, serial_sep, parallel_sep)
            # parallel children already carry parentheses via the branch rule
            parts.append(text)
        return serial_sep.join(parts)
    # Parallel: wrap each non-atom branch for readability
    parts = []
    for child in node.children:
        text = _format_node(child, serial_sep, parallel_sep)
        if isinstance(child, (Serial, Parallel)):
            text = f"({text})"
        parts.append(text)
    return "(" + parallel_sep.join(parts) + ")"


def format_formula(f: ProcessFormula, unicode_ops: bool = False) -> str:
    """Canonical text; ``parse_formula(format_formula(f)) == f``."""
    serial_sep = "∘" if unicode_ops else "."
    parallel_sep = "×" if unicode_ops else "x"
    text = _format_node(f.root, serial_sep, parallel_sep)
    # a bare parallel at the root keeps its parentheses; that is already valid
    if f.binding is not None:
        text += "{" + ";".join(f"DB{i}" for i in f.binding) + "}"
    return text
