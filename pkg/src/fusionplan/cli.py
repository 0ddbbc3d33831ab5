"""Command-line interface: one subcommand per planning capability.

Exit codes: 0 success, 1 domain error (bad descriptor, no plan satisfies a
strict constraint), 2 usage error.  Output is deterministic for fixed
inputs and seeds; set NO_COLOR or nothing at all, the output is plain text
either way.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import enumerate_schemas, reduce_schema
from .automaton import (
    TrustModel,
    accepted_language,
    apply_trust,
    build_automaton,
    mark_sensitive,
    to_dot,
)
from .descriptors import ParseError, parse_descriptor, parse_schema
from .formulas import format_formula, parse_formula
from .grammar import derive, enumerate_descriptors
from .planning import (
    PlanEvaluation,
    PlanProblem,
    RiskContext,
    feasible_set,
    pareto_frontier,
    select_max_efficiency,
    select_min_risk,
)
from .secrecy import DatasetSpec, run_demo
from .semantics import enumerate_formulas, filter_workable


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusionplan",
        description="Plan secrecy-preserving fusion pipelines.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("descriptors",
                       help="enumerate all sensitivity descriptors")
    p.add_argument("--num-dbs", type=int, required=True, metavar="M")
    p.add_argument("--traces", action="store_true",
                   help="print the derivation steps under each descriptor")

    p = sub.add_parser("schemas", help="enumerate filtering schemas")
    p.add_argument("--descriptor", required=True, metavar="TEXT")
    p.add_argument("--merged", action="store_true",
                   help="include schemas with merged filter operations")

    p = sub.add_parser("reduce", help="apply a schema to a descriptor")
    p.add_argument("--schema", required=True, metavar="TEXT")
    p.add_argument("--descriptor", required=True, metavar="TEXT")
    p.add_argument("--lenient", action="store_true",
                   help="ignore filter arguments that target nothing")
    p.add_argument("--unicode", action="store_true",
                   help="render the chain with a typographic arrow")

    p = sub.add_parser("formulas", help="enumerate process formulas")
    p.add_argument("--num-dbs", type=int, required=True, metavar="M")
    p.add_argument("--descriptor", metavar="TEXT",
                   help="keep only formulas workable for this descriptor")
    p.add_argument("--unicode", action="store_true")

    p = sub.add_parser("automaton",
                       help="build the plan automaton for a schema")
    p.add_argument("--schema", required=True, metavar="TEXT")
    p.add_argument("--descriptor", required=True, metavar="TEXT")
    p.add_argument("--num-dbs", type=int, required=True, metavar="M")
    p.add_argument("--trust", metavar="FILE",
                   help="trust model JSON; enables sensitivity marking and pruning")
    p.add_argument("--dot", metavar="FILE", help="write a Graphviz rendering")
    p.add_argument("--language", action="store_true",
                   help="print the accepted formulas (default when no --dot)")

    p = sub.add_parser("plan", help="compute the feasible plan set")
    p.add_argument("--config", required=True, metavar="FILE",
                   help="problem JSON: descriptor, num_dbs, trust, schema_scope")

    p = sub.add_parser("pareto", help="select among evaluated plans")
    p.add_argument("--evals", required=True, metavar="FILE",
                   help="JSON list of {formula, efficiency, risk, damage}")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--r-star", type=float, metavar="R",
                       help="best efficiency with risk strictly below R")
    group.add_argument("--f-star", type=float, metavar="F",
                       help="lowest risk with efficiency strictly above F")
    p.add_argument("--csv", metavar="FILE", help="export the result as CSV")

    p = sub.add_parser("svm-demo",
                       help="run the paired-classifier secrecy filtering demo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.05,
                   help="white-box displacement step length")
    p.add_argument("--kernel", choices=["rbf", "linear"], default="rbf")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--samples", type=int, default=None,
                   help="training records (default: library default)")
    p.add_argument("--noise", type=float, default=0.0,
                   help="label flip probability")

    return parser


def _cmd_descriptors(args) -> int:
    for d in enumerate_descriptors(args.num_dbs):
        print(d)
        if args.traces:
            for production, form in derive(d, m=args.num_dbs).steps:
                print(f"    {production:24s} => {form}")
    return 0


def _cmd_schemas(args) -> int:
    d = parse_descriptor(args.descriptor)
    for schema in enumerate_schemas(d, include_merged=args.merged):
        print(schema)
    return 0


def _cmd_reduce(args) -> int:
    schema = parse_schema(args.schema)
    d = parse_descriptor(args.descriptor)
    trace = reduce_schema(schema, d, strict=not args.lenient)
    print(trace.arrow_chain(schema, unicode_arrow=args.unicode))
    return 0


def _cmd_formulas(args) -> int:
    formulas = enumerate_formulas(args.num_dbs)
    if args.descriptor:
        d = parse_descriptor(args.descriptor, m=args.num_dbs)
        formulas = filter_workable(formulas, d, m=args.num_dbs)
    for f in formulas:
        print(format_formula(f, unicode_ops=args.unicode))
    return 0


def _cmd_automaton(args) -> int:
    schema = parse_schema(args.schema)
    d = parse_descriptor(args.descriptor, m=args.num_dbs)
    automaton = build_automaton(schema, d, args.num_dbs)
    if args.trust:
        trust = TrustModel.load(args.trust)
        automaton = mark_sensitive(
            automaton, d, joint_state_sensitive=trust.joint_state_sensitive)
        automaton = apply_trust(automaton, trust)
    if args.dot:
        Path(args.dot).write_text(to_dot(automaton), encoding="utf-8")
    if args.language or not args.dot:
        for f in accepted_language(automaton):
            print(f.text)
    return 0


def _cmd_plan(args) -> int:
    config_path = Path(args.config)
    with open(config_path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    descriptor = parse_descriptor(config["descriptor"])
    m = int(config.get("num_dbs", max(descriptor.m, 1)))
    if config.get("trust"):
        trust_path = Path(config["trust"])
        if not trust_path.is_absolute():
            trust_path = config_path.parent / trust_path
        trust = TrustModel.load(trust_path)
    else:
        trust = TrustModel.permissive()
    problem = PlanProblem(
        m=m,
        descriptor=descriptor,
        trust=trust,
        schema_scope=config.get("schema_scope", "all"),
    )
    for f in feasible_set(problem):
        print(f.text)
    return 0


def _load_evals(path: str) -> list[PlanEvaluation]:
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    evals = []
    for entry in entries:
        evals.append(PlanEvaluation(
            formula=parse_formula(entry["formula"]),
            efficiency=float(entry["efficiency"]),
            risk=float(entry["risk"]),
            context=RiskContext(damage=float(entry.get("damage", 0.0))),
        ))
    return evals


def _write_evals_csv(path: str, evals: list[PlanEvaluation]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["formula", "efficiency", "risk", "damage"])
        for e in evals:
            writer.writerow([e.formula.text, e.efficiency, e.risk, e.context.damage])


def _cmd_pareto(args) -> int:
    evals = _load_evals(args.evals)
    if args.r_star is not None:
        chosen = select_max_efficiency(evals, args.r_star)
        if chosen is None:
            raise ValueError(
                f"no plan has risk strictly below {args.r_star}")
        selected = [chosen]
    elif args.f_star is not None:
        chosen = select_min_risk(evals, args.f_star)
        if chosen is None:
            raise ValueError(
                f"no plan has efficiency strictly above {args.f_star}")
        selected = [chosen]
    else:
        selected = pareto_frontier(evals)
    for e in selected:
        print(f"{e.formula.text} {e.efficiency:.6g} {e.risk:.6g}")
    if args.csv:
        _write_evals_csv(args.csv, selected)
    return 0


def _cmd_svm_demo(args) -> int:
    overrides = {}
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.noise:
        overrides["noise"] = args.noise
    result = run_demo(seed=args.seed, spec=DatasetSpec(**overrides),
                      kernel=args.kernel, delta=args.delta)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    data = result.dataset
    with open(out / "dataset.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "y", "z"])
        for x, y, z in zip(data.x, data.y, data.z):
            writer.writerow([f"{x[0]:.8f}", f"{x[1]:.8f}", int(y), int(z)])

    for name, classifier in (
        ("support_vectors_before.csv", result.fused.cy),
        ("support_vectors_after.csv", result.whiteboxed.cy),
    ):
        with open(out / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x1", "x2", "y"])
            for sv, label in zip(classifier.support_vectors, classifier.labels):
                writer.writerow([f"{sv[0]:.8f}", f"{sv[1]:.8f}", int(label)])

    keys = ("leakage_pre", "leakage_post", "accuracy_y_pre", "accuracy_y_post",
            "efficiency", "risk")
    metrics = {k: result.metrics[k] for k in keys}
    (out / "metrics.json").write_text(
        json.dumps(metrics, indent=2) + "\n", encoding="utf-8")

    # plan evaluations: the two feasible pipelines realized by the two
    # filtering styles (remap after fusing vs. editing before release)
    data_records = result.dataset
    py_black, _ = result.blackboxed.outputs(data_records.x)
    blackbox_eff = float(np.mean(py_black == data_records.y))
    evals = [
        {"formula": "E.F.(BxB)", "efficiency": result.metrics["efficiency"],
         "risk": result.metrics["risk"], "damage": 1.0},
        {"formula": "B.E.F", "efficiency": blackbox_eff,
         "risk": result.metrics["leakage_blackbox"], "damage": 1.0},
    ]
    (out / "evals.json").write_text(
        json.dumps(evals, indent=2) + "\n", encoding="utf-8")
    for key in keys:
        print(f"{key}={metrics[key]:.6g}")
    return 0


_HANDLERS = {
    "descriptors": _cmd_descriptors,
    "schemas": _cmd_schemas,
    "reduce": _cmd_reduce,
    "formulas": _cmd_formulas,
    "automaton": _cmd_automaton,
    "plan": _cmd_plan,
    "pareto": _cmd_pareto,
    "svm-demo": _cmd_svm_demo,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ParseError, ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
