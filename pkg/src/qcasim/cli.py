"""Command-line interface.

Subcommands: validate, simulate, energy, metrics, compare, gen.  All
reports are CSV on stdout; errors go to stderr.  Exit codes: 0 success,
1 domain error (bad layout, unknown label, solver failure), 2 usage
error.  Output for a fixed seed is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Dict, List, Optional

from . import designs, electrostatics, metrics, solver
from .geometry import QcaError, validate as validate_layout
from .qcal import LayoutDocument, load_qcal, save_qcal, serialize_qcal

_SOLVER_CHOICES = tuple(sorted(solver.SOLVERS))


def _parse_inputs(text: str) -> Dict[str, int]:
    """'A=1,B=0,C=1' -> {'A': 1, 'B': 0, 'C': 1}; syntax errors are usage errors."""
    bits: Dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise argparse.ArgumentTypeError(
                f"bad input assignment {part!r}, expected label=bit")
        label, _, value = part.partition("=")
        label = label.strip()
        value = value.strip()
        if not label or value not in ("0", "1"):
            raise argparse.ArgumentTypeError(
                f"bad input assignment {part!r}, expected label=0 or label=1")
        if label in bits:
            raise argparse.ArgumentTypeError(f"duplicate input label {label!r}")
        bits[label] = int(value)
    if not bits:
        raise argparse.ArgumentTypeError("empty input assignment")
    return bits


def _parse_radius(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius {text!r}, expected nm or 'inf'")
    if value <= 0:
        raise argparse.ArgumentTypeError("radius must be positive")
    return value


def _parse_candidate(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise argparse.ArgumentTypeError(f"bad candidate {text!r}, expected +1 or -1")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="random seed for the relaxation sweep (default 0)")
    common.add_argument("--solver", choices=_SOLVER_CHOICES, default="exhaustive",
                        dest="solver_name", help="ground-state solver (default exhaustive)")
    common.add_argument("--radius", type=_parse_radius, default=math.inf,
                        metavar="NM|inf",
                        help="cell interaction cutoff, centre to centre (default inf)")

    parser = argparse.ArgumentParser(
        prog="qcasim",
        description="Quantum-dot cellular automata layout simulator")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("validate", parents=[common],
                       help="check a layout file for geometric and role errors")
    p.add_argument("file", help="layout file (.qcal)")

    p = sub.add_parser("simulate", parents=[common],
                       help="solve for ground-state polarizations")
    p.add_argument("file", help="layout file (.qcal)")
    p.add_argument("--truth-table", action="store_true",
                   help="sweep all input vectors (default when --inputs is absent)")
    p.add_argument("--inputs", type=_parse_inputs, metavar="A=1,B=0,...",
                   help="solve a single input vector")

    p = sub.add_parser("energy", parents=[common],
                       help="electron-level energy breakdown for one output cell")
    p.add_argument("file", help="layout file (.qcal)")
    p.add_argument("--output", required=True, metavar="LABEL",
                   help="label of the output cell under test")
    p.add_argument("--candidate", type=_parse_candidate, metavar="+1|-1",
                   help="candidate polarization; omit to compare both and decide")
    p.add_argument("--inputs", type=_parse_inputs, metavar="A=1,B=0,...",
                   help="override the input polarizations recorded in the file; "
                        "all other cells keep their recorded state")

    p = sub.add_parser("metrics", parents=[common],
                       help="cell count, area, latency and cost for a layout file")
    p.add_argument("file", help="layout file (.qcal)")

    p = sub.add_parser("compare", parents=[common],
                       help="rank designs listed in a manifest by cost")
    p.add_argument("manifest", help="manifest CSV (name,cell_count,area_um2,"
                                    "latency_clocks,source)")

    p = sub.add_parser("gen", parents=[common],
                       help="emit a built-in design as a layout file")
    p.add_argument("design_id", metavar="design-id",
                   help="one of: " + ", ".join(designs.DESIGN_IDS))
    p.add_argument("-o", "--out", metavar="FILE",
                   help="write to FILE instead of stdout")
    return parser


def _load(path: str) -> LayoutDocument:
    try:
        return load_qcal(path)
    except OSError as exc:
        raise QcaError(f"cannot read {path}: {exc.strerror or exc}")


def _solver_config(args) -> solver.SolverConfig:
    return solver.SolverConfig(seed=args.seed, effect_radius_nm=args.radius)


def _require_valid(doc: LayoutDocument) -> None:
    problems = validate_layout(doc.layout)
    if problems:
        raise QcaError("invalid layout: " + "; ".join(problems))


def _cmd_validate(args, out, err) -> int:
    doc = _load(args.file)
    problems = validate_layout(doc.layout)
    if problems:
        for line in problems:
            print(f"violation: {line}", file=err)
        return 1
    print(f"ok {doc.layout.name}: {len(doc.layout.cells)} cells", file=out)
    return 0


def _single_vector_csv(layout, bits: Dict[str, int], args) -> str:
    result = solver.solve(layout, bits, args.solver_name, _solver_config(args))
    in_labels = sorted(bits)
    out_labels = sorted(layout.cells[i].label for i in layout.output_indices())
    header = in_labels + out_labels + ["ground_energy_J", "converged", "tie"]
    values = [str(bits[l]) for l in in_labels]
    for label in out_labels:
        idx = layout.index_of_label(label)
        values.append("1" if result.assignment.values[idx] > 0 else "0")
    values += [repr(result.assignment.total_energy_j),
               str(int(result.converged)), str(int(result.tie))]
    return ",".join(header) + "\n" + ",".join(values) + "\n"


def _cmd_simulate(args, out, err) -> int:
    doc = _load(args.file)
    _require_valid(doc)
    if args.inputs and args.truth_table:
        raise QcaError("--inputs and --truth-table are mutually exclusive")
    if args.inputs:
        out.write(_single_vector_csv(doc.layout, args.inputs, args))
        return 0
    table = solver.truth_table(doc.layout, args.solver_name, _solver_config(args))
    out.write(solver.truth_table_to_csv(table))
    return 0


def _energy_assignment(layout, bits: Optional[Dict[str, int]],
                       target_label: str) -> Optional[Dict[int, float]]:
    """Recorded cell states, with inputs optionally overridden from bits."""
    if bits is None:
        return None
    assignment: Dict[int, float] = {}
    target = layout.index_of_label(target_label)
    for idx, cell in enumerate(layout.cells):
        if idx == target:
            continue
        if cell.polarization is not None:
            assignment[idx] = cell.polarization
    for idx, value in solver.assign_inputs(layout, bits).items():
        assignment[idx] = float(value)
    missing = [layout.cells[i].label or f"#{i}" for i in range(len(layout.cells))
               if i != target and i not in assignment]
    if missing:
        raise QcaError(
            "cells without a recorded polarization: " + ", ".join(missing)
            + " (the file must carry the network state for every non-input cell)")
    return assignment


def _cmd_energy(args, out, err) -> int:
    doc = _load(args.file)
    _require_valid(doc)
    layout = doc.layout
    assignment = _energy_assignment(layout, args.inputs, args.output)
    if args.candidate is not None:
        breakdown = electrostatics.output_config_energy(
            layout, args.output, args.candidate, assignment)
        out.write(electrostatics.breakdown_to_csv(breakdown))
        return 0
    decision = electrostatics.decide_output(layout, args.output, assignment)
    header = ["output", "decision", "U_plus_J", "U_minus_J", "margin_J"]
    row = [decision.target_label,
           f"{decision.polarization:+d}",
           repr(decision.breakdown_plus.total_j),
           repr(decision.breakdown_minus.total_j),
           repr(decision.margin_j)]
    out.write(",".join(header) + "\n" + ",".join(row) + "\n")
    return 0


def _cmd_metrics(args, out, err) -> int:
    doc = _load(args.file)
    _require_valid(doc)
    m = metrics.metrics_for(doc.layout)
    out.write("name,cell_count,area_um2,latency_clocks,cost\n")
    out.write(",".join([m.name, str(m.cell_count), repr(m.area_um2),
                        repr(m.latency_clocks), repr(m.cost_score)]) + "\n")
    return 0


def _cmd_compare(args, out, err) -> int:
    manifest = metrics.read_manifest(args.manifest)
    report = metrics.compare(manifest)
    out.write(metrics.comparison_to_csv(report))
    return 0


def _cmd_gen(args, out, err) -> int:
    layout = designs.build(args.design_id)
    doc = LayoutDocument(layout=layout, version=1, comments=[])
    if args.out:
        save_qcal(doc, args.out)
    else:
        out.write(serialize_qcal(doc))
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "energy": _cmd_energy,
    "metrics": _cmd_metrics,
    "compare": _cmd_compare,
    "gen": _cmd_gen,
}


def run_cli(argv: Optional[List[str]] = None,
            out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out, err)
    except QcaError as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
