"""Ground-state solvers over the cell-pair coupling model.

The interaction energy of two cells with binary polarizations P1 and P2
reduces to E = J12 * P1 * P2, where J12 folds the sixteen signed dot-dot
Coulomb terms of the pair.  The polarization-independent background is
dropped, so negating every polarization in a layout leaves the total
energy unchanged and negating only the drivers negates the free cells'
ground state.

Two solvers share this model: an exhaustive enumerator (exact ground
state, capacity-limited) and a threshold-front relaxation sweep whose
result can never beat the exhaustive ground energy.
"""

from __future__ import annotations

import io
import csv
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    Cell,
    GeometryConfig,
    Layout,
    ORIENT_NORMAL,
    QcaError,
    ROLE_FIXED,
    ROLE_INPUT,
)

# Ground states separated by less than this are reported as ties.
TIE_THRESHOLD_J = 1e-26

_EXHAUSTIVE_CHUNK = 1 << 20


class SolverError(QcaError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    effect_radius_nm: float = math.inf
    max_free_cells_exhaustive: int = 24
    max_sweep_passes: int = 600
    sweep_theta_floor_j: float = 1e-26
    tie_threshold_j: float = TIE_THRESHOLD_J


@dataclass
class PolarizationAssignment:
    """A complete polarization vector (one entry per cell) with its energy."""

    values: List[int]
    total_energy_j: float


@dataclass
class SolveResult:
    assignment: PolarizationAssignment
    converged: bool = True
    tie: bool = False


def _signed_dots(cell: Cell, geometry: GeometryConfig) -> List[Tuple[float, float, int]]:
    """Dot sites with +1 on the diagonal occupied at P=+1, -1 on the other."""
    d = geometry.dot_offset_nm
    x, y = cell.x_nm, cell.y_nm
    if cell.orientation == ORIENT_NORMAL:
        return [(x + d, y + d, 1), (x - d, y - d, 1),
                (x - d, y + d, -1), (x + d, y - d, -1)]
    r = d * math.sqrt(2.0)
    return [(x, y + r, 1), (x, y - r, 1), (x + r, y, -1), (x - r, y, -1)]


def coupling_j(cell_a: Cell, cell_b: Cell, geometry: GeometryConfig) -> float:
    """Pair coupling J (joules) such that E = J * P_a * P_b.

    J = (A/4) * sum over dot pairs of s_a * s_b / r with r in metres.
    """
    total = 0.0
    for xa, ya, sa in _signed_dots(cell_a, geometry):
        for xb, yb, sb in _signed_dots(cell_b, geometry):
            r = math.hypot(xb - xa, yb - ya) * 1e-9
            if r <= 0.0:
                raise SolverError(
                    f"coincident dots between cells at ({cell_a.x_nm:g}, {cell_a.y_nm:g}) "
                    f"and ({cell_b.x_nm:g}, {cell_b.y_nm:g})")
            total += sa * sb / r
    return (geometry.coupling_jm / 4.0) * total


def coupling_matrix(layout: Layout,
                    effect_radius_nm: float = math.inf) -> np.ndarray:
    """Symmetric J matrix in joules; pairs beyond the radius are zero.

    The radius cut is centre to centre.
    """
    n = len(layout.cells)
    J = np.zeros((n, n))
    for i in range(n):
        ci = layout.cells[i]
        for j in range(i + 1, n):
            cj = layout.cells[j]
            d = math.hypot(cj.x_nm - ci.x_nm, cj.y_nm - ci.y_nm)
            if d > effect_radius_nm:
                continue
            J[i, j] = J[j, i] = coupling_j(ci, cj, layout.geometry)
    return J


def total_layout_energy(layout: Layout,
                        values: Sequence[float],
                        config: Optional[SolverConfig] = None) -> float:
    """Sum of J_ij * P_i * P_j over pairs i < j in ascending index order."""
    if config is None:
        config = SolverConfig()
    n = len(layout.cells)
    if len(values) != n:
        raise SolverError(f"need {n} polarization values, got {len(values)}")
    J = coupling_matrix(layout, config.effect_radius_nm)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if J[i, j] != 0.0:
                total += J[i, j] * values[i] * values[j]
    return float(total)


def assign_inputs(layout: Layout, bits: Mapping[str, int]) -> Dict[int, int]:
    """Map input labels to polarizations: bit 1 is +1, bit 0 is -1."""
    pins: Dict[int, int] = {}
    input_labels = {layout.cells[i].label: i for i in layout.input_indices()}
    for label, bit in bits.items():
        if label not in input_labels:
            raise SolverError(f"{label!r} is not an input cell label")
        if bit not in (0, 1):
            raise SolverError(f"input bit for {label!r} must be 0 or 1, got {bit}")
        pins[input_labels[label]] = 1 if bit else -1
    missing = [lab for lab in input_labels if input_labels[lab] not in pins]
    if missing:
        raise SolverError(f"missing input bits for {sorted(missing)}")
    return pins


def _pinned_values(layout: Layout,
                   input_bits: Optional[Mapping[str, int]]) -> Dict[int, int]:
    """Polarizations of all driver cells: fixed cells plus inputs."""
    pins: Dict[int, int] = {}
    for i in layout.fixed_indices():
        p = layout.cells[i].polarization
        if p is None:
            raise SolverError(f"fixed cell {i} has no polarization")
        pins[i] = int(p)
    if input_bits is not None:
        pins.update(assign_inputs(layout, input_bits))
    else:
        for i in layout.input_indices():
            p = layout.cells[i].polarization
            if p is None:
                raise SolverError(
                    f"input cell {i} ({layout.cells[i].label!r}) has no polarization "
                    "and no input bits were given")
            pins[i] = int(p)
    return pins


def exhaustive_ground_state(layout: Layout,
                            input_bits: Optional[Mapping[str, int]] = None,
                            config: Optional[SolverConfig] = None) -> SolveResult:
    """Exact ground state by enumeration of all free-cell configurations.

    Free cells are those with role normal or output.  Configurations are
    indexed in ascending binary order with the first free cell as the most
    significant bit and bit 1 meaning +1; among equal-energy minima the
    lowest index wins, which makes the result deterministic.  The tie flag
    is set when the two best energies differ by less than the tie
    threshold.
    """
    if config is None:
        config = SolverConfig()
    free = layout.free_indices()
    nf = len(free)
    if nf > config.max_free_cells_exhaustive:
        raise SolverError(
            f"{nf} free cells exceed the exhaustive capacity of "
            f"{config.max_free_cells_exhaustive}")
    pins = _pinned_values(layout, input_bits)

    values = [0] * len(layout.cells)
    for i, p in pins.items():
        values[i] = p

    J = coupling_matrix(layout, config.effect_radius_nm)
    if nf == 0:
        total = total_layout_energy(layout, values, config)
        return SolveResult(PolarizationAssignment(values, total), True, False)

    pin_idx = sorted(pins)
    pvec = np.array([float(pins[i]) for i in pin_idx])
    Jff = J[np.ix_(free, free)]
    Jfp = J[np.ix_(free, pin_idx)]
    Jpp = J[np.ix_(pin_idx, pin_idx)]
    const = 0.5 * float(pvec @ Jpp @ pvec)
    hf = Jfp @ pvec

    best_e = math.inf
    best_k = -1
    second_e = math.inf
    total_configs = 1 << nf
    for start in range(0, total_configs, _EXHAUSTIVE_CHUNK):
        stop = min(start + _EXHAUSTIVE_CHUNK, total_configs)
        ks = np.arange(start, stop, dtype=np.int64)
        S = np.empty((stop - start, nf))
        for col in range(nf):
            bit = nf - 1 - col
            S[:, col] = ((ks >> bit) & 1) * 2.0 - 1.0
        E = 0.5 * np.einsum("ki,ij,kj->k", S, Jff, S) + S @ hf + const
        order = np.argsort(E, kind="stable")[:2]
        e0 = float(E[order[0]])
        if e0 < best_e:
            second_e = min(best_e, float(E[order[1]]) if len(order) > 1 else math.inf)
            best_e = e0
            best_k = int(ks[order[0]])
        else:
            second_e = min(second_e, e0)

    for col, i in enumerate(free):
        bit = nf - 1 - col
        values[i] = 1 if (best_k >> bit) & 1 else -1
    total = total_layout_energy(layout, values, config)
    tie = (second_e - best_e) < config.tie_threshold_j
    return SolveResult(PolarizationAssignment(values, total), True, tie)


def sweep_relax(layout: Layout,
                input_bits: Optional[Mapping[str, int]] = None,
                config: Optional[SolverConfig] = None) -> SolveResult:
    """Zone-ordered threshold-front relaxation.

    Driver cells start committed; free cells join once the field from
    already-committed cells exceeds a threshold theta that starts at half
    the largest coupling and halves whenever a pass changes nothing.
    Committed cells do strict descent (ties keep the current value).
    Convergence is a change-free pass with every cell committed; the
    sweep never raises, it reports converged=False instead.  Visit order
    inside a zone is reshuffled every pass from the seeded generator, so
    a given seed reproduces bit-identical results.
    """
    if config is None:
        config = SolverConfig()
    free = layout.free_indices()
    pins = _pinned_values(layout, input_bits)
    n = len(layout.cells)
    J = coupling_matrix(layout, config.effect_radius_nm)

    s = np.zeros(n)
    gate = np.zeros(n)
    for i, p in pins.items():
        s[i] = float(p)
        gate[i] = 1.0

    zones = sorted({layout.cells[i].clock_zone for i in free})
    rng = random.Random(config.seed)
    theta = 0.5 * float(np.abs(J).max()) if n > 1 else config.sweep_theta_floor_j
    converged = False
    for _ in range(config.max_sweep_passes):
        changed = False
        for z in zones:
            zi = [i for i in free if layout.cells[i].clock_zone == z]
            rng.shuffle(zi)
            for i in zi:
                f = float(J[i] @ (s * gate))
                if gate[i]:
                    new = -1.0 if f > 0 else (1.0 if f < 0 else s[i])
                    if new != s[i]:
                        s[i] = new
                        changed = True
                else:
                    if abs(f) > theta:
                        s[i] = -1.0 if f > 0 else 1.0
                        gate[i] = 1.0
                        changed = True
                    elif theta < config.sweep_theta_floor_j:
                        s[i] = -1.0 if f >= 0 else 1.0
                        gate[i] = 1.0
                        changed = True
        if not changed:
            if all(gate[i] for i in free):
                converged = True
                break
            theta *= 0.5

    for i in free:
        if not gate[i]:
            # ran out of passes with cells still uncommitted; settle them
            # deterministically so the assignment is well formed
            f = float(J[i] @ (s * gate))
            s[i] = -1.0 if f >= 0 else 1.0
            gate[i] = 1.0

    values = [int(v) for v in s]
    total = total_layout_energy(layout, values, config)
    return SolveResult(PolarizationAssignment(values, total), converged, False)


SOLVERS = {
    "exhaustive": exhaustive_ground_state,
    "sweep": sweep_relax,
}


def solve(layout: Layout,
          input_bits: Optional[Mapping[str, int]] = None,
          solver: str = "exhaustive",
          config: Optional[SolverConfig] = None) -> SolveResult:
    if solver not in SOLVERS:
        raise SolverError(f"unknown solver {solver!r} (choose from {sorted(SOLVERS)})")
    return SOLVERS[solver](layout, input_bits, config)


@dataclass
class TruthTableRow:
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]
    ground_energy_j: float
    converged: bool
    tie: bool


@dataclass
class TruthTable:
    input_labels: List[str]
    output_labels: List[str]
    rows: List[TruthTableRow]


def truth_table(layout: Layout,
                solver: str = "exhaustive",
                config: Optional[SolverConfig] = None) -> TruthTable:
    """Resolve every input combination in ascending binary order.

    Labels are sorted alphabetically; the first input label is the most
    significant bit.  Undetermined rows are marked by their flags rather
    than failing the whole table.
    """
    in_labels = sorted(layout.cells[i].label or "" for i in layout.input_indices())
    out_labels = sorted(layout.cells[i].label or "" for i in layout.output_indices())
    if not in_labels:
        raise SolverError("layout has no input cells")
    if not out_labels:
        raise SolverError("layout has no output cells")
    if "" in in_labels or "" in out_labels:
        raise SolverError("every input and output cell needs a label")
    k = len(in_labels)
    if k > 16:
        raise SolverError(f"{k} inputs make the truth table too large")

    out_idx = [layout.index_of_label(lab) for lab in out_labels]
    rows: List[TruthTableRow] = []
    for bits in itertools.product((0, 1), repeat=k):
        assignment = dict(zip(in_labels, bits))
        result = solve(layout, assignment, solver, config)
        outs = tuple(1 if result.assignment.values[i] > 0 else 0 for i in out_idx)
        rows.append(TruthTableRow(
            inputs=tuple(bits),
            outputs=outs,
            ground_energy_j=result.assignment.total_energy_j,
            converged=result.converged,
            tie=result.tie,
        ))
    return TruthTable(in_labels, out_labels, rows)


def truth_table_to_csv(table: TruthTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.input_labels + table.output_labels
                    + ["ground_energy_J", "converged", "tie"])
    for row in table.rows:
        writer.writerow(list(row.inputs) + list(row.outputs)
                        + [repr(row.ground_energy_j),
                           str(int(row.converged)), str(int(row.tie))])
    return buf.getvalue()
