"""Per-electron Coulomb energy accounting between cells.

Every assigned cell contributes two point charges (its electrons X and Y,
see geometry.electron_positions).  The energy of a candidate output state
is the sum over all pairings of the candidate cell's two electrons with
the electrons of every other cell.  The electron pair inside a cell is a
polarization-independent constant and is excluded.

All energies are in joules; distances between electrons are carried in
nanometres and converted to metres only inside pair_energy.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .geometry import (
    Cell,
    GeometryConfig,
    Layout,
    QcaError,
    electron_positions,
)

# Candidate states whose totals differ by less than this are reported as
# undetermined rather than silently picking one.
DECISION_THRESHOLD_J = 1e-26

ELECTRON_NAMES = ("X", "Y")


class EnergyError(QcaError):
    pass


def pair_energy(distance_m: float, geometry: Optional[GeometryConfig] = None) -> float:
    """Coulomb energy A / r of two electrons a distance r apart, in joules.

    distance_m is in metres.  A degenerate (non-positive) separation has
    no finite energy and raises.
    """
    if geometry is None:
        geometry = GeometryConfig()
    if distance_m <= 0.0:
        raise EnergyError(f"degenerate electron separation {distance_m} m")
    return geometry.coupling_jm / distance_m


def electron_energy(site_nm: Tuple[float, float],
                    sources_nm: Sequence[Tuple[float, float]],
                    geometry: Optional[GeometryConfig] = None) -> float:
    """Total Coulomb energy of one electron against a list of source electrons.

    Terms are accumulated in the listed order, which keeps totals
    bit-reproducible across runs.
    """
    if geometry is None:
        geometry = GeometryConfig()
    total = 0.0
    for sx, sy in sources_nm:
        r_nm = math.hypot(site_nm[0] - sx, site_nm[1] - sy)
        total += pair_energy(r_nm * 1e-9, geometry)
    return total


@dataclass
class BreakdownRow:
    """One electron-pair term of an output-state energy."""

    target_electron: str          # X or Y on the candidate cell
    source_cell: int              # index into layout.cells
    source_label: Optional[str]
    source_electron: str          # X or Y on the source cell
    distance_nm: float
    energy_j: float


@dataclass
class EnergyBreakdown:
    """Full per-electron account of one candidate output state."""

    target_label: str
    candidate: int
    rows: List[BreakdownRow]
    sum_x_j: float
    sum_y_j: float
    total_j: float

    def rows_for(self, target_electron: str) -> List[BreakdownRow]:
        return [r for r in self.rows if r.target_electron == target_electron]


@dataclass
class OutputDecision:
    """Result of comparing both candidate polarizations of an output cell."""

    target_label: str
    polarization: int
    margin_j: float
    breakdown_plus: EnergyBreakdown
    breakdown_minus: EnergyBreakdown


def _resolve_assignment(layout: Layout,
                        assignment: Optional[Mapping[int, float]]) -> Dict[int, int]:
    """Normalise an index -> polarization map, defaulting to stored values."""
    resolved: Dict[int, int] = {}
    if assignment is None:
        for i, c in enumerate(layout.cells):
            if c.polarization is not None:
                resolved[i] = int(c.polarization)
        return resolved
    for i, p in assignment.items():
        if not 0 <= i < len(layout.cells):
            raise EnergyError(f"assignment references cell index {i} out of range")
        if p not in (-1, 1, -1.0, 1.0):
            raise EnergyError(f"assignment for cell {i} must be +1 or -1, got {p}")
        resolved[i] = int(p)
    return resolved


def output_config_energy(layout: Layout,
                         target_label: str,
                         candidate: int,
                         assignment: Optional[Mapping[int, float]] = None) -> EnergyBreakdown:
    """Energy of the layout seen by one output cell held at a candidate state.

    assignment must cover every cell other than the target (the target's
    own entry, if present, is ignored; its state is the candidate).  Rows
    pair each target electron with both electrons of every other cell in
    layout order; the intra-cell electron pair is excluded.  sum_x and
    sum_y are the X and Y row sums in listed order and total is their sum.
    """
    if candidate not in (-1, 1):
        raise EnergyError(f"candidate polarization must be +1 or -1, got {candidate}")
    target_idx = layout.index_of_label(target_label)
    assigned = _resolve_assignment(layout, assignment)
    geometry = layout.geometry

    for i in range(len(layout.cells)):
        if i != target_idx and i not in assigned:
            raise EnergyError(
                f"incomplete assignment: cell {i} "
                f"({layout.cells[i].label or 'unlabelled'}) has no polarization")

    target_sites = electron_positions(layout.cells[target_idx], geometry, candidate)
    rows: List[BreakdownRow] = []
    sums = {"X": 0.0, "Y": 0.0}
    for t_name, t_site in zip(ELECTRON_NAMES, target_sites):
        for i, cell in enumerate(layout.cells):
            if i == target_idx:
                continue
            sites = electron_positions(cell, geometry, assigned[i])
            for s_name, s_site in zip(ELECTRON_NAMES, sites):
                r_nm = math.hypot(t_site[0] - s_site[0], t_site[1] - s_site[1])
                e = pair_energy(r_nm * 1e-9, geometry)
                rows.append(BreakdownRow(t_name, i, cell.label, s_name, r_nm, e))
                sums[t_name] += e
    return EnergyBreakdown(
        target_label=target_label,
        candidate=candidate,
        rows=rows,
        sum_x_j=sums["X"],
        sum_y_j=sums["Y"],
        total_j=sums["X"] + sums["Y"],
    )


def decide_output(layout: Layout,
                  target_label: str,
                  assignment: Optional[Mapping[int, float]] = None) -> OutputDecision:
    """Pick the candidate polarization with strictly lower total energy.

    Both breakdowns are attached to the decision.  If the totals differ
    by less than DECISION_THRESHOLD_J the state is physically undetermined
    (a mirror-symmetric environment is the canonical case) and an error
    is raised instead of guessing.
    """
    plus = output_config_energy(layout, target_label, +1, assignment)
    minus = output_config_energy(layout, target_label, -1, assignment)
    margin = abs(plus.total_j - minus.total_j)
    if margin < DECISION_THRESHOLD_J:
        raise EnergyError(
            f"undetermined output state for {target_label!r}: "
            f"|U(+1) - U(-1)| = {margin:.3e} J is below {DECISION_THRESHOLD_J:.0e} J")
    chosen = 1 if plus.total_j < minus.total_j else -1
    return OutputDecision(
        target_label=target_label,
        polarization=chosen,
        margin_j=margin,
        breakdown_plus=plus,
        breakdown_minus=minus,
    )


def format_energy_1e20(energy_j: float, digits: int = 3) -> str:
    """Render an energy as a multiple of 1e-20 J with a fixed digit budget."""
    return f"{energy_j * 1e20:.{digits}g}e-20"


def breakdown_to_csv(breakdown: EnergyBreakdown) -> str:
    """Serialise a breakdown: X rows, U_X footer, Y rows, U_Y footer, U footer.

    Energies are written at full precision; distances at the two decimals
    used by the reference tables.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source_cell", "electron", "distance_nm", "energy_J"])
    for name, footer, value in (("X", "U_X", breakdown.sum_x_j),
                                ("Y", "U_Y", breakdown.sum_y_j)):
        for row in breakdown.rows_for(name):
            source = row.source_label if row.source_label is not None else str(row.source_cell)
            writer.writerow([source, row.source_electron,
                             f"{row.distance_nm:.2f}", repr(row.energy_j)])
        writer.writerow([footer, "", "", repr(value)])
    writer.writerow(["U", "", "", repr(breakdown.total_j)])
    return buf.getvalue()
