"""Cell geometry primitives for quantum-dot cellular automata layouts.

Coordinates are in nanometres throughout.  A cell is an 18 nm square with
four charge dots at the corners, centres placed on a 20 nm pitch grid by
convention (off-grid positions are permitted and survive round-trips).
Two mobile electrons occupy one diagonal of the square; which diagonal
encodes the binary polarization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

# Electrostatic scale k*q^2 with k = 9.0e9 N m^2/C^2 and q = 1.6e-19 C.
# Pair energies are computed as A / r with r in metres.
DEFAULT_COUPLING_JM = 23.04e-29

CELL_WIDTH_NM = 18.0
PITCH_NM = 20.0

ROLE_NORMAL = "normal"
ROLE_INPUT = "input"
ROLE_OUTPUT = "output"
ROLE_FIXED = "fixed"
ROLES = (ROLE_NORMAL, ROLE_INPUT, ROLE_OUTPUT, ROLE_FIXED)

ORIENT_NORMAL = "normal"
ORIENT_ROTATED = "rotated"
ORIENTATIONS = (ORIENT_NORMAL, ORIENT_ROTATED)

# Two cells closer than this (centre to centre, nm) are flagged by validate().
MIN_SPACING_TOLERANCE_NM = 1e-6


class QcaError(Exception):
    """Base class for all domain errors raised by this package."""


class GeometryError(QcaError):
    pass


@dataclass(frozen=True)
class GeometryConfig:
    """Immutable geometric and electrostatic parameters shared by a layout."""

    cell_width_nm: float = CELL_WIDTH_NM
    pitch_nm: float = PITCH_NM
    coupling_jm: float = DEFAULT_COUPLING_JM

    def __post_init__(self) -> None:
        if self.cell_width_nm <= 0:
            raise GeometryError("cell width must be positive")
        if self.pitch_nm <= 0:
            raise GeometryError("pitch must be positive")
        if self.pitch_nm < self.cell_width_nm:
            raise GeometryError("pitch smaller than cell width makes grid neighbours overlap")
        if self.coupling_jm <= 0:
            raise GeometryError("coupling constant must be positive")

    @property
    def dot_offset_nm(self) -> float:
        """Half the cell width: corner dots sit at (+-offset, +-offset)."""
        return self.cell_width_nm / 2.0


@dataclass
class Cell:
    """One QCA cell.

    polarization is a real in [-1, +1]; None means unassigned.  Cells with
    role input or fixed must hold exactly +1 or -1 once assigned, because
    they model ideal drivers.
    """

    x_nm: float
    y_nm: float
    clock_zone: int = 0
    role: str = ROLE_NORMAL
    label: Optional[str] = None
    polarization: Optional[float] = None
    orientation: str = ORIENT_NORMAL

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise GeometryError(f"unknown cell role {self.role!r}")
        if self.orientation not in ORIENTATIONS:
            raise GeometryError(f"unknown cell orientation {self.orientation!r}")
        if not isinstance(self.clock_zone, int) or isinstance(self.clock_zone, bool):
            raise GeometryError("clock zone must be an integer")
        if not 0 <= self.clock_zone <= 3:
            raise GeometryError(f"clock zone {self.clock_zone} out of range 0..3")
        if self.polarization is not None:
            if not -1.0 <= self.polarization <= 1.0:
                raise GeometryError(f"polarization {self.polarization} outside [-1, +1]")
            if self.role in (ROLE_INPUT, ROLE_FIXED) and abs(self.polarization) != 1.0:
                raise GeometryError(f"{self.role} cell polarization must be exactly +1 or -1")

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x_nm, self.y_nm)


def dot_positions(cell: Cell, geometry: GeometryConfig) -> List[Tuple[float, float]]:
    """All four dot sites of a cell, regardless of occupancy.

    A normal cell has dots at the square corners; a rotated cell has them
    at the edge midpoint directions (N, S, E, W) at the same radius from
    the centre as the corner dots.
    """
    d = geometry.dot_offset_nm
    x, y = cell.x_nm, cell.y_nm
    if cell.orientation == ORIENT_NORMAL:
        return [(x + d, y + d), (x - d, y - d), (x - d, y + d), (x + d, y - d)]
    r = d * math.sqrt(2.0)
    return [(x, y + r), (x, y - r), (x + r, y), (x - r, y)]


def electron_positions(cell: Cell, geometry: GeometryConfig,
                       polarization: Optional[float] = None) -> List[Tuple[float, float]]:
    """The two occupied dot sites for a cell at a given binary polarization.

    Returns [X, Y] where X is the electron on the upper dot (greater y,
    ties broken toward greater x).  For a normal cell polarization +1
    occupies the main diagonal (NE, SW) and -1 the anti-diagonal (NW, SE).
    For a rotated cell +1 occupies (N, S) and -1 occupies (E, W).
    """
    p = cell.polarization if polarization is None else polarization
    if p is None:
        raise GeometryError("cell has no polarization assigned")
    if p not in (-1.0, 1.0, -1, 1):
        raise GeometryError(f"electron positions need polarization +1 or -1, got {p}")
    d = geometry.dot_offset_nm
    x, y = cell.x_nm, cell.y_nm
    if cell.orientation == ORIENT_NORMAL:
        if p > 0:
            return [(x + d, y + d), (x - d, y - d)]
        return [(x - d, y + d), (x + d, y - d)]
    r = d * math.sqrt(2.0)
    if p > 0:
        return [(x, y + r), (x, y - r)]
    return [(x + r, y), (x - r, y)]


@dataclass
class Layout:
    """An ordered collection of cells with shared geometry."""

    cells: List[Cell] = field(default_factory=list)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    name: str = "layout"

    def __len__(self) -> int:
        return len(self.cells)

    def indices_with_role(self, role: str) -> List[int]:
        return [i for i, c in enumerate(self.cells) if c.role == role]

    def input_indices(self) -> List[int]:
        return self.indices_with_role(ROLE_INPUT)

    def output_indices(self) -> List[int]:
        return self.indices_with_role(ROLE_OUTPUT)

    def fixed_indices(self) -> List[int]:
        return self.indices_with_role(ROLE_FIXED)

    def free_indices(self) -> List[int]:
        """Cells whose polarization the solvers may choose: normal and output."""
        return [i for i, c in enumerate(self.cells)
                if c.role in (ROLE_NORMAL, ROLE_OUTPUT)]

    def index_of_label(self, label: str) -> int:
        for i, c in enumerate(self.cells):
            if c.label == label:
                return i
        raise GeometryError(f"no cell labelled {label!r}")

    def labels(self) -> List[str]:
        return [c.label for c in self.cells if c.label is not None]


def center_distance_nm(a: Cell, b: Cell) -> float:
    return math.hypot(a.x_nm - b.x_nm, a.y_nm - b.y_nm)


def validate(layout: Layout) -> List[str]:
    """Check a layout for authoring errors; returns a list of violations.

    An empty list means the layout is simulatable: no overlapping or
    sub-pitch cell placements, labels unique, drivers assigned, and at
    least one input and one output cell present.
    """
    violations: List[str] = []
    cells = layout.cells
    min_spacing = layout.geometry.pitch_nm - MIN_SPACING_TOLERANCE_NM

    seen_labels = {}
    for i, c in enumerate(cells):
        if c.label is not None:
            if c.label in seen_labels:
                violations.append(
                    f"duplicate label {c.label!r} on cells {seen_labels[c.label]} and {i}")
            else:
                seen_labels[c.label] = i
        if c.role == ROLE_FIXED and c.polarization is None:
            violations.append(f"fixed cell {i} has no polarization")
        if c.role in (ROLE_INPUT, ROLE_OUTPUT) and c.label is None:
            violations.append(f"{c.role} cell {i} at ({c.x_nm:g}, {c.y_nm:g}) has no label")

    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            d = center_distance_nm(cells[i], cells[j])
            if d < min_spacing:
                violations.append(
                    f"cells {i} and {j} are {d:.3f} nm apart, closer than one pitch "
                    f"({layout.geometry.pitch_nm:g} nm)")

    if not layout.input_indices():
        violations.append("layout has no input cell")
    if not layout.output_indices():
        violations.append("layout has no output cell")
    return violations


def bounding_box_area_um2(layout: Layout) -> float:
    """Area of the axis-aligned bounding box of all cell squares, in um^2.

    Every cell contributes a cell_width square around its centre; rotated
    cells use the same square footprint.  Raises on an empty layout.
    """
    if not layout.cells:
        raise GeometryError("empty layout has no bounding box")
    w = layout.geometry.cell_width_nm
    xs = [c.x_nm for c in layout.cells]
    ys = [c.y_nm for c in layout.cells]
    width_nm = (max(xs) - min(xs)) + w
    height_nm = (max(ys) - min(ys)) + w
    return width_nm * height_nm * 1e-6
