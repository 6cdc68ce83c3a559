"""Energy-based simulator and design toolkit for quantum-dot cellular
automata layouts on a 20 nm grid.

The pieces:

- geometry: cells, dot/electron positions, layout validation.
- electrostatics: pairwise A/r energies, per-output breakdowns, and the
  two-candidate output decision.
- solver: cell-cell coupling matrix, exhaustive and relaxation-sweep
  ground-state solvers, truth tables.
- metrics: area, latency, cost score, and manifest-driven comparisons.
- designs: built-in layouts (wires, inverter, majority, two XOR variants,
  two full adders) and the digitization audit for the reconstructed ones.
- qcal: the line-oriented layout file format.
- cli: the qcasim command.
"""

from .geometry import (
    Cell,
    GeometryConfig,
    GeometryError,
    Layout,
    ORIENT_NORMAL,
    ORIENT_ROTATED,
    QcaError,
    ROLE_FIXED,
    ROLE_INPUT,
    ROLE_NORMAL,
    ROLE_OUTPUT,
    bounding_box_area_um2,
    center_distance_nm,
    dot_positions,
    electron_positions,
    validate,
)
from .electrostatics import (
    EnergyBreakdown,
    EnergyError,
    OutputDecision,
    breakdown_to_csv,
    decide_output,
    electron_energy,
    output_config_energy,
    pair_energy,
)
from .solver import (
    PolarizationAssignment,
    SolveResult,
    SolverConfig,
    SolverError,
    TruthTable,
    assign_inputs,
    coupling_j,
    coupling_matrix,
    exhaustive_ground_state,
    solve,
    sweep_relax,
    total_layout_energy,
    truth_table,
    truth_table_to_csv,
)
from .metrics import (
    DesignMetrics,
    MetricsError,
    compare,
    comparison_to_csv,
    cost,
    latency_clocks,
    metrics_for,
    read_manifest,
)
from .designs import (
    DESIGN_IDS,
    DesignError,
    DigitizationReport,
    build,
    digitization_report,
)
from .qcal import (
    LayoutDocument,
    QcalError,
    load_qcal,
    parse_qcal,
    save_qcal,
    serialize_qcal,
)

__version__ = "1.0.0"

__all__ = [
    "Cell", "GeometryConfig", "GeometryError", "Layout",
    "ORIENT_NORMAL", "ORIENT_ROTATED", "QcaError",
    "ROLE_FIXED", "ROLE_INPUT", "ROLE_NORMAL", "ROLE_OUTPUT",
    "bounding_box_area_um2", "center_distance_nm", "dot_positions",
    "electron_positions", "validate",
    "EnergyBreakdown", "EnergyError", "OutputDecision", "breakdown_to_csv",
    "decide_output", "electron_energy", "output_config_energy", "pair_energy",
    "PolarizationAssignment", "SolveResult", "SolverConfig", "SolverError",
    "TruthTable", "assign_inputs", "coupling_j", "coupling_matrix",
    "exhaustive_ground_state", "solve", "sweep_relax", "total_layout_energy",
    "truth_table", "truth_table_to_csv",
    "DesignMetrics", "MetricsError", "compare", "comparison_to_csv", "cost",
    "latency_clocks", "metrics_for", "read_manifest",
    "DESIGN_IDS", "DesignError", "DigitizationReport", "build",
    "digitization_report",
    "LayoutDocument", "QcalError", "load_qcal", "parse_qcal", "save_qcal",
    "serialize_qcal",
    "__version__",
]
