import math
import random

import pytest

from qcasim.geometry import (
    Cell,
    GeometryConfig,
    Layout,
    ORIENT_ROTATED,
    ROLE_FIXED,
    ROLE_INPUT,
    ROLE_NORMAL,
    ROLE_OUTPUT,
)
from qcasim.solver import (
    SolverConfig,
    SolverError,
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
from qcasim import designs

GEOM = GeometryConfig()


def make_layout(cells):
    return Layout(cells=list(cells), geometry=GEOM, name="t")


# Couplings for the recurring relative placements, frozen from an
# independent 16-term hand sum (1e-20 J, 4 decimals).
COUPLING_TABLE = {
    (20, 0): -4.8574,
    (20, 20): +1.5782,
    (40, 0): -0.0766,
    (60, 0): -0.0098,
    (40, 40): +0.0166,
    (20, 40): +0.0178,
    (60, 20): -0.0016,
}


def test_coupling_reference_values():
    a = Cell(0, 0, 0, ROLE_NORMAL)
    for (dx, dy), want in COUPLING_TABLE.items():
        b = Cell(dx, dy, 0, ROLE_NORMAL)
        assert round(coupling_j(a, b, GEOM) * 1e20, 4) == want


def test_coupling_symmetry_and_invariance():
    rng = random.Random(1)
    for _ in range(20):
        ax, ay = rng.uniform(-100, 100), rng.uniform(-100, 100)
        dx, dy = rng.choice(list(COUPLING_TABLE)), None
        a = Cell(ax, ay, 0, ROLE_NORMAL)
        b = Cell(ax + dx[0], ay + dx[1], 0, ROLE_NORMAL)
        j_ab = coupling_j(a, b, GEOM)
        assert coupling_j(b, a, GEOM) == pytest.approx(j_ab, rel=1e-12)
        assert round(j_ab * 1e20, 4) == COUPLING_TABLE[dx]


def test_coupling_rejects_overlap():
    a = Cell(0, 0, 0, ROLE_NORMAL)
    with pytest.raises(SolverError):
        coupling_j(a, Cell(0, 0, 0, ROLE_NORMAL), GEOM)


def test_coupling_matrix_radius_cut():
    layout = make_layout([
        Cell(0, 0, 0, ROLE_INPUT, "A", +1),
        Cell(20, 0, 0, ROLE_NORMAL, "n1"),
        Cell(100, 0, 0, ROLE_OUTPUT, "OUT"),
    ])
    full = coupling_matrix(layout, math.inf)
    cut = coupling_matrix(layout, 50.0)
    assert full[0, 2] != 0.0
    assert cut[0, 2] == 0.0
    assert cut[0, 1] == full[0, 1]
    assert cut[1, 2] == 0.0  # 80 nm apart


def test_total_energy_flip_symmetry():
    rng = random.Random(7)
    cells = [Cell(0, 0, 0, ROLE_INPUT, "A", +1),
             Cell(20, 0, 0, ROLE_OUTPUT, "OUT")]
    taken = {(0, 0), (20, 0)}
    while len(cells) < 7:
        p = (rng.randrange(-3, 4) * 20, rng.randrange(-3, 4) * 20)
        if p not in taken:
            taken.add(p)
            cells.append(Cell(p[0], p[1], 0, ROLE_NORMAL))
    layout = make_layout(cells)
    for _ in range(10):
        v = [rng.choice((-1.0, 1.0)) for _ in cells]
        e = total_layout_energy(layout, v)
        assert total_layout_energy(layout, [-x for x in v]) == e


def five_cell_wire(bit):
    cells = [Cell(i * 20, 0, 0,
                  ROLE_INPUT if i == 0 else (ROLE_OUTPUT if i == 4 else ROLE_NORMAL),
                  "IN" if i == 0 else ("OUT" if i == 4 else None))
             for i in range(5)]
    layout = make_layout(cells)
    return layout, {"IN": bit}


@pytest.mark.parametrize("solver_name", ["exhaustive", "sweep"])
@pytest.mark.parametrize("bit", [0, 1])
def test_wire_propagates(solver_name, bit):
    layout, bits = five_cell_wire(bit)
    result = solve(layout, bits, solver_name)
    want = 1.0 if bit else -1.0
    assert result.assignment.values == [want] * 5
    assert result.converged
    assert not result.tie


def test_rotated_wire_alternates():
    cells = [Cell(i * 20, 0, 0,
                  ROLE_INPUT if i == 0 else (ROLE_OUTPUT if i == 4 else ROLE_NORMAL),
                  "IN" if i == 0 else ("OUT" if i == 4 else None),
                  orientation=ORIENT_ROTATED)
             for i in range(5)]
    layout = make_layout(cells)
    # axial rotated neighbours couple antiferromagnetically
    assert coupling_j(layout.cells[0], layout.cells[1], GEOM) > 0
    result = solve(layout, {"IN": 1}, "exhaustive")
    assert result.assignment.values == [1.0, -1.0, 1.0, -1.0, 1.0]


def test_exhaustive_matches_brute_force():
    rng = random.Random(3)
    for trial in range(10):
        cells = [Cell(0, 0, 0, ROLE_INPUT, "A", rng.choice((-1.0, 1.0))),
                 Cell(20, 0, 0, ROLE_OUTPUT, "OUT")]
        taken = {(0, 0), (20, 0)}
        while len(cells) < 6:
            p = (rng.randrange(-2, 3) * 20, rng.randrange(-2, 3) * 20)
            if p not in taken:
                taken.add(p)
                cells.append(Cell(p[0], p[1], 0, ROLE_NORMAL))
        layout = make_layout(cells)
        result = exhaustive_ground_state(layout)
        free = layout.free_indices()
        best = math.inf
        for k in range(2 ** len(free)):
            v = [c.polarization if c.polarization is not None else 0.0
                 for c in layout.cells]
            for pos, idx in enumerate(free):
                bit = (k >> (len(free) - 1 - pos)) & 1
                v[idx] = 1.0 if bit else -1.0
            best = min(best, total_layout_energy(layout, v))
        assert result.assignment.total_energy_j == pytest.approx(best, rel=1e-12)


def test_sweep_never_beats_exhaustive():
    rng = random.Random(11)
    for trial in range(15):
        cells = [Cell(0, 0, 0, ROLE_INPUT, "A", rng.choice((-1.0, 1.0))),
                 Cell(20, 0, 0, ROLE_OUTPUT, "OUT")]
        taken = {(0, 0), (20, 0)}
        while len(cells) < 8:
            p = (rng.randrange(-3, 4) * 20, rng.randrange(-3, 4) * 20)
            if p not in taken:
                taken.add(p)
                cells.append(Cell(p[0], p[1], 0, ROLE_NORMAL))
        layout = make_layout(cells)
        ground = exhaustive_ground_state(layout).assignment.total_energy_j
        relaxed = sweep_relax(layout, config=SolverConfig(seed=trial))
        assert relaxed.assignment.total_energy_j >= ground - 1e-30


def test_exhaustive_tie_detection():
    # with a hard radius cut the output decouples entirely: both states
    # are exactly degenerate and the low-index state (-1) is reported
    layout = make_layout([
        Cell(0, 0, 0, ROLE_INPUT, "A", +1),
        Cell(100, 0, 0, ROLE_OUTPUT, "OUT"),
    ])
    result = exhaustive_ground_state(layout, config=SolverConfig(effect_radius_nm=50))
    assert result.tie
    assert result.assignment.values[1] == -1.0


def test_exhaustive_capacity_guard():
    cells = [Cell(0, 0, 0, ROLE_INPUT, "A", +1)]
    for i in range(25):
        cells.append(Cell((i + 1) * 20, 0, 0, ROLE_NORMAL))
    cells.append(Cell(26 * 20, 0, 0, ROLE_OUTPUT, "OUT"))
    with pytest.raises(SolverError, match="free cells"):
        exhaustive_ground_state(make_layout(cells))


def test_sweep_deterministic_per_seed():
    layout, bits = five_cell_wire(1)
    a = sweep_relax(layout, bits, SolverConfig(seed=5))
    b = sweep_relax(layout, bits, SolverConfig(seed=5))
    assert a.assignment.values == b.assignment.values
    assert a.assignment.total_energy_j == b.assignment.total_energy_j


def test_assign_inputs_validation():
    layout, _ = five_cell_wire(1)
    assert assign_inputs(layout, {"IN": 0}) == {0: -1}
    with pytest.raises(SolverError):
        assign_inputs(layout, {"IN": 2})
    with pytest.raises(SolverError):
        assign_inputs(layout, {"OUT": 1})
    with pytest.raises(SolverError):
        assign_inputs(layout, {})


def test_solve_unknown_solver():
    layout, bits = five_cell_wire(1)
    with pytest.raises(SolverError):
        solve(layout, bits, "quantum")


def test_fixed_cells_bias_the_ground_state():
    # a fixed -1 neighbour beats a +1 input placed further away
    layout = make_layout([
        Cell(0, 0, 0, ROLE_INPUT, "A", +1),
        Cell(60, 0, 0, ROLE_OUTPUT, "OUT"),
        Cell(80, 0, 0, ROLE_FIXED, None, -1),
    ])
    result = solve(layout, {"A": 1}, "exhaustive")
    assert result.assignment.values[1] == -1.0


@pytest.mark.parametrize("solver_name", ["exhaustive", "sweep"])
def test_truth_table_majority(solver_name):
    layout = designs.build("mv3")
    table = truth_table(layout, solver=solver_name)
    assert table.input_labels == ["A", "B", "C"]
    assert table.output_labels == ["M"]
    got = [row.outputs[0] for row in table.rows]
    want = []
    for k in range(8):
        a, b, c = (k >> 2) & 1, (k >> 1) & 1, k & 1
        want.append(1 if a + b + c >= 2 else 0)
    assert got == want
    assert all(row.converged and not row.tie for row in table.rows)


def test_truth_table_msb_order():
    layout = designs.build("mv3")
    table = truth_table(layout)
    # ascending binary count with the alphabetically first label as MSB
    assert [row.inputs for row in table.rows] == [
        ((k >> 2) & 1, (k >> 1) & 1, k & 1) for k in range(8)]


def test_truth_table_csv_roundtrip_shape():
    layout = designs.build("inverter")
    table = truth_table(layout)
    text = truth_table_to_csv(table)
    lines = text.strip().splitlines()
    assert lines[0] == "IN,OUT,ground_energy_J,converged,tie"
    assert len(lines) == 3
    assert [l.split(",")[1] for l in lines[1:]] == ["1", "0"]


def test_truth_table_input_cap():
    cells = [Cell(i * 20, 0, 0, ROLE_INPUT, f"I{i:02d}", +1) for i in range(17)]
    cells.append(Cell(17 * 20, 0, 0, ROLE_OUTPUT, "OUT"))
    with pytest.raises(SolverError):
        truth_table(make_layout(cells))
