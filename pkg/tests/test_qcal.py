import pytest

from qcasim import designs
from qcasim.geometry import Cell, GeometryConfig, Layout, ROLE_INPUT, ROLE_OUTPUT
from qcasim.qcal import (
    LayoutDocument,
    QcalError,
    parse_qcal,
    serialize_qcal,
)

SAMPLE = """qcal 1
# hand-written sample
name sample pair
cell x=20 y=0 zone=1 kind=output label=OUT
cell x=0 y=0 zone=0 kind=input label=A polarization=+1
"""


def test_parse_sample():
    doc = parse_qcal(SAMPLE)
    assert doc.version == 1
    assert doc.comments == ["hand-written sample"]
    layout = doc.layout
    assert layout.name == "sample pair"
    assert len(layout.cells) == 2
    a = layout.cells[layout.index_of_label("A")]
    assert (a.x_nm, a.y_nm, a.clock_zone, a.role, a.polarization) == (0, 0, 0, "input", 1)


def test_parse_applies_geom_defaults():
    doc = parse_qcal(SAMPLE)
    g = doc.layout.geometry
    assert (g.cell_width_nm, g.pitch_nm) == (18.0, 20.0)
    assert g.coupling_jm == pytest.approx(23.04e-29)


def test_parse_geom_override():
    text = SAMPLE.replace("name", "geom cell=10 pitch=30\nname")
    g = parse_qcal(text).layout.geometry
    assert (g.cell_width_nm, g.pitch_nm) == (10.0, 30.0)
    assert g.coupling_jm == pytest.approx(23.04e-29)  # unspecified key keeps default


def test_serialize_canonical_order_and_keys():
    doc = parse_qcal(SAMPLE)
    text = serialize_qcal(doc)
    lines = text.strip().splitlines()
    assert lines[0] == "qcal 1"
    assert lines[1] == "# hand-written sample"
    assert lines[2] == "name sample pair"
    assert lines[3].startswith("geom cell=18 pitch=20 A=")
    # cells re-sorted by (y, x): A before OUT
    assert lines[4] == "cell x=0 y=0 zone=0 kind=input label=A polarization=+1"
    assert lines[5] == "cell x=20 y=0 zone=1 kind=output label=OUT"


def test_roundtrip_identity_all_builtin():
    for design_id in ("inverter", "mv3", "and2", "or2", "xor3_v1", "xor3_v2",
                      "fa_v2", "wire:5:horizontal", "wire:4:rot45"):
        layout = designs.build(design_id)
        doc = LayoutDocument(layout=layout, version=1, comments=[])
        text = serialize_qcal(doc)
        again = parse_qcal(text)
        assert serialize_qcal(again) == text
        assert again.layout == layout


def test_rotated_cells_serialize_with_orient_token():
    layout = designs.build("wire:3:rot45")
    text = serialize_qcal(LayoutDocument(layout=layout, version=1, comments=[]))
    body = [l for l in text.splitlines() if l.startswith("cell")]
    assert all(l.endswith("orient=rot45") for l in body)


def test_parse_errors_carry_line_numbers():
    bad_zone = SAMPLE + "cell x=40 y=0 zone=5 kind=normal\n"
    with pytest.raises(QcalError, match="line 6"):
        parse_qcal(bad_zone)

    dup = SAMPLE + "cell x=40 y=0 zone=0 kind=input label=A polarization=-1\n"
    with pytest.raises(QcalError, match="duplicate"):
        parse_qcal(dup)

    unknown_key = SAMPLE + "cell x=40 y=0 zone=0 kind=normal color=red\n"
    with pytest.raises(QcalError, match="unknown cell key"):
        parse_qcal(unknown_key)


def test_parse_rejects_bad_header():
    with pytest.raises(QcalError, match="line 1"):
        parse_qcal("qcal 2\nname x\ncell x=0 y=0 zone=0 kind=normal\n")
    with pytest.raises(QcalError):
        parse_qcal("name first\nqcal 1\n")
    with pytest.raises(QcalError, match="name"):
        parse_qcal("qcal 1\ncell x=0 y=0 zone=0 kind=normal\n")


def test_parse_rejects_bad_polarization():
    text = SAMPLE + "cell x=40 y=0 zone=0 kind=fixed polarization=0.5\n"
    with pytest.raises(QcalError):
        parse_qcal(text)


def test_parse_rejects_unknown_directive():
    with pytest.raises(QcalError, match="line 2"):
        parse_qcal("qcal 1\nwire length=5\n")


def test_serialize_rejects_unsafe_labels():
    layout = Layout(
        cells=[Cell(0, 0, 0, ROLE_INPUT, "A B", +1),
               Cell(20, 0, 0, ROLE_OUTPUT, "OUT")],
        geometry=GeometryConfig(), name="x")
    with pytest.raises(QcalError):
        serialize_qcal(LayoutDocument(layout=layout, version=1, comments=[]))


def test_shipped_files_parse_and_roundtrip(tmp_path):
    import pathlib
    root = pathlib.Path(__file__).resolve().parent.parent / "designs"
    files = sorted(root.glob("*.qcal"))
    assert files, "no shipped design files found"
    for path in files:
        text = path.read_text(encoding="utf-8")
        doc = parse_qcal(text)
        assert serialize_qcal(doc) == text  # shipped files are canonical
