import io
import os

import pytest

from qcasim.cli import run_cli


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def xor_file(tmp_path):
    path = str(tmp_path / "xor.qcal")
    code, _, err = run(["gen", "xor3_v1", "-o", path])
    assert code == 0, err
    return path


@pytest.fixture()
def xor2_file(tmp_path):
    path = str(tmp_path / "xor2.qcal")
    assert run(["gen", "xor3_v2", "-o", path])[0] == 0
    return path


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        run(["simulate"])          # missing file argument
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["simulate", "x.qcal", "--solver", "magic"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["energy", "x.qcal", "--output", "O", "--inputs", "A+1"])
    assert exc.value.code == 2


def test_domain_error_exits_1(tmp_path):
    code, out, err = run(["validate", str(tmp_path / "missing.qcal")])
    assert code == 1
    assert "error:" in err

    bad = tmp_path / "bad.qcal"
    bad.write_text("qcal 1\nname bad\ncell x=0 y=0 zone=0 kind=input label=A polarization=+1\n",
                   encoding="utf-8")
    code, out, err = run(["validate", str(bad)])
    assert code == 1
    assert "violation:" in err

    code, out, err = run(["gen", "mystery9"])
    assert code == 1 and "unknown design id" in err


def test_gen_validate_simulate_pipeline(xor_file):
    code, out, err = run(["validate", xor_file])
    assert code == 0 and out.startswith("ok xor3_v1: 10 cells")

    code, out, err = run(["simulate", xor_file, "--truth-table",
                          "--solver", "exhaustive"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "A,B,C,XOR,ground_energy_J,converged,tie"
    assert len(lines) == 9
    bits = [l.split(",")[3] for l in lines[1:]]
    assert bits == ["0", "1", "1", "0", "1", "0", "0", "1"]


def test_simulate_single_vector(xor_file):
    code, out, err = run(["simulate", xor_file, "--inputs", "A=1,B=1,C=0",
                          "--solver", "sweep", "--seed", "2"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "A,B,C,XOR,ground_energy_J,converged,tie"
    assert lines[1].split(",")[:4] == ["1", "1", "0", "0"]


def test_simulate_flags_conflict(xor_file):
    code, out, err = run(["simulate", xor_file, "--inputs", "A=1,B=0,C=0",
                          "--truth-table"])
    assert code == 1 and "mutually exclusive" in err


def test_byte_identical_output(xor_file):
    args = ["simulate", xor_file, "--truth-table", "--solver", "sweep", "--seed", "9"]
    first = run(args)
    second = run(args)
    assert first == second


def test_energy_breakdown_csv(xor2_file):
    code, out, err = run(["energy", xor2_file, "--inputs", "A=1,B=0,C=0",
                          "--output", "XOR", "--candidate", "+1"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "source_cell,electron,distance_nm,energy_J"
    assert lines[-1].startswith("U,")
    total = float(lines[-1].split(",")[-1])
    assert total == pytest.approx(17.3e-20, rel=0.02)
    # 7 source cells x 2 electrons x 2 target electrons
    assert sum(1 for l in lines if l.split(",")[1] in ("X", "Y")) == 28


def test_energy_input_mismatch_overrides(xor2_file):
    # overriding the inputs changes the field and therefore the total
    base = run(["energy", xor2_file, "--output", "XOR", "--candidate", "+1"])
    flipped = run(["energy", xor2_file, "--inputs", "A=0,B=1,C=1",
                   "--output", "XOR", "--candidate", "+1"])
    assert base[0] == 0 and flipped[0] == 0
    assert base[1] != flipped[1]


def test_energy_decision_summary(xor2_file):
    code, out, err = run(["energy", xor2_file, "--output", "XOR"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "output,decision,U_plus_J,U_minus_J,margin_J"
    fields = lines[1].split(",")
    assert fields[0] == "XOR" and fields[1] == "+1"
    assert float(fields[2]) < float(fields[3])


def test_energy_unknown_label(xor2_file):
    code, out, err = run(["energy", xor2_file, "--output", "SUM"])
    assert code == 1 and "error:" in err


def test_energy_requires_stored_state(xor_file):
    # xor3_v1 ships without recorded polarizations, so the electron sum
    # has no defined network state to evaluate against
    code, out, err = run(["energy", xor_file, "--inputs", "A=1,B=0,C=0",
                          "--output", "XOR", "--candidate", "+1"])
    assert code == 1 and "recorded polarization" in err


def test_metrics_csv(tmp_path):
    path = str(tmp_path / "fa.qcal")
    assert run(["gen", "fa_v2", "-o", path])[0] == 0
    code, out, err = run(["metrics", path])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "name,cell_count,area_um2,latency_clocks,cost"
    assert lines[1].split(",")[:4] == ["fa_v2", "12", "0.01352", "0.5"]


def test_compare_shipped_manifest():
    root = os.path.join(os.path.dirname(__file__), os.pardir, "designs")
    code, out, err = run(["compare", os.path.join(root, "xor_manifest.csv")])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1].split(",")[0] == "xor3_v2"
    assert lines[1].split(",")[5] == "1"
    assert any(l.startswith("#") for l in lines)


def test_gen_stdout_matches_file(tmp_path, xor_file):
    code, out, err = run(["gen", "xor3_v1"])
    assert code == 0
    with open(xor_file, "r", encoding="utf-8") as fh:
        assert fh.read() == out


def test_radius_flag_changes_physics(xor_file):
    near = run(["simulate", xor_file, "--truth-table", "--radius", "25"])
    full = run(["simulate", xor_file, "--truth-table"])
    assert near[0] == 0 and full[0] == 0
    assert near[1] != full[1]


def test_radius_rejects_garbage(xor_file):
    with pytest.raises(SystemExit) as exc:
        run(["simulate", xor_file, "--radius", "-3"])
    assert exc.value.code == 2
