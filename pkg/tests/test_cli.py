import io
import json
import subprocess
import sys

import pytest

from symspace.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_spectra_einstein_h3():
    code, text = run("spectra", "H3", "--bundle", "sym2", "--variant", "einstein", "--normalize", "unit_root")
    assert code == 0
    d = json.loads(text)
    assert d["schema_version"] == 1
    assert d["normalization"] == "unit_root"
    assert abs(d["lambda_L"]) < 1e-10
    assert d["nullspace_dim"] == 2


def test_output_is_byte_identical():
    a = run("spectra", "SL3", "--emit", "both")[1]
    b = run("spectra", "SL3", "--emit", "both")[1]
    assert a == b


def test_roots_sl3():
    code, text = run("roots", "SL3")
    d = json.loads(text)
    assert code == 0 and d["rank"] == 2
    assert len(d["positive_roots"]) == 3
    csv = run("roots", "SL3", "--emit", "csv")[1].splitlines()
    assert csv[0] == "root,multiplicity,a0,a1"
    assert len(csv) == 4


def test_space_flag_equivalent():
    assert run("roots", "H2")[1] == run("roots", "--space", "H2")[1]


def test_nullspace_division_model():
    code, text = run("nullspace", "C3")
    assert code == 0
    assert json.loads(text)["dimension"] == 6


@pytest.mark.parametrize("argv", [
    ["roots", "NOPE"],
    ["spectra"],
    ["regions", "SL3", "--sigma", "9"],
    ["heatsim", "H3", "--dr", "0.1", "--t0", "0.01"],
    ["heatsim", "SL3"],
    ["heatsim", "H3", "--variant", "einstein", "--bundle", "one_forms"],
    ["nullspace", "Z2"],
    ["spectra", "OH16"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert "symspace: error:" in capsys.readouterr().err


def test_bad_choice_exits_2():
    with pytest.raises(SystemExit) as e:
        run("spectra", "H3", "--bundle", "tensors")
    assert e.value.code == 2


def test_out_directory(tmp_path):
    code, text = run("spectra", "H3", "--emit", "both", "--out", str(tmp_path))
    assert code == 0 and text == ""
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["spectra_H3_sym2_einstein.csv", "spectra_H3_sym2_einstein.json"]


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[DEFAULT]\nbundle = sym2\nvariant = einstein\n[spectra]\nnormalize = unit_root\n")
    d = json.loads(run("spectra", "H3", "--config", str(cfg))[1])
    assert d["bundle"] == "sym2" and d["variant"] == "einstein" and d["normalization"] == "unit_root"
    d = json.loads(run("spectra", "H3", "--config", str(cfg), "--normalize", "killing")[1])
    assert d["normalization"] == "killing"
    cfg.write_text("[spectra]\nbogus = 1\n")
    assert run("spectra", "H3", "--config", str(cfg))[0] == 2


def test_heatsim_small(tmp_path):
    code, text = run("heatsim", "H3", "--dr", "0.1", "--tmax", "1", "--sample-every", "0.5",
                     "--rmax", "15", "--emit", "csv")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "t,H1,H2,sup_envelope_ratio"
    assert len(lines) == 4
    d = json.loads(run("heatsim", "H3", "--dr", "0.1", "--tmax", "1", "--sample-every", "0.5", "--rmax", "15")[1])
    assert d["decay_fit"] is None  # too few samples to fit


def test_regions_small():
    code, text = run("regions", "SL3", "--samples", "500")
    d = json.loads(text)
    assert code == 0 and d["passed"]


def test_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "symspace.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "verify-all" in res.stdout
