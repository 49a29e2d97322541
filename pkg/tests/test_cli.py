import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from ulmkit import cli
from ulmkit import zgroup as zg
from ulmkit.zmodule import dumps_zmod, loads_zmod, make_cyclic, make_group_algebra

SCHEMA = json.loads(resources.files("ulmkit").joinpath("schema.json").read_text())


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def check_json(out):
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return doc


@pytest.fixture()
def v3_file(tmp_path):
    path = tmp_path / "v3.zmod"
    path.write_text(dumps_zmod(make_cyclic(2, 3)))
    return str(path)


def test_ulm_subcommand(capsys, v3_file):
    code, out, _ = run_cli(capsys, "ulm", "-i", v3_file)
    assert code == 0
    assert check_json(out) == {"ulm": [0, 0, 1]}


def test_decompose_subcommand(capsys, tmp_path):
    path = tmp_path / "g.zmod"
    path.write_text(dumps_zmod(make_group_algebra(3, 1)))
    code, out, _ = run_cli(capsys, "decompose", "-i", str(path))
    assert code == 0
    doc = check_json(out)
    assert doc["blocks"] == [{"n": 3, "mult": 1}]
    assert len(doc["basis"]) == 3


def test_dual_subcommand_round_trip(capsys, v3_file):
    code, out, _ = run_cli(capsys, "dual", "-i", v3_file)
    assert code == 0
    dual = loads_zmod(out)
    from ulmkit.duality import dualize

    assert dual.sigma == dualize(make_cyclic(2, 3)).sigma


def test_height_subcommand(capsys, v3_file):
    code, out, _ = run_cli(capsys, "height", "-i", v3_file, "--eta", "0,0,1")
    assert code == 0
    assert check_json(out) == {"m": 3, "height": 0}
    code, out, _ = run_cli(capsys, "height", "-i", v3_file, "--eta", "1,0,0")
    assert check_json(out) == {"m": 1, "height": 2}


def test_height_rejects_zero(capsys, v3_file):
    code, out, err = run_cli(capsys, "height", "-i", v3_file, "--eta", "0,0,0")
    assert code == 1
    jsonschema.validate(json.loads(err), SCHEMA)


def test_solve_embed_solvable(capsys, v3_file):
    code, out, _ = run_cli(capsys, "solve-embed", "-i", v3_file,
                           "--phi", "1,0,0", "--n", "2")
    assert code == 0
    doc = check_json(out)
    assert doc["solvable"] is True
    assert doc["psi"] == [[1, 0, 0], [0, 1, 0]]
    assert doc["surjective"] is True


def test_solve_embed_unsolvable(capsys, tmp_path):
    path = tmp_path / "v2.zmod"
    path.write_text(dumps_zmod(make_cyclic(2, 2)))
    code, out, _ = run_cli(capsys, "solve-embed", "-i", str(path),
                           "--phi", "1,0;0,1", "--n", "3")
    assert code == 0
    assert check_json(out) == {"solvable": False, "psi": None, "surjective": None}


def test_group_ep_subcommand(capsys, tmp_path):
    c9 = zg.cyclic_group(3, 2)
    c3 = zg.cyclic_group(3, 1)
    g_path = tmp_path / "c9.zgrp"
    gamma_path = tmp_path / "c3.zgrp"
    g_path.write_text(zg.dumps_zgrp(c9))
    gamma_path.write_text(zg.dumps_zgrp(c3))
    beta = ",".join(str(i % 3) for i in range(9))
    code, out, _ = run_cli(
        capsys, "group-ep",
        "--h", str(g_path), "--g", str(g_path), "--gamma", str(gamma_path),
        "--alpha", beta, "--beta", beta,
    )
    assert code == 0
    doc = check_json(out)
    assert doc == {"split": False, "frattini": True, "section": None}


def test_spectrum_subcommand(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--l", "3", "--pmax", "20")
    assert code == 0
    assert check_json(out) == {"heights": {"0": 7, "2": 19}}


def test_char_height_subcommand(capsys):
    code, out, _ = run_cli(capsys, "char-height", "--l", "3", "--ramified", "19")
    assert check_json(out) == {"height": 2, "exact": True}
    code, out, _ = run_cli(capsys, "char-height", "--l", "3", "--ramified", "19", "--m", "2")
    assert check_json(out) == {"interval": [1, 2], "exact": False}


def test_char_height_domain_error(capsys):
    code, out, err = run_cli(capsys, "char-height", "--l", "3", "--ramified", "5")
    assert code == 1
    doc = json.loads(err)
    jsonschema.validate(doc, SCHEMA)
    assert "error" in doc


def test_present_subcommand(capsys):
    code, out, _ = run_cli(capsys, "present", "--l", "3", "--N", "1", "--mult", "1=1")
    assert code == 0
    doc = check_json(out)
    assert doc["ell"] == 3
    assert doc["families"][0]["size"] == 3
    code, out, _ = run_cli(capsys, "present", "--l", "3", "--N", "1", "--mult", "1=1",
                           "--free", "1", "--trunc", "3", "--format", "text")
    assert code == 0
    assert "x0^s = x1" in out


def test_selftest_subcommand_subset(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--criteria", "5", "--format", "json")
    assert code == 0
    doc = check_json(out)
    assert doc["ok"] is True and len(doc["results"]) == 1


def test_malformed_file_error_reports_line(capsys, tmp_path):
    path = tmp_path / "bad.zmod"
    path.write_text("l 2\ndim 2\nsigma\n1 0\n9 1\n")
    code, out, err = run_cli(capsys, "ulm", "-i", str(path))
    assert code == 1
    doc = json.loads(err)
    jsonschema.validate(doc, SCHEMA)
    assert doc["line"] == 5 and doc["col"] == 1


def test_missing_file_error(capsys):
    code, _, err = run_cli(capsys, "ulm", "-i", "/nonexistent/x.zmod")
    assert code == 1
    assert "error" in json.loads(err)


def test_unknown_subcommand_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "ulmkit.cli", "frobnicate"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2


def test_json_int_threshold():
    assert cli.json_int(7) == 7
    assert cli.json_int(2**53 - 1) == 2**53 - 1
    assert cli.json_int(2**60) == str(2**60)
    assert cli.json_int(-(2**60)) == str(-(2**60))


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ulmkit.cli", "spectrum", "--l", "3", "--pmax", "20"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"heights": {"0": 7, "2": 19}}
