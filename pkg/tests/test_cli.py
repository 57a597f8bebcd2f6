import json
import os
import subprocess
import sys

import pytest

from entropik.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_recurrence_json(capsys):
    code, out, _ = run(["recurrence", "--q", "7", "--nmax", "4"], capsys)
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1
    assert abs(data["lambda"] - 6.854102) < 1e-6
    assert data["full_step"] == ["1", "9", "69"]


def test_composite_q_is_precondition_error(capsys):
    code, out, err = run(["recurrence", "--q", "15"], capsys)
    assert code == 2 and out == ""
    assert json.loads(err)["error"]["type"] == "precondition"


def test_small_q_rejected(capsys):
    code, _, err = run(["degrees", "--q", "2"], capsys)
    assert code == 2 and "error" in json.loads(err)


def test_bad_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("ENTROPIK_SEED", "abc")
    code, _, err = run(["recurrence", "--q", "5", "--nmax", "3"], capsys)
    assert code == 2 and json.loads(err)["error"]["type"] == "invalid_seed"


def test_seed_env_is_recorded(capsys, monkeypatch):
    monkeypatch.setenv("ENTROPIK_SEED", "17")
    code, out, _ = run(["degrees", "--q", "5", "--nmax", "2", "--trials", "1"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 17


def test_degrees_then_genfun(capsys, tmp_path):
    path = tmp_path / "d.json"
    assert main(["degrees", "--q", "4", "--nmax", "6", "--trials", "1", "--output", str(path)]) == 0
    code, out, _ = run(["genfun", "--from", str(path)], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["numerator"] == [1, 2, 1] and data["denominator"] == [1, -2, 1]
    assert data["lambda"] == 1.0 and data["growth_order"] == 1


def test_probe_cyclic_q6(capsys):
    code, out, _ = run(["probe", "--pattern", "c", "--q", "6", "--iters", "5"], capsys)
    data = json.loads(out)
    assert code == 0 and data["iters_completed"] == 5
    assert abs(data["lambda"] - 13.93) < 0.05


def test_probe_size_cap_exit_code(capsys):
    code, out, _ = run(["probe", "--pattern", "cs", "--q", "6", "--iters", "8", "--max-bits", "1000"], capsys)
    assert code == 4


def test_csv_and_pretty(capsys):
    code, out, _ = run(["degrees", "--q", "5", "--nmax", "3", "--trials", "1", "--out", "csv"], capsys)
    assert code == 0 and out.splitlines()[0].count(",") >= 1
    code, out, _ = run(["degrees", "--q", "5", "--nmax", "3", "--trials", "1", "--out", "pretty"], capsys)
    assert code == 0 and "12" in out


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(["recurrence", "--q", "5", "--nmax", "3", "--output",
                        str(tmp_path / "missing" / "x.json")], capsys)
    assert code == 2 and json.loads(err)["error"]["type"] == "unwritable_path"


def test_atomic_write_leaves_no_temp_files(tmp_path):
    path = tmp_path / "r.json"
    assert main(["recurrence", "--q", "5", "--nmax", "3", "--output", str(path)]) == 0
    assert json.loads(path.read_text())["q"] == 5
    assert os.listdir(tmp_path) == ["r.json"]


def test_tables_table2(capsys):
    code, out, _ = run(["tables", "--scope", "table2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["mismatches"] == 0 and len(data["cells"]) == 5


def test_tables_mismatch_exit_code(capsys):
    # the q = 10 cyclic cell is printed 1.2e-6 away from its closed form
    code, out, _ = run(["tables", "--scope", "table3-analytic"], capsys)
    data = json.loads(out)
    assert code == 3
    bad = sorted(c["cell"] for c in data["cells"] if c["status"] == "mismatch")
    assert bad == ["q=10 C analytic", "q=17 CS analytic"]


def test_verify_q5(capsys):
    code, out, _ = run(["verify", "--q", "5", "--nmax", "4", "--trials", "1"], capsys)
    assert code == 0 and json.loads(out)["ok"]


@pytest.mark.parametrize("argv", [
    ["degrees", "--q", "6", "--nmax", "4", "--trials", "2", "--seed", "42"],
    ["surface", "--q", "7", "--nmax", "6", "--seed", "1"],
    ["probe", "--pattern", "s", "--q", "5", "--iters", "4", "--seed", "7"],
])
def test_byte_identical_across_processes(argv):
    cmd = [sys.executable, "-m", "entropik.cli"] + argv
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
