import json
import math
import subprocess
import sys

import pytest

from conftest import CONFIGS
from gravlg import io
from gravlg.cli import run_command


def run(capsys, *argv):
    status = run_command(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def kv(text):
    lines = text.strip().splitlines()
    assert lines[0] == "key,value"
    return {k: float(v) for k, v in (ln.split(",") for ln in lines[1:])}


def test_eval_ground_example(capsys):
    status, out, _ = run(capsys, "eval", "--lambda2", "1.25e-3", "--period-units",
                         "--t1", str(2 / 3), "--t2", str(7 / 3))
    assert status == 0
    vals = kv(out)
    assert vals["q"] == pytest.approx(-6.1720959965e-4, rel=1e-9)
    assert vals["q"] == vals["q_pm"]


def test_eval_from_config(capsys):
    status, out, _ = run(capsys, "eval", "--config", str(CONFIGS / "eval_minimum.json"))
    assert status == 0
    assert kv(out)["q"] == pytest.approx(-6.1720959965e-4, rel=1e-9)


def test_eval_oracle_engine(capsys):
    args = ["eval", "--lambda", "0.1", "--omega-ratio", "0.5", "--t1", "0.4", "--t2", "2.2",
            "--init", "thermal", "--nbar", "1"]
    _, closed, _ = run(capsys, *args)
    _, oracle, _ = run(capsys, *args, "--engine", "oracle")
    a, b = kv(closed), kv(oracle)
    for key in a:
        assert a[key] == pytest.approx(b[key], abs=1e-8)


def test_eval_output_file_is_deterministic(capsys, tmp_path):
    path = tmp_path / "q.csv"
    args = ["eval", "--lambda", "0.05", "--t2", "3", "--init", "squeezed", "--zeta", "-0.5", "-o", str(path)]
    assert run(capsys, *args)[0] == 0
    first = path.read_bytes()
    assert run(capsys, *args)[0] == 0
    assert path.read_bytes() == first
    assert len(first.decode().splitlines()) == 8
    meta = json.loads(path.with_suffix(".meta.json").read_text())
    assert meta["command"] == "eval" and meta["t2"] == 3.0


def test_scan_writes_data_script_and_figure(capsys, tmp_path):
    prefix = tmp_path / "fig"
    status, out, _ = run(capsys, "scan", "--lambda2", "1.25e-3", "--resolution", "41", "-o", str(prefix))
    assert status == 0
    assert out.splitlines()[0] == "pair,s1,s2,negative_cells,components,q_min"
    header, rows = io.read_csv(tmp_path / "fig.csv")
    assert header == io.GRID_COLUMNS and len(rows) == 41 * 42 // 2
    assert io.read_csv(tmp_path / "fig_mask.csv")[0] == io.MASK_COLUMNS
    script = (tmp_path / "fig.plot").read_text()
    assert "fig_mask.csv" in script and "fig.png" in script
    assert (tmp_path / "fig.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert json.loads((tmp_path / "fig.meta.json").read_text())["summary"]["pp"] == 0


def test_scan_without_figure(capsys, tmp_path):
    prefix = tmp_path / "s"
    assert run(capsys, "scan", "--lambda", "0.1", "--resolution", "11", "--no-figure", "-o", str(prefix))[0] == 0
    assert (tmp_path / "s.plot").exists()
    assert not (tmp_path / "s.png").exists()


def test_scan_summary_matches_ground_fixture(capsys):
    status, out, _ = run(capsys, "scan", "--config", str(CONFIGS / "ground_scan.json"))
    assert status == 0
    rows = {ln.split(",")[0]: ln.split(",") for ln in out.splitlines()[1:]}
    assert rows["pp"][3] == "0"
    assert rows["pm"][3:5] == ["19404", "4"]


def test_minima(capsys):
    status, out, _ = run(capsys, "minima", "--lambda2", "1.25e-3", "--resolution", "201")
    assert status == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1 + 12
    ratios = [float(ln.split(",")[-1]) for ln in lines[1:]]
    assert all(abs(r - 1) < 0.05 for r in ratios)


def test_negativity_columns(capsys, tmp_path):
    path = tmp_path / "neg.csv"
    status, _, _ = run(capsys, "negativity", "--lambda", "0.1", "--points", "11", "--oracle", "-o", str(path))
    assert status == 0
    header, rows = io.read_csv(path)
    assert header == ["tau", "negativity_closed", "negativity_squared", "negativity_oracle", "q_pm_t1_zero"]
    assert all(abs(r[1] - r[3]) < 1e-8 for r in rows)
    assert (tmp_path / "neg.plot").exists() and (tmp_path / "neg.png").exists()


def test_ns_command(capsys):
    status, out, _ = run(capsys, "ns", "--lambda", "0.1", "--resolution", "21")
    assert status == 0
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    assert all(float(r[3]) >= 0 for r in rows)
    assert any(float(r[4]) < 0 for r in rows)


def test_estimate_reference(capsys):
    status, out, _ = run(capsys, "estimate")
    assert status == 0
    vals = kv(out)
    assert vals["lambda2_approx"] == pytest.approx(1.7e-28, rel=0.05)
    assert vals["nbar_lambda2"] == pytest.approx(0.5e-14, rel=0.10)


def test_estimate_mass_variant(capsys):
    status, out, _ = run(capsys, "estimate", "--M", "1e-3", "--period", "10")
    assert status == 0
    assert "lambda2_approx" not in out


def test_verify_passes_and_fails(capsys):
    assert run(capsys, "verify", "--count", "6")[0] == 0
    status, _, err = run(capsys, "verify", "--count", "3", "--tol", "1e-30")
    assert status == 2
    assert err.startswith("error[NumericalError]")


@pytest.mark.parametrize("argv, code", [
    (["eval", "--lambda", "-0.1", "--t2", "1"], "ValidationError"),
    (["eval", "--t2", "1"], "ValidationError"),
    (["eval", "--lambda", "0.1", "--t1", "2", "--t2", "1"], "TimeOrder"),
    (["eval", "--lambda", "0.1", "--t2", "1", "--init", "superposition", "--xi0", "1", "--xi1", "-1"],
     "UnsupportedInit"),
    (["scan", "--lambda", "0.1", "--engine", "oracle", "--resolution", "300"], "EngineUnavailable"),
    (["frobnicate"], "ValidationError"),
])
def test_invalid_input_exit_one(capsys, argv, code):
    status, _, err = run(capsys, *argv)
    assert status == 1
    assert err.startswith(f"error[{code}]")


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"lambda2": 1e-3, "colour": "red"}')
    status, _, err = run(capsys, "eval", "--config", str(bad))
    assert status == 1 and "colour" in err
    status, _, err = run(capsys, "eval", "--config", str(tmp_path / "absent.json"))
    assert status == 1 and err.startswith("error[IoError]")


def test_missing_output_directory(capsys, tmp_path):
    status, _, err = run(capsys, "scan", "--lambda", "0.1", "--resolution", "5", "-o",
                         str(tmp_path / "no" / "where"))
    assert status == 1 and err.startswith("error[IoError]")


def test_module_entry_point_help():
    done = subprocess.run([sys.executable, "-m", "gravlg", "--help"], capture_output=True, text=True)
    assert done.returncode == 0
    assert "config defaults" in done.stdout and "lambda2" in done.stdout


def test_period_units_equivalent(capsys):
    _, a, _ = run(capsys, "eval", "--lambda", "0.1", "--t2", str(math.pi))
    _, b, _ = run(capsys, "eval", "--lambda", "0.1", "--t2", "1", "--period-units")
    assert a == b
