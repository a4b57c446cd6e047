import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from degmap.cli import main
from degmap.io import parse_pwa_csv, parse_solution_csv
from degmap.reference import data_dir

DEMOS = Path(__file__).resolve().parents[1] / "demos"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_lfp_at_rest(capsys):
    code, out, _ = run(capsys, "eval", "--pwa", "data/lfp.csv", "--p", "0", "--e", "0", "--ce", "1")
    assert code == 0 and out.strip() == "3.049e-07"


def test_validate_lfp(capsys):
    code, out, _ = run(capsys, "validate", "--pwa", "data/lfp.csv")
    assert code == 0
    assert out.strip() == "convex: yes, planes: 18 (15 after dedup)"


def test_build_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"m{k}.json"
        assert run(capsys, "build", "--cycles", "data/wang.csv", "--bands", "5,3", "--out", str(out))[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["format"] == "degmap/degradation-map"
    assert doc["current_rates_a"] == [3.0, 5.25]


def test_full_pipeline(tmp_path, capsys):
    m, n, p = tmp_path / "map.json", tmp_path / "nmap.json", tmp_path / "pwa.csv"
    assert run(capsys, "build", "--cycles", "data/wang.csv", "--bands", "5,3", "--out", str(m))[0] == 0
    assert run(capsys, "normalize", "--map", str(m), "--ocv-mean", "3.7", "--out", str(n))[0] == 0
    code, _, err = run(capsys, "convexify", "--nmap", str(n), "--out", str(p))
    assert code == 0 and "planes:" in err
    assert len(parse_pwa_csv(p.read_text())) >= 1
    code, out, _ = run(capsys, "validate", "--pwa", str(p))
    assert code == 0 and out.startswith("convex: yes")
    code, out, _ = run(capsys, "dump-surface", "--nmap", str(n), "--power-samples", "5", "--soe-samples", "3")
    assert code == 0 and len(out.splitlines()) == 16


def test_analytic_path(tmp_path, capsys):
    m = tmp_path / "map.json"
    code, _, _ = run(capsys, "discretize", "--fn", "data/lfp_placeholder_fn.json",
                     "--ocv", "data/lfp_placeholder_ocv.csv", "--soc-bands", "10",
                     "--currents", "0.5,1,2,4", "--cq", "2.3", "--out", str(m))
    assert code == 0
    doc = json.loads(m.read_text())
    assert len(doc["soc_band_centers"]) == 10 and len(doc["current_rates_a"]) == 4


def test_bench(capsys):
    # the LFP surface dips below zero at rest around a quarter charge
    with pytest.warns(UserWarning, match="negative loss rate"):
        code, out, _ = run(capsys, "bench", "--schedule", str(DEMOS / "schedule.csv"),
                           "--config", str(DEMOS / "config.json"))
    assert code == 0
    assert [line.split(":")[0] for line in out.splitlines()] == ["LFP", "NMC_LMO", "LCO"]


def test_dispatch(tmp_path, capsys):
    out = tmp_path / "sol.csv"
    code, _, err = run(capsys, "dispatch", "--pwa", "data/nmc_lmo.csv", "--prices", str(DEMOS / "prices.csv"),
                       "--config", str(DEMOS / "config.json"), "--deg-price", "200", "--out", str(out))
    assert code == 0 and err.startswith("objective:")
    sol = parse_solution_csv(out.read_text())
    assert sol["p_kw"].size == 24
    assert np.all(sol["e_kwh"] >= -1e-9)


def test_dump_surface_gnuplot(capsys):
    code, out, _ = run(capsys, "dump-surface", "--pwa", "data/lfp.csv", "--power-samples", "11",
                       "--soe-samples", "11", "--format", "gnuplot")
    assert code == 0
    assert len([line for line in out.splitlines() if line and not line.startswith("#")]) == 121


def test_missing_file_is_domain_error(capsys):
    code, _, err = run(capsys, "eval", "--pwa", "nope.csv", "--p", "0", "--e", "0", "--ce", "1")
    assert code == 1
    doc = json.loads(err)
    assert set(doc) == {"error", "message"}


def test_invalid_argument_is_domain_error(capsys):
    code, _, err = run(capsys, "dump-surface", "--pwa", "data/lfp.csv", "--power-samples", "0")
    assert code == 1 and json.loads(err)["error"] == "InvalidArgumentError"


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["eval", "--pwa", "data/lfp.csv"])
    assert info.value.code == 2


def test_console_script_and_data_dir(tmp_path):
    (tmp_path / "lfp.csv").write_text((data_dir() / "lco.csv").read_text())
    env = {"DEGMAP_DATA_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"}
    proc = subprocess.run([sys.executable, "-m", "degmap.cli", "validate", "--pwa", "data/lfp.csv"],
                          capture_output=True, text=True, cwd=tmp_path.parent, env=env)
    assert proc.returncode == 0
    assert "planes: 13" in proc.stdout
