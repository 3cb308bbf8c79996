import csv
import json
import math
import subprocess
import sys

import pytest

from groupnets import __version__
from groupnets.cli import ExperimentConfig, UsageError, main, parse_args, run


def read_csv(path):
    return list(csv.DictReader(path.open()))


def test_parse_args_examples(tmp_path):
    cfg = parse_args(["density", "--group", "Z4", "--family", "translations", "--activation", "delta0"])
    assert (cfg.groups, cfg.families, cfg.activations) == (["Z4"], ["translations"], ["delta0"])
    with pytest.raises(SystemExit) as exc:
        parse_args(["density", "--seed", "7", "--seed", "7"])
    assert exc.value.code == 2
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "approx", "p": 1, "seed": 5}))
    cfg = parse_args(["approx", "--config", str(path), "--p", "3"])
    assert cfg.p == 3 and cfg.seed == 5


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main(["density", "--seed", "1", "--seed", "2"]) == 2
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "density", "colour": "blue"}))
    assert main(["density", "--config", str(path)]) == 2
    assert "colour" in capsys.readouterr().err
    assert main(["approx", "--p", "0.5", "--out", str(tmp_path)]) == 2
    assert main(["fourier-check", "--group", "Z2x", "--out", str(tmp_path)]) == 2
    assert main(["bogus"]) == 2


def test_config_canonical_round_trip():
    cfg = ExperimentConfig("approx", groups=["Z8"], p=math.inf, seed=4, out="/tmp/x")
    data = json.loads(cfg.canonical_json())
    assert "out" not in data and data["p"] == "inf"
    back = ExperimentConfig.from_dict(data)
    assert back.canonical_json() == cfg.canonical_json()
    assert back.config_hash == cfg.config_hash
    with pytest.raises(UsageError):
        ExperimentConfig.from_dict({"command": "approx", "budget": 3})


def test_density_sweep_row_count(tmp_path):
    argv = ["density", "--out", str(tmp_path), "--activation", "logistic", "--activation", "delta0",
            "--family", "aut", "--family", "affine-end"]
    argv += sum((["--group", f"Z{n}"] for n in range(2, 9)), [])
    assert main(argv) == 0
    rows = read_csv(tmp_path / "density.csv")
    assert len(rows) == 7 * 2 * 2
    assert all(r["tool_version"] == __version__ and len(r["config_hash"]) == 64 for r in rows)
    cells = json.loads((tmp_path / "density.json").read_text())["cells"]
    assert [c["rank"] for c in cells] == [int(r["rank"]) for r in rows]


def test_one_cell_sweep(tmp_path):
    assert main(["density", "--group", "Z4", "--family", "translations", "--activation", "delta0", "--out", str(tmp_path)]) == 0
    (row,) = read_csv(tmp_path / "density.csv")
    assert (row["rank"], row["dense"]) == ("4", "True")


def test_approx_full_rank(tmp_path):
    argv = ["approx", "--group", "Z8", "--family", "translations", "--activation", "logistic", "--p", "2", "--out", str(tmp_path)]
    assert main(argv) == 0
    rep = json.loads((tmp_path / "approx.json").read_text())
    assert rep["rank"] == 8
    assert rep["residual_l2"] < 1e-8 and rep["residual_sup"] < 1e-8


def test_fourier_check_default_battery(tmp_path):
    assert main(["fourier-check", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "fourier_check.json").read_text())
    assert rep["pass"] and len(rep["groups"]) >= 10


def test_enumerate_and_budget_report(tmp_path):
    assert main(["enumerate", "--group", "Z2xZ2", "--group", "Z2xZ2xZ2xZ2xZ2", "--family", "aut", "--out", str(tmp_path)]) == 0
    fams = json.loads((tmp_path / "enumerate.json").read_text())["families"]
    assert fams[0]["count"] == 6
    assert "sample_map" in fams[1]["error"]


def test_counterexample_command(tmp_path):
    assert main(["counterexample", "--family", "aut", "--max-order", "2", "--trials", "2", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "counterexamples.json").read_text())["witnesses"]
    assert rows and all(r["max_pairing"] < 1e-10 for r in rows)


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--group", "Z6", "--group", "Z2xZ4", "--activation", "random", "--family", "end", "--seed", "9"],
        ["approx", "--group", "Z12", "--family", "affine-end", "--activation", "random", "--terms", "20", "--seed", "3"],
        ["fourier-check", "--group", "Z6", "--group", "T2@3", "--trials", "3", "--seed", "1"],
        ["counterexample", "--max-order", "4", "--trials", "2", "--seed", "2"],
        ["enumerate", "--group", "Z4", "--family", "affine-aut"],
    ],
)
def test_outputs_byte_identical_across_runs(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == main(argv + ["--out", str(b)])
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and names
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_out_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("GROUPNETS_OUT", str(tmp_path))
    cfg = parse_args(["enumerate", "--group", "Z2"])
    assert run(cfg) == 0
    assert (tmp_path / "enumerate.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "groupnets", "enumerate", "--group", "Z3", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "enumerate.json").read_text())["families"][0]["count"] == 2
