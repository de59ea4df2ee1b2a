import json
import subprocess
import sys

import pytest

from qnrobust.harness import load_graph, read_records
from qnrobust.harness.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def sf_graph(tmp_path, capsys):
    path = tmp_path / "sf.graph"
    code, out, _ = run(capsys, "generate", "--model", "scale_free", "--n-nodes", "150", "--R", "40", "--seed", "3", "-o", str(path))
    assert code == 0 and out["n_nodes"] == 150
    return path


def test_generate_waxman_at_density(tmp_path, capsys):
    path = tmp_path / "wx.graph"
    code, out, _ = run(capsys, "generate", "--model", "waxman", "--rho", "4e-4", "--alpha", "0.1", "--seed", "1", "-o", str(path))
    assert code == 0 and out["n_nodes"] == 1021
    assert load_graph(path).region_half_width == pytest.approx(799.0306627407986)


def test_perturb_analyze_capacity(sf_graph, tmp_path, capsys):
    broken = tmp_path / "att.graph"
    code, out, _ = run(capsys, "perturb", str(sf_graph), "--kind", "attack_by_degree", "--p", "0.1", "-o", str(broken))
    assert code == 0 and out["n_nodes"] == 135 and out["p_eff"] > 0.1

    code, out, _ = run(capsys, "analyze", str(sf_graph), "--k-min", "2")
    assert code == 0
    assert sum(out["degree_histogram"].values()) == 150
    assert out["giant_fraction"] == 1.0 and 0 < out["critical_probability"] < 1
    assert out["power_law_exponent"] > 0

    code, out, _ = run(capsys, "capacity", str(sf_graph), "--pairs", "20", "--seed", "4")
    assert code == 0 and out["n_pairs"] == 20 and out["mean"] > 0

    code, out, _ = run(capsys, "capacity", str(sf_graph), "--source", "0", "--target", "5")
    assert code == 0 and out["capacity"] > 0


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--model", "scale_free", "--n-nodes", "100", "--R", "1e-5", "--samples", "10000")
    assert code == 0
    assert out["bound"] == pytest.approx(6 * out["zeta"])
    code, out, _ = run(capsys, "bounds", "--model", "waxman", "--rho", "4e-4", "--p", "0.5", "--samples", "10000")
    assert code == 0 and out["bound"] == pytest.approx(0.5 * out["zeta"] * 4e-4, rel=1e-3)


def test_sweep_writes_records(tmp_path, capsys):
    cfg = {
        "model": {"type": "scale_free", "n_nodes": 60, "R": 40.0, "m0": 2},
        "perturbations": [{"kind": "edge_breakdown"}],
        "p_grid": [0.0, 0.5],
        "n_graphs": 2,
        "n_pairs": 10,
        "zeta_samples": 10000,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out_path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", str(cfg_path), "-o", str(out_path), "--workers", "1")
    assert code == 0 and out["records"] == 4 and out["failed"] == 0
    assert len(read_records(out_path)) == 4

    code, out, _ = run(capsys, "sweep", str(cfg_path), "-o", str(tmp_path / "out.json"), "--format", "json", "--workers", "1")
    assert code == 0 and len(json.loads((tmp_path / "out.json").read_text())) == 4


def test_exit_code_usage(capsys):
    with pytest.raises(SystemExit) as info:
        main(["generate", "--model", "lattice", "-o", "x"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_exit_code_data(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("not a graph\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "line 1" in err
    code, _, err = run(capsys, "analyze", str(tmp_path / "missing.graph"))
    assert code == 2 and "missing.graph" in err
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"model": {"type": "waxman"}, "bogus": 1}))
    code, _, _ = run(capsys, "sweep", str(cfg_path), "-o", str(tmp_path / "o.csv"))
    assert code == 2


def test_exit_code_numerical(tmp_path, capsys):
    # a perfect matching: <k^2>/<k> = 1, so the critical probability is undefined
    path = tmp_path / "m.graph"
    path.write_text(
        "qnrobust-graph 1\nregion_half_width 10\ngamma 0.02\nmin_distance 0.001\nprovenance {}\n"
        "nodes 4\n0 0 0 0\n1 1 0 1\n2 0 1 2\n3 1 1 3\nedges 2\n0 1\n2 3\n"
    )
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 3 and "numerical" in err


def test_module_entry_point(sf_graph):
    proc = subprocess.run([sys.executable, "-m", "qnrobust", "analyze", str(sf_graph)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n_nodes"] == 150
    proc = subprocess.run([sys.executable, "-m", "qnrobust", "nope"], capture_output=True, text=True)
    assert proc.returncode == 1
