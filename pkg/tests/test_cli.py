from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from diskgeo.cli import main, parse_tgrid, split_maps

W = ["--weight", "exp:a=1,b=1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_analyze_compact(capsys):
    code, rep = run(capsys, "analyze", *W, "--map", "scale:0.5")
    assert code == 0 and rep["result"]["verdict"] == "Compact"
    assert rep["schema"] == "diskgeo/1"
    assert rep["config"]["weight"] == "exp:a=1,b=1"
    assert rep["config"]["maps"]["map"] == "scale:0.5"
    assert set(rep["tolerances"]) == {"tol_rel", "eps_zero", "cap", "eps_f"}
    assert rep["version"]


def test_analyze_unbounded(capsys):
    code, rep = run(capsys, "analyze", *W, "--map", "affine:0.5,0.5")
    assert code == 2 and rep["result"]["verdict"] == "Unbounded"


def test_dist_logproxy(capsys):
    code, rep = run(capsys, "dist", "--weight", "logproxy:alpha=0", "--metric", "tau", "--from", "0,0", "--to", "0.9,0")
    assert code == 0
    assert rep["result"]["value"] == pytest.approx(2.3026, rel=0.02)
    assert {"value", "level", "converged", "path"} <= set(rep["result"])


def test_byte_identical(capsys):
    argv = ["carleson", *W, "--map", "id", "--samples", "2e4", "--seed", "7"]
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    b = capsys.readouterr().out
    assert a == b


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["analyze", "--map", "id"]) == 1
    assert main(["analyze", *W, "--map", "wobble:3"]) == 1
    assert main(["analyze", *W, "--map", "affine:1,0.5"]) == 1
    assert main(["dist", *W, "--from", "0.1"]) == 1
    assert main(["nonsense"]) == 1
    assert "error" in capsys.readouterr().err


def test_config_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("seed = 5\nangles = 16\neps-zero = 1e-5\n")
    code, rep = run(capsys, "analyze", *W, "--map", "scale:0.5", "--config", str(cfg))
    assert rep["config"]["seed"] == 5 and rep["config"]["n_angles"] == 16 and rep["config"]["eps_zero"] == 1e-5
    code, rep = run(capsys, "analyze", *W, "--map", "scale:0.5", "--config", str(cfg), "--seed", "9")
    assert rep["config"]["seed"] == 9
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 'red'\n")
    assert main(["analyze", *W, "--config", str(bad)]) == 1


def test_diff_outputs(tmp_path, capsys):
    csv_p, svg_p = tmp_path / "g.csv", tmp_path / "g.svg"
    code, rep = run(capsys, "diff", *W, "--phi", "id", "--psi", "mono:2", "--csv", str(csv_p), "--heatmap", str(svg_p))
    assert code == 2 and rep["result"]["verdict"]["reason"] == "GammaNonVanishing"
    assert csv_p.read_text().splitlines()[0] == "angle,radius,gamma,trend"
    svg = svg_p.read_text()
    assert svg.startswith("<svg") and "data-vmin" in svg and "linear scale" in svg


def test_carleson_outputs(tmp_path, capsys):
    csv_p = tmp_path / "b.csv"
    code, rep = run(capsys, "carleson", *W, "--map", "scale:0.5", "--samples", "1e5", "--csv", str(csv_p))
    assert code == 0 and rep["result"]["summary"]["trend"] == "ToZero"
    assert csv_p.read_text().splitlines()[0] == "center_r,center_theta,estimate,stderr"


def test_weight_validate(capsys):
    assert run(capsys, "weight-validate", *W)[0] == 0
    code, rep = run(capsys, "weight-validate", "--weight", "logproxy:alpha=0")
    assert code == 2 and rep["result"]["validation"]["not_class_w"]


def test_verify_and_path(capsys):
    code, rep = run(capsys, "verify", *W, "--suite", "submean", "--points", "20")
    assert code == 0 and {r["name"] for r in rep["result"]} == {"submean"}
    code, rep = run(capsys, "path", *W, "--phi", "id", "--psi", "scale:0.5", "--tgrid", "0:1:0.5")
    assert code in (0, 2, 3) and rep["result"]["report"]["t_grid"] == [0.0, 0.5, 1.0]


def test_sumdiff_hypothesis_reported(capsys):
    code, rep = run(capsys, "sumdiff", *W, "--phi", "id", "--parts", "perturb:c=0.05,k=3")
    assert code == 1 and rep["error"]["type"] == "HypothesisViolated"
    code, rep = run(capsys, "sumdiff", *W, "--phi", "id", "--parts", "mono:2")
    assert code == 2


def test_split_maps():
    assert split_maps("affine:0.5,0.5,id") == ["affine:0.5,0.5", "id"]
    assert split_maps("perturb:c=0.05,k=3,mono:2") == ["perturb:c=0.05,k=3", "mono:2"]
    assert split_maps("convex:t=0.3(id)(mono:2),scale:0.5") == ["convex:t=0.3(id)(mono:2)", "scale:0.5"]
    assert split_maps("id;mono:2") == ["id", "mono:2"]


def test_parse_tgrid():
    assert parse_tgrid("0:1:0.25").tolist() == [0, 0.25, 0.5, 0.75, 1.0]


@pytest.mark.skipif(shutil.which("diskgeo") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["diskgeo", "analyze", *W, "--map", "scale:0.5"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["result"]["verdict"] == "Compact"
