import json

import numpy as np

from kdecontact.cli import main
from kdecontact.core import FootId
from kdecontact.synthgait import GaitScenario, Phase, generate
from kdecontact.traceio import read_estimates, read_trace, write_trace


def run(*argv):
    return main([str(a) for a in argv])


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a" / "slip.csv", tmp_path / "b" / "slip.csv"
    a.parent.mkdir()
    b.parent.mkdir()
    assert run("generate", "--scenario", "slip_walk", "--seed", 7, "--out", a) == 0
    assert run("generate", "--scenario", "slip_walk", "--seed", 7, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (a.parent / "slip.meta.json").read_bytes() == (b.parent / "slip.meta.json").read_bytes()
    meta = json.loads((a.parent / "slip.meta.json").read_text())
    assert meta["seed"] == 7 and meta["scenario"]["name"] == "slip_walk"


def test_unknown_scenario(tmp_path, capsys):
    assert run("generate", "--scenario", "nope", "--out", tmp_path / "x.csv") == 1
    err = capsys.readouterr().err
    assert "stable_walk" in err and "slip_walk" in err


def test_usage_errors(capsys):
    assert run() == 1
    assert run("bench", "--n", 10) == 1
    assert run("fly") == 1


def test_scenario_file(tmp_path):
    spec = tmp_path / "still.yaml"
    spec.write_text("phases:\n  - {kind: stance, duration: 0.5}\nnoise: null\n")
    out = tmp_path / "still.csv"
    assert run("generate", "--scenario", spec, "--out", out) == 0
    tr = read_trace(out)[FootId.R]
    assert len(tr) == 500 and np.all(tr.imu == 0)


def write_stance(path, n):
    tr = generate(GaitScenario((Phase("stance", n / 1000.0),)))
    write_trace(path, tr)
    return tr


def test_estimate_cadence_and_sigma(tmp_path):
    trace = tmp_path / "t.csv"
    write_stance(trace, 1000)
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("window_size: 50\nsigma: [0.02467, 0.02467, 0.02467, 0.01653, 0.01653, 0.01653]\n")
    out = tmp_path / "e.csv"
    assert run("estimate", "--in", trace, "--config", cfg, "--out", out) == 0
    assert len(out.read_text().splitlines()) == 1 + 999


def test_estimate_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,foot,ax,ay,az,wx,wy\n0,R,0,0,0,0,0\n")
    assert run("estimate", "--in", bad, "--out", tmp_path / "e.csv") == 2
    assert "'wz'" in capsys.readouterr().err
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("window_size: 0\n")
    trace = tmp_path / "t.csv"
    write_stance(trace, 200)
    assert run("estimate", "--in", trace, "--config", cfg, "--out", tmp_path / "e.csv") == 2
    assert "window_size" in capsys.readouterr().err


def test_eval_round_trip(tmp_path):
    trace, est, rep = tmp_path / "slip.csv", tmp_path / "est.csv", tmp_path / "report.json"
    assert run("generate", "--scenario", "slip_walk", "--out", trace) == 0
    assert run("estimate", "--in", trace, "--out", est) == 0
    assert run("eval", "--trace", trace, "--estimates", est, "--report", rep) == 0
    report = json.loads(rep.read_text())
    assert report["method"]["rmse"] < report["baseline"]["rmse"]
    assert "label_convention" in report["meta"]
    hist = (tmp_path / "report.hist.csv").read_text().splitlines()
    assert hist[0] == "bin_lo,bin_hi,kde,schmitt" and len(hist) == 11


def test_eval_without_forces(tmp_path):
    tr = generate(GaitScenario((Phase("stance", 0.3),)))
    tr.forces = tr.true_vel = tr.true_angvel = None
    trace, est, rep = tmp_path / "l.csv", tmp_path / "e.csv", tmp_path / "r.json"
    write_trace(trace, tr)
    assert run("estimate", "--in", trace, "--out", est) == 0
    assert run("eval", "--trace", trace, "--estimates", est, "--report", rep) == 0
    report = json.loads(rep.read_text())
    assert report["baseline"]["available"] is False
    assert report["method"]["n"] == 300 - 49


def test_eval_alignment_error(tmp_path, capsys):
    trace, est = tmp_path / "t.csv", tmp_path / "e.csv"
    write_stance(trace, 300)
    assert run("estimate", "--in", trace, "--out", est) == 0
    lines = est.read_text().splitlines()
    est.write_text("\n".join(lines[:-5]) + "\n")
    assert run("eval", "--trace", trace, "--estimates", est, "--report", tmp_path / "r.json") == 2
    assert "alignment" in capsys.readouterr().err


def test_env_override_reaches_estimate(tmp_path, monkeypatch):
    trace, est = tmp_path / "t.csv", tmp_path / "e.csv"
    write_stance(trace, 300)
    monkeypatch.setenv("KDECONTACT_WINDOW_SIZE", "10")
    assert run("estimate", "--in", trace, "--out", est) == 0
    ests = read_estimates(est)[FootId.R]
    assert sum(not e.warm for e in ests) == 8


def test_bench_prints_one_line(capsys):
    assert run("bench", "--n", 100_000) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1 and out[0].startswith("throughput_hz=") and "machine=" in out[0]
