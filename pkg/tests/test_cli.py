import json
import math

import pytest

from permfield.cli import run
from permfield.cycles import CycleStructure, read_cycles_csv, write_cycles_csv
from permfield.errors import InvalidArgumentError
from permfield.reports import ExperimentReport
from permfield.svgplot import emit_plot


def test_constants_output(capsys):
    assert run(["constants"]) == 0
    out = capsys.readouterr().out
    lines = dict(ln.split(" = ") for ln in out.strip().splitlines())
    assert abs(float(lines["x_crit"]) - 0.6524) <= 5e-4
    assert abs(float(lines["beta_crit"]) - 11.746) <= 5e-3


def test_scan_rejects_zero_n(capsys):
    assert run(["scan", "--n", "0", "--seed", "1"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_flag_and_command():
    assert run(["scan", "--n", "4", "--bogus", "1"]) == 2
    assert run(["no-such-command"]) == 2


def test_sample_deterministic(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run(["sample", "--n", "1000", "--seed", "9", "--out", str(out1)]) == 0
    assert run(["sample", "--n", "1000", "--seed", "9", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    cs = read_cycles_csv(out1.read_text())
    assert cs.n == 1000


def test_eval_singular_point(tmp_path, capsys):
    cycles = tmp_path / "fig.csv"
    cycles.write_text(write_cycles_csv(CycleStructure(100, {56: 1, 22: 1, 9: 2, 4: 1})))
    assert run(["eval", "--cycles", str(cycles), "--t", "1/3"]) == 0
    assert capsys.readouterr().out.strip() == "-inf"
    assert run(["eval", "--cycles", str(cycles), "--t", "1/5"]) == 0
    v = float(capsys.readouterr().out)
    assert math.isfinite(v)
    assert run(["eval", "--cycles", str(cycles), "--t", "1/3", "--imag"]) == 0
    assert math.isfinite(float(capsys.readouterr().out))


def test_scan_outputs_and_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    svg = tmp_path / "trace.svg"
    code = run(["scan", "--n", "2000", "--seed", "3", "--trace", str(trace),
                "--svg", str(svg)])
    assert code == 0
    out = capsys.readouterr().out
    assert "argmax_j" in out and "max = " in out
    lines = trace.read_text().splitlines()
    assert lines[1] == "j,t_float,value"
    assert len(lines) == 2 + 4000
    header = json.loads(lines[0][2:])
    assert header == {"q": 4000, "theta_num": 1, "theta_den": 7}
    assert svg.read_text().startswith("<svg")


def test_ratefn_table(tmp_path, capsys):
    out = tmp_path / "table.csv"
    svg = tmp_path / "table.svg"
    assert run(["ratefn-table", "--x-min", "0.1", "--x-max", "0.65",
                "--steps", "20", "--out", str(out), "--svg", str(svg)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "x,lambda_star,beta_star"
    values = [tuple(map(float, r.split(","))) for r in rows[1:]]
    assert len(values) == 21
    # transform increasing and convex on the tabulated grid
    lam = [v[1] for v in values]
    assert all(b > a for a, b in zip(lam, lam[1:]))
    assert run(["ratefn-table", "--x-min", "0.5", "--x-max", "0.3"]) == 2


def test_arcs_classify(tmp_path, capsys):
    infile = tmp_path / "points.csv"
    infile.write_text("label,t\na,1/3\nb,golden\nc,0.5001\n")
    assert run(["arcs", "classify", "--xi0", "3", "--kappa", "0.01",
                "--in", str(infile)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "label,t,kind,witness"
    assert out[1].endswith("major,3")
    assert out[2].endswith("minor,")
    assert out[3].endswith("major,2")


def test_fourier_dump(capsys):
    assert run(["fourier", "dump", "--beta", "2", "--xi-max", "4"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "xi,re,im,abs"
    table = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows[1:]}
    assert table[0] == pytest.approx(2.0, abs=1e-9)
    assert table[1] == pytest.approx(-1.0, abs=1e-9)
    assert abs(table[3]) < 1e-9


def test_experiment_subcommand(tmp_path, capsys):
    code = run(["experiment", "occupancy", "--seed", "5", "--out-dir",
                str(tmp_path), "--svg", "--config", "-"]) if False else run(
        ["experiment", "occupancy", "--seed", "5", "--out-dir", str(tmp_path),
         "--svg"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert (tmp_path / "occupancy-5.json").exists()
    assert (tmp_path / "occupancy-5.csv").exists()
    assert (tmp_path / "occupancy-5.svg").exists()
    assert run(["experiment", "bogus"]) == 2


def test_experiment_config_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"replicas": 300, "rho": 0.1}))
    code = run(["experiment", "occupancy", "--seed", "6", "--config", str(cfg),
                "--out-dir", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "occupancy-6.json").read_text())
    assert data["config"]["replicas"] == 300
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus_key": 1}))
    assert run(["experiment", "occupancy", "--config", str(bad)]) == 2


def test_emit_plot_edge_cases():
    report = ExperimentReport(name="t", seed=0, config={})
    with pytest.raises(InvalidArgumentError):
        emit_plot(report, "line")
    report.series = [{"name": "single", "x": [1.0], "y": [2.0]}]
    svg = emit_plot(report, "line")
    assert svg.startswith("<svg") and "circle" in svg
    with pytest.raises(InvalidArgumentError):
        emit_plot(report, "scatter")
    report.series = [{"name": "h", "x": [0.0, 1.0, 2.0], "y": [1, 5, 2]}]
    hist = emit_plot(report, "histogram")
    assert hist.count("<rect") >= 3
    assert emit_plot(report, "histogram") == hist  # deterministic bytes


def test_emit_plot_log_axis_for_wide_ranges():
    report = ExperimentReport(name="t", seed=0, config={})
    report.series = [{"name": "s", "x": [1e3, 1e4, 1e5, 1e6],
                      "y": [0.62, 0.64, 0.64, 0.65]}]
    svg = emit_plot(report, "line")
    assert "1e+06" in svg or "1000000" in svg


def test_scan_imag_kind(capsys):
    assert run(["scan", "--n", "500", "--seed", "2", "--imag"]) == 0
    out = capsys.readouterr().out
    v = float(out.splitlines()[2].split(" = ")[1])
    assert math.isfinite(v) and v > 0
