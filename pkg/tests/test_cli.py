import json

import pytest

from fundom import store
from fundom.cli import main, parse_floats, parse_point, parse_points, parse_window


def test_parse_point_forms():
    assert parse_point("0.5+3i") == 0.5 + 3j
    assert parse_point("-2.5-1i") == -2.5 - 1j
    assert parse_point("2") == 2 + 0j
    assert parse_point("-i") == -1j
    assert parse_points(["1+1i,2-1i", "3i"]) == [1 + 1j, 2 - 1j, 3j]


def test_parse_window_and_floats():
    assert parse_window("-6,4,-5,5").as_tuple() == (-6, 4, -5, 5)
    assert parse_floats("pi/30, 1, inf")[0] == pytest.approx(0.10471975511965977)
    assert parse_floats("inf")[-1] == float("inf")


@pytest.mark.parametrize("bad", ["", "1,2,3", "1,0,0,1", "a,b,c,d"])
def test_parse_window_rejects(bad):
    with pytest.raises(Exception):
        parse_window(bad)


def test_crit_gamma(tmp_path, capsys):
    assert main(["crit", "--fn", "gamma", "--kind", "dzero", "--n", "5", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "1.4616321" in out
    fid, pts = store.load_crit(tmp_path / "crit_gamma_dzero.json")
    assert len(pts) >= 6 and all(p.simple for p in pts)


def test_crit_zeta_zero_count(tmp_path):
    assert main(["crit", "--fn", "zeta", "--kind", "zero", "--tmax", "100", "--nontrivial-only",
                 "--out-dir", str(tmp_path)]) == 0
    _, pts = store.load_crit(tmp_path / "crit_zeta_zero.json")
    assert len([p for p in pts if p.location.imag > 0]) == 29


def test_usage_error_exit_2(capsys):
    assert main(["trace", "--fn", "gamma", "--window", "1,2,3"]) == 2
    assert main(["nonsense"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[crit]\nkind = dzero\nwidth = 3\n")
    assert main(["crit", "--fn", "gamma", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert f"{cfg}:3: field width" in capsys.readouterr().err
    cfg.write_text("[nosuch]\nx = 1\n")
    assert main(["crit", "--fn", "gamma", "--config", str(cfg)]) == 2
    cfg.write_text("[crit]\nkind = sideways\n")
    assert main(["crit", "--fn", "gamma", "--config", str(cfg)]) == 2


def test_config_supplies_defaults_and_flags_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"out-dir = {tmp_path}\n[crit]\nkind = dzero\nn = 3\n")
    assert main(["crit", "--fn", "gamma", "--config", str(cfg)]) == 0
    assert len(store.load_crit(tmp_path / "crit_gamma_dzero.json")[1]) == 4
    assert main(["crit", "--fn", "gamma", "--config", str(cfg), "--n", "1"]) == 0
    assert len(store.load_crit(tmp_path / "crit_gamma_dzero.json")[1]) == 2


def test_verify_funcval(tmp_path, capsys):
    assert main(["verify", "--suite", "funcval", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") >= 2
    report = json.loads((tmp_path / "verify_funcval.json").read_text())
    assert all(r["passed"] for r in report["results"])


def test_trace_gamma_real_axis(tmp_path):
    assert main(["trace", "--fn", "gamma", "--window", "-6,4,-5,5", "--out-dir", str(tmp_path)]) == 0
    fid, comps, window = store.load_curves(tmp_path / "curves_gamma_real-axis.json")
    assert comps and window.as_tuple() == (-6, 4, -5, 5)
    doc = json.loads((tmp_path / "curves_gamma_real-axis.json").read_text())
    assert doc["meta"]["run"]["seed"] == 0


def test_trace_pole_loops(tmp_path):
    argv = ["trace", "--fn", "gamma", "--kind", "circle", "--rho", "1e6", "--window", "-3,1,-1,1",
            "--out-dir", str(tmp_path)]
    assert main(argv) == 0
    _, comps, _ = store.load_curves(tmp_path / "curves_gamma_circle.json")
    assert sum(c.closed for c in comps) == 3  # around 0, -1, -2


class _WithFailures(list):
    failures = ["collapse"]


def test_trace_step_collapse_exit_3(tmp_path, monkeypatch):
    from fundom import cli
    monkeypatch.setattr(cli, "_trace_components", lambda *a, **k: _WithFailures())
    argv = ["trace", "--fn", "gamma", "--window", "-3,1,-1,1", "--out-dir", str(tmp_path)]
    assert main(argv) == 3
    assert main(argv + ["--max-collapses", "1"]) == 0


def test_transform_words_agree(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    common = ["transform", "--fn", "gamma", "--points=-2.5+1i,0.5+0.5i"]
    assert main(common + ["--word", "U-1,U-1", "--out", str(a)]) == 0
    assert main(common + ["--word", "U-2", "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text())["results"], json.loads(b.read_text())["results"]
    for x, y in zip(ra, rb):
        assert abs(complex(*x["output"]) - complex(*y["output"])) < 1e-8
        assert x["fiber_deviation"] < 1e-8


def test_render_reproducible(tmp_path):
    argv = ["render", "--fn", "zeta", "--window", "-1,2,0,30", "--width", "64", "--height", "128", "--seed", "7"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    meta = json.loads((tmp_path / "a.png.json").read_text())
    assert meta["run"]["seed"] == 7 and meta["error_pixels"] == 0



def test_negative_leading_values_are_arguments(tmp_path):
    out = tmp_path / "t.json"
    assert main(["transform", "--fn", "gamma", "--word", "H", "--points", "-2.5+1i", "-0.5-0.5i", "--out", str(out)]) == 0
    res = json.loads(out.read_text())["results"]
    assert [complex(*r["input"]) for r in res] == [-2.5 + 1j, -0.5 - 0.5j]
    assert [complex(*r["output"]).imag * complex(*r["input"]).imag < 0 for r in res] == [True, True]
    assert max(r["fiber_deviation"] for r in res) < 1e-8
