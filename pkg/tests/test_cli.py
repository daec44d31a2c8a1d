import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from pitcheck import PitSample, cct, influence_report, potc_pointwise
from pitcheck.cli import main

GOLDEN = Path(__file__).parent / "data" / "test_three_halves.json"
SVG_NS = "{http://www.w3.org/2000/svg}"


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("PITCHECK_OUT", raising=False)
    return tmp_path


def test_three_halves_self_composition(workdir):
    Path("a.txt").write_text("0.5\n0.5\n0.5\n")
    code, out, _ = run(["test", "a.txt", "--method", "potc", "--combiner", "cct"])
    assert code == 0
    rep = json.loads(out)["reports"][0]
    s = PitSample.continuous([0.5, 0.5, 0.5])
    assert rep["global_p"] == cct(potc_pointwise(s).p_values)[1]
    code, out, _ = run(["test", "a.txt", "--method", "potc", "--combiner", "tcct"])
    assert out == GOLDEN.read_text()


def test_empty_file(workdir):
    Path("e.txt").write_text("")
    code, _, err = run(["test", "e.txt"])
    assert code == 1 and "EmptySample" in err


def test_out_of_range_value(workdir):
    Path("b.txt").write_text("1.2\n")
    code, _, err = run(["test", "b.txt"])
    assert code == 1 and "line 1" in err


def test_bad_flag_is_error(workdir):
    Path("a.txt").write_text("0.5\n")
    assert run(["test", "a.txt", "--alpha", "1.5"])[0] == 1
    assert run(["test", "missing.txt"])[0] == 1


def test_reject_exit_code_and_csv(workdir):
    Path("low.txt").write_text("\n".join(str(0.001 * (i + 1)) for i in range(30)))
    code, out, _ = run(["test", "low.txt", "--method", "potc", "--method", "ks",
                        "--format", "csv", "--out", "res"])
    assert code == 2
    lines = out.splitlines()
    assert lines[0].startswith("method,combiner") and len(lines) == 3
    assert (workdir / "res" / "test_report.csv").read_text() == out


def test_env_sets_output_dir(workdir, monkeypatch):
    Path("a.txt").write_text("0.3\n0.6\n")
    monkeypatch.setenv("PITCHECK_OUT", str(workdir / "envout"))
    run(["test", "a.txt"])
    assert (workdir / "envout" / "test_report.json").exists()


def test_rank_kind_warning_surfaces(workdir):
    Path("r.json").write_text('{"values": [0.25, 0.5, 0.75], "kind": "rank", "draws": 4}')
    code, out, _ = run(["test", "r.json", "--method", "potc"])
    assert json.loads(out)["reports"][0]["warnings"]


def _svg_highlights(path):
    root = ET.parse(path).getroot()
    return [c for c in root.iter(f"{SVG_NS}circle") if c.get("class") == "highlight"]


@pytest.mark.parametrize("method", ["potc", "pietc", "pritc"])
def test_plot_marker_count_matches_ir(workdir, method):
    rng = np.random.default_rng(3)
    u = np.concatenate([rng.random(40), 0.002 * rng.random(8) + 0.001])
    Path("u.txt").write_text("\n".join(repr(float(x)) for x in u))
    code, _, err = run(["plot", "u.txt", "--method", method, "--out", "plot"])
    assert code in (0, 2), err
    report = json.loads((workdir / "plot" / "plot_report.json").read_text())
    assert len(_svg_highlights(workdir / "plot" / "plot.svg")) == len(report["influential"])
    assert len(report["influential"]) > 0
    data = json.loads((workdir / "plot" / "plot_data.json").read_text())
    assert len(data) == u.size
    assert all(set(p) == {"x", "ecdf", "tilted", "highlighted"} for p in data)


def test_plot_data_round_trip_and_library_agreement(workdir):
    u = [0.91, 0.12, 0.55, 0.05, 0.33]
    Path("u.txt").write_text("\n".join(map(str, u)))
    run(["plot", "u.txt", "--combiner", "cct", "--gamma", "0", "--out", "p"])
    data = json.loads((workdir / "p" / "plot_data.json").read_text())
    s = PitSample.continuous(u)
    rep = influence_report(s, potc_pointwise(s), "cct", 0.0)
    assert data == [p._asdict() for p in rep.ecdf_points]


def test_plot_uniform_grid_no_highlights(workdir):
    n = 25
    Path("g.txt").write_text("\n".join(repr((i + 1) / (n + 1)) for i in range(n)))
    code, _, _ = run(["plot", "g.txt", "--combiner", "cct", "--out", "g"])
    assert code == 0
    rep = json.loads((workdir / "g" / "plot_report.json").read_text())
    phi = np.array(rep["phi"])
    gmax = float(phi.max())
    run(["plot", "g.txt", "--combiner", "cct", "--gamma", repr(gmax), "--out", "g"])
    assert _svg_highlights(workdir / "g" / "plot.svg") == []
    code, _, err = run(["plot", "g.txt", "--combiner", "cct", "--gamma", repr(2 * gmax + 1),
                        "--out", "g"])
    assert code == 1 and "GammaOutOfRange" in err


def _write_cfg(path, S):
    path.write_text(f"model = conjugate\nG = 6\nm = 3\nreplicates = {S}\nseed = 5\n"
                    "methods = potc, pietc, ks\nalphas = 0.01, 0.05\n")


def test_simulate_smoke(workdir):
    _write_cfg(workdir / "s.cfg", 1)
    code, out, _ = run(["simulate", "s.cfg", "--out", "sim"])
    assert code == 0 and "potc" in out
    doc = json.loads((workdir / "sim" / "sim_outcome.json").read_text())
    assert all(len(v) == 1 for v in doc["p_values"].values())
    assert doc["version"] and doc["config"]["replicates"] == 1
    csv = (workdir / "sim" / "rejection_rates.csv").read_text().splitlines()
    assert len(csv) == 1 + 3 * 2


def test_simulate_byte_identical(workdir):
    _write_cfg(workdir / "s.cfg", 12)
    run(["simulate", "s.cfg", "--out", "r1"])
    run(["simulate", "s.cfg", "--out", "r2", "--jobs", "2"])
    for f in ("sim_outcome.json", "rejection_rates.csv"):
        assert (workdir / "r1" / f).read_bytes() == (workdir / "r2" / f).read_bytes()


def test_simulate_config_error_before_compute(workdir):
    (workdir / "bad.cfg").write_text("G = 5\nm = 2\nunknown = 3\n")
    code, _, err = run(["simulate", "bad.cfg"])
    assert code == 1 and "ConfigError" in err and "line 3" in err
