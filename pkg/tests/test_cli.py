import json
import math
import os
import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from mixgauge.cli import main, parse_lambda
from mixgauge.covering import WhitneyDecomposition
from mixgauge.dyadic import CoverResult

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, obj in {
        "square": {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
        "interval": {"type": "interval", "a": 0.0, "b": 1.0},
        "disk": {"type": "disk", "center": [0, 0], "radius": 1.0},
        "comb8": {"type": "comb", "teeth": 8},
    }.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
    return paths


def run(*args):
    return main([str(a) for a in args])


def test_measure_square(files, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run("measure", "--shape", files["square"], "--lambda", 1, "--depth", 12, "--out", out, "--root", "0,0,1") == 0
    obj = json.loads(out.read_text())
    assert math.isclose(obj["total"], 2 + math.sqrt(2), rel_tol=1e-15)
    assert obj["metadata"]["seed"] == 0
    assert CoverResult.from_json(obj).total == obj["total"]
    assert "total=" in capsys.readouterr().out


def test_measure_default_root_near_value(files, tmp_path):
    out = tmp_path / "r.json"
    assert run("measure", "--shape", files["square"], "--lambda", 1, "--depth", 12, "--out", out) == 0
    assert abs(json.loads(out.read_text())["total"] - (2 + math.sqrt(2))) < 0.1


def test_measure_grid_to_stdout(files, capsys):
    assert run("measure", "--shape", files["square"], "--lambda", "0.1:10:3log", "--depth", 4) == 0
    obj = json.loads(capsys.readouterr().out)
    assert [r["lambda"] for r in obj["results"]] == pytest.approx([0.1, 1.0, 10.0])


def test_scale_check_interval(files, capsys):
    assert run("scale-check", "--shape", files["interval"], "--lambda", 1, "--t", 2) == 0
    assert capsys.readouterr().out.strip() == "residual=0.0"


def test_scale_check_rejects_non_power(files, capsys):
    assert run("scale-check", "--shape", files["interval"], "--t", 3) == 2


def test_render_cover(files, tmp_path):
    cov, svg = tmp_path / "c.json", tmp_path / "c.svg"
    assert run("measure", "--shape", files["comb8"], "--lambda", 0.01, "--depth", 12, "--out", cov) == 0
    assert run("render", "--cover", cov, "--out", svg) == 0
    root = ET.parse(svg).getroot()
    assert root.tag == f"{SVG}svg" and root.get("version") == "1.1" and root.get("width") == "1024"
    rects = root.findall(f"{SVG}rect")
    cells = json.loads(cov.read_text())["cells"]
    assert len(rects) == len(cells)
    assert all(r.get("fill") == "none" for r in rects)
    kinds = {r.get("class") for r in rects}
    assert kinds == {"cell boundary", "cell interior"}
    assert len(root.findall(f"{SVG}polygon")) == 1


def test_render_single_cell(files, tmp_path):
    cov, svg = tmp_path / "c.json", tmp_path / "c.svg"
    assert run("measure", "--shape", files["square"], "--depth", 3, "--root", "0,0,1", "--out", cov) == 0
    assert run("render", "--cover", cov, "--out", svg) == 0
    root = ET.parse(svg).getroot()
    assert len(root.findall(f"{SVG}rect")) == 1 and len(root.findall(f"{SVG}polygon")) == 1


def test_render_comb_cells_concentrate_on_teeth(files, tmp_path):
    cov, svg = tmp_path / "c.json", tmp_path / "c.svg"
    assert run("measure", "--shape", files["comb8"], "--lambda", 0.01, "--depth", 12, "--out", cov) == 0
    assert run("render", "--cover", cov, "--out", svg) == 0
    res = CoverResult.from_json(json.loads(cov.read_text()))
    bnd = [r for r in ET.parse(svg).getroot().findall(f"{SVG}rect") if r.get("class") == "cell boundary"]
    # map the tooth band y in [1/8, 5/8] to pixels and count boundary rects there
    (ox, oy), side = res.root.origin, res.root.side
    top = 1024 - (5 / 8 - oy) / side * 1024
    bottom = 1024 - (1 / 8 - oy) / side * 1024
    in_band = [r for r in bnd if top - 1 <= float(r.get("y")) <= bottom + 1]
    assert len(in_band) > 0.5 * len(bnd)


def test_whitney_and_render(files, tmp_path):
    w, svg = tmp_path / "w.json", tmp_path / "w.svg"
    assert run("whitney", "--shape", files["disk"], "--depth", 8, "--out", w) == 0
    dec = WhitneyDecomposition.from_json(json.loads(w.read_text()))
    assert 1 <= dec.dist_ratio_min and dec.dist_ratio_max <= 4
    assert run("render", "--cover", w, "--out", svg) == 0
    root = ET.parse(svg).getroot()
    assert len(root.findall(f"{SVG}rect")) == len(dec.cubes)
    assert len(root.findall(f"{SVG}circle")) == 1


def test_sweep_csv(files, tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run("sweep", "--shape", files["square"], "--shape", "suite:comb4", "--lambda", "0.1,1", "--depth", 6, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "shape_id,lambda,depth,converged,mu_hat,volume_cost,surface_cost,area,perimeter,ratio"
    assert len(lines) == 5 and lines[1].startswith("square,0.1,6,")


def test_minkowski(files, capsys):
    assert run("minkowski", "--shape", files["disk"], "--epsilon", 0.01) == 0
    val = float(re.search(r"perimeter=(\S+)", capsys.readouterr().out).group(1))
    assert abs(val - 2 * math.pi) < 0.01 * 2 * math.pi
    assert run("minkowski", "--shape", "suite:koch4", "--epsilon", 0.05) == 2


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type":\n  "polygon",,}')
    assert run("measure", "--shape", bad) == 2
    assert re.search(r"bad\.json:2:13", capsys.readouterr().err)


def test_bad_inputs_exit_2(files, tmp_path):
    bad = tmp_path / "self.json"
    bad.write_text(json.dumps({"type": "polygon", "vertices": [[0, 0], [1, 1], [1, 0], [0, 1]]}))
    assert run("measure", "--shape", bad) == 2
    assert run("measure", "--shape", files["square"], "--depth", 31) == 2
    assert run("measure", "--shape", files["square"], "--lambda", "1:2:xlog") == 2
    assert run("measure", "--shape", files["square"], "--diam-convention", "radius") == 2
    assert run("measure") == 2


def test_io_errors_exit_3(files, tmp_path):
    assert run("measure", "--shape", tmp_path / "missing.json") == 3
    assert run("measure", "--shape", files["square"], "--depth", 2, "--out", tmp_path / "no" / "r.json") == 3


def test_config_precedence(files, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda": 0, "depth": 2, "root": "0,0,1"}))
    out = tmp_path / "r.json"
    assert run("measure", "--shape", files["square"], "--config", cfg, "--out", out) == 0
    obj = json.loads(out.read_text())
    assert obj["lambda"] == 0 and obj["max_depth"] == 2 and obj["total"] == 2.0
    assert run("measure", "--shape", files["square"], "--config", cfg, "--lambda", 1, "--out", out) == 0
    assert json.loads(out.read_text())["lambda"] == 1.0


def test_threads_env_and_determinism(files, tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("MIXGAUGE_THREADS", threads)
        p = tmp_path / f"r{threads}.json"
        assert run("measure", "--shape", files["comb8"], "--depth", 11, "--out", p) == 0
        outs.append(p.read_bytes())
    p = tmp_path / "r4flag.json"
    assert run("measure", "--shape", files["comb8"], "--depth", 11, "--threads", 4, "--out", p) == 0
    outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_atomic_write_leaves_no_temp(files, tmp_path):
    out = tmp_path / "r.json"
    assert run("measure", "--shape", files["square"], "--depth", 3, "--out", out) == 0
    assert sorted(os.listdir(tmp_path)) == sorted([*(os.path.basename(v) for v in files.values()), "r.json"])


def test_parse_lambda():
    assert parse_lambda("2.5") == [2.5]
    assert parse_lambda("0.1,1") == [0.1, 1.0]
    assert parse_lambda("0:1:3lin") == [0.0, 0.5, 1.0]
    assert parse_lambda("1:100:3:log") == pytest.approx([1, 10, 100])
    assert parse_lambda("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_module_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "mixgauge", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "mixgauge" in out.stdout
