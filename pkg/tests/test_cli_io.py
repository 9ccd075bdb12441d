import json
import re

import numpy as np
import pytest
import yaml

from pptour.cli import main
from pptour.config import RunConfig
from pptour.errors import ConfigError, DataError, EmptyTrace
from pptour.io import load_csv, parse_scale_mode, write_csv
from pptour.svg import render_scatter_svg, render_trace_svg, trace_x, trace_y


@pytest.fixture
def small_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b\n1.5,2\n-3,4.25\n0,1e-3\n")
    return p


def test_load_csv_exact(small_csv):
    x = load_csv(small_csv)
    assert x.column_names == ("a", "b")
    assert np.array_equal(x.values, [[1.5, 2.0], [-3.0, 4.25], [0.0, 1e-3]])


def test_load_csv_drop_and_scale(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,c\n1,5,0\n2,6,1\n4,9,7\n")
    x = load_csv(p, drop_columns=["b"], scale_mode="minmax")
    assert x.column_names == ("a", "c")
    assert np.all(x.values.min(axis=0) == 0.0) and np.all(x.values.max(axis=0) == 1.0)
    with pytest.raises(DataError):
        load_csv(p, drop_columns=["zz"])


def test_load_csv_errors(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "missing.csv")
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n3,x\n4,5\n")
    with pytest.raises(DataError, match="row"):
        load_csv(p)
    p.write_text("a,b\n1,2\n3,nan\n4,5\n")
    with pytest.raises(DataError):
        load_csv(p)


def test_scale_mode_parsing():
    assert parse_scale_mode("sphere:3") == ("sphere", 3)
    assert parse_scale_mode("none") == ("none", None)
    with pytest.raises(ConfigError):
        parse_scale_mode("log")


def test_csv_round_trip(tmp_path, rng):
    from pptour.geometry import DataMatrix

    x = DataMatrix(rng.normal(size=(5, 3)), ("p", "q", "r"))
    write_csv(tmp_path / "x.csv", x)
    assert np.array_equal(load_csv(tmp_path / "x.csv").values, x.values)


def test_config_round_trip(tmp_path):
    cfg = RunConfig("optimize", output="o", seed=3, data={"simulate": {"family": "sine"}},
                    indexes=["splines2d", {"name": "mic", "params": {"mic_exponent": 0.5}}],
                    optimizer={"method": "geodesic"})
    assert RunConfig.loads(cfg.dumps()) == cfg
    cfg.save(tmp_path / "c.yaml")
    assert RunConfig.load(tmp_path / "c.yaml") == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "simulate", "colour": "red"})
    with pytest.raises(ConfigError):
        RunConfig("fly")
    with pytest.raises(ConfigError):
        RunConfig("evaluate", indexes=["nope"])


def test_trace_svg_structure():
    series = {"a": {i: i / 10 for i in range(11)}, "b": {i: 1 - i / 10 for i in range(11)}}
    svg = render_trace_svg(series, markers=[5])
    assert svg.count('<polyline class="series"') == 2
    assert 'data-index="a"' in svg and '>b</text>' in svg
    m = re.search(r'<line class="marker" x1="([\d.]+)" y1="([\d.]+)" x2="[\d.]+" y2="([\d.]+)"', svg)
    assert float(m.group(1)) == pytest.approx(50 + 450 * 5 / 10, abs=0.005)
    assert float(m.group(2)) == pytest.approx(trace_y(0.0)) and float(m.group(3)) == pytest.approx(trace_y(1.0))
    assert trace_x(0, 11) == 50.0 and trace_y(1.0) == 20.0 and trace_y(0.0) == 360.0
    with pytest.raises(EmptyTrace):
        render_trace_svg({})


def test_scatter_svg_positions_and_defaults():
    svg = render_scatter_svg(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    circles = re.findall(r'<circle cx="([\d.]+)" cy="([\d.]+)" r="([\d.]+)"/>', svg)
    # window [-0.025, 1.025] on both axes mapped to [40, 360], y flipped
    lo, hi = 40 + 320 * 0.025 / 1.05, 40 + 320 * 1.025 / 1.05
    want = [(lo, hi), (hi, hi), (lo, lo)]
    assert [(float(a), float(b)) for a, b, _ in circles] == [pytest.approx(w, abs=0.005) for w in want]
    assert {r for *_, r in circles} == {"2.00"}
    assert 'fill-opacity="0.500"' in svg
    svg2 = render_scatter_svg(np.array([[0.0, 0.0], [1.0, 1.0]]), {"radius": 3, "opacity": 0.2})
    assert 'r="3.00"' in svg2 and 'fill-opacity="0.200"' in svg2


def _run(tmp_path, raw, name="run", extra=()):
    cfg = tmp_path / f"{name}.yaml"
    cfg.write_text(yaml.safe_dump(raw))
    out = tmp_path / name
    return main([raw["command"], "-c", str(cfg), "-o", str(out), *extra]), out


def test_cli_success_writes_manifest(tmp_path):
    rc, out = _run(tmp_path, {"command": "simulate", "data": {"simulate": {"family": "pipe", "n": 50, "p": 3}}})
    assert rc == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["exit_code"] == 0 and man["config"]["command"] == "simulate"
    assert load_csv(out / "data.csv").values.shape == (50, 3)


def test_cli_config_error_exit_2(tmp_path):
    rc, out = _run(tmp_path, {"command": "trace", "indexes": ["holes"]})
    assert rc == 2
    err = json.loads((out / "error.json").read_text())
    assert err["exit_code"] == 2 and err["command"] == "trace"


def test_cli_data_error_exit_3(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n1,2,3\nq,5,6\n7,8,9\n")
    rc, out = _run(tmp_path, {"command": "simulate", "data": {"csv": str(p)}})
    assert rc == 3 and (out / "error.json").exists()


def test_cli_evaluation_error_exit_4(tmp_path):
    # five rows load fine but are too few for a spline fit
    p = tmp_path / "short.csv"
    p.write_text("a,b,c\n" + "\n".join(f"{i},{i * i},{(i * 7) % 5}" for i in range(5)) + "\n")
    rc, out = _run(tmp_path, {"command": "evaluate", "data": {"csv": str(p)}, "indexes": ["splines2d"],
                              "diagnostics": {"axes": [[1, 2]]}})
    assert rc == 4
    assert json.loads((out / "error.json").read_text())["exit_code"] == 4


def test_cli_optimize_verify(tmp_path):
    raw = {"command": "optimize", "data": {"simulate": {"family": "sine", "n": 300, "p": 4}},
           "indexes": ["splines2d", "dcor2d"], "optimizer": {"method": "geodesic", "max_tries": 10}}
    rc, out = _run(tmp_path, raw, extra=["--verify"])
    assert rc == 0
    ver = json.loads((out / "verify.json").read_text())
    assert ver["target"] == [3, 4] and isinstance(ver["passed"], bool)
    head = (out / "traces.csv").read_text().splitlines()
    assert head[0] == "frame_id,index_name,value,eval_ms"
    assert {line.split(",")[1] for line in head[1:]} == {"splines2d", "dcor2d"}
