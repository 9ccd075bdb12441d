import math

import numpy as np
import pytest

from pptour.diagnostics import (FrameIndex, masd, nuisance_path, parameter_sweep, percentile_table,
                                rotation_scan, smooth_index, spread, squint_angle_estimate,
                                squint_path, timing_benchmark, trace_nuisance, trace_squint)
from pptour.errors import InvalidParameter, NoStructureAtTarget
from pptour.geometry import Frame, geodesic_step, proj_dist
from pptour.indexes import INDEX_NAMES, bind
from pptour.simdata import SimSpec, generate


@pytest.fixture(scope="module")
def sine():
    return generate(SimSpec("sine", n=1000, p=6, seed=0))


@pytest.fixture(scope="module")
def spiral():
    return generate(SimSpec("spiral", n=1000, p=6, seed=0))


def test_path_shapes():
    assert len(nuisance_path(6)) == 41
    path, marker = squint_path(6)
    assert len(path) == 59 and marker == 29
    assert proj_dist(path[marker], Frame.axes(6, 0, 4)) < 1e-8
    assert proj_dist(path[-1], Frame.axes(6, 4, 5)) < 1e-8


def test_constant_index_gives_flat_trace(sine):
    tr = trace_nuisance(sine, [FrameIndex("const", lambda f: 0.3)])
    assert np.all(tr.values("const") == 0.3) and tr.masd("const") == 0.0


def test_sine_nuisance_trace(sine):
    tr = trace_nuisance(sine, ["splines2d", "stringy"])
    assert np.max(tr.values("splines2d")) <= 0.1
    assert tr.masd("stringy") > tr.masd("splines2d")


def test_synthetic_distance_squint_trace_increases(sine):
    target = Frame.axes(6, 4, 5)
    tr = trace_squint(sine, [FrameIndex("negdist", lambda f: -proj_dist(f, target))])
    assert np.all(np.diff(tr.values("negdist")) > 0)


def test_trace_write_is_deterministic(tmp_path, sine):
    for d in ("a", "b"):
        trace_nuisance(sine, ["dcor2d"], steps=5).write(tmp_path / d)
    for f in ("frames.csv", "traces.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    head = (tmp_path / "a" / "traces.csv").read_text().splitlines()[0]
    assert head == "frame_id,index_name,value,eval_ms"


def test_masd_simple():
    assert masd([0, 1, 0, 1]) == 1.0
    assert masd([2.0]) == 0.0


def test_rotation_scan_uniform_disk():
    y = np.random.default_rng(0).uniform(-1, 1, (4000, 2))
    y = y[(y ** 2).sum(axis=1) <= 1][:1000]
    r = rotation_scan(y, list(INDEX_NAMES))
    for k in INDEX_NAMES:
        assert spread(r[k]) <= 0.1, k
    with pytest.raises(InvalidParameter):
        rotation_scan(y, ["holes"], n_angles=4)


@pytest.fixture(scope="module")
def small_table():
    return percentile_table(indexes=["splines2d", "mic", "convex1m"], n=1000, n_reps=20)


def test_percentile_cells(small_table):
    assert small_table.cell("splines2d", "sine", "structure")[0] >= 0.95
    lo, hi = small_table.cell("convex", "pipe", "structure")
    assert 0.0 <= lo and hi <= 0.17
    with pytest.raises(InvalidParameter):
        percentile_table(n_reps=5)


@pytest.mark.xfail(reason="simulated spiral gives MIC 0.69-0.74 on the structured pair; see ledger", strict=False)
def test_percentile_mic_spiral(small_table):
    lo, hi = small_table.cell("mic", "spiral", "structure")
    assert 0.32 <= lo and hi <= 0.53


def _cone_index(target, c):
    return FrameIndex("cone", lambda f: max(0.0, 1.0 - proj_dist(f, target) / c))


def test_squint_recovers_cone_radius(sine):
    target = Frame.axes(6, 4, 5)
    c = 0.6
    res = squint_angle_estimate(sine, _cone_index(target, c), target, threshold=0.5, n_dirs=10, rng=1)
    for a, h in zip(res.angles, res.directions):
        # closed form along a unit tangent: d(t) = sqrt(2) sqrt(sin^2(s1 t) + sin^2(s2 t))
        s = np.linalg.svd(h, compute_uv=False)
        d = math.sqrt(2) * math.sqrt(np.sin(s[0] * a) ** 2 + np.sin(s[1] * a) ** 2)
        assert d == pytest.approx(c / 2, rel=0.05)
        assert proj_dist(geodesic_step(target, h, a), target) == pytest.approx(d, rel=1e-6)


def test_squint_threshold_zero_saturates(sine):
    target = Frame.axes(6, 4, 5)
    res = squint_angle_estimate(sine, "splines2d", target, threshold=0.0, n_dirs=3, rng=0)
    assert np.all(res.angles == math.pi / 4)


def test_squint_no_structure_raises(sine):
    with pytest.raises(NoStructureAtTarget):
        squint_angle_estimate(sine, FrameIndex("zero", lambda f: 0.0), Frame.axes(6, 4, 5))


@pytest.mark.xfail(reason="measured median angles rise with p on spiral/skinny; see ledger", strict=False)
def test_squint_angle_shrinks_with_dimension():
    med = []
    for p in (4, 5, 6):
        x = generate(SimSpec("spiral", p=p, seed=0))
        med.append(squint_angle_estimate(x, "skinny", Frame.axes(p, p - 2, p - 1), n_dirs=20, rng=0).median)
    assert med[0] > med[1] > med[2]


def test_timing_benchmark():
    rows = timing_benchmark(["mic", "splines2d"], [200, 2000], n_reps=3)
    t = {(r["index"], r["n"]): r["median_ms"] for r in rows}
    assert all(v > 0 for v in t.values())
    assert t[("mic", 2000)] > t[("mic", 200)]
    assert t[("splines2d", 2000)] < t[("mic", 2000)]


def test_mic_exponent_costs_time():
    rows = timing_benchmark([("mic", {"mic_exponent": 0.5}), ("mic", {"mic_exponent": 0.75})], [1000], n_reps=3)
    assert rows[1]["median_ms"] > rows[0]["median_ms"]


def test_bin_cap_sweep(spiral):
    rows = parameter_sweep(spiral, "skinny", "bin_cap", [10, 20, 40], trace_steps=5)
    s = [r["structured"] for r in rows]
    assert s[0] < s[1] <= s[2] + 0.05


def test_sweep_single_value_matches_direct(spiral):
    (row,) = parameter_sweep(spiral, "dcor2d", "squared", [True], trace_steps=3)
    f = bind(("dcor2d", {"squared": True}), spiral)
    assert row["structured"] == pytest.approx(f(Frame.axes(6, 4, 5)), abs=1e-12)
    assert row["noise"] == pytest.approx(f(Frame.axes(6, 0, 1)), abs=1e-12)
    with pytest.raises(InvalidParameter):
        parameter_sweep(spiral, "holes", "bin_cap", [10])


def test_smoothing(sine):
    assert smooth_index("stringy", window=1).params == {}
    with pytest.raises(InvalidParameter):
        smooth_index("stringy", window=4)
    raw = trace_nuisance(sine, ["stringy"]).masd("stringy")
    sm = smooth_index("stringy", window=5)
    assert trace_nuisance(sine, [sm]).masd(sm.label) < raw


def test_smoothing_leaves_constant_index_unchanged():
    # every projection of [u, v, u] is an invertible linear image of (u, v); holes is affine invariant
    rng = np.random.default_rng(4)
    u, v = rng.uniform(-1, 1, (2, 400))
    x = np.column_stack([u, v, u])
    f_raw = bind("holes", x)
    f_sm = bind(smooth_index("holes", window=5), x)
    fr = Frame(np.linalg.qr(rng.normal(size=(3, 2)))[0])
    assert f_sm(fr) == pytest.approx(f_raw(fr), abs=1e-9)
