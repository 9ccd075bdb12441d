import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pptour.errors import DegenerateColumn, InvalidParameter
from pptour.simdata import (SimSpec, generate, minmax_scale, pipe_raw, sine_raw, sphere_pca, spiral_raw,
                            standardize)


def test_sine_without_jitter_is_exact():
    x = sine_raw(SimSpec("sine", n=200, p=4, noise_params={"jitter_sd": 0.0}))
    assert np.max(np.abs(x[:, 3] - np.sin(x[:, 2]))) == 0.0


def test_pipe_without_radial_noise_is_a_circle():
    x = pipe_raw(SimSpec("pipe", n=200, p=4, noise_params={"radial_sd": 0.0}))
    assert np.allclose(np.hypot(x[:, 2], x[:, 3]), 1.0, atol=1e-12)


def test_spiral_radius_law():
    x, theta = spiral_raw(SimSpec("spiral", n=500, p=3), return_theta=True)
    r = np.hypot(x[:, 1], x[:, 2])
    assert np.allclose(r - 0.1 - 0.1 * np.abs(theta), 0.0, atol=1e-12)


def test_spiral_theta_zero_sits_on_axis():
    x, theta = spiral_raw(SimSpec("spiral", n=500, p=3, noise_params={"theta_spread": 0.0}), return_theta=True)
    assert np.all(theta == 0)
    assert np.allclose(x[:, 1:], [0.1, 0.0])


def test_generate_is_standardized_and_deterministic():
    a = generate(SimSpec("pipe", n=300, p=5, seed=3))
    b = generate(SimSpec("pipe", n=300, p=5, seed=3))
    assert np.array_equal(a.values, b.values)
    assert np.allclose(a.values.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(a.values.std(axis=0, ddof=1), 1)
    assert a.column_names == ("x1", "x2", "x3", "x4", "x5")


def test_bad_specs():
    with pytest.raises(InvalidParameter):
        SimSpec("torus")
    with pytest.raises(InvalidParameter):
        SimSpec("sine", p=2)
    with pytest.raises(InvalidParameter):
        SimSpec("sine", noise_params={"radial_sd": 1})


def test_sphere_keep_bounds(rng):
    with pytest.raises(InvalidParameter):
        sphere_pca(rng.normal(size=(20, 3)), keep=1)


def test_degenerate_columns():
    x = np.ones((10, 2))
    with pytest.raises(DegenerateColumn):
        standardize(x)
    with pytest.raises(DegenerateColumn):
        minmax_scale(x)


def test_minmax_extremes_exact(rng):
    v = minmax_scale(rng.normal(size=(50, 3))).values
    assert np.all(v.min(axis=0) == 0.0) and np.all(v.max(axis=0) == 1.0)


def test_sphere_recovers_planted_direction(rng):
    u = np.array([1.0, 2.0, -1.0, 0.5])
    u /= np.linalg.norm(u)
    x = rng.normal(size=(2000, 4)) + 10 * rng.normal(size=(2000, 1)) * u
    z = sphere_pca(x, keep=2).values[:, 0]
    proj = (x - x.mean(axis=0)) @ u
    assert abs(np.corrcoef(z, proj)[0, 1]) > 0.99


@given(st.integers(0, 2**31))
def test_standardize_affine_invariant(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(40, 3))
    a = rng.uniform(0.1, 10, 3)
    b = rng.normal(size=3)
    assert np.allclose(standardize(x * a + b).values, standardize(x).values, atol=1e-9)


@given(st.integers(0, 2**31))
def test_minmax_idempotent(seed):
    x = np.random.default_rng(seed).normal(size=(30, 3))
    once = minmax_scale(x).values
    assert np.array_equal(minmax_scale(once).values, once)


@given(st.integers(0, 2**31), st.integers(2, 5))
def test_sphere_covariance_identity(seed, p):
    x = np.random.default_rng(seed).normal(size=(100, p)) @ np.random.default_rng(seed + 1).normal(size=(p, p))
    z = sphere_pca(x).values
    assert np.allclose(np.cov(z, rowvar=False), np.eye(p), atol=1e-8)
