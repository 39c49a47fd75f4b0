import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kljnsim.noise import (
    NoiseScale,
    SampleStream,
    generate_noise,
    johnson_variance,
    make_rng,
    mean_cross,
    mean_square,
)


def test_johnson_variance_examples():
    assert johnson_variance(1000.0, NoiseScale(1e-6)) == pytest.approx(1e-3)
    assert johnson_variance(0.001, NoiseScale(1.0)) == pytest.approx(0.001)
    assert johnson_variance(10_000.0, NoiseScale(1e-6)) == pytest.approx(1e-2)


def test_johnson_variance_rejects_nonpositive_resistance():
    with pytest.raises(ValueError):
        johnson_variance(0.0, NoiseScale(1.0))
    with pytest.raises(ValueError):
        johnson_variance(-5.0, NoiseScale(1.0))


def test_noise_scale_must_be_positive():
    with pytest.raises(ValueError):
        NoiseScale(0.0)
    with pytest.raises(ValueError):
        NoiseScale(-1e-6)
    with pytest.raises(ValueError):
        NoiseScale(float("nan"))


@given(
    r1=st.floats(min_value=1e-3, max_value=1e9),
    r2=st.floats(min_value=1e-3, max_value=1e9),
    a=st.floats(min_value=1e-12, max_value=1e3),
)
def test_variance_scaling_ratio(r1, r2, a):
    scale = NoiseScale(a)
    ratio = johnson_variance(r1, scale) / johnson_variance(r2, scale)
    assert ratio == pytest.approx(r1 / r2, rel=1e-12)


def test_generate_noise_statistics():
    # 5-sigma bounds on the mean and the chi-squared spread of the variance
    # estimate; the bound formulas are the oracle here.
    n = 10**6
    variance = 1e-3
    stream = generate_noise(1000.0, NoiseScale(1e-6), n, seed=11)
    sigma = math.sqrt(variance)
    assert abs(float(np.mean(stream.values))) < 5.0 * sigma / math.sqrt(n)
    assert abs(mean_square(stream) - variance) < 5.0 * variance * math.sqrt(2.0 / n)


def test_generate_noise_single_sample_and_zero_rejected():
    assert len(generate_noise(1.0, NoiseScale(1.0), 1, seed=0)) == 1
    with pytest.raises(ValueError):
        generate_noise(1.0, NoiseScale(1.0), 0, seed=0)


def test_generate_noise_deterministic():
    a = generate_noise(1000.0, NoiseScale(1e-6), 256, seed=42, stream=7)
    b = generate_noise(1000.0, NoiseScale(1e-6), 256, seed=42, stream=7)
    assert np.array_equal(a.values, b.values)
    c = generate_noise(1000.0, NoiseScale(1e-6), 256, seed=42, stream=8)
    assert not np.array_equal(a.values, c.values)


@given(seed=st.integers(min_value=0, max_value=2**64 - 1), stream=st.integers(0, 2**40))
@settings(max_examples=25, deadline=None)
def test_make_rng_streams_reproducible(seed, stream):
    x = make_rng(seed, stream).standard_normal(8)
    y = make_rng(seed, stream).standard_normal(8)
    assert np.array_equal(x, y)


def test_mean_square_examples():
    assert mean_square(SampleStream(np.array([1.0, -1.0, 1.0, -1.0]), dt=1.0)) == 1.0
    assert mean_square(SampleStream(np.array([0.0, 0.0, 0.0]), dt=1.0)) == 0.0


def test_mean_square_concentration():
    # chi-squared concentration at n = 1e5, 5-sigma relative band
    n = 10**5
    v = 2.5
    stream = generate_noise(2.5, NoiseScale(1.0), n, seed=3)
    assert abs(mean_square(stream) - v) < 5.0 * v * math.sqrt(2.0 / n)


def test_mean_square_estimator_consistency():
    # relative error below 5*sqrt(2/n) in at least 99% of 1000 seeded trials
    n = 400
    bound = 5.0 * math.sqrt(2.0 / n)
    ok = 0
    for trial in range(1000):
        stream = generate_noise(1000.0, NoiseScale(1e-6), n, seed=9000 + trial)
        ok += abs(mean_square(stream) / 1e-3 - 1.0) < bound
    assert ok >= 990


def test_mean_cross_examples():
    u = SampleStream(np.array([1.0, 2.0]), dt=1.0)
    i = SampleStream(np.array([1.0, 2.0]), dt=1.0)
    assert mean_cross(u, i) == 2.5
    u2 = SampleStream(np.array([1.0, -1.0]), dt=1.0)
    i2 = SampleStream(np.array([1.0, 1.0]), dt=1.0)
    assert mean_cross(u2, i2) == 0.0


def test_mean_cross_independent_streams_bound():
    n = 10**5
    u = generate_noise(1000.0, NoiseScale(1e-6), n, seed=21, stream=0)
    i = generate_noise(1000.0, NoiseScale(1e-6), n, seed=21, stream=1)
    sigma = 1e-3  # sigma_u * sigma_i for matched 1e-3-variance streams
    assert abs(mean_cross(u, i)) < 5.0 * sigma / math.sqrt(n)


def test_mean_cross_length_mismatch():
    u = SampleStream(np.array([1.0, 2.0]), dt=1.0)
    i = SampleStream(np.array([1.0]), dt=1.0)
    with pytest.raises(ValueError):
        mean_cross(u, i)


def test_sample_stream_validation():
    with pytest.raises(ValueError):
        SampleStream(np.array([]), dt=1.0)
    with pytest.raises(ValueError):
        SampleStream(np.array([1.0, float("inf")]), dt=1.0)
    with pytest.raises(ValueError):
        SampleStream(np.array([1.0]), dt=0.0)
