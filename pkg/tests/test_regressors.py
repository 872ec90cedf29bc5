import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from hetbias.errors import (
    ConstantRegressor,
    IncompatibleShape,
    InfeasibleMoments,
    TooShort,
)
from hetbias.regressors import (
    MomentTarget,
    generate_with_moments,
    sample_moments,
    standardize,
    three_point_sequence,
)


def test_standardize_symmetric_three_points():
    reg = standardize([-1.0, 0.0, 1.0])
    r = math.sqrt(1.5)
    np.testing.assert_allclose(reg.z, [-r, 0.0, r], rtol=0, atol=1e-15)
    assert reg.s_squared == pytest.approx(2 / 3, abs=1e-15)
    assert reg.skewness == pytest.approx(0.0, abs=1e-15)
    assert reg.kurtosis == pytest.approx(1.5, abs=1e-15)
    assert reg.t_count == 3


@pytest.mark.parametrize("raw, exc", [
    ([5, 5, 5, 5], ConstantRegressor),
    ([1e8, 1e8, 1e8 * (1 + 1e-16)], ConstantRegressor),
    ([1.0, 2.0], TooShort),
])
def test_standardize_rejects(raw, exc):
    with pytest.raises(exc):
        standardize(raw)


def test_standardize_normal_sample_kurtosis_matches_scipy():
    x = np.random.default_rng(42).standard_normal(1000)
    reg = standardize(x)
    ref = stats.kurtosis(x, fisher=False, bias=True)
    assert reg.kurtosis == pytest.approx(ref, rel=1e-12)
    assert reg.skewness == pytest.approx(stats.skew(x, bias=True), rel=1e-10)
    assert abs(reg.kurtosis - 3) < 0.5


def test_sequence_is_immutable():
    reg = standardize([1.0, 2.0, 4.0])
    with pytest.raises(ValueError):
        reg.z[0] = 0.0


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(3, 60), elements=finite))
def test_standardization_invariants(raw):
    if np.ptp(raw) <= 1e-6 * max(1.0, np.max(np.abs(raw))):
        return
    reg = standardize(raw)
    t = reg.t_count
    assert abs(math.fsum(reg.z)) <= 1e-10 * t
    assert abs(math.fsum(reg.z**2) / t - 1) <= 1e-10
    assert reg.kurtosis >= 1 + reg.skewness**2 - 1e-9
    # idempotent on standardized input
    np.testing.assert_allclose(standardize(reg.z).z, reg.z, rtol=0, atol=1e-12)


def test_three_point_small():
    reg = three_point_sequence(8, math.sqrt(2))
    r2 = math.sqrt(2)
    np.testing.assert_allclose(reg.z, [-r2, -r2, 0, 0, 0, 0, r2, r2], atol=1e-15)
    assert reg.kurtosis == pytest.approx(2.0, abs=1e-12)
    assert reg.s_squared == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("t, m2", [(96, 3.0), (100, 2.0), (48, 2.0), (200, 4.0)])
def test_three_point_moments_exact(t, m2):
    reg = three_point_sequence(t, math.sqrt(m2))
    m1, m2_, m3, m4 = sample_moments(reg.z)
    assert abs(m1) <= 1e-12 and abs(m2_ - 1) <= 1e-12
    assert abs(m3) <= 1e-12
    assert abs(m4 - m2) <= 1e-12
    k = int(round(t / (2 * m2)))
    assert np.count_nonzero(reg.z < 0) == k == np.count_nonzero(reg.z > 0)


def test_three_point_incompatible():
    with pytest.raises(IncompatibleShape):
        three_point_sequence(100, math.sqrt(3))
    with pytest.raises(IncompatibleShape):
        three_point_sequence(10, 1.0)


@pytest.mark.parametrize("skew, kurt, seed", [
    (0.0, 3.0, 1), (1.0, 4.0, 7), (1.0, 3.0, 1), (0.0, 1.5, 3), (-0.5, 6.0, 11),
])
def test_generate_hits_sample_moments(skew, kurt, seed):
    reg = generate_with_moments(100, MomentTarget(skew, kurt), seed)
    m1, m2, m3, m4 = sample_moments(reg.z)
    assert abs(m1) <= 1e-10 and abs(m2 - 1) <= 1e-10
    assert abs(m3 - skew) <= 1e-8
    assert abs(m4 - kurt) <= 1e-8


def test_generate_is_reproducible():
    target = MomentTarget(1.0, 4.0)
    a = generate_with_moments(50, target, 5)
    b = generate_with_moments(50, target, 5)
    assert a.z.tobytes() == b.z.tobytes()
    c = generate_with_moments(50, target, 6)
    assert not np.array_equal(a.z, c.z)


def test_infeasible_target_rejected():
    with pytest.raises(InfeasibleMoments):
        MomentTarget(2.0, 3.0)


def test_generate_needs_eight_points():
    with pytest.raises(TooShort):
        generate_with_moments(5, MomentTarget(0.0, 3.0), 1)
