import math

import numpy as np
import pytest

import hetbias.experiments as ex
from hetbias.bias import EstimatorSpec, VariancePattern, bias
from hetbias.errors import InfeasibleMoments, MomentMatchFailed
from hetbias.experiments import ExperimentConfig, mc_validate_bias, run_invariance_study
from hetbias.minimax import three_point_biases, worst_case_positive
from hetbias.regressors import standardize, three_point_sequence


def test_zero_variance_gives_exact_zero():
    reg = standardize(np.arange(10.0) ** 1.5)
    assert mc_validate_bias(EstimatorSpec(2.0), reg, VariancePattern(np.zeros(10)), 2000, 3) == (0.0, 0.0)


def test_homoskedastic(rng):
    reg = standardize(rng.standard_normal(30))
    var = VariancePattern.homoskedastic(30, 1.0)
    spec = EstimatorSpec(2.0)
    mean, se = mc_validate_bias(spec, reg, var, 40_000, 8)
    assert abs(mean - bias(spec, reg, var)) <= 4 * se


def test_three_point_least_favorable():
    reg = three_point_sequence(48, math.sqrt(2))
    _, cfg = worst_case_positive(0.0, reg, 1.0)
    mean, se = mc_validate_bias(EstimatorSpec.eicker_white(), reg, cfg.as_pattern(), 100_000, 2014)
    closed, _ = three_point_biases(0.0, 48, 2.0)
    assert abs(mean - closed) <= 4 * se


def test_standard_error_shrinks_like_root_n(rng):
    reg = standardize(rng.gamma(1.0, size=25))
    var = VariancePattern(rng.uniform(0, 2, 25))
    _, se1 = mc_validate_bias(EstimatorSpec(0.0), reg, var, 10_000, 1)
    _, se4 = mc_validate_bias(EstimatorSpec(0.0), reg, var, 40_000, 1)
    assert se1 / se4 == pytest.approx(2.0, rel=0.10)


def test_simulation_stream_is_fixed():
    reg = standardize(np.arange(12.0) ** 2)
    var = VariancePattern(np.linspace(0, 1, 12))
    a = ex.simulate_estimator(EstimatorSpec(1.0), reg, var, 25_000, 4)
    b = ex.simulate_estimator(EstimatorSpec(1.0), reg, var, 25_000, 4)
    assert a.tobytes() == b.tobytes()
    # the first chunk does not depend on how many replications follow it
    c = ex.simulate_estimator(EstimatorSpec(1.0), reg, var, 10_000, 4)
    assert c.tobytes() == a[:10_000].tobytes()


def test_too_few_replications():
    reg = standardize(np.arange(5.0))
    with pytest.raises(ValueError):
        mc_validate_bias(EstimatorSpec(0.0), reg, VariancePattern(np.ones(5)), 999, 1)


@pytest.fixture(scope="module")
def rows():
    return run_invariance_study(ExperimentConfig(t_count=100, samples_per_cell=6, seed=3))


class TestInvarianceStudy:
    def test_shape(self, rows):
        assert len(rows) == 24
        assert [r.sample_index for r in rows[:6]] == [1, 2, 3, 4, 5, 6]
        assert not any(r.failed for r in rows)

    def test_a_star_constant_per_kurtosis(self, rows):
        for kurt, expected in ((3.0, 4.167), (4.0, 5.263)):
            vals = np.array([r.a_star_numeric for r in rows if r.target_kurtosis == kurt])
            assert np.all(np.abs(vals - expected) <= 1e-3)
            assert np.std(vals) <= 1e-6
        for r in rows:
            assert r.a_star_numeric == pytest.approx(r.a_star_analytic, abs=1e-6)

    def test_max_bias_varies_within_cell(self, rows):
        mb = [r.max_bias_t2s2_over_u for r in rows[:6]]
        assert np.ptp(mb) > 1e-3
        for r in rows:
            assert r.max_bias_t_over_u == pytest.approx(r.max_bias_raw * 100, rel=1e-14)

    def test_deterministic(self, rows):
        again = run_invariance_study(ExperimentConfig(t_count=100, samples_per_cell=6, seed=3))
        assert [r.as_dict() for r in again] == [r.as_dict() for r in rows]


def test_failed_cell_is_marked(monkeypatch):
    def boom(*args, **kwargs):
        raise MomentMatchFailed("nope")

    monkeypatch.setattr(ex, "generate_with_moments", boom)
    rows = run_invariance_study(ExperimentConfig(t_count=20, samples_per_cell=1))
    assert all(r.failed and r.error == "nope" for r in rows)
    assert math.isnan(rows[0].a_star_numeric)


def test_config_validation():
    with pytest.raises(InfeasibleMoments):
        ExperimentConfig(kurtosis_targets=[3.0], skewness_targets=[2.0])
    with pytest.raises(ValueError):
        ExperimentConfig(samples_per_cell=0)
