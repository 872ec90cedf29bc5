"""End-to-end oracle checks, runnable without the test suite."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .bias import (
    EstimatorSpec,
    VariancePattern,
    bias,
    bias_via_residuals,
    expected_sq_residuals,
)
from .experiments import ExperimentConfig, mc_validate_bias, run_invariance_study
from .minimax import (
    normal_asymptotic_biases,
    three_point_biases,
    worst_case_negative,
    worst_case_positive,
)
from .regressors import standardize, three_point_sequence


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def random_instance(rng: np.random.Generator, t_max: int = 200):
    t = int(rng.integers(3, t_max + 1))
    raw = rng.standard_normal(t) * rng.uniform(0.1, 10) + rng.uniform(-5, 5)
    if rng.random() < 0.5:
        raw = np.exp(raw / np.std(raw))  # skewed regressors too
    sigma = rng.uniform(0, 3, t)
    return standardize(raw), VariancePattern(sigma), float(rng.uniform(0, 10))


def check_residual_oracle(seed: int, n: int = 30) -> CheckResult:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for _ in range(n):
        reg, var, _ = random_instance(rng)
        fast = expected_sq_residuals(reg, var)
        dense = oracles.expected_sq_residuals(reg.raw, var.sigma_sq)
        worst = max(worst, _rel(fast, dense))
    return CheckResult("expected squared residuals vs dense (I-H)S(I-H)",
                       worst <= 1e-12, f"max rel err {worst:.2e}")


def check_bias_routes(seed: int, n: int = 30) -> CheckResult:
    rng = np.random.default_rng([seed, 2])
    worst = dense = 0.0
    for _ in range(n):
        reg, var, a = random_instance(rng)
        b8 = bias(a, reg, var)
        worst = max(worst, _rel(bias_via_residuals(a, reg, var), b8))
        dense = max(dense, _rel(oracles.bias(a, reg.raw, var.sigma_sq), b8))
    return CheckResult("bias: quartic weights vs residual route and dense sandwich",
                       worst <= 1e-12 and dense <= 1e-8,
                       f"max rel err {worst:.2e} (dense {dense:.2e})")


def check_vertex_oracle(seed: int, n: int = 10) -> CheckResult:
    rng = np.random.default_rng([seed, 3])
    worst = 0.0
    for _ in range(n):
        t = int(rng.integers(3, 11))
        reg = standardize(rng.standard_normal(t) ** 3 + rng.standard_normal(t))
        a = float(rng.uniform(0, 8))
        hi, lo = oracles.vertex_extremes(a, reg.raw, 1.0)
        bp, _ = worst_case_positive(a, reg, 1.0)
        bm, _ = worst_case_negative(a, reg, 1.0)
        worst = max(worst, abs(bp - hi) / max(abs(hi), 1e-300),
                    abs(bm - lo) / max(abs(lo), 1e-300))
    return CheckResult("worst-case biases vs vertex enumeration",
                       worst <= 1e-9, f"max rel err {worst:.2e}")


def check_three_point() -> CheckResult:
    worst = 0.0
    for t, m2 in ((96, 3.0), (100, 2.0), (48, 2.0)):
        reg = three_point_sequence(t, math.sqrt(m2))
        for a in np.linspace(0, m2 + 2 - 1 / m2, 20, endpoint=False):
            cp, cm = three_point_biases(a, t, m2)
            worst = max(worst, _rel(worst_case_positive(a, reg)[0], cp),
                        _rel(worst_case_negative(a, reg)[0], cm))
    return CheckResult("three-point closed forms", worst <= 1e-12,
                       f"max rel err {worst:.2e}")


def check_normal_crossing() -> CheckResult:
    worst = max(abs((p - m) - (a - 4.0)) for a in np.linspace(0, 10, 101)
                for p, m in [normal_asymptotic_biases(a)])
    return CheckResult("normal asymptotic curves differ by a - 4", worst <= 1e-12,
                       f"max abs err {worst:.2e}")


def check_monte_carlo(seed: int, reps: int) -> CheckResult:
    reg = three_point_sequence(48, math.sqrt(2.0))
    _, cfg = worst_case_positive(0.0, reg, 1.0)
    var = cfg.as_pattern()
    spec = EstimatorSpec.eicker_white()
    mean, se = mc_validate_bias(spec, reg, var, reps, seed)
    exact = bias(spec, reg, var)
    z = abs(mean - exact) / se
    return CheckResult("Monte Carlo mean vs exact bias", z <= 4.0,
                       f"|mean - exact| = {z:.2f} SE ({reps} reps)")


def check_invariance(seed: int) -> CheckResult:
    rows = run_invariance_study(ExperimentConfig(t_count=50, samples_per_cell=2, seed=seed))
    worst = max(abs(r.a_star_numeric - r.a_star_analytic) for r in rows)
    ok = worst <= 1e-6 and not any(r.failed for r in rows)
    return CheckResult("numeric minimax a vs (K+1)/(1-(K+1)/T)", ok,
                       f"max abs diff {worst:.2e} over {len(rows)} sequences")


def run_all(seed: int, reps: int) -> list[CheckResult]:
    return [
        check_residual_oracle(seed),
        check_bias_routes(seed),
        check_vertex_oracle(seed),
        check_three_point(),
        check_normal_crossing(),
        check_monte_carlo(seed, reps),
        check_invariance(seed),
    ]
