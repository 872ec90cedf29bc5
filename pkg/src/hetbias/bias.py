"""Exact finite-sample bias of the scaled Eicker-White variance family.

For a single regressor with intercept the slope-variance estimator is

    Omega_hat(a) = (1 + a/T) / (T^2 s^2) * sum_t z_t^2 e_t^2

and its exact bias under independent normal errors with variances
``sigma_t^2`` is ``(1 / (T^3 s^2)) * sum_t p(z_t) sigma_t^2`` for a quartic
``p`` that depends only on ``a``, ``T`` and the regressor's third and fourth
moments. Nothing here forms the T x T hat matrix; see :mod:`hetbias.oracles`
for the dense cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import IndexOutOfRange, LengthMismatch
from .regressors import RegressorSequence

__all__ = [
    "VariancePattern",
    "EstimatorLabel",
    "EstimatorSpec",
    "BiasPolynomial",
    "VarianceMoments",
    "variance_moments",
    "true_variance",
    "hat_entry",
    "expected_sq_residual",
    "expected_sq_residuals",
    "estimator_value",
    "build_polynomial",
    "bias",
    "bias_via_residuals",
]


@dataclass(frozen=True)
class VariancePattern:
    """Error variances ``sigma_t^2``, optionally with a known upper bound."""

    sigma_sq: np.ndarray
    bound_u: Optional[float] = None

    def __post_init__(self):
        s = np.array(self.sigma_sq, dtype=np.float64).ravel()
        s.setflags(write=False)
        object.__setattr__(self, "sigma_sq", s)
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ValueError("variances must be finite and non-negative")
        if self.bound_u is not None:
            if not self.bound_u > 0:
                raise ValueError("bound_u must be positive")
            if np.any(s > self.bound_u * (1 + 1e-12)):
                raise ValueError("variance exceeds bound_u")

    @classmethod
    def homoskedastic(cls, t_count: int, sigma_sq: float = 1.0):
        return cls(np.full(t_count, float(sigma_sq)))

    def __len__(self) -> int:
        return self.sigma_sq.shape[0]


class EstimatorLabel(str, Enum):
    EICKER_WHITE = "EickerWhite"
    HINKLEY = "Hinkley"
    MINIMAX = "Minimax"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class EstimatorSpec:
    """Member of the family selected by its scale parameter ``a >= 0``."""

    a: float
    label: EstimatorLabel = EstimatorLabel.CUSTOM

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"scale parameter must be non-negative, got {self.a}")
        if self.label is EstimatorLabel.EICKER_WHITE and self.a != 0:
            raise ValueError("Eicker-White requires a = 0")
        if self.label is EstimatorLabel.HINKLEY and self.a != 2:
            raise ValueError("Hinkley requires a = 2")

    @classmethod
    def eicker_white(cls):
        return cls(0.0, EstimatorLabel.EICKER_WHITE)

    @classmethod
    def hinkley(cls):
        return cls(2.0, EstimatorLabel.HINKLEY)

    @classmethod
    def minimax(cls, kurtosis: float, t_count: int):
        from .minimax import a_star_analytic

        return cls(a_star_analytic(kurtosis, t_count), EstimatorLabel.MINIMAX)


def _as_spec(spec) -> EstimatorSpec:
    return spec if isinstance(spec, EstimatorSpec) else EstimatorSpec(float(spec))


def _check_lengths(reg: RegressorSequence, other, what: str):
    if len(other) != reg.t_count:
        raise LengthMismatch(
            f"{what} has length {len(other)}, regressor has {reg.t_count}")


def _check_index(reg: RegressorSequence, idx: int):
    if not 0 <= idx < reg.t_count:
        raise IndexOutOfRange(f"index {idx} outside [0, {reg.t_count})")


@dataclass(frozen=True)
class VarianceMoments:
    """``EV``, ``EVZ`` and ``EVZ^2`` for one (regressor, variances) pair."""

    ev: float
    evz: float
    evz2: float


def variance_moments(reg: RegressorSequence, var: VariancePattern) -> VarianceMoments:
    _check_lengths(reg, var, "variance pattern")
    z, s = reg.z, var.sigma_sq
    t = reg.t_count
    return VarianceMoments(
        ev=math.fsum(s) / t,
        evz=math.fsum(z * s) / t,
        evz2=math.fsum(z * z * s) / t,
    )


def true_variance(reg: RegressorSequence, var: VariancePattern) -> float:
    """Exact variance of the OLS slope, ``sum z_t^2 sigma_t^2 / (T^2 s^2)``."""
    _check_lengths(reg, var, "variance pattern")
    t = reg.t_count
    return math.fsum(reg.z**2 * var.sigma_sq) / (t * t * reg.s_squared)


def hat_entry(reg: RegressorSequence, s_idx: int, t_idx: int) -> float:
    """Entry ``(s, t)`` of the hat matrix, ``(1 + z_s z_t) / T``."""
    _check_index(reg, s_idx)
    _check_index(reg, t_idx)
    return (1.0 + reg.z[s_idx] * reg.z[t_idx]) / reg.t_count


def expected_sq_residuals(reg: RegressorSequence, var: VariancePattern,
                          moments: VarianceMoments | None = None) -> np.ndarray:
    """``E(e_t^2)`` for every observation, in O(T)."""
    m = moments or variance_moments(reg, var)
    z, s = reg.z, var.sigma_sq
    z2 = z * z
    inner = m.ev - 2.0 * s - 2.0 * z2 * s + 2.0 * z * m.evz + z2 * m.evz2
    return s + inner / reg.t_count


def expected_sq_residual(reg: RegressorSequence, var: VariancePattern,
                         t_idx: int) -> float:
    _check_lengths(reg, var, "variance pattern")
    _check_index(reg, t_idx)
    return float(expected_sq_residuals(reg, var)[t_idx])


def estimator_value(spec, reg: RegressorSequence, residuals) -> float:
    """Evaluate the scaled Eicker-White estimate on a residual vector."""
    spec = _as_spec(spec)
    e = np.asarray(residuals, dtype=np.float64)
    _check_lengths(reg, e, "residual vector")
    t = reg.t_count
    total = math.fsum(reg.z**2 * e**2)
    return (1.0 + spec.a / t) * total / (t * t * reg.s_squared)


@dataclass(frozen=True)
class BiasPolynomial:
    """``p(lam) = c0 + c1 lam + c2 lam^2 + c4 lam^4`` (no cubic term)."""

    c0: float
    c1: float
    c2: float
    c4: float
    a: float
    t_count: float
    skewness: float
    kurtosis: float

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=np.float64)
        lam2 = lam * lam
        return self.c0 + self.c1 * lam + self.c2 * lam2 + self.c4 * lam2 * lam2

    @property
    def coefficients(self) -> tuple[float, float, float, float, float]:
        """Coefficients in increasing degree, ``(c0, c1, c2, 0, c4)``."""
        return (self.c0, self.c1, self.c2, 0.0, self.c4)

    @classmethod
    def from_moments(cls, a: float, t_count: float, skewness: float,
                     kurtosis: float) -> "BiasPolynomial":
        if not a >= 0:
            raise ValueError(f"scale parameter must be non-negative, got {a}")
        scale = 1.0 + a / t_count
        return cls(
            c0=scale,
            c1=2.0 * scale * skewness,
            c2=a + scale * (kurtosis - 2.0),
            c4=-2.0 * scale,
            a=a, t_count=t_count, skewness=skewness, kurtosis=kurtosis,
        )


def build_polynomial(a: float, reg: RegressorSequence) -> BiasPolynomial:
    return BiasPolynomial.from_moments(a, reg.t_count, reg.skewness, reg.kurtosis)


def bias(spec, reg: RegressorSequence, var: VariancePattern) -> float:
    """Exact bias ``E Omega_hat(a) - Omega`` via the quartic weights."""
    spec = _as_spec(spec)
    _check_lengths(reg, var, "variance pattern")
    p = build_polynomial(spec.a, reg)
    t = reg.t_count
    return math.fsum(p(reg.z) * var.sigma_sq) / (t**3 * reg.s_squared)


def bias_via_residuals(spec, reg: RegressorSequence, var: VariancePattern) -> float:
    """Same bias, assembled from the expected squared residuals instead."""
    spec = _as_spec(spec)
    _check_lengths(reg, var, "variance pattern")
    t = reg.t_count
    ee = expected_sq_residuals(reg, var)
    terms = reg.z**2 * ((1.0 + spec.a / t) * ee - var.sigma_sq)
    return math.fsum(terms) / (t * t * reg.s_squared)
