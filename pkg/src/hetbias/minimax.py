"""Worst-case bias over bounded heteroskedasticity and the minimax scale.

With every ``sigma_t^2`` restricted to ``[0, U]`` the bias is linear in the
variances, so its extremes sit at vertices of the box: put ``U`` wherever the
quartic weight ``p(z_t)`` has the right sign and zero elsewhere. The
minimax ``a`` is where the largest positive bias equals the magnitude of the
largest negative one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bias import build_polynomial
from .errors import DegenerateSampleSize, NoBracket
from .regressors import RegressorSequence

__all__ = [
    "Normalization",
    "Direction",
    "LeastFavorableConfig",
    "BiasProfile",
    "normalize",
    "worst_case_positive",
    "worst_case_negative",
    "max_bias",
    "minimax_a_numeric",
    "a_star_analytic",
    "a_star_asymptotic",
    "bias_profile",
    "normal_pdf",
    "normal_cdf",
    "normal_asymptotic_root",
    "normal_asymptotic_biases",
    "normal_asymptotic_profile",
    "asymptotic_performance",
    "three_point_root",
    "three_point_biases",
]

BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200


class Normalization(str, Enum):
    """Scale on which a bias is reported.

    ``RAW`` is the bias itself; ``T2S2_OVER_U`` multiplies by ``T^2 s^2 / U``
    (finite limit as T grows); ``T_OVER_U`` multiplies by ``T / U``.
    """

    RAW = "raw"
    T2S2_OVER_U = "t2s2-over-u"
    T_OVER_U = "t-over-u"


class Direction(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def normalize(value, normalization, t_count: int, s_squared: float, u: float):
    norm = Normalization(normalization)
    if norm is Normalization.RAW:
        return value
    if norm is Normalization.T2S2_OVER_U:
        return value * (t_count * t_count * s_squared / u)
    return value * (t_count / u)


@dataclass(frozen=True)
class LeastFavorableConfig:
    sigma_sq: np.ndarray
    direction: Direction

    def as_pattern(self):
        from .bias import VariancePattern

        return VariancePattern(self.sigma_sq)


def _weights(a: float, reg: RegressorSequence) -> np.ndarray:
    return build_polynomial(a, reg)(reg.z)


def _extreme(a, reg, u, positive: bool):
    if not u > 0:
        raise ValueError(f"variance bound must be positive, got {u}")
    w = _weights(a, reg)
    mask = w > 0 if positive else w < 0
    sigma = np.where(mask, float(u), 0.0)
    t = reg.t_count
    value = math.fsum(w[mask]) * u / (t**3 * reg.s_squared)
    direction = Direction.POSITIVE if positive else Direction.NEGATIVE
    return value, LeastFavorableConfig(sigma, direction)


def worst_case_positive(a: float, reg: RegressorSequence, u: float = 1.0):
    """Largest attainable bias and the variance pattern that attains it."""
    return _extreme(a, reg, u, positive=True)


def worst_case_negative(a: float, reg: RegressorSequence, u: float = 1.0):
    """Most negative attainable bias and the variance pattern attaining it."""
    return _extreme(a, reg, u, positive=False)


def max_bias(a: float, reg: RegressorSequence, u: float = 1.0) -> float:
    """``max(B+, -B-)``: the worst absolute bias at scale ``a``."""
    bp, _ = worst_case_positive(a, reg, u)
    bm, _ = worst_case_negative(a, reg, u)
    return max(bp, -bm)


def _gap(a: float, reg: RegressorSequence, u: float) -> float:
    bp, _ = worst_case_positive(a, reg, u)
    bm, _ = worst_case_negative(a, reg, u)
    return bp + bm


def minimax_a_numeric(reg: RegressorSequence, u: float = 1.0,
                      a_max: float | None = None) -> float:
    """Locate the crossing of ``B+(a)`` and ``-B-(a)`` by bisection.

    The gap ``B+ + B-`` is continuous and piecewise linear in ``a``; the
    default upper bracket is ``4 (K + 2)``, doubled once if it does not
    straddle a sign change.
    """
    if a_max is None:
        a_max = 4.0 * (reg.kurtosis + 2.0)
    lo, hi = 0.0, float(a_max)
    g_lo = _gap(lo, reg, u)
    if g_lo == 0.0:
        return 0.0
    g_hi = _gap(hi, reg, u)
    if np.sign(g_hi) == np.sign(g_lo):
        hi *= 2.0
        g_hi = _gap(hi, reg, u)
        if np.sign(g_hi) == np.sign(g_lo):
            raise NoBracket(f"no sign change of B+ + B- on [0, {hi}]")
    if g_hi == 0.0:
        return hi
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        g_mid = _gap(mid, reg, u)
        if g_mid == 0.0:
            return mid
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if hi - lo <= BISECT_TOL:
            break
    return 0.5 * (lo + hi)


def a_star_analytic(kurtosis: float, t_count: float) -> float:
    """Finite-sample minimax scale ``(K + 1) / (1 - (K + 1) / T)``."""
    k1 = kurtosis + 1.0
    if k1 >= t_count:
        raise DegenerateSampleSize(f"K + 1 = {k1} must be below T = {t_count}")
    return k1 / (1.0 - k1 / t_count)


def a_star_asymptotic(kurtosis: float) -> float:
    return kurtosis + 1.0


@dataclass(frozen=True)
class BiasProfile:
    a_grid: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    bound_u: float
    normalization: Normalization
    a_star: float | None = None
    b_plus_at_star: float | None = None
    b_minus_at_star: float | None = None

    def __post_init__(self):
        if np.any(np.diff(self.a_grid) <= 0):
            raise ValueError("a grid must be strictly increasing")
        if np.any(self.b_plus < 0) or np.any(self.b_minus > 0):
            raise ValueError("b_plus must be >= 0 and b_minus <= 0")


def bias_profile(reg: RegressorSequence, a_grid, u: float = 1.0,
                 normalization=Normalization.T_OVER_U,
                 with_crossing: bool = True) -> BiasProfile:
    """Evaluate both worst-case curves on a grid of scale parameters."""
    grid = np.asarray(a_grid, dtype=np.float64)
    norm = Normalization(normalization)

    def scaled(v):
        return normalize(v, norm, reg.t_count, reg.s_squared, u)

    bp = np.array([scaled(worst_case_positive(a, reg, u)[0]) for a in grid])
    bm = np.array([scaled(worst_case_negative(a, reg, u)[0]) for a in grid])
    star = bps = bms = None
    if with_crossing:
        star = minimax_a_numeric(reg, u)
        bps = scaled(worst_case_positive(star, reg, u)[0])
        bms = scaled(worst_case_negative(star, reg, u)[0])
    return BiasProfile(grid, bp, bm, float(u), norm, star, bps, bms)


# -- normal regressor, T -> infinity ------------------------------------------

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_cdf(x: float) -> float:
    # erfc keeps full relative accuracy in both tails.
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_asymptotic_root(a: float) -> float:
    """Positive root in ``lam^2`` of ``1 + (1 + a) lam^2 - 2 lam^4``."""
    if not a >= 0:
        raise ValueError("a must be non-negative")
    return (1.0 + a + math.sqrt(8.0 + (1.0 + a) ** 2)) / 4.0


def normal_asymptotic_biases(a: float) -> tuple[float, float]:
    """Limits of ``T^2 B+/U`` and ``-T^2 B-/U`` for an N(0, 1) regressor."""
    r = normal_asymptotic_root(a)
    q = math.sqrt(r)
    common = 2.0 * (2.0 * r - a + 5.0) * q * normal_pdf(q) + 2.0 * (a - 4.0) * normal_cdf(q)
    return common - a + 4.0, common - 2.0 * a + 8.0


def normal_asymptotic_profile(a_grid) -> BiasProfile:
    grid = np.asarray(a_grid, dtype=np.float64)
    pairs = [normal_asymptotic_biases(a) for a in grid]
    bp = np.array([p for p, _ in pairs])
    bm = -np.array([m for _, m in pairs])
    star_p, star_m = normal_asymptotic_biases(4.0)
    return BiasProfile(grid, bp, bm, 1.0, Normalization.T2S2_OVER_U,
                       4.0, star_p, -star_m)


def asymptotic_performance(kurtosis: float) -> tuple[float, float, float]:
    """Large-T worst-case bias of Eicker-White, Hinkley and minimax.

    Each entry is ``max(B+, -B-)`` in the ``T^2 s^2 / U`` scale for a
    symmetric three-point regressor with the given kurtosis.
    """
    if not kurtosis >= 1:
        raise ValueError("kurtosis must be at least 1")
    k = kurtosis
    return (k + 2.0 - 1.0 / k, k - 1.0 / k, 1.0 - 1.0 / k)


# -- symmetric three-point regressor -----------------------------------------

def three_point_root(a: float, t_count: float) -> float:
    """Positive root in ``M^2`` of ``p(M)`` for the three-point regressor.

    ``p(+-M) = c + (a - 2c) M^2 - c M^4`` with ``c = 1 + a/T``; the weight on
    the outer points is negative exactly when ``M^2`` exceeds this root.
    """
    if not a >= 0:
        raise ValueError("a must be non-negative")
    c = 1.0 + a / t_count
    b = a - 2.0 * c
    return (b + math.sqrt(b * b + 4.0 * c * c)) / (2.0 * c)


def three_point_biases(a: float, t_count: int, m_squared: float,
                       u: float = 1.0) -> tuple[float, float]:
    """Closed-form ``(B+, B-)`` for the three-point regressor.

    Valid while the outer-point weight ``p(M)`` is non-positive, which holds
    for ``a < M^2 + 2 - 1/M^2``.
    """
    m2 = m_squared
    ta = a / t_count
    bp = ((m2 - 1.0) + ta * (m2 - 1.0)) * u / (m2 * t_count**2)
    neg = m2 * m2 + (2.0 - a) * m2 - 1.0 + ta * (m2 * m2 + 2.0 * m2 - 1.0)
    return bp, -neg * u / (m2 * t_count**2)

