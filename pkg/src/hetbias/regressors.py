"""Standardized regressor sequences and moment-matched generation.

Every other module works with the centered, standardized values
``z_t = (x_t - mean(x)) / s`` where ``s**2`` is the divide-by-T second
central moment. Moments are accumulated with :func:`math.fsum`, so results
do not depend on summation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstantRegressor,
    IncompatibleShape,
    InfeasibleMoments,
    MomentMatchFailed,
    TooShort,
)

__all__ = [
    "RegressorSequence",
    "MomentTarget",
    "standardize",
    "three_point_sequence",
    "generate_with_moments",
    "sample_moments",
]

MAX_MATCH_ITER = 200
_MOMENT_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


def _mean(values) -> float:
    return math.fsum(values) / len(values)


def sample_moments(z: np.ndarray) -> tuple[float, float, float, float]:
    """Return the first four raw sample moments ``(EZ, EZ^2, EZ^3, EZ^4)``."""
    z = np.asarray(z, dtype=np.float64)
    z2 = z * z
    return (_mean(z), _mean(z2), _mean(z2 * z), _mean(z2 * z2))


@dataclass(frozen=True)
class RegressorSequence:
    """A single regressor, centered and scaled to unit second moment.

    Attributes
    ----------
    raw : ndarray
        Original values ``x_t``.
    z : ndarray
        Standardized values; ``mean(z) == 0`` and ``mean(z**2) == 1``.
    s_squared : float
        ``(1/T) * sum((x_t - mean(x))**2)``.
    skewness, kurtosis : float
        ``EZ^3`` and ``EZ^4`` of the standardized sequence.
    """

    raw: np.ndarray
    z: np.ndarray
    s_squared: float
    skewness: float
    kurtosis: float
    t_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t_count", int(self.z.shape[0]))

    @property
    def s(self) -> float:
        return math.sqrt(self.s_squared)

    @property
    def centered(self) -> np.ndarray:
        """Regressor in original units with the mean removed (``s * z``)."""
        return self.s * self.z

    def __len__(self) -> int:
        return self.t_count


@dataclass(frozen=True)
class MomentTarget:
    skewness_target: float
    kurtosis_target: float
    tolerance: float = 1e-8

    def __post_init__(self):
        floor = 1.0 + self.skewness_target**2 + self.tolerance
        if not self.kurtosis_target >= floor:
            raise InfeasibleMoments(
                f"kurtosis {self.kurtosis_target} infeasible for skewness "
                f"{self.skewness_target}: need at least {floor}"
            )


def standardize(raw) -> RegressorSequence:
    """Center and scale ``raw`` (divide-by-T standard deviation).

    Raises
    ------
    TooShort
        Fewer than three observations.
    ConstantRegressor
        All values equal to within 1e-14 relative.
    """
    x = np.asarray(raw, dtype=np.float64).ravel()
    if x.shape[0] < 3:
        raise TooShort(f"need at least 3 observations, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("regressor contains non-finite values")
    spread = float(x.max() - x.min())
    if spread <= 1e-14 * float(np.max(np.abs(x))) or spread == 0.0:
        raise ConstantRegressor("regressor is constant")

    xc = x - _mean(x)
    s2 = _mean(xc * xc)
    if not s2 > 0.0:
        raise ConstantRegressor("regressor has zero variance")
    z = xc / math.sqrt(s2)
    m1, m2, m3, m4 = sample_moments(z)
    # Re-verify the construction; rounding alone cannot break these.
    if abs(m1) > _MOMENT_TOL or abs(m2 - 1.0) > _MOMENT_TOL:
        raise ConstantRegressor("regressor too close to constant to standardize")
    return RegressorSequence(raw=_frozen(x), z=_frozen(z), s_squared=s2,
                             skewness=m3, kurtosis=m4)


def three_point_sequence(t_count: int, m: float) -> RegressorSequence:
    """Symmetric regressor taking values -m, 0, +m.

    The first and last ``k = T / (2 m**2)`` entries are ``-m`` and ``+m``,
    the rest zero. The result has zero skewness and kurtosis ``m**2``.
    """
    if m <= 1.0:
        raise IncompatibleShape(f"m must exceed 1, got {m}")
    k_real = t_count / (2.0 * m * m)
    k = int(round(k_real))
    if k < 1 or abs(k_real - k) > 1e-12 * max(1.0, k_real):
        raise IncompatibleShape(
            f"T/(2 m^2) = {k_real!r} is not a positive integer")
    x = np.zeros(t_count)
    x[:k] = -m
    x[t_count - k:] = m
    return standardize(x)


def _standardized(v: np.ndarray) -> np.ndarray:
    vc = v - _mean(v)
    return vc / math.sqrt(_mean(vc * vc))


def _cubic_moments(coef: np.ndarray, v: np.ndarray) -> np.ndarray:
    c, d = coef
    z = _standardized(v + c * v * v + d * v * v * v)
    _, _, m3, m4 = sample_moments(z)
    return np.array([m3, m4])


def _fit_cubic(v: np.ndarray, target: np.ndarray, budget: int):
    """Damped Newton on the sample moments of ``v + c v^2 + d v^3``.

    The linear coefficient is pinned at 1 since restandardization removes
    scale. Returns ``(coef, iterations_used, converged)``.
    """
    coef = np.zeros(2)
    resid = _cubic_moments(coef, v) - target
    h = 1e-7
    for it in range(budget):
        if np.max(np.abs(resid)) < 1e-13:
            return coef, it, True
        jac = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            jac[:, j] = (_cubic_moments(coef + e, v)
                         - _cubic_moments(coef - e, v)) / (2 * h)
        step = np.linalg.lstsq(jac, -resid, rcond=None)[0]
        lam = 1.0
        norm = np.max(np.abs(resid))
        while lam > 1e-4:
            trial = coef + lam * step
            trial_resid = _cubic_moments(trial, v) - target
            if np.max(np.abs(trial_resid)) < norm:
                break
            lam *= 0.5
        else:
            # Step length collapsed: the cubic family cannot reach the target.
            return coef, it + 1, False
        coef, resid = trial, trial_resid
    return coef, budget, bool(np.max(np.abs(resid)) < 1e-13)


def _moment_residual(z: np.ndarray, skew: float, kurt: float) -> np.ndarray:
    m1, m2, m3, m4 = sample_moments(z)
    return np.array([m1, m2 - 1.0, m3 - skew, m4 - kurt])


def _project_moments(z: np.ndarray, skew: float, kurt: float, budget: int):
    """Smallest-change Gauss-Newton projection of ``z`` onto the moment set."""
    t = z.shape[0]
    resid = _moment_residual(z, skew, kurt)
    for it in range(budget):
        norm = np.max(np.abs(resid))
        if norm < 1e-13:
            return z, it, True
        jac = np.vstack([np.ones(t), 2 * z, 3 * z * z, 4 * z**3]) / t
        step = -np.linalg.lstsq(jac, resid, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            trial = z + lam * step
            trial_resid = _moment_residual(trial, skew, kurt)
            if np.max(np.abs(trial_resid)) < norm:
                break
            lam *= 0.5
        else:
            return z, it + 1, False
        z, resid = trial, trial_resid
    return z, budget, bool(np.max(np.abs(resid)) < 1e-13)


def generate_with_moments(t_count: int, target: MomentTarget,
                          seed) -> RegressorSequence:
    """Random regressor whose *sample* skewness and kurtosis hit ``target``.

    Draws ``T`` standard normals from ``numpy.random.default_rng(seed)``
    (PCG64; ``seed`` may be an int or a sequence of ints), fits a Fleishman-style cubic ``v + c v^2 + d v^3`` to the sample
    moments by damped Newton, and restandardizes. Targets outside the cubic
    family's reach (e.g. skewness 1 with kurtosis 3) are finished by a
    minimum-norm Gauss-Newton correction of the sample values themselves.
    The iteration budget of 200 is shared between both stages.
    """
    if t_count < 8:
        raise TooShort(f"need T >= 8 for moment matching, got {t_count}")
    if isinstance(seed, np.random.Generator):
        raise TypeError("pass an integer seed, not a Generator")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(t_count)
    goal = np.array([target.skewness_target, target.kurtosis_target])

    coef, used, ok = _fit_cubic(v, goal, MAX_MATCH_ITER)
    c, d = coef
    z = _standardized(v + c * v * v + d * v * v * v)
    if not ok:
        z, more, ok = _project_moments(z, *goal, MAX_MATCH_ITER - used)
    seq = standardize(z)
    if not ok or (abs(seq.skewness - goal[0]) > target.tolerance
                  or abs(seq.kurtosis - goal[1]) > target.tolerance):
        raise MomentMatchFailed(
            f"could not match skewness={goal[0]}, kurtosis={goal[1]} "
            f"for T={t_count}, seed={seed}")
    return seq
