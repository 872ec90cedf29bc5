"""Robust slope inference for intercept-plus-one-regressor models."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .bias import EstimatorSpec, estimator_value
from .errors import DegenerateSampleSize, LengthMismatch, RankDeficient, TooShort
from .minimax import (
    a_star_analytic,
    a_star_asymptotic,
    worst_case_negative,
    worst_case_positive,
)
from .regressors import RegressorSequence, standardize

__all__ = [
    "RegressionDataset",
    "OlsFit",
    "EstimatorEntry",
    "HccmeReport",
    "Verdict",
    "ScreeningVerdict",
    "ols_fit",
    "hccme_report",
    "screening",
    "INTERVAL_MULTIPLIER",
]

INTERVAL_MULTIPLIER = 2.0
RANK_TOL = 1e-10


@dataclass(frozen=True)
class RegressionDataset:
    y: np.ndarray
    x: np.ndarray
    w_columns: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64).ravel()
        x = np.asarray(self.x, dtype=np.float64).ravel()
        if y.shape != x.shape:
            raise LengthMismatch(f"y has {y.shape[0]} rows, x has {x.shape[0]}")
        if y.shape[0] < 3:
            raise TooShort("need at least 3 observations")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        if self.w_columns is not None:
            w = np.asarray(self.w_columns, dtype=np.float64)
            if w.ndim == 1:
                w = w[:, None]
            if w.shape[0] != y.shape[0]:
                raise LengthMismatch("control columns must have T rows")
            object.__setattr__(self, "w_columns", w)

    @property
    def t_count(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class OlsFit:
    beta1: float
    beta2: float
    residuals: np.ndarray
    reg: RegressorSequence


def ols_fit(data: RegressionDataset) -> OlsFit:
    """Least squares of y on a constant and x, using the centered regressor."""
    reg = standardize(data.x)
    t = reg.t_count
    y = data.y
    xc = reg.centered
    ybar = math.fsum(y) / t
    beta2 = math.fsum(xc * y) / (t * reg.s_squared)
    xbar = math.fsum(reg.raw) / t
    beta1 = ybar - beta2 * xbar
    resid = (y - ybar) - beta2 * xc
    return OlsFit(beta1, beta2, resid, reg)


@dataclass(frozen=True)
class EstimatorEntry:
    label: str
    a: float
    variance_estimate: float
    std_error: float
    worst_case_bias_bound: Optional[float] = None


@dataclass(frozen=True)
class HccmeReport:
    beta1: float
    beta2: float
    t_count: int
    s_squared: float
    kurtosis_used: float
    a_star_used: float
    entries: tuple
    significance_interval: tuple
    significance_interval_finite: tuple
    significant: bool
    interval_rule: str
    bound_u: Optional[float] = None
    worst_case_bias_bound: Optional[float] = None
    degenerate_sample_size: bool = False

    def entry(self, label: str) -> EstimatorEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {
            "beta1": self.beta1,
            "beta2": self.beta2,
            "t": self.t_count,
            "s_squared": self.s_squared,
            "kurtosis_used": self.kurtosis_used,
            "a_star_used": self.a_star_used,
            "estimators": [
                {"label": e.label, "a": e.a, "variance_estimate": e.variance_estimate,
                 "std_error": e.std_error, "worst_case_bias_bound": e.worst_case_bias_bound}
                for e in self.entries
            ],
            "significance_interval": list(self.significance_interval),
            "significance_interval_finite": list(self.significance_interval_finite),
            "significant": self.significant,
            "interval_rule": self.interval_rule,
            "interval_multiplier": INTERVAL_MULTIPLIER,
            "bound_u": self.bound_u,
            "worst_case_bias_bound": self.worst_case_bias_bound,
            "degenerate_sample_size": self.degenerate_sample_size,
        }


def _interval(beta2: float, half: float) -> tuple[float, float]:
    return (beta2 - half, beta2 + half)


def _excludes_zero(interval) -> bool:
    lo, hi = interval
    return lo > 0.0 or hi < 0.0


def hccme_report(data: RegressionDataset, u_bound: float | None = None,
                 interval: str = "asymptotic") -> HccmeReport:
    """Variance estimates across the family plus the worst-case interval.

    ``significance_interval`` is ``beta2 +- 2 / (T s^2) *
    sqrt((1 + (K+1)/T) * sum(x_t^2 e_t^2))`` with ``x`` centered, i.e. the
    minimax scale in its large-T form ``a = K + 1``.
    ``significance_interval_finite`` replaces ``K + 1`` with the
    finite-sample minimax scale. ``interval`` picks which one decides
    ``significant``.
    """
    if interval not in ("asymptotic", "finite"):
        raise ValueError("interval must be 'asymptotic' or 'finite'")
    if u_bound is not None and not u_bound > 0:
        raise ValueError("u_bound must be positive")
    fit = ols_fit(data)
    reg = fit.reg
    t, k = reg.t_count, reg.kurtosis
    a_inf = a_star_asymptotic(k)
    degenerate = False
    try:
        a_fin = a_star_analytic(k, t)
    except DegenerateSampleSize:
        a_fin, degenerate = a_inf, True

    entries = []
    for label, a in (("EW", 0.0), ("Hinkley", 2.0),
                     ("MinimaxFinite", a_fin), ("MinimaxAsymptotic", a_inf)):
        v = estimator_value(EstimatorSpec(a), reg, fit.residuals)
        bound = None
        if u_bound is not None:
            bp, _ = worst_case_positive(a, reg, u_bound)
            bm, _ = worst_case_negative(a, reg, u_bound)
            bound = max(bp, -bm)
        entries.append(EstimatorEntry(label, a, v, math.sqrt(v), bound))

    by = {e.label: e for e in entries}
    ci_asym = _interval(fit.beta2, INTERVAL_MULTIPLIER * by["MinimaxAsymptotic"].std_error)
    ci_fin = _interval(fit.beta2, INTERVAL_MULTIPLIER * by["MinimaxFinite"].std_error)
    chosen = ci_asym if interval == "asymptotic" else ci_fin
    return HccmeReport(
        beta1=fit.beta1, beta2=fit.beta2, t_count=t, s_squared=reg.s_squared,
        kurtosis_used=k, a_star_used=a_fin, entries=tuple(entries),
        significance_interval=ci_asym, significance_interval_finite=ci_fin,
        significant=_excludes_zero(chosen), interval_rule=interval,
        bound_u=u_bound,
        worst_case_bias_bound=by["MinimaxFinite"].worst_case_bias_bound,
        degenerate_sample_size=degenerate,
    )


class Verdict(str, Enum):
    SIGNIFICANT = "Significant"
    INSIGNIFICANT = "Insignificant"
    AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class ScreeningVerdict:
    verdict: Verdict
    alone: HccmeReport
    purged: Optional[HccmeReport] = None

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "step_alone": self.alone.as_dict(),
            "step_purged": None if self.purged is None else self.purged.as_dict(),
        }


def _purge(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Residuals of y on a constant and the control columns."""
    design = np.column_stack([np.ones(y.shape[0]), w])
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficient("control design (with intercept) is singular")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return y - design @ coef


def screening(data: RegressionDataset, u_bound: float | None = None,
              interval: str = "asymptotic") -> ScreeningVerdict:
    """Three-step significance triage of x in a model with controls.

    1. x alone insignificant -> Insignificant.
    2. Purge y of the controls; x significant for the purged response
       -> Significant.
    3. Otherwise Ambiguous.
    """
    if data.w_columns is None or data.w_columns.shape[1] == 0:
        raise ValueError("screening needs at least one control column")
    y_star = _purge(data.y, data.w_columns)
    alone = hccme_report(data, u_bound, interval)
    if not alone.significant:
        return ScreeningVerdict(Verdict.INSIGNIFICANT, alone)
    purged = hccme_report(RegressionDataset(y_star, data.x), u_bound, interval)
    verdict = Verdict.SIGNIFICANT if purged.significant else Verdict.AMBIGUOUS
    return ScreeningVerdict(verdict, alone, purged)
