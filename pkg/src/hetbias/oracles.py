"""Dense-matrix reference computations.

These deliberately take the slow road (explicit design matrix, explicit
inverse, explicit hat matrix) so they share no code path with the O(T)
routines they check. Capped at T <= 1000.
"""
from __future__ import annotations

import itertools

import numpy as np

DENSE_MAX_T = 1000


def _design(raw) -> np.ndarray:
    x = np.asarray(raw, dtype=np.float64)
    if x.shape[0] > DENSE_MAX_T:
        raise ValueError(f"dense oracle limited to T <= {DENSE_MAX_T}")
    return np.column_stack([np.ones_like(x), x])


def hat_matrix(raw) -> np.ndarray:
    X = _design(raw)
    return X @ np.linalg.inv(X.T @ X) @ X.T


def sandwich_variance(raw, sigma_sq) -> float:
    """Entry (2, 2) of ``(X'X)^-1 X' Sigma X (X'X)^-1``."""
    X = _design(raw)
    bread = np.linalg.inv(X.T @ X)
    meat = X.T @ np.diag(np.asarray(sigma_sq, dtype=np.float64)) @ X
    return float((bread @ meat @ bread)[1, 1])


def residual_covariance(raw, sigma_sq) -> np.ndarray:
    """``(I - H) Sigma (I - H)``: covariance of the OLS residuals."""
    m = np.eye(len(raw)) - hat_matrix(raw)
    return m @ np.diag(np.asarray(sigma_sq, dtype=np.float64)) @ m.T


def expected_sq_residuals(raw, sigma_sq) -> np.ndarray:
    return np.diag(residual_covariance(raw, sigma_sq)).copy()


def bias(a: float, raw, sigma_sq) -> float:
    """Bias of the scaled estimator from the dense residual covariance.

    Uses the sandwich form of the estimator with ``diag((1 + a/T) E e^2)``
    as the meat, minus the true sandwich variance.
    """
    t = len(raw)
    ee = expected_sq_residuals(raw, sigma_sq)
    return sandwich_variance(raw, (1.0 + a / t) * ee) - sandwich_variance(raw, sigma_sq)


def vertex_extremes(a: float, raw, u: float = 1.0) -> tuple[float, float]:
    """Max and min of the bias over every pattern in ``{0, U}^T``.

    Exhaustive, 2^T patterns. The bias is evaluated through the dense
    residual covariance, which is linear in the variances: precompute the
    per-observation response and sweep all vertices at once.
    """
    x = np.asarray(raw, dtype=np.float64)
    t = x.shape[0]
    if t > 16:
        raise ValueError("vertex enumeration limited to T <= 16")
    basis = np.array([bias(a, x, np.eye(t)[i] * u) for i in range(t)])
    # Check linearity at a random interior point so a non-linear bug in
    # the dense route cannot hide behind the basis decomposition.
    probe = np.linspace(0.1, 0.9, t) * u
    assert np.isclose(bias(a, x, probe), basis @ (probe / u), rtol=1e-9, atol=1e-300)
    verts = np.array(list(itertools.product((0.0, 1.0), repeat=t)))
    values = verts @ basis
    return float(values.max()), float(values.min())


def ols(y, X) -> np.ndarray:
    """Coefficients from the normal equations with an explicit solve."""
    X = np.asarray(X, dtype=np.float64)
    return np.linalg.solve(X.T @ X, X.T @ np.asarray(y, dtype=np.float64))


def hc0_slope_variance(raw, residuals) -> float:
    """Textbook HC0 sandwich ``(X'X)^-1 X' diag(e^2) X (X'X)^-1`` entry (2, 2)."""
    e = np.asarray(residuals, dtype=np.float64)
    return sandwich_variance(raw, e * e)
