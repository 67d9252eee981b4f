"""Robust log-sum-exp regression loss, its weights, derivatives, diagnostics.

The central object is the loss

    L(beta) = -c * log( sum_i exp(-r_i^2 / (2c)) ),   r_i = y_i - <X_i, beta>,

whose gradient is a softmax-weighted least squares gradient.  Large
residuals receive exponentially small weight, which caps the influence of
outliers; c -> infinity recovers the squared loss and c -> 0 keeps only
the best-fitting observation.

All exponentials are evaluated with max-shift stabilization so residuals
up to 1e150 in magnitude neither overflow nor underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Coefficients, Dataset, residuals

__all__ = [
    "MdLossParams",
    "md_loss",
    "md_excess_loss",
    "md_weights",
    "md_gradient",
    "md_hessian_quadratic_form",
    "empirical_md_criterion",
    "influence",
]


@dataclass(frozen=True)
class MdLossParams:
    """Scaling parameter ``c`` of the loss, in units of squared residual."""

    c: float

    def __post_init__(self):
        c = float(self.c)
        if not math.isfinite(c) or c <= 0:
            raise ValueError(f"c must be finite and positive, got {c}")
        object.__setattr__(self, "c", c)


def _shifted_exponents(residual_vector, c):
    """Return (a - max(a), max(a)) for a_i = -r_i^2 / (2c)."""
    r = np.asarray(residual_vector, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("residuals must be a nonempty 1-d array")
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals contain non-finite entries")
    a = -np.square(r) / (2.0 * c)
    if not np.all(np.isfinite(a)):
        # |r| beyond ~1e154 squares to inf; nothing sensible remains
        raise ValueError("residuals too large to square in double precision")
    m = float(a.max())
    return a - m, m


def md_weights(residual_vector: np.ndarray, params: MdLossParams) -> np.ndarray:
    """Softmax weights w_i proportional to exp(-r_i^2 / (2c)).

    The weights lie in [0, 1] and sum to 1; they concentrate on the
    smallest |residual| as c -> 0 and become uniform as c -> infinity.
    """
    shifted, _ = _shifted_exponents(residual_vector, params.c)
    u = np.exp(shifted)
    return u / u.sum()


def md_excess_loss(residual_vector: np.ndarray, c: float) -> float:
    """Loss above its perfect-fit floor: L(beta) + c*log(n), always >= 0.

    Evaluated as -c*m - c*log1p(mean(expm1(a_i - m))) with a_i = -r_i^2/(2c)
    and m = max(a_i).  The expm1/log1p route keeps full relative precision
    when c is huge and every a_i is tiny, where the raw loss is dominated
    by the constant -c*log(n); the max shift keeps the small-c / large
    residual regime finite.  As c -> infinity the value tends to
    mean(r^2)/2.
    """
    shifted, m = _shifted_exponents(residual_vector, c)
    # mean(exp(shifted)) = 1 + mean(expm1(shifted)); the max entry
    # contributes expm1(0) = 0, so the mean stays above -1 and log1p is
    # finite
    mean_expm1 = float(np.mean(np.expm1(shifted)))
    return -c * m - c * math.log1p(mean_expm1)


def md_loss(data: Dataset, coef: Coefficients, params: MdLossParams) -> float:
    """Evaluate the robust loss L(beta) = -c*log(sum_i exp(-r_i^2/(2c)))."""
    r = residuals(data, coef)
    return md_excess_loss(r, params.c) - params.c * math.log(data.n)


def md_gradient(data: Dataset, coef: Coefficients, params: MdLossParams) -> np.ndarray:
    """Gradient of the loss: -X'(w * r) with w the softmax weights."""
    r = residuals(data, coef)
    w = md_weights(r, params)
    return -(data.X.T @ (w * r))


def md_hessian_quadratic_form(
    data: Dataset,
    coef: Coefficients,
    params: MdLossParams,
    direction: np.ndarray,
) -> float:
    """Quadratic form of the loss Hessian along ``direction``.

    Equals sum_i w_i (1 - r_i^2/c) s_i^2 + (1/c)(sum_i w_i r_i s_i)^2
    with s = X @ direction.  Negative values flag local non-convexity.
    """
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != (data.p,):
        raise ValueError(f"direction must have length {data.p}")
    r = residuals(data, coef)
    w = md_weights(r, params)
    s = data.X @ direction
    c = params.c
    curvature = float(np.sum(w * (1.0 - r * r / c) * s * s))
    coupling = float(np.sum(w * r * s)) ** 2 / c
    return curvature + coupling


def empirical_md_criterion(data: Dataset, coef: Coefficients, sigma: float) -> float:
    """Empirical distance criterion -(2/n) * sum_i phi_sigma(r_i).

    phi_sigma is the N(0, sigma^2) density.  For c = sigma^2 the criterion
    ranks coefficient vectors exactly as the robust loss does (monotone
    transform), including the constant prefactor.
    """
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0:
        raise ValueError(f"sigma must be finite and positive, got {sigma}")
    r = residuals(data, coef)
    dens = np.exp(-np.square(r) / (2.0 * sigma * sigma))
    return float(-2.0 / (data.n * math.sqrt(2.0 * math.pi) * sigma) * dens.sum())


def influence(residual: float, other_mass: float, params: MdLossParams) -> float:
    """Influence of a single residual given the mass d of the others.

    I(r) = r / (1 + d*exp(r^2/(2c))), evaluated as r*e^{-q}/(e^{-q} + d)
    with q = r^2/(2c) so large residuals underflow to 0 instead of
    overflowing.  The function is odd and redescending.
    """
    other_mass = float(other_mass)
    if not math.isfinite(other_mass) or other_mass <= 0:
        raise ValueError(f"other_mass must be finite and positive, got {other_mass}")
    r = float(residual)
    q = r * r / (2.0 * params.c)
    damp = math.exp(-q)
    return r * damp / (damp + other_mass)
