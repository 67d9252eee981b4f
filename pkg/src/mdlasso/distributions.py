"""Symmetric error-law descriptions: tail probabilities, densities, and the
damped second moment that drives the moment-based gradient constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, erfcx, stdtr

DISTRIBUTION_KINDS = ("normal", "laplace", "gauss_mixture", "student_t", "cauchy")

# fixed contaminated-normal mixture: 0.9 N(0,1) + 0.1 N(0,15^2), rescaled so
# the result has unit variance
_MIX_PROB = 0.9
_MIX_SD_LARGE = 15.0
_MIX_NORMALIZER = math.sqrt(0.9 * 1.0 + 0.1 * _MIX_SD_LARGE**2)

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# beyond this ratio of c to squared scale the closed Laplace form cancels
# catastrophically, so a three-term large-c series takes over
_LAPLACE_SERIES_RATIO = 1e4


@dataclass(frozen=True)
class ErrorDistribution:
    """A zero-centered symmetric error law.

    ``scale`` is the standard deviation for ``normal``, the scale parameter
    for ``laplace`` and ``cauchy``, and unused by the fixed unit-variance
    ``gauss_mixture``.  ``df`` applies only to ``student_t``.
    """

    kind: str
    scale: float = 1.0
    df: float = 4.0

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(f"unknown error distribution kind {self.kind!r}")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError("scale must be positive and finite")
        if not (self.df > 0.0 and math.isfinite(self.df)):
            raise ValueError("df must be positive and finite")


def normal(sigma=1.0):
    return ErrorDistribution("normal", scale=float(sigma))


def laplace(scale=1.0):
    return ErrorDistribution("laplace", scale=float(scale))


def cauchy(scale=1.0):
    return ErrorDistribution("cauchy", scale=float(scale))


def student_t(df=4.0):
    return ErrorDistribution("student_t", df=float(df))


def gauss_mixture():
    return ErrorDistribution("gauss_mixture")


def has_finite_variance(dist: ErrorDistribution) -> bool:
    if dist.kind == "cauchy":
        return False
    if dist.kind == "student_t":
        return dist.df > 2.0
    return True


def tail_prob(dist: ErrorDistribution, gamma: float) -> float:
    """P(|eta| >= gamma) under the error law."""
    gamma = float(gamma)
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise ValueError("gamma must be nonnegative and finite")
    if dist.kind == "normal":
        return float(erfc(gamma / (dist.scale * _SQRT2)))
    if dist.kind == "laplace":
        return math.exp(-gamma / dist.scale)
    if dist.kind == "cauchy":
        return 1.0 - (2.0 / math.pi) * math.atan(gamma / dist.scale)
    if dist.kind == "student_t":
        return float(2.0 * stdtr(dist.df, -gamma))
    z = gamma * _MIX_NORMALIZER
    small = erfc(z / _SQRT2)
    large = erfc(z / (_MIX_SD_LARGE * _SQRT2))
    return float(_MIX_PROB * small + (1.0 - _MIX_PROB) * large)


def pdf(dist: ErrorDistribution, x):
    """Density of the error law, vectorized over ``x``."""
    x = np.asarray(x, dtype=float)
    if dist.kind == "normal":
        s = dist.scale
        out = np.exp(-0.5 * (x / s) ** 2) / (s * _SQRT2PI)
    elif dist.kind == "laplace":
        out = np.exp(-np.abs(x) / dist.scale) / (2.0 * dist.scale)
    elif dist.kind == "cauchy":
        s = dist.scale
        out = 1.0 / (math.pi * s * (1.0 + (x / s) ** 2))
    elif dist.kind == "student_t":
        nu = dist.df
        coef = math.gamma((nu + 1.0) / 2.0) / (
            math.sqrt(nu * math.pi) * math.gamma(nu / 2.0)
        )
        out = coef * (1.0 + x * x / nu) ** (-(nu + 1.0) / 2.0)
    else:
        z = x * _MIX_NORMALIZER
        small = np.exp(-0.5 * z * z) / _SQRT2PI
        large = np.exp(-0.5 * (z / _MIX_SD_LARGE) ** 2) / (_SQRT2PI * _MIX_SD_LARGE)
        out = _MIX_NORMALIZER * (_MIX_PROB * small + (1.0 - _MIX_PROB) * large)
    if out.ndim == 0:
        return float(out)
    return out


def damped_second_moment(dist: ErrorDistribution, c: float) -> float:
    """E[eta^2 exp(-eta^2 / c)] under the error law.

    Closed forms for normal and laplace; adaptive quadrature otherwise.  The
    integrand is bounded by c/e, so the moment exists even when the variance
    of the law does not.
    """
    c = float(c)
    if not (c > 0.0 and math.isfinite(c)):
        raise ValueError("c must be positive and finite")
    if dist.kind == "normal":
        s2 = dist.scale**2
        return (c / (2.0 * s2 + c)) ** 1.5 * s2
    if dist.kind == "laplace":
        return _laplace_damped_moment(dist.scale, c)
    return _quadrature_moment(dist, c)


def _laplace_damped_moment(b: float, c: float) -> float:
    ratio = c / (b * b)
    if ratio >= _LAPLACE_SERIES_RATIO:
        b2 = b * b
        return 2.0 * b2 - 24.0 * b2 * b2 / c + 360.0 * b2**3 / (c * c)
    # exact form; erfcx keeps the Mills-ratio product stable
    lead = (
        (_SQRT2PI / (2.0 * b))
        * (0.5 * c) ** 1.5
        * (1.0 + 0.5 * ratio)
        * erfcx(math.sqrt(c) / (2.0 * b))
    )
    return lead - c * c / (4.0 * b * b)


def _quadrature_moment(dist: ErrorDistribution, c: float) -> float:
    # the damping factor kills everything beyond a few sqrt(c), whatever the
    # tail of the law does
    upper = 10.0 * (math.sqrt(c) + 1.0)

    def integrand(x):
        return x * x * math.exp(-x * x / c) * pdf(dist, x)

    value, abserr = quad(
        integrand,
        0.0,
        upper,
        points=[math.sqrt(c)],
        epsabs=1e-12,
        epsrel=1e-9,
        limit=200,
    )
    if abserr > 1e-6 * max(1.0, abs(value)):
        raise RuntimeError("damped-moment quadrature did not converge")
    return 2.0 * value
