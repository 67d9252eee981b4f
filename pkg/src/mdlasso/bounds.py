"""Finite-sample rate certificates for the damped-quadratic estimator:
gradient constants, restricted-curvature constants, and the derived
estimation-error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .data import Dataset
from .distributions import (
    ErrorDistribution,
    damped_second_moment,
    has_finite_variance,
    tail_prob,
)

# curvature-split constant 21/32 + 2 e^{-3/2}; the admissible tail mass is
# (21/32) divided by it, equivalently 1 / (1 + (64/21) e^{-3/2})
CURVATURE_CONSTANT = 21.0 / 32.0 + 2.0 * math.exp(-1.5)
TAIL_THRESHOLD = (21.0 / 32.0) / CURVATURE_CONSTANT
_EDGE_TERM = 2.0 * math.exp(-1.5)


class TailConditionError(ValueError):
    """The error law has too much mass beyond sqrt(c)/2 for the curvature
    guarantee to hold."""

    def __init__(self, kappa: float, threshold: float):
        self.kappa = float(kappa)
        self.threshold = float(threshold)
        super().__init__(
            f"tail probability {self.kappa:.6g} at sqrt(c)/2 is not below "
            f"the required threshold {self.threshold:.6g}"
        )


@dataclass(frozen=True)
class BoundInputs:
    """Problem constants the rate certificates are evaluated at.

    ``kappa1`` is the tail mass of the error law at 1, ``kappa_re`` the
    restricted-eigenvalue constant of the design, ``gamma`` the threshold
    of the tail-based gradient constant (defaults to sqrt(c)).
    """

    M: float
    kappa1: float
    kappa_re: float
    s: int
    p: int
    n: int
    c: float
    gamma: Optional[float] = None

    def __post_init__(self):
        for name in ("M", "kappa_re", "c"):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")
        if not 0.0 < self.kappa1 < 1.0:
            raise ValueError("kappa1 must lie strictly inside (0, 1)")
        for name in ("s", "p", "n"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        root = math.sqrt(self.c)
        if self.gamma is None:
            object.__setattr__(self, "gamma", root)
        elif not (0.0 <= self.gamma <= root):
            raise ValueError("gamma must lie in [0, sqrt(c)]")


class RscConstants(NamedTuple):
    kappa1_rsc: float
    kappa2_rsc: float
    condition_ok: bool


@dataclass(frozen=True)
class RateBound:
    """Estimation-error certificate: value = factor * sqrt(s log(p) / n).

    ``components`` holds (gradient_constant, rsc_denominator).
    """

    factor: float
    value: float
    components: tuple


def xi_bound(inputs: BoundInputs, dist: ErrorDistribution) -> float:
    """Gradient constant from the bounded-differences tail argument.

    At the default gamma = sqrt(c) the bracket collapses to c/e, which keeps
    the constant finite for every error law; heavier tails only shift mass
    between its two terms.
    """
    kappa_gamma = tail_prob(dist, inputs.gamma)
    g2 = inputs.gamma**2
    bracket = (1.0 - 2.0 * kappa_gamma) * g2 * math.exp(-g2 / inputs.c)
    bracket += 2.0 * inputs.c * kappa_gamma / math.e
    value = (inputs.M**2 / inputs.kappa1**2) * bracket * math.exp(1.0 / inputs.c)
    return math.sqrt(value)


def zeta_bound(inputs: BoundInputs, dist: ErrorDistribution) -> float:
    """Gradient constant from the damped second moment of the error law."""
    moment = damped_second_moment(dist, inputs.c)
    value = 4.0 * inputs.M**2 / inputs.kappa1**2 * moment * math.exp(1.0 / inputs.c)
    return math.sqrt(value)


def rsc_constants(inputs: BoundInputs, kappa_lambda_mu: float) -> RscConstants:
    """Curvature constants of the restricted region for a given tail mass.

    The constants are returned even when the tail test fails; the curvature
    constant is then nonpositive and ``condition_ok`` is False.
    """
    k = float(kappa_lambda_mu)
    if not 0.0 <= k <= 1.0:
        raise ValueError("kappa_lambda_mu must lie in [0, 1]")
    kappa1_rsc = 0.25 * inputs.kappa_re * (CURVATURE_CONSTANT * (1.0 - k) - _EDGE_TERM)
    kappa2_rsc = 97.0 * CURVATURE_CONSTANT * inputs.M**2 * math.sqrt(inputs.s)
    return RscConstants(kappa1_rsc, kappa2_rsc, bool(k < TAIL_THRESHOLD))


def rate_bound(inputs: BoundInputs, dist: ErrorDistribution, which: str) -> RateBound:
    """Estimation-error certificate.

    ``which`` selects the gradient constant: "lemma1" for the tail-based
    constant (preferred when the variance of the error law is undefined),
    "lemma2" for the moment-based one.
    """
    if which not in ("lemma1", "lemma2"):
        raise ValueError("which must be 'lemma1' or 'lemma2'")
    kappa_half = tail_prob(dist, math.sqrt(inputs.c) / 2.0)
    if kappa_half >= TAIL_THRESHOLD:
        raise TailConditionError(kappa_half, TAIL_THRESHOLD)
    if which == "lemma1":
        gradient_constant = xi_bound(inputs, dist)
    else:
        gradient_constant = zeta_bound(inputs, dist)
    denominator = (
        CURVATURE_CONSTANT * (1.0 - kappa_half) - _EDGE_TERM
    ) * inputs.kappa_re
    factor = 4.0 * gradient_constant / denominator
    value = factor * math.sqrt(inputs.s * math.log(inputs.p) / inputs.n)
    return RateBound(factor=factor, value=value, components=(gradient_constant, denominator))


def scaling_curve(dist: ErrorDistribution, c_grid, inputs: BoundInputs):
    """(c, factor) pairs of the rate certificate along a grid of c values.

    Laws with a finite variance use the moment-based constant, the rest the
    tail-based one; gamma is re-defaulted to sqrt(c) at every grid point.
    """
    which = "lemma2" if has_finite_variance(dist) else "lemma1"
    curve = []
    for c in c_grid:
        local = replace(inputs, c=float(c), gamma=None)
        curve.append((float(c), rate_bound(local, dist, which).factor))
    return curve


def min_c_for_rsc(dist: ErrorDistribution, kappa_threshold: float):
    """Smallest c whose curvature tail test clears the given threshold.

    The tail is evaluated at lam(c) = sqrt(c)/2 - c^{1/4}, which is positive
    only for c > 16; bisection to 1e-6 over (16, 1e6].  Returns the root and
    lam at the root.
    """
    threshold = float(kappa_threshold)
    if not 0.0 < threshold <= 1.0:
        raise ValueError("kappa_threshold must lie in (0, 1]")

    def lam(c):
        return math.sqrt(c) / 2.0 - c**0.25

    def feasible(c):
        value = lam(c)
        return value > 0.0 and tail_prob(dist, value) <= threshold

    lo, hi = 16.0, 1e6
    if not feasible(hi):
        raise ValueError("no feasible c up to 1e6 clears the threshold")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi, lam(hi)


def global_solution_radius(beta_star_l1: float, lambda_bar: float, M: float) -> float:
    """Smallest c certifying that every stationary point is a global one."""
    for name, value in (("beta_star_l1", beta_star_l1), ("lambda_bar", lambda_bar), ("M", M)):
        if not (float(value) >= 0.0 and math.isfinite(float(value))):
            raise ValueError(f"{name} must be nonnegative and finite")
    return (M * (beta_star_l1 + lambda_bar)) ** 2


def estimate_M(data: Dataset) -> float:
    """Largest absolute predictor entry."""
    return float(np.abs(data.X).max())


def psi_clip(z: float, a: float) -> float:
    """Two-branch clipping profile used by the curvature diagnostic."""
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ValueError("a must lie strictly inside (0, 1)")
    if z <= a * a:
        return (1.0 - a**2) * (1.0 - a**2 / 2.0)
    return -2.0 * math.exp(-1.5)


def estimate_kappa_re(data: Dataset, support, num_directions=200, seed=0) -> float:
    """Monte Carlo estimate of the restricted-eigenvalue constant.

    Random directions are pushed into the cone where the off-support l1 mass
    is at most three times the on-support mass; the minimum of the
    normalized curvature over the sample is reported.  A sampled minimum can
    only overestimate the true constant, so treat the result as a rough
    upper reading, not a certificate.
    """
    support = np.asarray(support, dtype=int)
    if support.size == 0:
        raise ValueError("support must be nonempty")
    rng = np.random.default_rng(seed)
    off = np.ones(data.p, dtype=bool)
    off[support] = False
    best = math.inf
    for _ in range(int(num_directions)):
        direction = rng.standard_normal(data.p)
        on_mass = float(np.abs(direction[support]).sum())
        off_mass = float(np.abs(direction[off]).sum())
        if off_mass > 3.0 * on_mass:
            direction[off] *= 3.0 * on_mass / off_mass
        quad_form = float(np.sum((data.X @ direction) ** 2))
        best = min(best, quad_form / (data.n * float(direction @ direction)))
    return best
