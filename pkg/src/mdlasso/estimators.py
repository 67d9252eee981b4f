"""Estimator front ends and tuning.

The minimum distance lasso comes in two flavours: a direct composite
gradient solve and an iteratively reweighted approximation that alternates
weight updates with weighted lasso subproblems.  The comparison set
consists of the plain lasso, the absolute-loss lasso, a trimmed refit and
a corrupted-response variant that estimates a sparse error vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linprog

from .data import Coefficients, Dataset, FitResult
from .loss import MdLossParams, md_excess_loss, md_weights
from .solver import _kkt_residual, _ridge_pilot, soft_threshold, solve
from .solver import OptimizerConfig

ESTIMATOR_KINDS = (
    "md_lasso",
    "irw_md_lasso",
    "lasso",
    "lad_lasso",
    "trimmed_lasso",
    "extended_lasso",
)
_MD_KINDS = ("md_lasso", "irw_md_lasso")

_CD_MAX_PASSES = 1000
_INNER_CD_TOL = 1e-10
_LASSO_CD_TOL = 1e-8
_IRW_MAX_OUTER = 100
_IRW_STEP_EPSILON = 1e-8
_IRW_KKT_TARGET = 1e-5
# smoothing homotopy for the absolute loss: quadratic half-width driven
# from 1 down to 1e-6 over 13 stages
_LAD_DELTAS = np.geomspace(1.0, 1e-6, 13)
_LAD_STAGE_MAX = 300
_LAD_POLISH_MAX = 100
_LAD_POLISH_CHECK_EVERY = 5
_EXTENDED_MAX_OUTER = 500
_EXTENDED_REL_TOL = 1e-10


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator to run and with what knobs.

    ``c`` applies to the minimum distance kinds only, ``trim_fraction`` to
    the trimmed lasso (default 0.10), ``lam_error`` to the corrupted
    response variant.  The solver controls default to estimator-appropriate
    values when left as ``None``; for the coordinate descent estimators
    ``rel_tolerance`` acts as the stationarity tolerance.
    """

    kind: str
    lam: float
    c: float | None = None
    trim_fraction: float | None = None
    lam_error: float | None = None
    rel_tolerance: float | None = None
    max_iterations: int | None = None
    safety_radius: float | None = None
    rho_init: float | None = None
    initial_point: Coefficients | None = None

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ValueError(
                f"unknown estimator kind {self.kind!r}; expected one of {ESTIMATOR_KINDS}"
            )
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and nonnegative, got {self.lam}")
        if self.kind in _MD_KINDS:
            if self.c is None:
                raise ValueError(f"c is required for kind {self.kind!r}")
            if not np.isfinite(self.c) or self.c <= 0:
                raise ValueError(f"c must be finite and positive, got {self.c}")
        elif self.c is not None:
            raise ValueError(f"c does not apply to kind {self.kind!r}")
        if self.kind == "trimmed_lasso":
            if self.trim_fraction is None:
                object.__setattr__(self, "trim_fraction", 0.10)
            if not 0.0 <= self.trim_fraction < 1.0:
                raise ValueError(
                    f"trim_fraction must be in [0, 1), got {self.trim_fraction}"
                )
        elif self.trim_fraction is not None:
            raise ValueError(f"trim_fraction does not apply to kind {self.kind!r}")
        if self.kind == "extended_lasso":
            if self.lam_error is None:
                raise ValueError("lam_error is required for kind 'extended_lasso'")
            if not np.isfinite(self.lam_error) or self.lam_error < 0:
                raise ValueError(
                    f"lam_error must be finite and nonnegative, got {self.lam_error}"
                )
        elif self.lam_error is not None:
            raise ValueError(f"lam_error does not apply to kind {self.kind!r}")
        if self.rel_tolerance is not None and not self.rel_tolerance > 0:
            raise ValueError("rel_tolerance must be positive when given")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1 when given")
        if self.safety_radius is not None and not self.safety_radius > 0:
            raise ValueError("safety_radius must be positive when given")
        if self.rho_init is not None and not self.rho_init > 0:
            raise ValueError("rho_init must be positive when given")


@dataclass(frozen=True)
class TuningResult:
    """Outcome of a grid search: the winning spec, the scored grid, and the
    split scheme (fold count or holdout fraction) that produced it."""

    chosen: EstimatorSpec
    grid: tuple[tuple[EstimatorSpec, float], ...]
    folds: int | float

    def __post_init__(self):
        if not self.grid:
            raise ValueError("grid must be non-empty")
        scores = [score for _, score in self.grid]
        if not all(np.isfinite(s) for s in scores):
            raise ValueError("validation scores must be finite")
        chosen_scores = [s for spec, s in self.grid if spec is self.chosen]
        if not chosen_scores or chosen_scores[0] != min(scores):
            raise ValueError("chosen spec must attain the minimal validation score")


def _require_kind(spec: EstimatorSpec, kind: str) -> None:
    if spec.kind != kind:
        raise ValueError(f"spec kind is {spec.kind!r}, this fitter handles {kind!r}")


def _initial_beta(spec: EstimatorSpec, p: int) -> np.ndarray | None:
    if spec.initial_point is None:
        return None
    beta = np.array(spec.initial_point.beta, dtype=float)
    if beta.shape != (p,):
        raise ValueError(f"initial point has {beta.shape[0]} coefficients, expected {p}")
    return beta


def _optimizer_config(spec: EstimatorSpec) -> OptimizerConfig:
    kwargs = {}
    if spec.rel_tolerance is not None:
        kwargs["rel_tolerance"] = spec.rel_tolerance
    if spec.max_iterations is not None:
        kwargs["max_iterations"] = spec.max_iterations
    if spec.rho_init is not None:
        kwargs["rho_init"] = spec.rho_init
    return OptimizerConfig(
        lam=spec.lam,
        safety_radius=spec.safety_radius,
        initial_point=spec.initial_point,
        **kwargs,
    )


def _weighted_lasso_cd(X, y, weights, lam, tol, max_passes=_CD_MAX_PASSES, beta0=None):
    """Cyclic coordinate descent for 0.5 * sum_i w_i r_i^2 + lam * ||b||_1.

    Full sweeps alternate with sweeps over the current support until the
    stationarity residual drops below ``tol``.  Returns
    ``(beta, kkt, passes, converged)``.
    """
    n, p = X.shape
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=float)
    XT = np.ascontiguousarray(X.T)
    XwT = XT * weights[None, :]
    col_curv = np.einsum("ji,ji->j", XwT, XT)
    r = y - X @ beta if np.any(beta) else y.astype(float).copy()

    def kkt_residual(res, indices=None):
        if indices is None:
            g = -(XwT @ res)
            b = beta
        else:
            g = -(XwT[indices] @ res)
            b = beta[indices]
        if b.size == 0:
            return 0.0
        per = np.where(
            b != 0.0,
            np.abs(g + lam * np.sign(b)),
            np.maximum(np.abs(g) - lam, 0.0),
        )
        return float(per.max())

    def sweep(indices):
        nonlocal r
        for j in indices:
            curv = col_curv[j]
            if curv <= 0.0:
                continue
            old = beta[j]
            rho_j = XwT[j] @ r + curv * old
            new = math.copysign(max(abs(rho_j) - lam, 0.0), rho_j) / curv
            if new != old:
                r += XT[j] * (old - new)
                beta[j] = new

    passes = 0
    while passes < max_passes:
        sweep(range(p))
        passes += 1
        if passes % 20 == 0:
            r = y - X @ beta
        if kkt_residual(r) <= tol:
            break
        active = np.flatnonzero(beta)
        while active.size and passes < max_passes:
            sweep(active)
            passes += 1
            if passes % 20 == 0:
                r = y - X @ beta
            if kkt_residual(r, active) <= tol:
                break
    r = y - X @ beta
    kkt = kkt_residual(r)
    return beta, kkt, passes, kkt <= tol


def fit_md_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Minimum distance lasso by composite gradient descent."""
    _require_kind(spec, "md_lasso")
    result, _ = solve(data, MdLossParams(c=spec.c), _optimizer_config(spec))
    return result


def fit_irw_md_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Minimum distance lasso by iterative reweighting.

    Alternates between observation weights at the current coefficients and
    a weighted lasso subproblem, stopping once the squared step norm falls
    below the tolerance (and the stationarity certificate is small, budget
    permitting).  The subproblem keeps the penalty level unchanged: its
    quadratic part carries a factor 1/2 so that fixed points are
    stationary for the minimum distance objective itself.
    """
    _require_kind(spec, "irw_md_lasso")
    params = MdLossParams(c=spec.c)
    step_eps = spec.rel_tolerance if spec.rel_tolerance is not None else _IRW_STEP_EPSILON
    max_outer = spec.max_iterations if spec.max_iterations is not None else _IRW_MAX_OUTER
    beta = _initial_beta(spec, data.p)
    if beta is None:
        beta = _ridge_pilot(data.X, data.y)
    lam = spec.lam
    shift = spec.c * np.log(data.n)

    def penalized(b):
        r = data.y - data.X @ b
        return md_excess_loss(r, spec.c) - shift + lam * np.abs(b).sum()

    trace = [penalized(beta)]
    converged = False
    outer = 0
    for outer in range(1, max_outer + 1):
        r = data.y - data.X @ beta
        w = md_weights(r, params)
        new_beta, _, _, _ = _weighted_lasso_cd(
            data.X, data.y, w, lam, _INNER_CD_TOL, beta0=beta
        )
        step_sq = float(np.sum((new_beta - beta) ** 2))
        beta = new_beta
        trace.append(penalized(beta))
        if step_sq <= step_eps:
            converged = True
            r = data.y - data.X @ beta
            w = md_weights(r, params)
            gradient = -(data.X.T @ (w * r))
            if _kkt_residual(gradient, beta, lam) <= _IRW_KKT_TARGET:
                break
    final_r = data.y - data.X @ beta
    final_w = md_weights(final_r, params)
    gradient = -(data.X.T @ (final_w * final_r))
    return FitResult(
        coefficients=Coefficients(beta),
        lam=lam,
        c=spec.c,
        objective_value=float(trace[-1]),
        iterations=outer,
        converged=converged,
        observation_weights=final_w,
        objective_trace=np.asarray(trace),
        kkt_residual=_kkt_residual(gradient, beta, lam),
    )


def fit_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Plain lasso: (1/2n)||y - X b||^2 + lam * ||b||_1 by coordinate descent."""
    _require_kind(spec, "lasso")
    tol = spec.rel_tolerance if spec.rel_tolerance is not None else _LASSO_CD_TOL
    max_passes = spec.max_iterations if spec.max_iterations is not None else _CD_MAX_PASSES
    weights = np.full(data.n, 1.0 / data.n)
    beta, kkt, passes, converged = _weighted_lasso_cd(
        data.X,
        data.y,
        weights,
        spec.lam,
        tol,
        max_passes=max_passes,
        beta0=_initial_beta(spec, data.p),
    )
    r = data.y - data.X @ beta
    objective = 0.5 * (r @ r) / data.n + spec.lam * np.abs(beta).sum()
    return FitResult(
        coefficients=Coefficients(beta),
        lam=spec.lam,
        c=None,
        objective_value=float(objective),
        iterations=passes,
        converged=converged,
        kkt_residual=kkt,
    )


def _huber_value(r, delta):
    a = np.abs(r)
    return float(np.where(a <= delta, 0.5 * r * r / delta, a - 0.5 * delta).sum())


def _huber_stage(X, y, lam, delta, beta, rel_tol, max_iter):
    """One smoothing stage: proximal gradient with backtracking."""
    n = y.size
    rho = 1.0
    r = y - X @ beta
    loss = _huber_value(r, delta) / n
    current = loss + lam * np.abs(beta).sum()
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        gradient = -(X.T @ np.clip(r / delta, -1.0, 1.0)) / n
        while True:
            candidate = soft_threshold(beta - gradient / rho, lam / rho)
            step = candidate - beta
            candidate_r = y - X @ candidate
            candidate_loss = _huber_value(candidate_r, delta) / n
            bound = (
                loss
                + gradient @ step
                + 0.5 * rho * (step @ step)
                + 1e-14 * (1.0 + abs(loss))
            )
            if candidate_loss <= bound or rho >= 1e20:
                break
            rho *= 2.0
        proposed = candidate_loss + lam * np.abs(candidate).sum()
        if proposed > current:
            converged = True
            break
        beta, r, loss = candidate, candidate_r, candidate_loss
        if abs(current - proposed) <= rel_tol * (1.0 + abs(proposed)):
            current = proposed
            converged = True
            break
        current = proposed
    return beta, iterations, converged


def _lad_kkt_residual(X, beta, residual_vector, lam, zero_tol):
    """Stationarity residual for the absolute-loss objective.

    Observations with residuals below ``zero_tol`` contribute a free
    subgradient in [-1, 1]; the best choice is found by a small linear
    program, so the returned value is the true minimal violation.
    """
    n, p = X.shape
    free = np.abs(residual_vector) <= zero_tol
    v_fixed = np.where(free, 0.0, np.sign(residual_vector))
    g_fixed = -(X.T @ v_fixed) / n
    if not free.any():
        return _kkt_residual(g_fixed, beta, lam)
    support = beta != 0.0
    signs = np.sign(beta)
    A = -(X[free].T) / n
    m = A.shape[1]
    rhs_plus = np.where(support, -(g_fixed + lam * signs), lam - g_fixed)
    rhs_minus = np.where(support, g_fixed + lam * signs, lam + g_fixed)
    A_ub = np.vstack(
        [np.hstack([A, -np.ones((p, 1))]), np.hstack([-A, -np.ones((p, 1))])]
    )
    b_ub = np.concatenate([rhs_plus, rhs_minus])
    cost = np.zeros(m + 1)
    cost[-1] = 1.0
    bounds = [(-1.0, 1.0)] * m + [(0.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return _kkt_residual(g_fixed, beta, lam)
    return float(res.x[-1])


def fit_lad_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Absolute-loss lasso: (1/n) sum |y_i - x_i'b| + lam * ||b||_1.

    Solved by a smoothing homotopy: the absolute loss is replaced by its
    quadratic-near-zero smoothing, the half-width shrinks geometrically,
    and each stage is solved by proximal gradient warm-started from the
    previous one.
    """
    _require_kind(spec, "lad_lasso")
    rel_tol = spec.rel_tolerance if spec.rel_tolerance is not None else 1e-8
    stage_max = spec.max_iterations if spec.max_iterations is not None else _LAD_STAGE_MAX
    beta = _initial_beta(spec, data.p)
    if beta is None:
        beta = np.zeros(data.p)
    total_iterations = 0
    converged = False
    for delta in _LAD_DELTAS:
        beta, used, converged = _huber_stage(
            data.X, data.y, spec.lam, delta, beta, rel_tol, stage_max
        )
        total_iterations += used
    # certificate polish: the gradient steps leave slack in directions of
    # low curvature, so finish with quadratic-majorizer rounds whose floor
    # shrinks toward the final half-width, plus guarded jumps to the exact
    # interpolating vertex, stopping once the subgradient certificate clears
    delta = float(_LAD_DELTAS[-1])

    def true_objective(point):
        res = data.y - data.X @ point
        return float(np.abs(res).mean() + spec.lam * np.abs(point).sum())

    def certificate(point):
        res = data.y - data.X @ point
        zero_tol = 100.0 * delta * (1.0 + float(np.abs(res).max(initial=0.0)))
        return _lad_kkt_residual(data.X, point, res, spec.lam, zero_tol)

    def vertex_candidate(point):
        # a minimizer generically interpolates as many observations as it
        # has active coordinates; solving that square system exactly is a
        # one-shot finish, and a wrong guess is caught by the objective test
        res = data.y - data.X @ point
        active = np.flatnonzero(np.abs(point) > 1e-9 * (1.0 + np.abs(point).max(initial=0.0)))
        if active.size == 0 or active.size > data.n:
            return None
        rows = np.argsort(np.abs(res))[: active.size]
        system = data.X[np.ix_(rows, active)]
        try:
            solved = np.linalg.solve(system, data.y[rows])
        except np.linalg.LinAlgError:
            return None
        candidate = np.zeros_like(point)
        candidate[active] = solved
        return candidate

    def support_lp_candidate(point):
        # exact solve restricted to the identified support; the restricted
        # problem has support-many columns, so this stays cheap however
        # large p is
        active = np.flatnonzero(np.abs(point) > 1e-9 * (1.0 + np.abs(point).max(initial=0.0)))
        k = active.size
        if k == 0 or k > 4 * data.n:
            return None
        design = data.X[:, active]
        cost = np.concatenate(
            [np.full(k, spec.lam), np.full(k, spec.lam),
             np.full(data.n, 1.0 / data.n), np.full(data.n, 1.0 / data.n)]
        )
        equality = np.hstack([design, -design, np.eye(data.n), -np.eye(data.n)])
        solved = linprog(cost, A_eq=equality, b_eq=data.y, method="highs")
        if solved.status != 0:
            return None
        candidate = np.zeros_like(point)
        candidate[active] = solved.x[:k] - solved.x[k : 2 * k]
        return candidate

    best = beta
    best_value = true_objective(best)
    mm_floor = 1e-3
    converged = False
    for round_no in range(0, _LAD_POLISH_MAX + 1):
        if round_no > 0:
            r = data.y - data.X @ beta
            majorizer_weights = 1.0 / (data.n * np.maximum(np.abs(r), mm_floor))
            beta, _, _, _ = _weighted_lasso_cd(
                data.X, data.y, majorizer_weights, spec.lam, 1e-9,
                max_passes=40, beta0=beta,
            )
            mm_floor = max(delta, 0.5 * mm_floor)
            total_iterations += 1
            value = true_objective(beta)
            if value < best_value:
                best, best_value = beta, value
        if round_no % _LAD_POLISH_CHECK_EVERY == 0:
            for candidate in (vertex_candidate(beta), support_lp_candidate(beta)):
                if candidate is None:
                    continue
                value = true_objective(candidate)
                if value <= best_value:
                    best, best_value = candidate, value
                    beta = candidate
            if certificate(best) <= _IRW_KKT_TARGET:
                converged = True
                break
    beta = best
    r = data.y - data.X @ beta
    kkt = certificate(beta)
    converged = bool(converged or kkt <= 1e-4)
    objective = float(np.abs(r).mean() + spec.lam * np.abs(beta).sum())
    return FitResult(
        coefficients=Coefficients(beta),
        lam=spec.lam,
        c=None,
        objective_value=objective,
        iterations=total_iterations,
        converged=converged,
        kkt_residual=kkt,
    )


def fit_trimmed_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Lasso with the worst observations removed.

    A pilot lasso ranks observations by absolute residual; the top
    ``trim_fraction`` share is dropped (ties keep the lower index) and the
    lasso is refit on the remainder.  The kept set is exposed through
    ``observation_weights``: uniform on kept rows, zero on dropped ones.
    """
    _require_kind(spec, "trimmed_lasso")
    tol = spec.rel_tolerance if spec.rel_tolerance is not None else _LASSO_CD_TOL
    max_passes = spec.max_iterations if spec.max_iterations is not None else _CD_MAX_PASSES
    n = data.n
    uniform = np.full(n, 1.0 / n)
    pilot, pilot_kkt, pilot_passes, pilot_converged = _weighted_lasso_cd(
        data.X,
        data.y,
        uniform,
        spec.lam,
        tol,
        max_passes=max_passes,
        beta0=_initial_beta(spec, data.p),
    )
    n_drop = math.ceil(spec.trim_fraction * n)
    if n_drop == 0:
        r = data.y - data.X @ pilot
        objective = 0.5 * (r @ r) / n + spec.lam * np.abs(pilot).sum()
        return FitResult(
            coefficients=Coefficients(pilot),
            lam=spec.lam,
            c=None,
            objective_value=float(objective),
            iterations=pilot_passes,
            converged=pilot_converged,
            observation_weights=uniform,
            kkt_residual=pilot_kkt,
        )
    if n - n_drop < 2:
        raise ValueError(
            f"trimming {n_drop} of {n} observations leaves fewer than 2"
        )
    pilot_residuals = data.y - data.X @ pilot
    order = np.argsort(np.abs(pilot_residuals), kind="stable")
    keep = np.sort(order[: n - n_drop])
    kept_weights = np.full(keep.size, 1.0 / keep.size)
    beta, kkt, passes, converged = _weighted_lasso_cd(
        data.X[keep],
        data.y[keep],
        kept_weights,
        spec.lam,
        tol,
        max_passes=max_passes,
        beta0=pilot,
    )
    r_kept = data.y[keep] - data.X[keep] @ beta
    objective = 0.5 * (r_kept @ r_kept) / keep.size + spec.lam * np.abs(beta).sum()
    weights = np.zeros(n)
    weights[keep] = 1.0 / keep.size
    return FitResult(
        coefficients=Coefficients(beta),
        lam=spec.lam,
        c=None,
        objective_value=float(objective),
        iterations=pilot_passes + passes,
        converged=pilot_converged and converged,
        observation_weights=weights,
        kkt_residual=kkt,
    )


def fit_extended_lasso(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Lasso with a sparse corruption vector on the response.

    Minimizes (1/2n)||y - X b - e||^2 + lam*||b||_1 + lam_error*||e||_1 by
    block descent; the e-step is the exact soft threshold at n*lam_error.
    The estimated corruption lands on ``FitResult.corruption``.
    """
    _require_kind(spec, "extended_lasso")
    rel_tol = spec.rel_tolerance if spec.rel_tolerance is not None else _EXTENDED_REL_TOL
    max_outer = (
        spec.max_iterations if spec.max_iterations is not None else _EXTENDED_MAX_OUTER
    )
    n = data.n
    weights = np.full(n, 1.0 / n)
    beta = _initial_beta(spec, data.p)
    if beta is None:
        beta = np.zeros(data.p)
    e = np.zeros(n)

    def objective(b, err):
        r = data.y - data.X @ b - err
        return (
            0.5 * (r @ r) / n
            + spec.lam * np.abs(b).sum()
            + spec.lam_error * np.abs(err).sum()
        )

    current = objective(beta, e)
    trace = [current]
    converged = False
    for _ in range(max_outer):
        beta, _, _, _ = _weighted_lasso_cd(
            data.X, data.y - e, weights, spec.lam, _INNER_CD_TOL, beta0=beta
        )
        e = soft_threshold(data.y - data.X @ beta, n * spec.lam_error)
        proposed = objective(beta, e)
        trace.append(proposed)
        if abs(current - proposed) <= rel_tol * (1.0 + abs(proposed)):
            current = proposed
            converged = True
            break
        current = proposed
    r = data.y - data.X @ beta - e
    gradient = -(data.X.T @ r) / n
    return FitResult(
        coefficients=Coefficients(beta),
        lam=spec.lam,
        c=None,
        objective_value=float(current),
        iterations=len(trace) - 1,
        converged=converged,
        objective_trace=np.asarray(trace),
        kkt_residual=_kkt_residual(gradient, beta, spec.lam),
        corruption=e,
    )


_FITTERS = {
    "md_lasso": fit_md_lasso,
    "irw_md_lasso": fit_irw_md_lasso,
    "lasso": fit_lasso,
    "lad_lasso": fit_lad_lasso,
    "trimmed_lasso": fit_trimmed_lasso,
    "extended_lasso": fit_extended_lasso,
}


def fit(data: Dataset, spec: EstimatorSpec) -> FitResult:
    """Dispatch to the fitter for ``spec.kind``."""
    return _FITTERS[spec.kind](data, spec)


def default_lambda_grid(data, kind="lasso", c=None, num_points=20, min_ratio=1e-3):
    """Descending geometric penalty grid anchored at a null-model scale.

    The minimum distance kinds anchor on a winsorized response: near a
    good fit their observation weights are close to uniform, so the
    relevant penalty scale is the least squares one, but a few wild
    response values would otherwise inflate the whole grid.
    """
    if kind not in ESTIMATOR_KINDS:
        raise ValueError(f"unknown estimator kind {kind!r}")
    if kind in _MD_KINDS:
        if c is None:
            raise ValueError("c is required for the minimum distance kinds")
        cap = float(np.quantile(np.abs(data.y), 0.9))
        if not cap > 0:
            cap = 1.0
        clipped = np.clip(data.y, -cap, cap)
        lam_max = float(np.abs(data.X.T @ clipped).max() / data.n)
    elif kind == "lad_lasso":
        lam_max = float(np.abs(data.X.T @ np.sign(data.y)).max() / data.n)
    else:
        lam_max = float(np.abs(data.X.T @ data.y).max() / data.n)
    if not lam_max > 0:
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * min_ratio, num_points)


def _splits(n, method, seed):
    if isinstance(method, bool):
        raise ValueError("method must be a holdout fraction or a fold count")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    if isinstance(method, (int, np.integer)):
        k = int(method)
        if not 2 <= k <= n:
            raise ValueError(f"fold count must be between 2 and {n}, got {k}")
        folds = np.array_split(perm, k)
        out = []
        for i in range(k):
            train = np.concatenate([folds[j] for j in range(k) if j != i])
            if folds[i].size < 1 or train.size < 2:
                raise ValueError("degenerate fold sizes")
            out.append((train, folds[i]))
        return out
    fraction = float(method)
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"holdout fraction must be in (0, 1), got {method}")
    n_val = max(int(round(fraction * n)), 1)
    if n - n_val < 2:
        raise ValueError("holdout split leaves fewer than 2 training rows")
    return [(perm[n_val:], perm[:n_val])]


def _validation_score(kind, c, val_residuals, force_absolute):
    if force_absolute or kind == "lad_lasso":
        return float(np.abs(val_residuals).mean())
    if kind in _MD_KINDS:
        # excess form: comparable across c and finite at any scale
        return float(md_excess_loss(val_residuals, c) / val_residuals.size)
    return float(np.mean(val_residuals**2))


def _grid_spec(base, lam, c, initial_point):
    if base.kind in _MD_KINDS:
        return replace(base, lam=lam, c=c, initial_point=initial_point)
    return replace(base, lam=lam, initial_point=initial_point)


def tune(
    data: Dataset,
    base: EstimatorSpec,
    lambda_grid,
    c_grid=None,
    method: int | float = 0.25,
    seed: int = 0,
    force_absolute: bool = False,
) -> TuningResult:
    """Grid search over penalty levels (and ``c`` for the md kinds).

    ``method`` is either a holdout fraction in (0, 1) or a fold count.
    The validation score is the estimator's own per-observation loss on
    held-out data unless ``force_absolute`` asks for mean absolute error.
    Splits are drawn deterministically from ``seed``; ties go to the
    larger penalty, then the larger ``c``.
    """
    lams = [float(v) for v in lambda_grid]
    if not lams:
        raise ValueError("lambda grid is empty")
    if any(not np.isfinite(v) or v < 0 for v in lams):
        raise ValueError("lambda grid entries must be finite and nonnegative")
    if base.kind in _MD_KINDS:
        cs = [float(v) for v in c_grid] if c_grid is not None else [base.c]
        if not cs:
            raise ValueError("c grid is empty")
        if any(not np.isfinite(v) or v <= 0 for v in cs):
            raise ValueError("c grid entries must be finite and positive")
    else:
        if c_grid is not None:
            raise ValueError("c grid only applies to the minimum distance estimators")
        cs = [None]

    splits = _splits(data.n, method, seed)
    totals: dict[tuple[float, float | None], float] = {}
    for train_idx, val_idx in splits:
        train = Dataset(data.X[train_idx], data.y[train_idx])
        X_val = data.X[val_idx]
        y_val = data.y[val_idx]
        for c in cs:
            warm = base.initial_point
            # descend the penalty path so each fit warm-starts the next
            for lam in sorted(set(lams), reverse=True):
                spec = _grid_spec(base, lam, c, warm)
                result = _FITTERS[spec.kind](train, spec)
                warm = result.coefficients
                r_val = y_val - X_val @ result.coefficients.beta
                score = _validation_score(base.kind, c, r_val, force_absolute)
                key = (lam, c)
                totals[key] = totals.get(key, 0.0) + score

    n_splits = len(splits)
    grid = tuple(
        (_grid_spec(base, lam, c, base.initial_point), totals[(lam, c)] / n_splits)
        for lam in lams
        for c in cs
    )
    best = min(score for _, score in grid)
    chosen = None
    for spec, score in grid:
        if score == best:
            key = (spec.lam, spec.c if spec.c is not None else 0.0)
            if chosen is None or key > (
                chosen.lam,
                chosen.c if chosen.c is not None else 0.0,
            ):
                chosen = spec
    return TuningResult(chosen=chosen, grid=grid, folds=method)
