"""Synthetic benchmark harness: correlated designs, heavy-tailed error laws,
sparse ground truths, estimation metrics, and the replication and bootstrap
machinery that ties them together.

Every operation is a pure function of its configuration and seed.  Each
replication derives its own random sub-streams, keyed by (seed,
replication_index, purpose), so results do not depend on execution order or
on how many worker threads run them.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from time import perf_counter

import numpy as np
from scipy.signal import lfilter

from .data import Coefficients, Dataset
from .distributions import ErrorDistribution
from .estimators import (
    _MD_KINDS,
    EstimatorSpec,
    default_lambda_grid,
    fit,
    tune,
)

__all__ = [
    "DesignModel",
    "ToeplitzCovariance",
    "FactorCovariance",
    "SimTruth",
    "SimConfig",
    "SimRecord",
    "MetricReport",
    "toeplitz_design",
    "two_factor_design",
    "generate_design",
    "generate_errors",
    "generate_truth",
    "model_error",
    "f1_score",
    "run_benchmark",
    "bootstrap_stability",
    "report_csv_text",
    "report_json_text",
    "stability_csv_text",
]

_DESIGN_VARIANTS = ("toeplitz", "two_factor")

# sub-stream purposes within one replication
_TAG_DESIGN = 0
_TAG_TRUTH = 1
_TAG_ERRORS = 2
_TAG_TUNING = 3

_TUNING_HOLDOUT = 0.25
_DEFAULT_GRID_POINTS = 10
# floor at lam_max/100: the default search should not reach dense overfit fits
_DEFAULT_GRID_MIN_RATIO = 1e-2


def _readonly(values, ndim, name):
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DesignModel:
    """Row-generating law for the predictor matrix.

    "toeplitz" draws rows with covariance rho^|i-j|; "two_factor" mixes two
    latent factors into every predictor (loadings redrawn per replication)
    and adds unit idiosyncratic noise.
    """

    variant: str
    rho: float = 0.5

    def __post_init__(self):
        if self.variant not in _DESIGN_VARIANTS:
            raise ValueError(
                f"unknown design variant {self.variant!r}; expected one of {_DESIGN_VARIANTS}"
            )
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly inside (0, 1), got {self.rho}")


def toeplitz_design(rho: float = 0.5) -> DesignModel:
    return DesignModel(variant="toeplitz", rho=rho)


def two_factor_design() -> DesignModel:
    return DesignModel(variant="two_factor")


@dataclass(frozen=True)
class ToeplitzCovariance:
    """Predictor covariance rho^|i-j|, kept in closed form."""

    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly inside (0, 1), got {self.rho}")


@dataclass(frozen=True)
class FactorCovariance:
    """Predictor covariance loadings @ loadings.T + I, conditional on the
    realized loadings."""

    loadings: np.ndarray

    def __post_init__(self):
        loadings = _readonly(self.loadings, 2, "loadings")
        if loadings.shape[1] != 2:
            raise ValueError(f"loadings must have 2 columns, got {loadings.shape[1]}")
        object.__setattr__(self, "loadings", loadings)


@dataclass(frozen=True)
class SimTruth:
    """Ground truth of one synthetic replication.

    ``sigma_x`` is filled in by the harness once the design is drawn; the
    nonzero coefficients always lie strictly between 1 and 3.
    """

    beta_star: np.ndarray
    support: np.ndarray
    s: int
    sigma_x: ToeplitzCovariance | FactorCovariance | None = None

    def __post_init__(self):
        beta = _readonly(self.beta_star, 1, "beta_star")
        support = np.array(self.support, dtype=np.intp)
        if support.ndim != 1:
            raise ValueError("support must be a flat index array")
        support = np.sort(support)
        if np.unique(support).size != support.size:
            raise ValueError("support indices must be distinct")
        if support.size and (support[0] < 0 or support[-1] >= beta.size):
            raise ValueError("support indices out of range")
        if int(self.s) != support.size:
            raise ValueError(f"s={self.s} does not match |support|={support.size}")
        if not np.array_equal(np.flatnonzero(beta), support):
            raise ValueError("beta_star must be nonzero exactly on the support")
        values = beta[support]
        if values.size and not np.all((values > 1.0) & (values < 3.0)):
            raise ValueError("nonzero coefficients must lie strictly inside (1, 3)")
        support.setflags(write=False)
        object.__setattr__(self, "beta_star", beta)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "s", int(self.s))


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one benchmark run.

    ``lambda_grid`` / ``c_grid`` of None means derive a default grid from
    each replication's data; ``c_grid`` applies only to estimators with a
    scaling parameter and is ignored for the rest.
    """

    n: int
    p: int
    design: DesignModel
    error: ErrorDistribution
    replications: int
    seed: int
    estimators: tuple[EstimatorSpec, ...]
    lambda_grid: tuple[float, ...] | None = None
    c_grid: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.n < 4:
            raise ValueError("n must be at least 4 to allow a validation split")
        if self.p < 10:
            raise ValueError("p must be at least 10")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        estimators = tuple(self.estimators)
        if not estimators:
            raise ValueError("at least one estimator is required")
        object.__setattr__(self, "estimators", estimators)
        for name in ("lambda_grid", "c_grid"):
            grid = getattr(self, name)
            if grid is None:
                continue
            grid = tuple(float(v) for v in grid)
            if not grid:
                raise ValueError(f"{name} must be non-empty when given")
            floor = 0.0 if name == "lambda_grid" else np.nextafter(0.0, 1.0)
            if any(not np.isfinite(v) or v < floor for v in grid):
                raise ValueError(f"{name} entries must be finite and positive")
            object.__setattr__(self, name, grid)


@dataclass(frozen=True)
class SimRecord:
    """Metrics of one estimator on one replication.

    ``runtime`` is wall-clock seconds for tuning plus the final fit; it is
    carried for interactive inspection but excluded from serialized output
    so identical seeds produce identical files.
    """

    replication: int
    estimator: str
    model_error: float
    f1: float
    precision: float
    recall: float
    runtime: float

    def __post_init__(self):
        if self.model_error < 0.0:
            raise ValueError("model_error must be nonnegative")
        for name in ("f1", "precision", "recall"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.runtime < 0.0:
            raise ValueError("runtime must be nonnegative")


@dataclass(frozen=True)
class MetricReport:
    """All per-replication records plus five-number summaries per estimator.

    ``failures`` counts replications on which an estimator raised; those
    replications contribute no record for it.
    """

    records: tuple[SimRecord, ...]
    summaries: dict
    failures: dict


def _stream(seed, rep, tag):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep, tag)))


def generate_design(config: SimConfig, rng) -> tuple[np.ndarray, object]:
    """Draw the predictor matrix and return it with its row covariance."""
    n, p = config.n, config.p
    if config.design.variant == "toeplitz":
        rho = config.design.rho
        innovations = rng.standard_normal((n, p))
        innovations[:, 1:] *= np.sqrt(1.0 - rho * rho)
        # first-order recursion across columns realizes the Toeplitz
        # covariance exactly without materializing a p x p factor
        X = lfilter([1.0], [1.0, -rho], innovations, axis=1)
        return X, ToeplitzCovariance(rho=rho)
    loadings = rng.standard_normal((p, 2))
    factors = rng.standard_normal((n, 2))
    noise = rng.standard_normal((n, p))
    X = factors @ loadings.T + noise
    return X, FactorCovariance(loadings=loadings)


def generate_errors(dist: ErrorDistribution, n: int, rng) -> np.ndarray:
    """Draw n independent errors from the given law."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if dist.kind == "normal":
        return dist.scale * rng.standard_normal(n)
    if dist.kind == "laplace":
        u = rng.random(n)
        while np.any(u == 0.0):
            zero = u == 0.0
            u[zero] = rng.random(int(zero.sum()))
        centered = u - 0.5
        return -dist.scale * np.sign(centered) * np.log1p(-2.0 * np.abs(centered))
    if dist.kind == "student_t":
        z = rng.standard_normal(n)
        chi2 = rng.chisquare(dist.df, n)
        return z / np.sqrt(chi2 / dist.df)
    if dist.kind == "cauchy":
        return dist.scale * np.tan(np.pi * (rng.random(n) - 0.5))
    # contaminated normal: Bernoulli(0.9) picks the narrow component, the
    # result is rescaled to unit variance
    narrow = rng.random(n) < 0.9
    z = rng.standard_normal(n)
    return np.where(narrow, 1.0, 15.0) * z / np.sqrt(23.4)


def generate_truth(p: int, rng) -> SimTruth:
    """Draw a sparse coefficient vector: support size uniform on {3..10},
    values uniform in (1, 3)."""
    if p < 10:
        raise ValueError("p must be at least 10 so any support size fits")
    s = int(rng.integers(3, 11))
    support = np.sort(rng.choice(p, size=s, replace=False))
    while True:
        values = rng.uniform(1.0, 3.0, size=s)
        if np.all(values > 1.0):
            break
    beta = np.zeros(p)
    beta[support] = values
    return SimTruth(beta_star=beta, support=support, s=s)


def model_error(estimate: Coefficients, truth: SimTruth) -> float:
    """Quadratic loss (b - b*)' Sigma_X (b - b*) under the design covariance."""
    if estimate.beta.shape != truth.beta_star.shape:
        raise ValueError(
            f"estimate has {estimate.beta.shape[0]} coefficients, "
            f"truth has {truth.beta_star.shape[0]}"
        )
    if truth.sigma_x is None:
        raise ValueError("truth carries no covariance description")
    delta = estimate.beta - truth.beta_star
    if isinstance(truth.sigma_x, ToeplitzCovariance):
        rho = truth.sigma_x.rho
        # (Sigma delta)_i = forward_i + backward_i - delta_i with two
        # geometric recursions, so no p x p matrix is ever formed
        forward = lfilter([1.0], [1.0, -rho], delta)
        backward = lfilter([1.0], [1.0, -rho], delta[::-1])[::-1]
        value = float(delta @ (forward + backward - delta))
    else:
        loadings = truth.sigma_x.loadings
        if loadings.shape[0] != delta.shape[0]:
            raise ValueError("covariance loadings do not match the coefficient length")
        value = float(np.sum((loadings.T @ delta) ** 2) + delta @ delta)
    return max(value, 0.0)


def f1_score(selected, true_support) -> tuple[float, float, float]:
    """(f1, precision, recall) of a selected index set against the truth."""
    chosen = {int(i) for i in selected}
    truth = {int(i) for i in true_support}
    if not truth:
        raise ValueError("true support must be nonempty")
    hits = len(chosen & truth)
    precision = hits / len(chosen) if chosen else 0.0
    recall = hits / len(truth)
    if precision + recall == 0.0:
        return 0.0, 0.0, 0.0
    f1 = 2.0 * precision * recall / (precision + recall)
    return f1, precision, recall


def _worker_count(task_count: int) -> int:
    env = os.environ.get("MDLASSO_THREADS", "").strip()
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, task_count))


def _map_indexed(func, count):
    workers = _worker_count(count)
    if workers == 1:
        return [func(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(count)))


def _labels(specs) -> list[str]:
    total = {}
    for spec in specs:
        total[spec.kind] = total.get(spec.kind, 0) + 1
    seen = {}
    labels = []
    for spec in specs:
        if total[spec.kind] == 1:
            labels.append(spec.kind)
        else:
            seen[spec.kind] = seen.get(spec.kind, 0) + 1
            labels.append(f"{spec.kind}#{seen[spec.kind]}")
    return labels


def _run_replication(config: SimConfig, rep: int, labels):
    X, covariance = generate_design(config, _stream(config.seed, rep, _TAG_DESIGN))
    truth = generate_truth(config.p, _stream(config.seed, rep, _TAG_TRUTH))
    truth = replace(truth, sigma_x=covariance)
    errors = generate_errors(
        config.error, config.n, _stream(config.seed, rep, _TAG_ERRORS)
    )
    data = Dataset(X, X @ truth.beta_star + errors)
    tune_seed = int(
        np.random.SeedSequence(config.seed, spawn_key=(rep, _TAG_TUNING)).generate_state(1)[0]
    )
    records = []
    failed = []
    for label, spec in zip(labels, config.estimators):
        start = perf_counter()
        try:
            if config.lambda_grid is not None:
                lam_grid = config.lambda_grid
            else:
                lam_grid = default_lambda_grid(
                    data,
                    spec.kind,
                    c=spec.c,
                    num_points=_DEFAULT_GRID_POINTS,
                    min_ratio=_DEFAULT_GRID_MIN_RATIO,
                )
            c_grid = config.c_grid if spec.kind in _MD_KINDS else None
            # one outlier-insensitive yardstick so every estimator tunes on
            # the same footing regardless of the error law
            tuned = tune(
                data,
                spec,
                lam_grid,
                c_grid=c_grid,
                method=_TUNING_HOLDOUT,
                seed=tune_seed,
                force_absolute=True,
            )
            final = fit(data, tuned.chosen)
        except Exception:
            failed.append(label)
            continue
        elapsed = perf_counter() - start
        me = model_error(final.coefficients, truth)
        f1, precision, recall = f1_score(final.coefficients.support, truth.support)
        records.append(
            SimRecord(rep, label, me, f1, precision, recall, elapsed)
        )
    return records, failed


_SUMMARY_METRICS = ("model_error", "f1", "precision", "recall")
_QUANTILE_KEYS = ("min", "q1", "median", "q3", "max")


def _summaries(records, labels):
    out = {}
    for label in labels:
        values = [r for r in records if r.estimator == label]
        metrics = {}
        if values:
            for name in _SUMMARY_METRICS:
                sample = np.array([getattr(r, name) for r in values])
                points = np.quantile(sample, [0.0, 0.25, 0.5, 0.75, 1.0])
                metrics[name] = dict(zip(_QUANTILE_KEYS, (float(q) for q in points)))
        out[label] = metrics
    return out


def run_benchmark(config: SimConfig) -> MetricReport:
    """Run every estimator over every replication and aggregate metrics.

    Each replication draws a fresh design, truth, and error vector from its
    own sub-streams, tunes each estimator on a 25% holdout, refits the
    winner on the full data, and scores against the generative truth.
    Estimator exceptions are counted per label, never fatal.
    """
    labels = _labels(config.estimators)
    outcomes = _map_indexed(
        lambda rep: _run_replication(config, rep, labels), config.replications
    )
    records = []
    failures = {label: 0 for label in labels}
    for rep_records, rep_failures in outcomes:
        records.extend(rep_records)
        for label in rep_failures:
            failures[label] += 1
    return MetricReport(
        records=tuple(records),
        summaries=_summaries(records, labels),
        failures=failures,
    )


def bootstrap_stability(
    data: Dataset, spec: EstimatorSpec, num_bootstrap: int, seed: int
) -> dict[int, int]:
    """Selection counts over row-resampled refits.

    Fits once on the original data; every predictor selected there is then
    counted across ``num_bootstrap`` refits on datasets resampled with
    replacement (same number of rows).  A refit that raises selects
    nothing.
    """
    if num_bootstrap < 1:
        raise ValueError("num_bootstrap must be at least 1")
    original = fit(data, spec).coefficients.support
    if original.size == 0:
        return {}

    def one(b):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
        rows = rng.integers(0, data.n, size=data.n)
        resampled = Dataset(data.X[rows], data.y[rows])
        try:
            result = fit(resampled, spec)
        except Exception:
            return frozenset()
        return frozenset(result.coefficients.support.tolist())

    selections = _map_indexed(one, num_bootstrap)
    return {
        int(j): sum(1 for chosen in selections if j in chosen)
        for j in original.tolist()
    }


def _g17(value: float) -> str:
    return "%.17g" % value


def report_csv_text(report: MetricReport) -> str:
    """One row per replication x estimator; floats printed to full precision."""
    lines = ["replication,estimator,model_error,f1,precision,recall"]
    for r in report.records:
        lines.append(
            ",".join(
                [
                    str(r.replication),
                    r.estimator,
                    _g17(r.model_error),
                    _g17(r.f1),
                    _g17(r.precision),
                    _g17(r.recall),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_json_text(report: MetricReport) -> str:
    """Five-number summaries and failure counts, keys sorted for stable bytes."""
    payload = {"failures": report.failures, "summaries": report.summaries}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def stability_csv_text(counts: dict[int, int]) -> str:
    lines = ["predictor_index,count"]
    for index in sorted(counts):
        lines.append(f"{index},{counts[index]}")
    return "\n".join(lines) + "\n"
