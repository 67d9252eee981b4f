"""Core data model: datasets, standardization, residuals, and fit results.

The library core works on pre-standardized data (zero-mean columns, unit
scale, centered response) so that estimators need no intercept term.
Standardization is opt-in through :func:`standardize`; the command line
standardizes by default and back-transforms coefficients for reporting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dataset",
    "Standardizer",
    "Coefficients",
    "FitResult",
    "CsvFormatError",
    "residuals",
    "standardize",
    "destandardize_coefficients",
    "load_dataset",
]


class CsvFormatError(ValueError):
    """Raised when a CSV file cannot be parsed into a Dataset."""


def _locked(values, ndim):
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Predictor matrix ``X`` (n rows, p columns) paired with a response ``y``.

    Observation ``i`` always pairs row ``X[i]`` with ``y[i]``.  All entries
    must be finite.  Instances are immutable and safe to share across
    threads.
    """

    X: np.ndarray
    y: np.ndarray
    predictor_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = _locked(self.X, 2)
        y = _locked(self.y, 1)
        if X.shape[0] != y.shape[0]:
            raise ValueError(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("need at least one observation and one predictor")
        if self.predictor_names is not None:
            names = tuple(str(s) for s in self.predictor_names)
            if len(names) != X.shape[1]:
                raise ValueError("predictor_names length does not match columns")
            object.__setattr__(self, "predictor_names", names)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Standardizer:
    """Column means/scales and response mean removed by :func:`standardize`.

    Scales are population standard deviations (1/n convention) so that
    applying and inverting the transform is exactly symmetric.
    """

    column_means: np.ndarray
    column_scales: np.ndarray
    response_mean: float

    def __post_init__(self):
        means = _locked(self.column_means, 1)
        scales = _locked(self.column_scales, 1)
        if means.shape != scales.shape:
            raise ValueError("means and scales must have equal length")
        if np.any(scales <= 0):
            raise ValueError("column scales must be positive")
        object.__setattr__(self, "column_means", means)
        object.__setattr__(self, "column_scales", scales)
        object.__setattr__(self, "response_mean", float(self.response_mean))


@dataclass(frozen=True)
class Coefficients:
    """Coefficient vector with optional intercept (0 for standardized data).

    Support is the set of exactly nonzero entries; thresholding operators
    produce exact zeros, so no epsilon is involved.
    """

    beta: np.ndarray
    intercept: float = 0.0

    def __post_init__(self):
        beta = _locked(self.beta, 1)
        intercept = float(self.intercept)
        if not np.isfinite(intercept):
            raise ValueError("intercept must be finite")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "intercept", intercept)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta)


@dataclass(frozen=True)
class FitResult:
    """Common output contract for every estimator.

    ``c`` and ``observation_weights`` are ``None`` for baselines that have
    no scaling parameter.  ``objective_trace`` is non-increasing when the
    fit comes from the backtracking composite gradient solver.
    ``corruption`` is the estimated per-observation error vector reported
    by the extended Lasso only.
    """

    coefficients: Coefficients
    lam: float
    c: float | None
    objective_value: float
    iterations: int
    converged: bool
    observation_weights: np.ndarray | None = None
    objective_trace: np.ndarray | None = None
    kkt_residual: float | None = None
    corruption: np.ndarray | None = None

    def __post_init__(self):
        if self.observation_weights is not None:
            w = _locked(self.observation_weights, 1)
            if np.any(w < 0.0) or np.any(w > 1.0):
                raise ValueError("observation weights must lie in [0, 1]")
            if abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("observation weights must sum to 1")
            object.__setattr__(self, "observation_weights", w)
        if self.objective_trace is not None:
            object.__setattr__(self, "objective_trace", _locked(self.objective_trace, 1))
        if self.corruption is not None:
            object.__setattr__(self, "corruption", _locked(self.corruption, 1))


def residuals(data: Dataset, coef: Coefficients) -> np.ndarray:
    """Return ``y - X beta - intercept`` for each observation."""
    if coef.beta.shape[0] != data.p:
        raise ValueError(
            f"coefficient length {coef.beta.shape[0]} does not match p={data.p}"
        )
    return data.y - data.X @ coef.beta - coef.intercept


def standardize(data: Dataset) -> tuple[Dataset, Standardizer]:
    """Center and scale every predictor column and center the response.

    Returns the transformed dataset and the Standardizer that inverts it.
    Constant columns are rejected rather than silently rescaled, and a
    single-row dataset has no defined scale.
    """
    if data.n < 2:
        raise ValueError("standardization needs at least 2 observations")
    means = data.X.mean(axis=0)
    scales = data.X.std(axis=0)
    constant = np.flatnonzero(scales == 0.0)
    if constant.size:
        raise ValueError(f"constant predictor column {constant[0]} cannot be scaled")
    response_mean = float(data.y.mean())
    out = Dataset(
        (data.X - means) / scales,
        data.y - response_mean,
        predictor_names=data.predictor_names,
    )
    return out, Standardizer(means, scales, response_mean)


def destandardize_coefficients(coef: Coefficients, std: Standardizer) -> Coefficients:
    """Map coefficients fit on standardized data back to the raw scale.

    Predictions of the returned model on raw data equal predictions of the
    input model on standardized data (plus the removed response mean).
    """
    if coef.beta.shape[0] != std.column_means.shape[0]:
        raise ValueError("coefficient length does not match the standardizer")
    beta_raw = coef.beta / std.column_scales
    intercept = (
        std.response_mean
        + coef.intercept
        - float(beta_raw @ std.column_means)
    )
    return Coefficients(beta_raw, intercept=intercept)


def load_dataset(path, response) -> Dataset:
    """Load a Dataset from a CSV file with a header row.

    ``response`` picks the response column by name or by zero-based index;
    every other column is a predictor.  Non-numeric cells raise
    :class:`CsvFormatError` naming the offending row and column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if isinstance(response, str) and response in header:
            resp_idx = header.index(response)
        else:
            try:
                resp_idx = int(response)
            except (TypeError, ValueError):
                raise CsvFormatError(
                    f"{path}: response column {response!r} not found in header {header}"
                ) from None
            if not 0 <= resp_idx < len(header):
                raise CsvFormatError(
                    f"{path}: response index {resp_idx} out of range for {len(header)} columns"
                )
        rows = []
        y = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"{path}: row {line_no} has {len(row)} cells, expected {len(header)}"
                )
            values = []
            for col_idx, cell in enumerate(row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: non-numeric value {cell.strip()!r} at "
                        f"row {line_no}, column '{header[col_idx]}'"
                    ) from None
            y.append(values.pop(resp_idx))
            rows.append(values)
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    names = tuple(h for i, h in enumerate(header) if i != resp_idx)
    return Dataset(np.array(rows), np.array(y), predictor_names=names)
