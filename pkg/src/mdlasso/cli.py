"""Command-line surface: fit, tune, simulate, bounds, curve, stability, and
qqdata subcommands with CSV/JSON input and output.

Options can come from flags or from a flat JSON config file whose keys
mirror the flag names (dashes become underscores); flags win over file
values.  Exit codes: 0 success, 2 input or validation error, 3 solver
failure (non-convergence only under --strict), 4 theory-condition
violation.  All file writes go through a temp-file-then-rename step, and
the subcommands that write delimited reports also render a figure next to
them unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .bounds import (
    TAIL_THRESHOLD,
    BoundInputs,
    TailConditionError,
    rate_bound,
    rsc_constants,
    scaling_curve,
    xi_bound,
    zeta_bound,
)
from .data import (
    CsvFormatError,
    destandardize_coefficients,
    load_dataset,
    standardize,
)
from .distributions import (
    DISTRIBUTION_KINDS,
    cauchy,
    gauss_mixture,
    has_finite_variance,
    laplace,
    normal,
    student_t,
    tail_prob,
)
from .estimators import (
    _MD_KINDS,
    ESTIMATOR_KINDS,
    EstimatorSpec,
    default_lambda_grid,
    fit,
    tune,
)
from .simulate import (
    DesignModel,
    SimConfig,
    bootstrap_stability,
    generate_errors,
    report_csv_text,
    report_json_text,
    run_benchmark,
    stability_csv_text,
)

_EXIT_OK = 0
_EXIT_INPUT = 2
_EXIT_SOLVER = 3
_EXIT_TAIL = 4

_TUNING_HOLDOUT = 0.25


class CliError(Exception):
    """Input or validation problem that should exit with code 2."""


@dataclass(frozen=True)
class CliConfig:
    """Fully merged options of one subcommand invocation."""

    subcommand: str
    options: dict

    def __getitem__(self, key):
        return self.options[key]


_REQUIRED = object()

_DEFAULTS = {
    "fit": {
        "data": _REQUIRED,
        "response": "y",
        "estimator": "md_lasso",
        "lambda": None,
        "c": None,
        "trim_fraction": None,
        "lambda_error": None,
        "max_iterations": None,
        "no_standardize": False,
        "seed": 0,
        "top_k": 10,
        "strict": False,
        "output": _REQUIRED,
    },
    "tune": {
        "data": _REQUIRED,
        "response": "y",
        "estimator": "md_lasso",
        "lambda_grid": None,
        "c_grid": None,
        "method": 0.25,
        "seed": 0,
        "no_standardize": False,
        "output": _REQUIRED,
    },
    "simulate": {
        "n": 200,
        "p": 500,
        "design": "toeplitz",
        "rho": 0.5,
        "error": "normal",
        "scale": 1.0,
        "df": 4.0,
        "replications": 20,
        "seed": 0,
        "estimators": "md_lasso:c=5,lasso",
        "lambda_grid": None,
        "c_grid": None,
        "output": _REQUIRED,
        "no_plot": False,
        "verbose": False,
    },
    "bounds": {
        "dist": "normal",
        "scale": 1.0,
        "df": 4.0,
        "c": 5.0,
        "gamma": None,
        "M": 1.0,
        "kappa1": None,
        "kappa_re": 1.0,
        "s": 5,
        "p": 1000,
        "n": 200,
        "which": None,
        "curve": False,
        "c_grid": None,
        "output": None,
        "no_plot": False,
    },
    "curve": {
        "dist": "normal",
        "scale": 1.0,
        "df": 4.0,
        "c_grid": _REQUIRED,
        "M": 1.0,
        "kappa1": None,
        "kappa_re": 1.0,
        "s": 5,
        "p": 1000,
        "n": 200,
        "output": _REQUIRED,
        "no_plot": False,
    },
    "stability": {
        "data": _REQUIRED,
        "response": "y",
        "estimator": "md_lasso:c=5",
        "num_bootstrap": 100,
        "seed": 0,
        "no_standardize": False,
        "output": _REQUIRED,
        "no_plot": False,
    },
    "qqdata": {
        "model": _REQUIRED,
        "data": _REQUIRED,
        "response": None,
        "output": _REQUIRED,
        "no_plot": False,
    },
}


def _flag(sp, name, **kwargs):
    sp.add_argument(name, default=None, **kwargs)


def _switch(sp, name):
    sp.add_argument(name, action="store_const", const=True, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdlasso",
        description="Robust sparse regression toolkit: fitting, tuning, "
        "benchmarking, and finite-sample rate certificates.",
    )
    sub = parser.add_subparsers(dest="subcommand")

    sp = sub.add_parser("fit", help="fit one estimator on a CSV dataset")
    _flag(sp, "--config")
    _flag(sp, "--data")
    _flag(sp, "--response")
    _flag(sp, "--estimator", choices=ESTIMATOR_KINDS)
    _flag(sp, "--lambda", type=float)
    _flag(sp, "--c", type=float)
    _flag(sp, "--trim-fraction", type=float)
    _flag(sp, "--lambda-error", type=float)
    _flag(sp, "--max-iterations", type=int)
    _switch(sp, "--no-standardize")
    _flag(sp, "--seed", type=int)
    _flag(sp, "--top-k", type=int)
    _switch(sp, "--strict")
    _flag(sp, "--output")

    sp = sub.add_parser("tune", help="grid-search the penalty (and c) on a CSV dataset")
    _flag(sp, "--config")
    _flag(sp, "--data")
    _flag(sp, "--response")
    _flag(sp, "--estimator")
    _flag(sp, "--lambda-grid")
    _flag(sp, "--c-grid")
    _flag(sp, "--method")
    _flag(sp, "--seed", type=int)
    _switch(sp, "--no-standardize")
    _flag(sp, "--output")

    sp = sub.add_parser("simulate", help="run the synthetic benchmark")
    _flag(sp, "--config")
    _flag(sp, "--n", type=int)
    _flag(sp, "--p", type=int)
    _flag(sp, "--design", choices=("toeplitz", "two_factor"))
    _flag(sp, "--rho", type=float)
    _flag(sp, "--error", choices=DISTRIBUTION_KINDS)
    _flag(sp, "--scale", type=float)
    _flag(sp, "--df", type=float)
    _flag(sp, "--replications", type=int)
    _flag(sp, "--seed", type=int)
    _flag(sp, "--estimators")
    _flag(sp, "--lambda-grid")
    _flag(sp, "--c-grid")
    _flag(sp, "--output")
    _switch(sp, "--no-plot")
    _switch(sp, "--verbose")

    sp = sub.add_parser("bounds", help="print finite-sample rate certificates")
    _flag(sp, "--config")
    _flag(sp, "--dist", choices=DISTRIBUTION_KINDS)
    _flag(sp, "--scale", type=float)
    _flag(sp, "--df", type=float)
    _flag(sp, "--c", type=float)
    _flag(sp, "--gamma", type=float)
    _flag(sp, "--M", type=float)
    _flag(sp, "--kappa1", type=float)
    _flag(sp, "--kappa-re", type=float)
    _flag(sp, "--s", type=int)
    _flag(sp, "--p", type=int)
    _flag(sp, "--n", type=int)
    _flag(sp, "--which", choices=("lemma1", "lemma2"))
    _switch(sp, "--curve")
    _flag(sp, "--c-grid")
    _flag(sp, "--output")
    _switch(sp, "--no-plot")

    sp = sub.add_parser("curve", help="rate-factor scaling curve over a c grid")
    _flag(sp, "--config")
    _flag(sp, "--dist", choices=DISTRIBUTION_KINDS)
    _flag(sp, "--scale", type=float)
    _flag(sp, "--df", type=float)
    _flag(sp, "--c-grid")
    _flag(sp, "--M", type=float)
    _flag(sp, "--kappa1", type=float)
    _flag(sp, "--kappa-re", type=float)
    _flag(sp, "--s", type=int)
    _flag(sp, "--p", type=int)
    _flag(sp, "--n", type=int)
    _flag(sp, "--output")
    _switch(sp, "--no-plot")

    sp = sub.add_parser("stability", help="bootstrap selection counts on a CSV dataset")
    _flag(sp, "--config")
    _flag(sp, "--data")
    _flag(sp, "--response")
    _flag(sp, "--estimator")
    _flag(sp, "--num-bootstrap", type=int)
    _flag(sp, "--seed", type=int)
    _switch(sp, "--no-standardize")
    _flag(sp, "--output")
    _switch(sp, "--no-plot")

    sp = sub.add_parser("qqdata", help="emit residual vs normal-quantile pairs")
    _flag(sp, "--config")
    _flag(sp, "--model")
    _flag(sp, "--data")
    _flag(sp, "--response")
    _flag(sp, "--output")
    _switch(sp, "--no-plot")

    return parser


def _merge(args, defaults) -> CliConfig:
    values = vars(args)
    file_values = {}
    config_path = values.get("config")
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as err:
            raise CliError(f"{config_path}: invalid JSON ({err})") from None
        if not isinstance(loaded, dict):
            raise CliError(f"{config_path}: the config must be a JSON object")
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise CliError(f"{config_path}: unknown config keys: {', '.join(unknown)}")
        file_values = loaded
    options = {}
    missing = []
    for key, fallback in defaults.items():
        value = values.get(key)
        if value is None and key in file_values:
            value = file_values[key]
        if value is None:
            value = fallback
        if value is _REQUIRED:
            missing.append("--" + key.replace("_", "-"))
            continue
        options[key] = value
    if missing:
        raise CliError("missing required option(s): " + ", ".join(missing))
    return CliConfig(subcommand=args.subcommand, options=options)


_SPEC_KEYS = {
    "lam": float,
    "c": float,
    "trim_fraction": float,
    "lam_error": float,
    "max_iterations": int,
}


def _build_spec(kind, params) -> EstimatorSpec:
    if kind not in ESTIMATOR_KINDS:
        raise CliError(
            f"unknown estimator kind {kind!r}; expected one of {ESTIMATOR_KINDS}"
        )
    clean = {}
    for key, value in params.items():
        if key not in _SPEC_KEYS:
            raise CliError(f"unknown estimator parameter {key!r}")
        if value is not None:
            clean[key] = _SPEC_KEYS[key](value)
    clean.setdefault("lam", 1.0)
    if kind in _MD_KINDS:
        clean.setdefault("c", 5.0)
    if kind == "extended_lasso":
        clean.setdefault("lam_error", 1.0)
    try:
        return EstimatorSpec(kind=kind, **clean)
    except ValueError as err:
        raise CliError(str(err)) from None


def _parse_estimator_entries(text):
    entries = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            raise CliError("empty estimator entry")
        parts = chunk.split(":")
        kind = parts[0].strip()
        params = {}
        for token in parts[1:]:
            key, sep, value = token.partition("=")
            if not sep:
                raise CliError(f"estimator parameter {token!r} must look like key=value")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise CliError(
                    f"estimator parameter {token!r} has a non-numeric value"
                ) from None
        entries.append((kind, params))
    return entries


def _parse_estimators(text):
    return tuple(_build_spec(kind, params) for kind, params in _parse_estimator_entries(text))


def _parse_single_estimator_entry(text):
    entries = _parse_estimator_entries(text)
    if len(entries) != 1:
        raise CliError("exactly one estimator is expected here")
    return entries[0]


def _parse_float_list(value):
    if value is None:
        return None
    if isinstance(value, str):
        tokens = [tok.strip() for tok in value.split(",") if tok.strip()]
    elif isinstance(value, (list, tuple)):
        tokens = list(value)
    else:
        raise CliError(f"expected a comma-separated list, got {value!r}")
    try:
        parsed = tuple(float(tok) for tok in tokens)
    except (TypeError, ValueError):
        raise CliError(f"non-numeric entry in list {value!r}") from None
    if not parsed:
        raise CliError("the list must be non-empty")
    return parsed


def _parse_method(value):
    if isinstance(value, bool):
        raise CliError("method must be a holdout fraction or a fold count")
    if isinstance(value, (int, float)):
        return value
    text = str(value).strip()
    try:
        return float(text) if ("." in text or "e" in text.lower()) else int(text)
    except ValueError:
        raise CliError(f"cannot parse method {value!r}") from None


def _make_distribution(kind, scale, df):
    try:
        if kind == "normal":
            return normal(float(scale))
        if kind == "laplace":
            return laplace(float(scale))
        if kind == "cauchy":
            return cauchy(float(scale))
        if kind == "student_t":
            return student_t(float(df))
        if kind == "gauss_mixture":
            return gauss_mixture()
    except ValueError as err:
        raise CliError(str(err)) from None
    raise CliError(f"unknown error distribution {kind!r}")


def _g17(value: float) -> str:
    return "%.17g" % value


def _atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mdlasso-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_json(path, document) -> None:
    _atomic_write(path, json.dumps(document, sort_keys=True, indent=2) + "\n")


def _load_data(cfg):
    data = load_dataset(cfg["data"], cfg["response"])
    if cfg["no_standardize"]:
        return data, data, None
    try:
        fit_data, standardizer = standardize(data)
    except ValueError as err:
        raise CliError(str(err)) from None
    return data, fit_data, standardizer


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _figure_target(output_path) -> str:
    return str(Path(os.fspath(output_path)).with_suffix(".png"))


def _render_benchmark_figure(report, path) -> None:
    labels = [label for label, metrics in report.summaries.items() if metrics]
    if not labels:
        return
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, metric, title in (
        (axes[0], "model_error", "model error"),
        (axes[1], "f1", "F1 score"),
    ):
        samples = [
            [getattr(r, metric) for r in report.records if r.estimator == label]
            for label in labels
        ]
        ax.boxplot(samples, tick_labels=labels)
        ax.set_ylabel(title)
        ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _render_curve_figure(points, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([c for c, _ in points], [f for _, f in points], marker="o", markersize=3)
    ax.set_xlabel("c")
    ax.set_ylabel("rate factor")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _render_stability_figure(counts, path) -> None:
    plt = _pyplot()
    indices = sorted(counts)
    fig, ax = plt.subplots(figsize=(max(4, 0.4 * len(indices)), 4))
    ax.bar([str(i) for i in indices], [counts[i] for i in indices])
    ax.set_xlabel("predictor index")
    ax.set_ylabel("selection count")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _render_qq_figure(quantiles, residuals, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(quantiles, residuals, s=10)
    lo = min(quantiles[0], residuals[0])
    hi = max(quantiles[-1], residuals[-1])
    ax.plot([lo, hi], [lo, hi], linewidth=1, color="gray")
    ax.set_xlabel("theoretical normal quantile")
    ax.set_ylabel("sorted residual")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _cmd_fit(cfg) -> int:
    data, fit_data, standardizer = _load_data(cfg)
    kind = cfg["estimator"]
    params = {
        "c": cfg["c"],
        "trim_fraction": cfg["trim_fraction"],
        "lam_error": cfg["lambda_error"],
        "max_iterations": cfg["max_iterations"],
    }
    lam = cfg["lambda"]
    if lam is None:
        base = _build_spec(kind, {**params, "lam": 1.0})
        grid = default_lambda_grid(fit_data, kind, c=base.c)
        tuned = tune(
            fit_data, base, grid, method=_TUNING_HOLDOUT, seed=int(cfg["seed"])
        )
        spec = tuned.chosen
    else:
        spec = _build_spec(kind, {**params, "lam": lam})
    try:
        result = fit(fit_data, spec)
    except Exception as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return _EXIT_SOLVER
    coef = result.coefficients
    if standardizer is not None:
        coef = destandardize_coefficients(coef, standardizer)
    names = data.predictor_names or tuple(str(j) for j in range(data.p))
    order = np.argsort(-np.abs(coef.beta), kind="stable")
    top = [
        {"name": names[j], "coefficient": float(coef.beta[j])}
        for j in order[: int(cfg["top_k"])]
        if coef.beta[j] != 0.0
    ]
    weights = result.observation_weights
    document = {
        "estimator": kind,
        "response": cfg["response"],
        "lambda": float(result.lam),
        "c": None if result.c is None else float(result.c),
        "objective": float(result.objective_value),
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "kkt_residual": None if result.kkt_residual is None else float(result.kkt_residual),
        "coefficients": [float(v) for v in coef.beta],
        "intercept": float(coef.intercept),
        "observation_weights": None if weights is None else [float(w) for w in weights],
        "top_predictors": top,
    }
    _write_json(cfg["output"], document)
    print(f"wrote model to {cfg['output']}")
    if cfg["strict"] and not result.converged:
        print("solver did not converge (strict mode)", file=sys.stderr)
        return _EXIT_SOLVER
    return _EXIT_OK


def _cmd_tune(cfg) -> int:
    _, fit_data, _ = _load_data(cfg)
    kind, params = _parse_single_estimator_entry(cfg["estimator"])
    base = _build_spec(kind, params)
    lam_grid = _parse_float_list(cfg["lambda_grid"])
    if lam_grid is None:
        lam_grid = tuple(default_lambda_grid(fit_data, kind, c=base.c))
    c_grid = _parse_float_list(cfg["c_grid"])
    method = _parse_method(cfg["method"])
    try:
        tuned = tune(
            fit_data, base, lam_grid, c_grid=c_grid, method=method, seed=int(cfg["seed"])
        )
    except ValueError as err:
        raise CliError(str(err)) from None
    document = {
        "chosen": {
            "kind": tuned.chosen.kind,
            "lambda": float(tuned.chosen.lam),
            "c": None if tuned.chosen.c is None else float(tuned.chosen.c),
        },
        "grid": [
            {
                "lambda": float(spec.lam),
                "c": None if spec.c is None else float(spec.c),
                "score": float(score),
            }
            for spec, score in tuned.grid
        ],
        "method": method,
    }
    _write_json(cfg["output"], document)
    chosen = tuned.chosen
    line = f"chosen lambda: {chosen.lam:.6g}"
    if chosen.c is not None:
        line += f", c: {chosen.c:.6g}"
    print(line)
    return _EXIT_OK


def _cmd_simulate(cfg) -> int:
    try:
        design = DesignModel(variant=cfg["design"], rho=float(cfg["rho"]))
    except ValueError as err:
        raise CliError(str(err)) from None
    dist = _make_distribution(cfg["error"], cfg["scale"], cfg["df"])
    estimators = _parse_estimators(cfg["estimators"])
    try:
        config = SimConfig(
            n=int(cfg["n"]),
            p=int(cfg["p"]),
            design=design,
            error=dist,
            replications=int(cfg["replications"]),
            seed=int(cfg["seed"]),
            estimators=estimators,
            lambda_grid=_parse_float_list(cfg["lambda_grid"]),
            c_grid=_parse_float_list(cfg["c_grid"]),
        )
    except ValueError as err:
        raise CliError(str(err)) from None
    if cfg["verbose"]:
        check_rng = np.random.default_rng(
            np.random.SeedSequence(config.seed, spawn_key=(4,))
        )
        draws = generate_errors(dist, 100_000, check_rng)
        if has_finite_variance(dist):
            print(f"unit-variance check ({dist.kind}): {float(draws.var()):.6g}")
        else:
            print(f"symmetric-median check ({dist.kind}): {float(np.median(draws)):.6g}")
    report = run_benchmark(config)
    prefix = os.fspath(cfg["output"])
    _atomic_write(prefix + ".csv", report_csv_text(report))
    _atomic_write(prefix + ".json", report_json_text(report))
    if not cfg["no_plot"]:
        _render_benchmark_figure(report, prefix + ".png")
    print(f"{'estimator':<24} {'median_me':>12} {'median_f1':>12}")
    for label, metrics in report.summaries.items():
        if metrics:
            me = f"{metrics['model_error']['median']:.6g}"
            f1 = f"{metrics['f1']['median']:.6g}"
        else:
            me = f1 = "failed"
        print(f"{label:<24} {me:>12} {f1:>12}")
    return _EXIT_OK


def _bound_inputs(cfg, dist, c, gamma):
    kappa1 = cfg["kappa1"]
    if kappa1 is None:
        kappa1 = tail_prob(dist, 1.0)
    try:
        return BoundInputs(
            M=float(cfg["M"]),
            kappa1=float(kappa1),
            kappa_re=float(cfg["kappa_re"]),
            s=int(cfg["s"]),
            p=int(cfg["p"]),
            n=int(cfg["n"]),
            c=float(c),
            gamma=gamma,
        )
    except ValueError as err:
        raise CliError(str(err)) from None


def _write_curve(cfg, dist) -> int:
    grid = _parse_float_list(cfg["c_grid"])
    if grid is None:
        raise CliError("--c-grid is required for a scaling curve")
    output = cfg["output"]
    if output is None:
        raise CliError("--output is required for a scaling curve")
    inputs = _bound_inputs(cfg, dist, grid[0], None)
    points = scaling_curve(dist, grid, inputs)
    lines = ["c,factor"] + [f"{_g17(c)},{_g17(factor)}" for c, factor in points]
    _atomic_write(output, "\n".join(lines) + "\n")
    if not cfg["no_plot"]:
        _render_curve_figure(points, _figure_target(output))
    print(f"wrote {len(points)} curve points to {output}")
    return _EXIT_OK


def _cmd_bounds(cfg) -> int:
    dist = _make_distribution(cfg["dist"], cfg["scale"], cfg["df"])
    if cfg["curve"]:
        return _write_curve(cfg, dist)
    inputs = _bound_inputs(cfg, dist, cfg["c"], cfg["gamma"])
    which = cfg["which"]
    if which is None:
        which = "lemma2" if has_finite_variance(dist) else "lemma1"
    kappa_half = tail_prob(dist, math.sqrt(inputs.c) / 2.0)
    xi = xi_bound(inputs, dist)
    zeta = zeta_bound(inputs, dist)
    rsc = rsc_constants(inputs, kappa_half)
    rate = rate_bound(inputs, dist, which)
    scale_note = f"df={dist.df:g}" if dist.kind == "student_t" else f"scale={dist.scale:g}"
    print(f"distribution: {dist.kind} ({scale_note})")
    print(f"c: {inputs.c:.6g}")
    print(f"gamma: {inputs.gamma:.6g}")
    print(f"kappa1 (tail mass at 1): {inputs.kappa1:.6g}")
    print(f"kappa at sqrt(c)/2: {kappa_half:.6g}")
    print(f"tail threshold: {TAIL_THRESHOLD:.6g}")
    print(f"tail condition: {'ok' if rsc.condition_ok else 'violated'}")
    print(f"xi (tail gradient constant): {xi:.6g}")
    print(f"zeta (moment gradient constant): {zeta:.6g}")
    print(f"kappa1_rsc: {rsc.kappa1_rsc:.6g}")
    print(f"kappa2_rsc: {rsc.kappa2_rsc:.6g}")
    print(f"rate lemma: {which}")
    print(f"rate factor: {rate.factor:.6g}")
    print(f"rate value: {rate.value:.6g}")
    return _EXIT_OK


def _cmd_curve(cfg) -> int:
    dist = _make_distribution(cfg["dist"], cfg["scale"], cfg["df"])
    return _write_curve(cfg, dist)


def _cmd_stability(cfg) -> int:
    _, fit_data, _ = _load_data(cfg)
    kind, params = _parse_single_estimator_entry(cfg["estimator"])
    if "lam" in params:
        spec = _build_spec(kind, params)
    else:
        base = _build_spec(kind, params)
        grid = default_lambda_grid(fit_data, kind, c=base.c)
        tuned = tune(
            fit_data, base, grid, method=_TUNING_HOLDOUT, seed=int(cfg["seed"])
        )
        spec = tuned.chosen
    try:
        counts = bootstrap_stability(
            fit_data, spec, int(cfg["num_bootstrap"]), seed=int(cfg["seed"])
        )
    except ValueError as err:
        raise CliError(str(err)) from None
    _atomic_write(cfg["output"], stability_csv_text(counts))
    if counts and not cfg["no_plot"]:
        _render_stability_figure(counts, _figure_target(cfg["output"]))
    print(f"{len(counts)} predictors selected on the original data")
    return _EXIT_OK


def _cmd_qqdata(cfg) -> int:
    try:
        with open(cfg["model"], encoding="utf-8") as fh:
            document = json.load(fh)
    except json.JSONDecodeError as err:
        raise CliError(f"{cfg['model']}: invalid JSON ({err})") from None
    if not isinstance(document, dict) or "coefficients" not in document:
        raise CliError(f"{cfg['model']}: not a model document (no 'coefficients')")
    beta = np.asarray(document["coefficients"], dtype=float)
    intercept = float(document.get("intercept", 0.0))
    response = cfg["response"]
    if response is None:
        response = document.get("response", "y")
    data = load_dataset(cfg["data"], response)
    if beta.ndim != 1 or beta.size != data.p:
        raise CliError(
            f"model has {beta.size} coefficients but the data has {data.p} predictors"
        )
    residual = np.sort(data.y - data.X @ beta - intercept)
    n = residual.size
    quantiles = ndtri((np.arange(1, n + 1) - 0.5) / n)
    lines = ["theoretical_quantile,residual"] + [
        f"{_g17(q)},{_g17(r)}" for q, r in zip(quantiles, residual)
    ]
    _atomic_write(cfg["output"], "\n".join(lines) + "\n")
    if not cfg["no_plot"]:
        _render_qq_figure(quantiles, residual, _figure_target(cfg["output"]))
    print(f"wrote {n} quantile pairs to {cfg['output']}")
    return _EXIT_OK


_HANDLERS = {
    "fit": _cmd_fit,
    "tune": _cmd_tune,
    "simulate": _cmd_simulate,
    "bounds": _cmd_bounds,
    "curve": _cmd_curve,
    "stability": _cmd_stability,
    "qqdata": _cmd_qqdata,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return _EXIT_INPUT
    try:
        cfg = _merge(args, _DEFAULTS[args.subcommand])
        return _HANDLERS[args.subcommand](cfg)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return _EXIT_INPUT
    except CsvFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return _EXIT_INPUT
    except TailConditionError as err:
        print(f"error: {err}", file=sys.stderr)
        return _EXIT_TAIL
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return _EXIT_INPUT
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return _EXIT_INPUT
