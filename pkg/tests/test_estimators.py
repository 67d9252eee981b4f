"""Tests for the estimator front ends and tuning.

Reference solvers live here, not in the package: an ISTA lasso, an exhaustive
LP-vertex enumeration for the absolute-loss problem (with a linear-programming
double check), and an alternation oracle for the corrupted-response model.
"""

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from mdlasso.data import Coefficients, Dataset
from mdlasso.estimators import (
    EstimatorSpec,
    TuningResult,
    default_lambda_grid,
    fit,
    fit_extended_lasso,
    fit_irw_md_lasso,
    fit_lad_lasso,
    fit_lasso,
    fit_md_lasso,
    fit_trimmed_lasso,
    tune,
)
from mdlasso.loss import MdLossParams, md_loss


def make_data(seed, n=40, p=10, noise=0.5, nonzero=3, heavy=False):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    beta = np.zeros(p)
    nonzero = min(nonzero, p)
    beta[:nonzero] = rng.uniform(1, 3, size=nonzero)
    eps = rng.standard_cauchy(size=n) if heavy else rng.normal(size=n)
    return Dataset(X, X @ beta + noise * eps), beta


def ista_lasso(X, y, lam, max_steps=200000, tol=1e-13):
    """Reference solver: proximal gradient on (1/2n)||y-Xb||^2 + lam*||b||_1."""
    n, p = X.shape
    step = 1.0 / np.linalg.eigvalsh(X.T @ X / n).max()
    beta = np.zeros(p)
    for _ in range(max_steps):
        g = -(X.T @ (y - X @ beta)) / n
        shifted = beta - step * g
        new = np.sign(shifted) * np.maximum(np.abs(shifted) - step * lam, 0.0)
        if np.max(np.abs(new - beta)) <= tol:
            beta = new
            break
        beta = new
    return beta


def lasso_objective(X, y, beta, lam):
    r = y - X @ beta
    return 0.5 * (r @ r) / len(y) + lam * np.abs(beta).sum()


def lad_objective(X, y, beta, lam):
    return np.abs(y - X @ beta).mean() + lam * np.abs(beta).sum()


def lad_vertex_minimum(X, y, lam):
    """Exhaustive search over basic solutions: p active constraints chosen
    among interpolated observations and zeroed coefficients."""
    n, p = X.shape
    best = lad_objective(X, y, np.zeros(p), lam)
    for k in range(1, p + 1):
        for rows in itertools.combinations(range(n), k):
            for free in itertools.combinations(range(p), k):
                sub = X[np.ix_(rows, free)]
                try:
                    coefs = np.linalg.solve(sub, y[list(rows)])
                except np.linalg.LinAlgError:
                    continue
                beta = np.zeros(p)
                beta[list(free)] = coefs
                best = min(best, lad_objective(X, y, beta, lam))
    return best


def lad_linprog_minimum(X, y, lam):
    n, p = X.shape
    cost = np.concatenate(
        [np.full(p, lam), np.full(p, lam), np.full(n, 1.0 / n), np.full(n, 1.0 / n)]
    )
    A_eq = np.hstack([X, -X, np.eye(n), -np.eye(n)])
    res = linprog(cost, A_eq=A_eq, b_eq=y, method="highs")
    assert res.status == 0
    return res.fun


def extended_objective(X, y, beta, e, lam, lam_error):
    r = y - X @ beta - e
    return (
        0.5 * (r @ r) / len(y)
        + lam * np.abs(beta).sum()
        + lam_error * np.abs(e).sum()
    )


def extended_alternation_oracle(X, y, lam, lam_error, outer=400):
    """Independent block alternation with an ISTA inner solver."""
    n, p = X.shape
    e = np.zeros(n)
    beta = np.zeros(p)
    for _ in range(outer):
        beta = ista_lasso(X, y - e, lam)
        shifted = y - X @ beta
        e = np.sign(shifted) * np.maximum(np.abs(shifted) - n * lam_error, 0.0)
    return extended_objective(X, y, beta, e, lam, lam_error)


class TestEstimatorSpec:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            EstimatorSpec(kind="ridge", lam=0.1)

    def test_c_required_for_md(self):
        with pytest.raises(ValueError, match="c"):
            EstimatorSpec(kind="md_lasso", lam=0.1)

    def test_c_forbidden_for_lasso(self):
        with pytest.raises(ValueError, match="c"):
            EstimatorSpec(kind="lasso", lam=0.1, c=5.0)

    def test_trim_fraction_default(self):
        spec = EstimatorSpec(kind="trimmed_lasso", lam=0.1)
        assert spec.trim_fraction == 0.10

    def test_trim_fraction_forbidden_elsewhere(self):
        with pytest.raises(ValueError, match="trim_fraction"):
            EstimatorSpec(kind="lasso", lam=0.1, trim_fraction=0.2)

    def test_trim_fraction_range(self):
        with pytest.raises(ValueError, match="trim_fraction"):
            EstimatorSpec(kind="trimmed_lasso", lam=0.1, trim_fraction=1.0)

    def test_lam_error_required_for_extended(self):
        with pytest.raises(ValueError, match="lam_error"):
            EstimatorSpec(kind="extended_lasso", lam=0.1)

    def test_lam_error_forbidden_elsewhere(self):
        with pytest.raises(ValueError, match="lam_error"):
            EstimatorSpec(kind="md_lasso", lam=0.1, c=5.0, lam_error=0.1)

    def test_negative_lam(self):
        with pytest.raises(ValueError, match="lam"):
            EstimatorSpec(kind="lasso", lam=-0.1)


class TestFitLasso:
    def test_orthonormal_closed_form(self):
        rng = np.random.default_rng(42)
        n, p = 30, 5
        Q, _ = np.linalg.qr(rng.normal(size=(n, p)))
        X = np.sqrt(n) * Q
        y = rng.normal(size=n)
        lam = 0.3
        data = Dataset(X, y)
        result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=lam))
        u = X.T @ y / n
        want = np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)
        np.testing.assert_allclose(result.coefficients.beta, want, atol=1e-10)

    def test_null_model_threshold(self):
        data, _ = make_data(1)
        lam_max = np.abs(data.X.T @ data.y / data.n).max()
        result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=lam_max * 1.001))
        assert not np.any(result.coefficients.beta)

    def test_matches_ista_reference(self):
        data, _ = make_data(2, n=40, p=10)
        lam = 0.1
        result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=lam))
        ref = ista_lasso(data.X, data.y, lam)
        got = lasso_objective(data.X, data.y, result.coefficients.beta, lam)
        want = lasso_objective(data.X, data.y, ref, lam)
        assert abs(got - want) <= 1e-8 * (1.0 + abs(want))
        assert result.objective_value == pytest.approx(got, rel=1e-12)

    def test_kkt_reported(self):
        data, _ = make_data(3)
        result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=0.05))
        assert result.converged
        assert result.kkt_residual is not None and result.kkt_residual <= 1e-8

    def test_norm_monotone_in_lambda(self):
        data, _ = make_data(4, n=50, p=20, nonzero=5)
        lams = np.geomspace(2.0, 1e-3, 12)
        norms = []
        for lam in lams:
            result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=float(lam)))
            norms.append(np.abs(result.coefficients.beta).sum())
        # lambda descending, so the l1 norm must be non-decreasing
        assert np.all(np.diff(norms) >= -1e-8)

    def test_warm_start_same_solution(self):
        data, _ = make_data(5)
        cold = fit_lasso(data, EstimatorSpec(kind="lasso", lam=0.1))
        warm = fit_lasso(
            data,
            EstimatorSpec(
                kind="lasso",
                lam=0.1,
                initial_point=Coefficients(np.ones(data.p)),
            ),
        )
        np.testing.assert_allclose(
            cold.coefficients.beta, warm.coefficients.beta, atol=1e-6
        )


class TestFitMdLasso:
    def test_kind_mismatch(self):
        data, _ = make_data(10)
        with pytest.raises(ValueError, match="md_lasso"):
            fit_md_lasso(data, EstimatorSpec(kind="lasso", lam=0.1))

    def test_full_shrinkage(self):
        data, _ = make_data(11)
        result = fit_md_lasso(data, EstimatorSpec(kind="md_lasso", lam=50.0, c=5.0))
        assert not np.any(result.coefficients.beta)

    def test_squared_loss_limit_matches_lasso(self):
        data, _ = make_data(12, n=50, p=10)
        lam = 0.05
        md = fit_md_lasso(
            data,
            EstimatorSpec(kind="md_lasso", lam=lam, c=1e8, rel_tolerance=1e-12),
        )
        ls = fit_lasso(data, EstimatorSpec(kind="lasso", lam=lam))
        gap = np.max(np.abs(md.coefficients.beta - ls.coefficients.beta))
        assert gap <= 1e-4

    def test_objective_beats_truth_under_heavy_noise(self):
        rng = np.random.default_rng(13)
        n, p = 200, 50
        X = rng.normal(size=(n, p))
        beta_true = np.zeros(p)
        beta_true[:5] = rng.uniform(1, 3, size=5)
        y = X @ beta_true + rng.standard_cauchy(size=n)
        data = Dataset(X, y)
        lam, c = 0.1, 5.0
        result = fit_md_lasso(data, EstimatorSpec(kind="md_lasso", lam=lam, c=c))
        params = MdLossParams(c=c)
        at_solution = result.objective_value
        at_truth = md_loss(data, Coefficients(beta_true), params) + lam * np.abs(
            beta_true
        ).sum()
        assert at_solution <= at_truth + 1e-9

    def test_carries_weights_and_kkt(self):
        data, _ = make_data(14)
        result = fit_md_lasso(data, EstimatorSpec(kind="md_lasso", lam=0.1, c=5.0))
        assert result.converged
        assert result.observation_weights is not None
        assert result.kkt_residual is not None and result.kkt_residual <= 1e-4


class TestFitIrwMdLasso:
    def test_zero_noise_recovery(self):
        rng = np.random.default_rng(20)
        n, p = 60, 8
        X = rng.normal(size=(n, p))
        beta = rng.normal(size=p)
        data = Dataset(X, X @ beta)
        result = fit_irw_md_lasso(
            data, EstimatorSpec(kind="irw_md_lasso", lam=1e-8, c=5.0)
        )
        np.testing.assert_allclose(result.coefficients.beta, beta, atol=1e-6)

    def test_agrees_with_direct_solver(self):
        data, _ = make_data(21, n=100, p=30, nonzero=5, heavy=True)
        lam, c = 0.1, 5.0
        irw = fit_irw_md_lasso(data, EstimatorSpec(kind="irw_md_lasso", lam=lam, c=c))
        direct = fit_md_lasso(
            data, EstimatorSpec(kind="md_lasso", lam=lam, c=c, rel_tolerance=1e-11)
        )
        gap = np.linalg.norm(irw.coefficients.beta - direct.coefficients.beta)
        assert gap <= 1e-3

    def test_uniform_weight_subproblem_is_plain_lasso(self):
        # inner weighted problem at weights 1/n must equal the plain lasso
        # at the same penalty level
        from mdlasso.estimators import _weighted_lasso_cd

        data, _ = make_data(22)
        lam = 0.1
        w = np.full(data.n, 1.0 / data.n)
        beta, _, _, _ = _weighted_lasso_cd(data.X, data.y, w, lam, tol=1e-10)
        plain = fit_lasso(
            data, EstimatorSpec(kind="lasso", lam=lam, rel_tolerance=1e-10)
        )
        np.testing.assert_allclose(beta, plain.coefficients.beta, atol=1e-8)

    def test_objective_trace_non_increasing(self):
        data, _ = make_data(23, heavy=True)
        result = fit_irw_md_lasso(
            data, EstimatorSpec(kind="irw_md_lasso", lam=0.1, c=5.0)
        )
        diffs = np.diff(result.objective_trace)
        assert np.all(diffs <= 1e-10)

    def test_kkt_certificate(self):
        data, _ = make_data(24, heavy=True)
        result = fit_irw_md_lasso(
            data, EstimatorSpec(kind="irw_md_lasso", lam=0.1, c=5.0)
        )
        assert result.converged
        assert result.kkt_residual is not None and result.kkt_residual <= 1e-4


class TestFitLadLasso:
    def test_unpenalized_intercept_is_median(self):
        rng = np.random.default_rng(30)
        y = rng.normal(size=11)
        data = Dataset(np.ones((11, 1)), y)
        result = fit_lad_lasso(data, EstimatorSpec(kind="lad_lasso", lam=0.0))
        assert result.coefficients.beta[0] == pytest.approx(np.median(y), abs=1e-4)

    def test_odd_symmetry(self):
        data, _ = make_data(31)
        flipped = Dataset(data.X, -data.y)
        a = fit_lad_lasso(data, EstimatorSpec(kind="lad_lasso", lam=0.1))
        b = fit_lad_lasso(flipped, EstimatorSpec(kind="lad_lasso", lam=0.1))
        np.testing.assert_allclose(
            a.coefficients.beta, -b.coefficients.beta, atol=1e-12
        )

    def test_matches_lp_oracles(self):
        rng = np.random.default_rng(32)
        n, p = 10, 3
        X = rng.normal(size=(n, p))
        y = X @ np.array([1.5, -2.0, 0.0]) + rng.standard_t(df=3, size=n)
        lam = 0.1
        data = Dataset(X, y)
        result = fit_lad_lasso(data, EstimatorSpec(kind="lad_lasso", lam=lam))
        got = lad_objective(X, y, result.coefficients.beta, lam)
        vertex = lad_vertex_minimum(X, y, lam)
        lp = lad_linprog_minimum(X, y, lam)
        assert vertex == pytest.approx(lp, rel=1e-9, abs=1e-9)
        assert abs(got - vertex) <= 1e-5 * (1.0 + abs(vertex))

    def test_objective_value_is_absolute_loss(self):
        data, _ = make_data(33)
        result = fit_lad_lasso(data, EstimatorSpec(kind="lad_lasso", lam=0.05))
        direct = lad_objective(data.X, data.y, result.coefficients.beta, 0.05)
        assert result.objective_value == pytest.approx(direct, rel=1e-12)

    def test_kkt_certificate(self):
        data, _ = make_data(34, heavy=True)
        result = fit_lad_lasso(data, EstimatorSpec(kind="lad_lasso", lam=0.1))
        assert result.converged
        assert result.kkt_residual is not None and result.kkt_residual <= 1e-4


class TestFitTrimmedLasso:
    def test_zero_fraction_identical_to_lasso(self):
        data, _ = make_data(40)
        trimmed = fit_trimmed_lasso(
            data, EstimatorSpec(kind="trimmed_lasso", lam=0.1, trim_fraction=0.0)
        )
        plain = fit_lasso(data, EstimatorSpec(kind="lasso", lam=0.1))
        np.testing.assert_array_equal(
            trimmed.coefficients.beta, plain.coefficients.beta
        )

    def test_gross_outlier_dropped(self):
        data, beta = make_data(41, n=50, p=8, noise=0.2)
        y = data.y.copy()
        y[17] += 100.0
        spiked = Dataset(data.X, y)
        result = fit_trimmed_lasso(
            spiked, EstimatorSpec(kind="trimmed_lasso", lam=0.05, trim_fraction=0.1)
        )
        # kept observations are exposed through the weight vector
        assert result.observation_weights[17] == 0.0
        kept = np.flatnonzero(result.observation_weights)
        assert kept.size == 45

    def test_boundary_ties_keep_lower_index(self):
        # all-zero design: residuals equal y exactly, fit stays at zero
        X = np.zeros((5, 2))
        y = np.array([1.0, 2.0, 3.0, 3.0, 0.5])
        data = Dataset(X, y)
        result = fit_trimmed_lasso(
            data, EstimatorSpec(kind="trimmed_lasso", lam=0.1, trim_fraction=0.2)
        )
        # one observation trimmed; |r| ties at 3.0 drop the higher index
        assert result.observation_weights[3] == 0.0
        assert result.observation_weights[2] > 0.0

    def test_too_few_left_is_error(self):
        data, _ = make_data(42, n=3, p=2)
        with pytest.raises(ValueError, match="observations"):
            fit_trimmed_lasso(
                data,
                EstimatorSpec(kind="trimmed_lasso", lam=0.1, trim_fraction=0.7),
            )

    def test_resistant_where_plain_lasso_is_pulled(self):
        data, beta = make_data(43, n=60, p=10, noise=0.1)
        y = data.y.copy()
        rng = np.random.default_rng(99)
        bad = rng.choice(60, size=5, replace=False)
        y[bad] += rng.choice([-1, 1], size=5) * 30.0
        spiked = Dataset(data.X, y)
        trimmed = fit_trimmed_lasso(
            spiked, EstimatorSpec(kind="trimmed_lasso", lam=0.05, trim_fraction=0.1)
        )
        plain = fit_lasso(spiked, EstimatorSpec(kind="lasso", lam=0.05))
        err_trimmed = np.linalg.norm(trimmed.coefficients.beta - beta)
        err_plain = np.linalg.norm(plain.coefficients.beta - beta)
        assert err_trimmed < err_plain


class TestFitExtendedLasso:
    def test_huge_corruption_penalty_matches_lasso(self):
        data, _ = make_data(50)
        ext = fit_extended_lasso(
            data, EstimatorSpec(kind="extended_lasso", lam=0.1, lam_error=1e6)
        )
        plain = fit_lasso(data, EstimatorSpec(kind="lasso", lam=0.1))
        assert not np.any(ext.corruption)
        np.testing.assert_allclose(
            ext.coefficients.beta, plain.coefficients.beta, atol=1e-7
        )

    def test_huge_lam_gives_thresholded_corruption(self):
        data, _ = make_data(51, n=20, p=4)
        lam_error = 0.02
        ext = fit_extended_lasso(
            data,
            EstimatorSpec(kind="extended_lasso", lam=1e4, lam_error=lam_error),
        )
        assert not np.any(ext.coefficients.beta)
        shift = data.n * lam_error
        want = np.sign(data.y) * np.maximum(np.abs(data.y) - shift, 0.0)
        np.testing.assert_allclose(ext.corruption, want, atol=1e-12)

    def test_matches_alternation_oracle(self):
        data, _ = make_data(52, n=20, p=5)
        lam, lam_error = 0.05, 0.08
        ext = fit_extended_lasso(
            data, EstimatorSpec(kind="extended_lasso", lam=lam, lam_error=lam_error)
        )
        got = extended_objective(
            data.X, data.y, ext.coefficients.beta, ext.corruption, lam, lam_error
        )
        want = extended_alternation_oracle(data.X, data.y, lam, lam_error)
        assert abs(got - want) <= 1e-8 * (1.0 + abs(want))
        assert ext.objective_value == pytest.approx(got, rel=1e-12)

    def test_outer_trace_non_increasing(self):
        data, _ = make_data(53)
        ext = fit_extended_lasso(
            data, EstimatorSpec(kind="extended_lasso", lam=0.05, lam_error=0.05)
        )
        assert np.all(np.diff(ext.objective_trace) <= 1e-12)

    def test_planted_corruption_recovered(self):
        data, beta = make_data(54, n=40, p=6, noise=0.3)
        y = data.y.copy()
        y[3] += 8.0
        y[11] -= 6.0
        spiked = Dataset(data.X, y)
        ext = fit_extended_lasso(
            spiked, EstimatorSpec(kind="extended_lasso", lam=0.05, lam_error=0.1)
        )
        support = set(np.flatnonzero(ext.corruption))
        assert support == {3, 11}
        assert ext.corruption[3] > 0 and ext.corruption[11] < 0


class TestTune:
    def test_single_element_grid(self):
        data, _ = make_data(60)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        result = tune(data, base, [0.1], method=0.25, seed=0)
        assert isinstance(result, TuningResult)
        assert result.chosen.lam == 0.1
        assert len(result.grid) == 1
        assert result.folds == 0.25

    def test_tie_break_larger_lam_then_larger_c(self):
        rng = np.random.default_rng(61)
        X = rng.normal(size=(30, 6))
        data = Dataset(X, np.zeros(30))
        base = EstimatorSpec(kind="md_lasso", lam=1.0, c=5.0)
        result = tune(
            data,
            base,
            [0.05, 0.2, 0.1],
            c_grid=[2.0, 10.0],
            method=0.25,
            seed=3,
        )
        scores = [score for _, score in result.grid]
        assert max(scores) == min(scores)
        assert result.chosen.lam == 0.2
        assert result.chosen.c == 10.0

    def test_deterministic_given_seed(self):
        data, _ = make_data(62, heavy=True)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        grid = [0.5, 0.1, 0.02]
        a = tune(data, base, grid, method=0.3, seed=42)
        b = tune(data, base, grid, method=0.3, seed=42)
        assert [s for _, s in a.grid] == [s for _, s in b.grid]
        assert a.chosen == b.chosen
        c = tune(data, base, grid, method=0.3, seed=43)
        assert [s for _, s in a.grid] != [s for _, s in c.grid]

    def test_kfold_runs_and_scores_finite(self):
        data, _ = make_data(63, n=40)
        base = EstimatorSpec(kind="md_lasso", lam=1.0, c=5.0)
        result = tune(data, base, [0.3, 0.1], c_grid=[2.0, 5.0], method=5, seed=1)
        assert result.folds == 5
        assert len(result.grid) == 4
        assert all(np.isfinite(score) for _, score in result.grid)
        assert any(spec == result.chosen for spec, _ in result.grid)

    def test_chosen_minimizes_grid(self):
        data, _ = make_data(64)
        base = EstimatorSpec(kind="lad_lasso", lam=1.0)
        result = tune(data, base, [1.0, 0.1, 0.01], method=0.25, seed=5)
        best = min(score for _, score in result.grid)
        chosen_score = [s for spec, s in result.grid if spec == result.chosen][0]
        assert chosen_score == best

    def test_force_absolute_changes_score(self):
        data, _ = make_data(65, heavy=True)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        own = tune(data, base, [0.1], method=0.25, seed=7)
        absolute = tune(
            data, base, [0.1], method=0.25, seed=7, force_absolute=True
        )
        assert own.grid[0][1] != absolute.grid[0][1]

    def test_degenerate_splits_rejected(self):
        data, _ = make_data(66, n=3, p=2)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        with pytest.raises(ValueError):
            tune(data, base, [0.1], method=0.5, seed=0)
        big, _ = make_data(67, n=20, p=2)
        with pytest.raises(ValueError):
            tune(big, base, [0.1], method=50, seed=0)
        with pytest.raises(ValueError):
            tune(big, base, [0.1], method=1.5, seed=0)
        with pytest.raises(ValueError):
            tune(big, base, [0.1], method=True, seed=0)

    def test_empty_grid_rejected(self):
        data, _ = make_data(68)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        with pytest.raises(ValueError):
            tune(data, base, [], method=0.25, seed=0)

    def test_c_grid_rejected_for_non_md(self):
        data, _ = make_data(69)
        base = EstimatorSpec(kind="lasso", lam=1.0)
        with pytest.raises(ValueError, match="c grid"):
            tune(data, base, [0.1], c_grid=[2.0], method=0.25, seed=0)


class TestDefaultLambdaGrid:
    def test_descending_and_positive(self):
        data, _ = make_data(70)
        grid = default_lambda_grid(data, kind="lasso")
        assert np.all(np.diff(grid) < 0) and np.all(grid > 0)

    def test_top_value_nulls_the_lasso(self):
        data, _ = make_data(71)
        grid = default_lambda_grid(data, kind="lasso")
        result = fit_lasso(data, EstimatorSpec(kind="lasso", lam=float(grid[0])))
        assert not np.any(result.coefficients.beta)

    def test_md_kind_needs_c(self):
        data, _ = make_data(72)
        with pytest.raises(ValueError):
            default_lambda_grid(data, kind="md_lasso")
        grid = default_lambda_grid(data, kind="md_lasso", c=5.0)
        assert grid.size and np.all(grid > 0)


class TestCrossEstimatorInvariants:
    def test_every_converged_fit_certifies_stationarity(self):
        data, _ = make_data(80, n=60, p=12, nonzero=4)
        specs = [
            EstimatorSpec(kind="md_lasso", lam=0.1, c=5.0),
            EstimatorSpec(kind="irw_md_lasso", lam=0.1, c=5.0),
            EstimatorSpec(kind="lasso", lam=0.1),
            EstimatorSpec(kind="lad_lasso", lam=0.1),
            EstimatorSpec(kind="trimmed_lasso", lam=0.1, trim_fraction=0.1),
            EstimatorSpec(kind="extended_lasso", lam=0.1, lam_error=0.05),
        ]
        for spec in specs:
            result = fit(data, spec)
            assert result.converged, spec.kind
            assert result.kkt_residual is not None, spec.kind
            assert result.kkt_residual <= 1e-4, (spec.kind, result.kkt_residual)

    def test_dispatch_matches_direct_calls(self):
        data, _ = make_data(81)
        spec = EstimatorSpec(kind="lasso", lam=0.1)
        via_dispatch = fit(data, spec)
        direct = fit_lasso(data, spec)
        np.testing.assert_array_equal(
            via_dispatch.coefficients.beta, direct.coefficients.beta
        )
