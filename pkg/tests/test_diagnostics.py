import numpy as np
import pytest

from jumphmc import (
    AutocorrSeries,
    DecayFitError,
    DegenerateChainError,
    autocorrelation,
    fit_decay,
    tuning_objective,
)


def ar1_chain(phi, n, seed, dim=1):
    """Stationary AR(1) with unit marginal variance; analytic ACF is phi^lag."""
    rng = np.random.default_rng(seed)
    x = np.empty((n, dim))
    x[0] = rng.standard_normal(dim)
    innov = np.sqrt(1 - phi**2)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + innov * rng.standard_normal(dim)
    return x


class TestAutocorrelation:
    def test_lag_zero_is_exactly_one(self):
        x = np.random.default_rng(0).normal(size=2000)
        series = autocorrelation(x, np.arange(1, 2001), max_lag_evals=100, n_lags=21)
        assert series.lags[0] == 0.0
        assert series.values[0] == 1.0

    def test_white_noise_decorrelates(self):
        n = 100_000
        x = np.random.default_rng(1).normal(size=n)
        series = autocorrelation(x, np.arange(1, n + 1), max_lag_evals=50, n_lags=51)
        assert np.all(np.abs(series.values[1:]) < 0.02)

    def test_ar1_matches_analytic(self):
        phi = 0.9
        x = ar1_chain(phi, 100_000, seed=2)
        series = autocorrelation(x, np.arange(1, x.shape[0] + 1), max_lag_evals=20, n_lags=21)
        expected = phi ** series.lags
        np.testing.assert_allclose(series.values, expected, atol=0.05)

    def test_dimension_averaging(self):
        # two perfectly correlated copies give the same series as one
        x = ar1_chain(0.8, 20_000, seed=3)
        both = np.hstack([x, x])
        evals = np.arange(1, x.shape[0] + 1)
        a = autocorrelation(x, evals, max_lag_evals=10, n_lags=11)
        b = autocorrelation(both, evals, max_lag_evals=10, n_lags=11)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12)

    def test_affine_invariance(self):
        x = ar1_chain(0.7, 5_000, seed=4, dim=2)
        evals = np.arange(1, x.shape[0] + 1)
        a = autocorrelation(x, evals, max_lag_evals=15, n_lags=16)
        b = autocorrelation(2.5 * x - 3.0, evals, max_lag_evals=15, n_lags=16)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-9)

    def test_nearest_sample_lookup_with_uneven_costs(self):
        # two gradient evals per step: a lag of 2 evals is one step
        x = ar1_chain(0.9, 20_000, seed=5)
        evals = 2 * np.arange(1, x.shape[0] + 1)
        series = autocorrelation(x, evals, max_lag_evals=20, n_lags=11)
        expected = 0.9 ** (series.lags / 2)
        np.testing.assert_allclose(series.values, expected, atol=0.06)

    def test_short_chain_rejected(self):
        with pytest.raises(ValueError):
            autocorrelation(np.zeros(5), np.arange(5), max_lag_evals=2)

    def test_zero_variance_rejected(self):
        with pytest.raises(DegenerateChainError):
            autocorrelation(np.ones(100), np.arange(100), max_lag_evals=10)

    def test_series_validation(self):
        with pytest.raises(ValueError):
            AutocorrSeries(np.array([0.0, 1.0, 1.0]), np.array([1.0, 0.5, 0.2]))
        with pytest.raises(ValueError):
            AutocorrSeries(np.array([1.0, 2.0]), np.array([1.0, 0.5]))


class TestFitDecay:
    def test_pure_decay_recovered(self):
        n = np.arange(0, 1001, 10, dtype=float)
        fit = fit_decay(AutocorrSeries(n, np.exp(-0.01 * n)))
        assert fit.r_real == pytest.approx(-0.01, abs=1e-4)
        assert fit.r_imag == pytest.approx(0.0, abs=1e-4)

    def test_damped_oscillation_recovered(self):
        n = np.arange(0, 1001, 10, dtype=float)
        values = np.real(np.exp((-0.01 + 0.05j) * n))
        fit = fit_decay(AutocorrSeries(n, values))
        assert fit.r_real == pytest.approx(-0.01, abs=1e-3)
        assert fit.r_imag == pytest.approx(0.05, abs=1e-3)

    def test_noisy_recovery_within_30_percent(self):
        n = np.arange(0, 1001, 10, dtype=float)
        clean = np.real(np.exp((-0.01 + 0.05j) * n))
        estimates = []
        for seed in range(20):
            noisy = clean + np.random.default_rng(seed).normal(scale=0.02, size=n.size)
            noisy[0] = 1.0
            estimates.append(fit_decay(AutocorrSeries(n, noisy)).r_real)
        assert np.mean(estimates) == pytest.approx(-0.01, rel=0.30)
        assert max(abs(e + 0.01) / 0.01 for e in estimates) < 0.30

    def test_random_ground_truths_recovered(self):
        # noiseless in-model data: the grid + refinement must find the truth
        n = np.arange(0, 1001, 10, dtype=float)
        rng = np.random.default_rng(99)
        for _ in range(50):
            a = 10 ** rng.uniform(-3.5, -1.2)
            b = 0.0 if rng.random() < 0.3 else 10 ** rng.uniform(-3, np.log10(0.5 * np.pi / 10))
            fit = fit_decay(AutocorrSeries(n, np.exp(-a * n) * np.cos(b * n)))
            assert -fit.r_real == pytest.approx(a, rel=1e-3)
            assert fit.r_imag == pytest.approx(b, abs=1e-3 * max(b, a))

    def test_residual_is_minimal_among_evaluated(self):
        n = np.arange(0, 501, 5, dtype=float)
        values = np.exp(-0.02 * n)
        fit = fit_decay(AutocorrSeries(n, values))
        # spot-check: the reported point beats nearby perturbations
        for da, db in [(1e-3, 0), (-1e-3, 0), (0, 1e-3)]:
            a, b = -fit.r_real + da, max(0.0, fit.r_imag + db)
            obj = float(np.sum((np.exp(-a * n) * np.cos(b * n) - values) ** 2))
            assert fit.residual <= obj + 1e-12

    def test_too_few_lags_rejected(self):
        with pytest.raises(ValueError):
            fit_decay(AutocorrSeries(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.2])))

    def test_non_finite_series_rejected(self):
        n = np.arange(0, 10, dtype=float)
        values = np.ones(10)
        values[3] = np.nan
        with pytest.raises(DecayFitError):
            fit_decay(AutocorrSeries(n, values))


class TestTuningObjective:
    def test_reads_decay_rate(self):
        from jumphmc import DecayFit

        assert tuning_objective(DecayFit(r_real=-0.02, r_imag=0.1, residual=0.0)) == -0.02
        assert tuning_objective(DecayFit(r_real=0.0, r_imag=0.0, residual=0.0)) == 0.0

    def test_faster_decay_scores_lower(self):
        n = np.arange(0, 301, 3, dtype=float)
        slow = fit_decay(AutocorrSeries(n, np.exp(-0.005 * n)))
        fast = fit_decay(AutocorrSeries(n, np.exp(-0.05 * n)))
        assert tuning_objective(fast) < tuning_objective(slow)
