import numpy as np
import pytest

from jumphmc import (
    DiagonalGaussian,
    EnergyFunction,
    IntegrationError,
    PhaseState,
    RoughWell,
    SamplerConfig,
    Transition,
    TransitionRates,
    compute_rates,
    draw_waiting_times,
    init_cache,
    resample,
    sample_chain,
    step,
    systematic_resample_indices,
    weighted_moments,
)
from jumphmc.jump import StateCache, _Node

LN2 = np.log(2.0)


def pinned_cache(h_cur, h_fwd, h_bwd):
    """A synthetic cache with prescribed total energies."""
    g = np.zeros(1)
    state = PhaseState([0.0], [0.0])
    return state, StateCache(
        current=_Node(state, h_cur, h_cur, g),
        forward=_Node(PhaseState([1.0], [0.0]), h_fwd, h_fwd, g),
        backward=_Node(PhaseState([-1.0], [0.0]), h_bwd, h_bwd, g),
    )


CFG = SamplerConfig(epsilon=0.5, steps=3, beta=0.25, n_samples=10, seed=0)
GAUSS_2D = DiagonalGaussian.isotropic(2)


class TestComputeRates:
    def test_flat_energy(self):
        state, cache = pinned_cache(1.0, 1.0, 1.0)
        r = compute_rates(state, cache, CFG, GAUSS_2D)
        assert r.gamma_L == pytest.approx(1.0)
        assert r.gamma_F == 0.0
        assert r.beta == CFG.beta

    def test_uphill_forward(self):
        state, cache = pinned_cache(0.0, 2 * LN2, 0.0)
        r = compute_rates(state, cache, CFG, GAUSS_2D)
        assert r.gamma_L == pytest.approx(0.5)
        assert r.gamma_F == pytest.approx(0.5)

    def test_downhill_rate_above_one(self):
        # rates are Poisson rates, not probabilities: values above 1 are legal
        state, cache = pinned_cache(0.0, -2 * LN2, 2 * LN2)
        r = compute_rates(state, cache, CFG, GAUSS_2D)
        assert r.gamma_L == pytest.approx(2.0)
        assert r.gamma_F == 0.0

    def test_inconsistent_cache_rejected(self):
        _, cache = pinned_cache(0.0, 0.0, 0.0)
        other = PhaseState([9.0], [0.0])
        with pytest.raises(ValueError):
            compute_rates(other, cache, CFG, GAUSS_2D)


class TestWaitingTimes:
    def test_zero_flip_rate_never_wins(self):
        rng = np.random.default_rng(0)
        rates = TransitionRates(gamma_L=1.0, gamma_F=0.0, beta=0.5)
        for _ in range(100):
            _, w_f, _ = draw_waiting_times(rates, rng)
            assert w_f == np.inf

    def test_min_is_exponential_with_total_rate(self):
        rng = np.random.default_rng(1)
        rates = TransitionRates(gamma_L=0.7, gamma_F=0.3, beta=0.5)
        mins = np.array([min(draw_waiting_times(rates, rng)) for _ in range(100_000)])
        assert mins.mean() == pytest.approx(1.0 / rates.total, rel=0.02)

    def test_two_way_race_fractions(self):
        # competing exponentials with rates (1, 3): second arm wins 75%
        rng = np.random.default_rng(2)
        rates = TransitionRates(gamma_L=1.0, gamma_F=3.0, beta=1e-300)
        n = 100_000
        wins = 0
        for _ in range(n):
            w_l, w_f, w_r = draw_waiting_times(rates, rng)
            wins += w_f < w_l and w_f < w_r
        sigma = np.sqrt(0.75 * 0.25 / n)
        assert abs(wins / n - 0.75) <= 3 * sigma


class TestStep:
    def test_huge_beta_dominates(self):
        config = SamplerConfig(epsilon=0.5, steps=1, beta=1e12, n_samples=10_000, seed=3)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        counts = chain.transition_counts()
        assert counts.get("R", 0) / len(chain) >= 0.999

    def test_fixed_seed_reproducible(self):
        config = SamplerConfig(epsilon=0.7, steps=4, beta=0.3, n_samples=500, seed=11)
        init = PhaseState(np.zeros(2), np.array([1.0, -1.0]))
        a = sample_chain(config, RoughWell(), init)
        b = sample_chain(config, RoughWell(), init)
        np.testing.assert_array_equal(a.positions, b.positions)
        np.testing.assert_array_equal(a.holding_times, b.holding_times)
        np.testing.assert_array_equal(a.transitions, b.transitions)

    def test_race_frequencies_at_pinned_state(self):
        # repeated races from one state follow the multinomial rate shares
        ef = RoughWell()
        config = SamplerConfig(epsilon=1.0, steps=3, beta=0.5, n_samples=1, seed=0)
        state = PhaseState([-1.69921191, -1.02124494], [-0.01153306, -1.48537518])
        cache = init_cache(state, config, ef)
        rates = compute_rates(state, cache, config, ef)
        probs = np.array([rates.gamma_L, rates.gamma_F, rates.beta]) / rates.total
        assert rates.gamma_F > 0.1  # the state genuinely exercises all three arms

        rng = np.random.default_rng(5)
        n = 100_000
        counts = {Transition.L: 0, Transition.F: 0, Transition.R: 0}
        for _ in range(n):
            _, sample, _ = step(state, cache, config, ef, rng)
            counts[sample.transition_out] += 1
        freqs = np.array([counts[Transition.L], counts[Transition.F], counts[Transition.R]]) / n
        sigma = np.sqrt(probs * (1 - probs) / n)
        np.testing.assert_array_less(np.abs(freqs - probs), 3 * sigma)

    def test_cache_reuse_after_l_transition(self):
        # the backward energy of the new state is the old state's, bit for bit
        ef = GAUSS_2D
        config = SamplerConfig(epsilon=0.6, steps=2, beta=0.2, n_samples=1, seed=9)
        rng = np.random.default_rng(9)
        state = PhaseState(np.array([0.5, -0.2]), np.array([1.0, 0.3]))
        cache = init_cache(state, config, ef)
        for _ in range(200):
            new_state, sample, new_cache = step(state, cache, config, ef, rng)
            if sample.transition_out is Transition.L:
                assert new_cache.backward.h == cache.current.h
                assert new_cache.backward.state is cache.current.state
                assert new_cache.current.h == cache.forward.h
            state, cache = new_state, new_cache


class TestSampleChain:
    def test_single_sample_is_init(self):
        config = SamplerConfig(epsilon=0.5, steps=2, beta=0.5, n_samples=1, seed=0)
        init = PhaseState(np.array([0.3, 0.4]), np.array([-1.0, 2.0]))
        chain = sample_chain(config, GAUSS_2D, init)
        assert len(chain) == 1
        np.testing.assert_array_equal(chain.positions[0], init.x)
        np.testing.assert_array_equal(chain.momenta[0], init.v)
        assert chain.holding_times[0] > 0

    def test_gaussian_weighted_mean_near_zero(self):
        config = SamplerConfig(epsilon=0.9, steps=5, beta=0.1, n_samples=20_000, seed=4)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        mean, cov = weighted_moments(chain)
        # batch-means standard error absorbs the autocorrelation
        n_batches = 50
        batches = np.array_split(np.arange(len(chain)), n_batches)
        batch_means = np.array(
            [
                chain.holding_times[b] @ chain.positions[b] / chain.holding_times[b].sum()
                for b in batches
            ]
        )
        se = batch_means.std(axis=0, ddof=1) / np.sqrt(n_batches)
        assert np.all(np.abs(mean) <= 3 * se)
        np.testing.assert_allclose(np.diag(cov), 1.0, rtol=0.10)

    def test_rough_well_at_reported_hyperparameters(self):
        # the published optimum for this sampler on the rough well
        config = SamplerConfig(epsilon=3.0, steps=25, beta=0.012314, n_samples=100_000, seed=0)
        init = PhaseState(np.zeros(2), np.random.default_rng(1).standard_normal(2))
        chain = sample_chain(config, RoughWell(), init)
        assert len(chain) == 100_000
        assert np.all(np.isfinite(chain.positions))
        assert np.all(chain.holding_times > 0)
        assert np.all(np.diff(chain.gradient_evals) >= 0)

    def test_no_self_transitions(self):
        config = SamplerConfig(epsilon=0.5, steps=2, beta=0.4, n_samples=2000, seed=6)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        same_x = np.all(chain.positions[1:] == chain.positions[:-1], axis=1)
        same_v = np.all(chain.momenta[1:] == chain.momenta[:-1], axis=1)
        assert not np.any(same_x & same_v)

    def test_integration_failure_keeps_partial_chain(self):
        class WalledGaussian(EnergyFunction):
            # finite quadratic bowl that becomes infinite outside a radius
            dim = 1

            def energy(self, x):
                return 0.5 * float(x[0] ** 2) if abs(x[0]) < 2.0 else np.inf

            def gradient(self, x):
                return np.asarray(x, dtype=float)

        config = SamplerConfig(epsilon=0.8, steps=4, beta=0.5, n_samples=10_000, seed=12)
        with pytest.raises(IntegrationError) as excinfo:
            sample_chain(config, WalledGaussian(), PhaseState([0.0], [0.1]))
        partial = excinfo.value.partial_chain
        assert partial is not None
        assert 0 < len(partial) < 10_000

    def test_holding_time_mean_matches_rate_law(self):
        # sojourn time at a pinned state is exponential with the total rate
        ef = RoughWell()
        config = SamplerConfig(epsilon=1.0, steps=3, beta=0.5, n_samples=1, seed=0)
        state = PhaseState([-1.69921191, -1.02124494], [-0.01153306, -1.48537518])
        cache = init_cache(state, config, ef)
        rates = compute_rates(state, cache, config, ef)
        rng = np.random.default_rng(7)
        mins = np.array([min(draw_waiting_times(rates, rng)) for _ in range(20_000)])
        assert mins.mean() == pytest.approx(1.0 / rates.total, rel=0.02)

    def test_chain_sample_accessor_roundtrip(self):
        config = SamplerConfig(epsilon=0.5, steps=2, beta=0.3, n_samples=50, seed=2)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        s = chain.sample(7)
        np.testing.assert_array_equal(s.state.x, chain.positions[7])
        assert s.holding_time == chain.holding_times[7]
        assert s.transition_out.value == chain.transitions[7]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(epsilon=0.5, steps=2, beta=0.0, n_samples=10)
        with pytest.raises(ValueError):
            SamplerConfig(epsilon=0.5, steps=2, beta=0.5, n_samples=0)


class TestResample:
    def test_uniform_weights_near_uniform_multiplicity(self):
        rng = np.random.default_rng(0)
        weights = np.ones(100)
        idx = systematic_resample_indices(weights, 10_000, rng)
        counts = np.bincount(idx, minlength=100)
        # systematic resampling at equal weights gives each input n_out/N copies
        np.testing.assert_array_equal(counts, np.full(100, 100))

    def test_weight_proportionality(self):
        rng = np.random.default_rng(1)
        idx = systematic_resample_indices(np.array([3.0, 1.0]), 10_000, rng)
        first = int(np.sum(idx == 0))
        sigma = np.sqrt(10_000 * 0.75 * 0.25)
        assert abs(first - 7500) <= 3 * sigma

    def test_single_input_copies(self):
        config = SamplerConfig(epsilon=0.5, steps=2, beta=0.5, n_samples=1, seed=0)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        out = resample(chain, 7, np.random.default_rng(0))
        assert len(out) == 7
        for s in out:
            np.testing.assert_array_equal(s.x, chain.positions[0])

    def test_resampled_indices_are_sorted(self):
        rng = np.random.default_rng(3)
        idx = systematic_resample_indices(rng.uniform(0.1, 2.0, size=500), 1000, rng)
        assert np.all(np.diff(idx) >= 0)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            systematic_resample_indices(np.array([]), 5, np.random.default_rng(0))


class TestWeightedMoments:
    def test_uniform_weights_reduce_to_ordinary_moments(self):
        rng = np.random.default_rng(4)
        positions = rng.normal(size=(500, 2))
        samples = [
            # build WeightedSample-like records through the public chain API
            type("S", (), {"state": PhaseState(p, np.zeros(2)), "holding_time": 1.0})()
            for p in positions
        ]
        mean, cov = weighted_moments(samples)
        np.testing.assert_allclose(mean, positions.mean(axis=0), rtol=1e-12)
        np.testing.assert_allclose(cov, np.cov(positions.T, ddof=0), rtol=1e-10)

    def test_gaussian_variance_recovered(self):
        ef = DiagonalGaussian.isotropic(1, precision=4.0)
        config = SamplerConfig(epsilon=0.4, steps=5, beta=0.3, n_samples=100_000, seed=8)
        chain = sample_chain(config, ef, PhaseState([0.0], [1.0]))
        _, cov = weighted_moments(chain)
        assert cov[0, 0] == pytest.approx(0.25, rel=0.05)

    def test_single_sample_zero_covariance(self):
        config = SamplerConfig(epsilon=0.5, steps=2, beta=0.5, n_samples=1, seed=0)
        chain = sample_chain(config, GAUSS_2D, PhaseState(np.zeros(2), np.ones(2)))
        _, cov = weighted_moments(chain)
        np.testing.assert_array_equal(cov, np.zeros((2, 2)))
