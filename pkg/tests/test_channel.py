import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from whichway import channel
from whichway.channel import ChannelConfig

prob = st.floats(0, 1, allow_nan=False)


class TestJointDistribution:
    def test_perfect_channel(self):
        assert channel.joint_distribution(ChannelConfig(0.5, 0)) == (0.5, 0, 0, 0.5)

    def test_certain_sender(self):
        assert channel.joint_distribution(ChannelConfig(1, 0.25)) == (0.75, 0.25, 0, 0)

    @given(prob, prob)
    def test_sums(self, w, e):
        j = channel.joint_distribution(ChannelConfig(w, e))
        assert abs(sum(j) - 1) < 1e-14
        assert abs(j.pp + j.pm - w) < 1e-15
        assert abs(j.mp + j.mm - (1 - w)) < 1e-15

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelConfig(1.2, 0.1)
        with pytest.raises(ValueError):
            ChannelConfig(0.5, -0.1)


class TestPredictabilityAndLikelihood:
    @pytest.mark.parametrize("w, p", [(0.5, 0), (1, 1), (0.7, 0.4)])
    def test_predictability(self, w, p):
        assert channel.predictability(ChannelConfig(w, 0.3)) == pytest.approx(p, abs=1e-15)

    @given(prob)
    def test_mean_probability_form(self, w):
        cfg = ChannelConfig(w, 0.1)
        p = channel.predictability(cfg)
        assert abs(p**2 - channel.predictability_from_mean_probability(cfg) ** 2) < 1e-14

    @pytest.mark.parametrize("w, L", [(0.5, 0.5), (0.7, 0.7)])
    def test_prior(self, w, L):
        assert channel.prior_likelihood(ChannelConfig(w, 0.2)) == pytest.approx(L)

    def test_from_distinguishability(self):
        assert channel.likelihood_from_distinguishability(1) == 1
        with pytest.raises(ValueError):
            channel.likelihood_from_distinguishability(1.5)


class TestQuality:
    @pytest.mark.parametrize("e, q", [(0, 1), (0.5, 0), (0.1, 0.8), (0.9, 0.8)])
    def test_values(self, e, q):
        assert channel.channel_quality(ChannelConfig(0.3, e)) == pytest.approx(q, abs=1e-15)


class TestReceiver:
    def test_scrambled(self, rng):
        for w in rng.uniform(size=10):
            assert channel.receiver_marginals(ChannelConfig(w, 0.5)) == pytest.approx((0.5, 0.5))

    def test_constant_property(self):
        assert channel.receiver_expectation(ChannelConfig(0.3, 0.2), 1, 1) == pytest.approx(1)

    def test_forced_arithmetic(self):
        assert channel.receiver_marginals(ChannelConfig(0.7, 0.1))[0] == pytest.approx(0.66, abs=1e-15)


class TestPosterior:
    def test_perfect_channel(self, rng):
        for w in rng.uniform(size=10):
            assert channel.posterior_likelihood(ChannelConfig(w, 0)) == pytest.approx(1)

    def test_scrambled_reduces_to_prior(self, rng):
        for w in rng.uniform(size=10):
            cfg = ChannelConfig(w, 0.5)
            assert channel.posterior_likelihood(cfg) == pytest.approx(
                0.5 * (1 + channel.predictability(cfg)), abs=1e-15)

    def test_forced_arithmetic(self):
        assert channel.posterior_likelihood(ChannelConfig(0.7, 0.5)) == pytest.approx(0.7, abs=1e-15)

    @given(prob, prob)
    def test_information_never_hurts(self, w, e):
        cfg = ChannelConfig(w, e)
        assert channel.posterior_likelihood(cfg) >= channel.prior_likelihood(cfg) - 1e-15

    @given(prob, prob)
    def test_relabel_symmetries(self, w, e):
        L = channel.posterior_likelihood(ChannelConfig(w, e))
        assert channel.posterior_likelihood(ChannelConfig(1 - w, e)) == pytest.approx(L, abs=1e-15)
        assert channel.posterior_likelihood(ChannelConfig(w, 1 - e)) == pytest.approx(L, abs=1e-15)


class TestTotalDistinguishability:
    @pytest.mark.parametrize("w, e, d", [(0.5, 0, 1), (1, 0.3, 1), (1, 0.5, 1), (0.7, 0.2, 0.6)])
    def test_values(self, w, e, d):
        assert channel.total_distinguishability(ChannelConfig(w, e)) == pytest.approx(d, abs=1e-15)

    def test_grid_identity(self):
        grid = np.linspace(0, 1, 101)
        worst = max(abs(0.5 * (1 + channel.total_distinguishability(ChannelConfig(w, e)))
                        - channel.posterior_likelihood(ChannelConfig(w, e)))
                    for w in grid for e in grid)
        assert worst < 1e-14


class TestMapGuess:
    def test_tie_break_follows_readout(self):
        assert channel.map_guess(ChannelConfig(0.5, 0)) == (1, -1)
        assert channel.map_guess(ChannelConfig(0.5, 0.5)) == (1, -1)

    def test_dominant_sender(self):
        assert channel.map_guess(ChannelConfig(0.9, 0.4)) == (1, 1)

    def test_inverting_channel(self):
        assert channel.map_guess(ChannelConfig(0.5, 0.9)) == (-1, 1)


class TestMonteCarlo:
    def test_perfect_channel(self, rng):
        for w in (0.0, 0.3, 0.5, 1.0):
            assert channel.monte_carlo_bet(ChannelConfig(w, 0), 10_000, seed=1) == 1.0

    def test_coin(self):
        assert abs(channel.monte_carlo_bet(ChannelConfig(0.5, 0.5), 1_000_000, seed=2) - 0.5) < 0.0015

    def test_binomial_oracle(self, rng):
        n = 1_000_000
        for k in range(5):
            cfg = ChannelConfig(*rng.uniform(size=2))
            L = channel.posterior_likelihood(cfg)
            emp = channel.monte_carlo_bet(cfg, n, seed=(11, k))
            assert abs(emp - L) <= channel.binomial_bound(L, n)

    def test_deterministic(self):
        cfg = ChannelConfig(0.62, 0.31)
        assert channel.monte_carlo_bet(cfg, 5000, seed=9) == channel.monte_carlo_bet(cfg, 5000, seed=9)
        assert channel.monte_carlo_bet(cfg, 5000, seed=(9, 1)) != channel.monte_carlo_bet(cfg, 5000, seed=(9, 2))

    def test_shards_reproducible(self):
        cfg = ChannelConfig(0.62, 0.31)
        a = channel.monte_carlo_bet(cfg, 100_001, seed=4, shards=7)
        b = channel.monte_carlo_bet(cfg, 100_001, seed=4, shards=7)
        assert a == b
        assert abs(a - channel.posterior_likelihood(cfg)) <= channel.binomial_bound(
            channel.posterior_likelihood(cfg), 100_001)

    def test_shards_are_spawned_children(self):
        # a shard's trials come from the k-th child of SeedSequence(seed)
        cfg = ChannelConfig(0.4, 0.2)
        child = np.random.SeedSequence(3).spawn(2)[1]
        wins = channel._bet_wins(cfg, 50, np.random.Generator(np.random.PCG64(child)))
        first = channel._bet_wins(cfg, 50, np.random.Generator(np.random.PCG64(np.random.SeedSequence(3).spawn(2)[0])))
        assert channel.monte_carlo_bet(cfg, 100, seed=3, shards=2) == (wins + first) / 100

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            channel.monte_carlo_bet(ChannelConfig(0.5, 0.5), 0)
        with pytest.raises(ValueError):
            channel.monte_carlo_bet(ChannelConfig(0.5, 0.5), 10, shards=0)
