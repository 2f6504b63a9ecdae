"""Tests for Q and g(n, m, eps) estimation."""

import math

import numpy as np
import pytest

from netmem.coding import (
    MarkovSource,
    codelength_no_mem,
    codelength_report,
    compare_schemes,
    estimate_Q,
    estimate_g,
    generate,
    lower_quantile,
    sample_source,
    stationary_distribution,
)
from netmem.exceptions import InsufficientSourcesError, ValidationError

BIASED_CHAIN = np.array([[0.9, 0.1], [0.2, 0.8]])


class TestEstimateQ:
    """Test the per-source gain ratio."""

    def test_no_memory_gives_exactly_one(self):
        src = sample_source(4, seed=1)
        assert estimate_Q(src, 128, 0, draws=5, seed=3) == 1.0
        assert estimate_Q(src, 128, 0, draws=5, seed=3, memory_mode="fixed") == 1.0

    def test_deterministic_in_seed(self):
        src = sample_source(4, seed=2)
        assert estimate_Q(src, 64, 256, 4, seed=9) == estimate_Q(src, 64, 256, 4, seed=9)

    def test_memory_helps(self):
        src = sample_source(4, seed=5)
        assert estimate_Q(src, 256, 4096, draws=5, seed=1) > 1.0

    def test_gain_vanishes_for_long_sequences(self):
        src = MarkovSource(BIASED_CHAIN, stationary_distribution(BIASED_CHAIN), seed=4)
        assert estimate_Q(src, 65536, 1024, draws=3, seed=2) == pytest.approx(1.0, rel=0.02)

    def test_invalid_arguments(self):
        src = sample_source(2, seed=0)
        with pytest.raises(ValidationError):
            estimate_Q(src, 16, 16, draws=0, seed=0)
        with pytest.raises(ValidationError):
            estimate_Q(src, 16, -1, draws=1, seed=0)
        with pytest.raises(ValidationError):
            estimate_Q(src, 16, 16, draws=1, seed=0, memory_mode="shared")

    @pytest.mark.slow
    def test_more_memory_helps_most_sources(self):
        """n=512, A=4: Q(m=65536) >= Q(m=1024) in at least 90% of 50 sources."""
        wins = 0
        for k in range(50):
            src = sample_source(4, seed=k)
            small = estimate_Q(src, 512, 1024, draws=10, seed=k, memory_mode="fixed")
            large = estimate_Q(src, 512, 65536, draws=10, seed=k, memory_mode="fixed")
            wins += large >= small
        assert wins >= 45


class TestLowerQuantile:
    """Test the order-statistic quantile."""

    def test_rank(self):
        assert lower_quantile([5.0, 1.0, 3.0, 2.0, 4.0], 0.2) == 2.0
        assert lower_quantile([5.0, 1.0, 3.0, 2.0, 4.0], 0.1) == 1.0

    def test_rank_survives_float_product(self):
        """0.29 * 100 is 28.999999999999996 in floating point; the rank is still 29."""
        samples = [float(v) for v in range(100)]
        assert lower_quantile(samples, 0.29) == 29.0
        assert lower_quantile(samples, 0.57) == 57.0

    def test_near_one_gives_maximum(self):
        assert lower_quantile([1.0, 7.0, 3.0], 0.99) == 7.0

    def test_not_enough_samples(self):
        with pytest.raises(InsufficientSourcesError):
            lower_quantile([1.0, 2.0], 1.0)


class TestEstimateG:
    """Test the quantile gain over sampled sources."""

    def test_no_memory_gives_one(self):
        estimate = estimate_g(32, 0, 0.05, 20, 2, 4, seed=1)
        assert estimate.g_hat == 1.0
        assert estimate.mean_q == 1.0
        assert estimate.ci_half_width == 0.0
        assert len(estimate.q_samples) == 20

    def test_coverage_and_bounds(self):
        estimate = estimate_g(64, 512, 0.1, 30, 2, 4, seed=2)
        assert estimate.coverage() >= 0.9
        assert estimate.g_hat <= max(estimate.q_samples)
        assert estimate.g_hat == sorted(estimate.q_samples)[3]
        assert estimate.num_sources == 30 and estimate.seq_draws == 2
        assert estimate.n == 64 and estimate.m == 512

    def test_epsilon_near_one_gives_maximum(self):
        estimate = estimate_g(32, 128, 0.999, 20, 1, 2, seed=3)
        assert estimate.g_hat == max(estimate.q_samples)

    def test_confidence_interval(self):
        estimate = estimate_g(64, 256, 0.05, 20, 2, 4, seed=4)
        q = np.array(estimate.q_samples)
        assert estimate.mean_q == pytest.approx(q.mean())
        assert estimate.ci_half_width == pytest.approx(1.96 * q.std(ddof=1) / math.sqrt(20))

    def test_too_few_sources(self):
        with pytest.raises(InsufficientSourcesError):
            estimate_g(32, 0, 0.05, 19, 1, 2, seed=0)

    def test_invalid_epsilon(self):
        with pytest.raises(ValidationError):
            estimate_g(32, 0, 1.0, 20, 1, 2, seed=0)

    def test_workers_do_not_change_results(self):
        serial = estimate_g(32, 128, 0.05, 20, 2, 2, seed=5)
        parallel = estimate_g(32, 128, 0.05, 20, 2, 2, seed=5, workers=2)
        assert serial.q_samples == parallel.q_samples

    @pytest.mark.slow
    def test_memory_gain_exists(self):
        """A=4, n=1024, m=65536, K=100, T=30: mean Q above 1 with 95% confidence.

        Runs with one memorized sequence per source; fresh memory would draw
        3000 sequences of length 65536 here. Fresh mode is covered by
        test_gain_vanishes_with_sequence_length and TestEstimateQ.
        """
        estimate = estimate_g(1024, 65536, 0.05, 100, 30, 4, seed=42, memory_mode="fixed")
        assert estimate.mean_q - estimate.ci_half_width > 1.0
        assert estimate.g_hat >= 1.0

    @pytest.mark.slow
    def test_gain_vanishes_with_sequence_length(self):
        """Same m=65536: g_hat at n=65536 is no larger than at n=512 and stays below 1.02."""
        short = estimate_g(512, 65536, 0.05, 20, 3, 4, seed=7)
        long = estimate_g(65536, 65536, 0.05, 20, 3, 4, seed=7)
        assert short.g_hat > 1.0
        assert long.g_hat - short.g_hat <= 0
        assert long.g_hat <= 1.02


class TestSchemes:
    """Test codelength reports and the two-hop scheme comparison."""

    def test_report(self):
        src = sample_source(2, seed=0)
        x = generate(src, 100)
        y = generate(src, 400, draw=1)
        report = codelength_report(x, y, 2)
        assert report.n == 100 and report.m == 400
        assert report.bits_no_mem == pytest.approx(codelength_no_mem(x, 2))
        assert report.bits_no_mem > 0 and report.bits_with_mem > 0

    def test_no_compression_cost(self):
        comparison = compare_schemes([0, 1, 2, 3] * 8, [], 4)
        assert comparison.ncomp_nmem == 2 * 32 * 2.0
        assert comparison.ucomp_wmem == comparison.ucomp_nmem

    def test_memory_scheme_is_cheapest_with_matching_memory(self):
        x = [0, 0, 1] * 200
        comparison = compare_schemes(x, x, 2)
        assert comparison.ucomp_wmem < comparison.ucomp_nmem < comparison.ncomp_nmem
