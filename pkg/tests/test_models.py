"""Observation simulators: structure, invariants and marginal laws."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setsize import models as M
from setsize.rng import RngState


class TestTank:
    def test_census(self):
        r = RngState(1)
        obs = M.simulate_ordered(M.TankConfig(3, 3), r)
        assert obs.values == (1, 2, 3)

    def test_offset_census(self):
        r = RngState(1)
        obs = M.simulate_ordered(M.TankConfig(4, 4, offset=10), r)
        assert obs.values == (11, 12, 13, 14)

    def test_labels_sorted_distinct_in_range(self):
        r = RngState(2)
        for _ in range(200):
            obs = M.simulate_ordered(M.TankConfig(30, 7), r)
            assert list(obs.values) == sorted(set(obs.values))
            assert 1 <= obs.x_min and obs.x_max <= 30

    def test_max_expectation(self):
        # E[X_(3)] over all C(6,3) subsets is 21/4
        r = RngState(3)
        reps = 60_000
        tot = sum(M.simulate_ordered(M.TankConfig(6, 3), r).x_max
                  for _ in range(reps))
        se = math.sqrt(1.0 / reps)  # Var(X_(3)) ~ 0.84, bound is generous
        assert abs(tot / reps - 5.25) < 4 * se

    def test_invalid_sample_size(self):
        r = RngState(1)
        with pytest.raises(M.ConfigError):
            M.simulate_ordered(M.TankConfig(3, 4), r)


class TestInterval:
    def test_values_in_interval_sorted(self):
        r = RngState(1)
        obs = M.simulate_ordered(M.IntervalConfig(2.0, 20), r)
        assert list(obs.values) == sorted(obs.values)
        assert 0 < obs.x_min and obs.x_max < 2.0

    def test_exponential_boundary_cdf(self):
        # P(X < 0.5) = (e^0.5 - 1)/(e - 1) ~ 0.37754 for theta=1
        r = RngState(7)
        reps = 100_000
        hits = sum(
            M.simulate_ordered(
                M.IntervalConfig(1.0, 1, "exponential"), r).x_max < 0.5
            for _ in range(reps))
        p = (math.exp(0.5) - 1) / (math.e - 1)
        se = math.sqrt(p * (1 - p) / reps)
        assert abs(hits / reps - p) < 4 * se


class TestCounts:
    def test_binomial_degenerate(self):
        r = RngState(1)
        cfg = M.BinomialCountConfig(10, 0.999999999, 3)
        obs = M.simulate_counts(cfg, r)
        assert obs.counts == (10, 10, 10)

    def test_ztp_positive_and_mean_count(self):
        r = RngState(5)
        reps = 3000
        tot = 0
        for _ in range(reps):
            obs = M.simulate_counts(M.ZTPoissonConfig(100, 1.0), r)
            assert all(c > 0 for c in obs.counts)
            tot += obs.observed
        mean = 100 * (1 - math.exp(-1))
        se = math.sqrt(100 * 0.632 * 0.368 / reps)
        assert abs(tot / reps - mean) < 4 * se

    def test_waiting_infinite_horizon_sees_all(self):
        r = RngState(1)
        obs = M.simulate_counts(M.WaitingTimeConfig(50, 1.0), r)
        assert obs.count == 50
        assert list(obs.times) == sorted(obs.times)

    def test_waiting_count_binomial(self):
        # the failure count marginally follows Binomial(N, 1 - e^{-rate*T})
        r = RngState(8)
        reps = 20_000
        n, rate, horizon = 40, 1.0, math.log(2.0)
        tot = sum(
            M.simulate_counts(M.WaitingTimeConfig(n, rate, horizon),
                              r).count
            for _ in range(reps))
        se = math.sqrt(n * 0.25 / reps)
        assert abs(tot / reps - n * 0.5) < 4 * se


class TestTwoSample:
    def test_crc2_census_first(self):
        r = RngState(1)
        obs = M.simulate_two_sample(M.CRC2Config(5, 5, 2), r)
        assert obs.overlap == 2

    def test_crc2_overlap_mean(self):
        r = RngState(2)
        reps = 100_000
        tot = sum(
            M.simulate_two_sample(M.CRC2Config(5, 2, 2), r).overlap
            for _ in range(reps))
        se = math.sqrt(0.36 / reps)
        assert abs(tot / reps - 0.8) < 4 * se

    def test_multiplier_fixed_first(self):
        r = RngState(3)
        reps = 100_000
        tot = 0
        for _ in range(reps):
            obs = M.simulate_two_sample(
                M.MultiplierConfig(100, 0.3, 50), r, fixed_first=30)
            assert obs.benchmark == 30
            tot += obs.overlap
        se = math.sqrt(30 * 0.5 * 0.5 * (50 / 99) / reps)
        assert abs(tot / reps - 15.0) < 4 * se

    def test_multiplier_random_benchmark(self):
        r = RngState(4)
        obs = M.simulate_two_sample(M.MultiplierConfig(100, 0.3, 50), r)
        assert 0 <= obs.overlap <= min(obs.benchmark, 50)


class TestCRCk:
    def test_double_census(self):
        r = RngState(1)
        obs = M.simulate_crck(M.CRCkConfig(4, (4, 4)), r)
        assert obs.table == {(1, 1): 4}
        assert obs.distinct == 4
        assert obs.marked == (4,)
        assert obs.recaptured == (4,)

    def test_structural_invariants(self):
        r = RngState(2)
        for _ in range(200):
            obs = M.simulate_crck(M.CRCkConfig(9, (3, 4, 2)), r)
            # marginals reproduce the sample sizes
            for i, n_i in enumerate(obs.sizes):
                assert sum(c for pat, c in obs.table.items()
                           if pat[i] == 1) == n_i
            # M_2 = n_1 and M_{i+1} = M_i + n_i - m_i
            assert obs.marked[0] == obs.sizes[0]
            for i in range(1, len(obs.marked)):
                assert obs.marked[i] == (obs.marked[i - 1] + obs.sizes[i]
                                         - obs.recaptured[i - 1])
            assert obs.distinct == (obs.marked[-1] + obs.sizes[-1]
                                    - obs.recaptured[-1])

    def test_overlap_pmf_matches_crc2(self):
        # k=2 reproduces the two-sample overlap law: P(m=1)=0.6 at (5,2,2)
        r = RngState(3)
        reps = 50_000
        hits = sum(
            M.simulate_crck(M.CRCkConfig(5, (2, 2)), r).recaptured[0] == 1
            for _ in range(reps))
        se = math.sqrt(0.24 / reps)
        assert abs(hits / reps - 0.6) < 4 * se

    def test_distinct_mean(self):
        # E[r] = N(1 - prod(1 - n_i/N)) = 6(1 - (2/3)^3)
        r = RngState(4)
        reps = 50_000
        tot = sum(M.simulate_crck(M.CRCkConfig(6, (2, 2, 2)), r).distinct
                  for _ in range(reps))
        target = 6 * (1 - (2 / 3) ** 3)
        se = math.sqrt(1.0 / reps)
        assert abs(tot / reps - target) < 4 * se


class TestNsum:
    def test_complete_graph_census(self):
        r = RngState(1)
        obs = M.simulate_nsum(M.NsumHiddenConfig(10, 1.0, 10), r)
        assert all(d == 9 for d in obs.degrees_hidden)
        assert all(d == 9 for d in obs.degrees_sample)

    def test_hidden_moments(self):
        r = RngState(2)
        reps = 3000
        tot_s = 0
        for _ in range(reps):
            obs = M.simulate_nsum(M.NsumHiddenConfig(50, 0.2, 10), r)
            assert all(du >= ds for du, ds in zip(obs.degrees_hidden,
                                                  obs.degrees_sample))
            tot_s += sum(obs.degrees_sample)
        # E[sum d^s] = 2 C(10,2) * 0.2 = 18
        se = math.sqrt(4 * 45 * 0.2 * 0.8 / reps)
        assert abs(tot_s / reps - 18.0) < 4 * se

    def test_general_moments(self):
        r = RngState(3)
        reps = 3000
        tot_v = tot_u = 0.0
        for _ in range(reps):
            obs = M.simulate_nsum(
                M.NsumGeneralConfig(100, 20, 0.1, 30), r)
            tot_v += sum(obs.degrees_total) / 30
            tot_u += sum(obs.degrees_hidden) / 30
        assert abs(tot_v / reps - 9.9) < 4 * math.sqrt(9.9 * 0.9 / 30
                                                       / reps)
        assert abs(tot_u / reps - 2.0) < 4 * math.sqrt(2.0 * 0.9 / 30
                                                       / reps)

    def test_sample_degree_sum_even(self):
        r = RngState(4)
        for _ in range(100):
            obs = M.simulate_nsum(M.NsumHiddenConfig(30, 0.3, 8), r)
            assert sum(obs.degrees_sample) % 2 == 0


class TestHTCluster:
    def test_single_cluster(self):
        r = RngState(1)
        obs = M.simulate_ht_cluster(M.HTClusterConfig((5,), 2), r)
        assert obs.clusters == (1, 1)
        assert obs.probabilities == (2 / 5, 2 / 5)

    def test_probability_formula(self):
        r = RngState(2)
        obs = M.simulate_ht_cluster(M.HTClusterConfig((2, 3), 1), r)
        assert obs.probabilities[0] in (1 / 4, 1 / 6)
        assert obs.probabilities[0] == 1 / (2 * obs.cluster_sizes[0])

    def test_cluster_choice_uniform(self):
        r = RngState(3)
        reps = 100_000
        ones = sum(
            M.simulate_ht_cluster(M.HTClusterConfig((2, 3), 1),
                                  r).clusters[0] == 1
            for _ in range(reps))
        se = math.sqrt(0.25 / reps)
        assert abs(ones / reps - 0.5) < 4 * se

    def test_oversized_sample_rejected(self):
        r = RngState(1)
        with pytest.raises(M.ConfigError):
            M.simulate_ht_cluster(M.HTClusterConfig((2, 3), 2), r)


@given(st.integers(1, 20), st.integers(0, 1_000_000))
@settings(max_examples=50, deadline=None)
def test_simulators_pure_given_state(n, seed):
    cfg = M.TankConfig(20, n)
    a = M.simulate_ordered(cfg, RngState(seed))
    b = M.simulate_ordered(cfg, RngState(seed))
    assert a == b
