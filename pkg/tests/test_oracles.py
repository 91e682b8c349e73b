"""Exact enumeration oracles against closed forms, in rational arithmetic."""

import math
from fractions import Fraction

import pytest

from setsize.oracles import (exact_ht_moments, exact_tank_moments,
                             exact_two_sample_moments, reference_root_solve)


class TestTankOracle:
    def test_worked_goodman(self):
        m = exact_tank_moments(6, 3, "goodman")
        assert m.expectation == 6
        assert m.variance == Fraction(21, 15)
        assert m.support_size == math.comb(6, 3)

    def test_worked_unknown_origin(self):
        m = exact_tank_moments(6, 3, "unknown_origin")
        assert m.expectation == 6
        assert m.variance == Fraction(2 * 3 * 7, 2 * 5)

    def test_census_degenerate(self):
        m = exact_tank_moments(5, 5, "goodman")
        assert m.expectation == 5
        assert m.variance == 0

    def test_unbiasedness_and_variances_small_grid(self):
        # exact unbiasedness and the closed-form variances on N <= 12
        for nn in range(4, 13):
            for n in range(2, nn + 1):
                g = exact_tank_moments(nn, n, "goodman")
                assert g.expectation == nn
                assert g.variance == Fraction((nn - n) * (nn + 1),
                                              n * (n + 2))
                gap = exact_tank_moments(nn, n, "gap")
                assert gap.expectation == nn
                assert gap.variance == Fraction(
                    n * (nn - n) * (nn + 1),
                    (n - 1) * (n + 1) * (n + 2))
                uo = exact_tank_moments(nn, n, "unknown_origin")
                assert uo.expectation == nn
                assert uo.variance == Fraction(2 * (nn - n) * (nn + 1),
                                               (n - 1) * (n + 2))

    def test_oversize_refused(self):
        with pytest.raises(ValueError):
            exact_tank_moments(21, 3, "goodman")


class TestTwoSampleOracle:
    def test_chapman_worked(self):
        m = exact_two_sample_moments(5, 2, 2, "chapman")
        assert m.expectation == Fraction(47, 10)
        assert m.condition_prob == 1

    def test_lp_census(self):
        m = exact_two_sample_moments(5, 5, 2, "lp")
        assert m.expectation == 5
        assert m.variance == 0

    def test_lp_conditioning_reported(self):
        m = exact_two_sample_moments(5, 2, 2, "lp")
        assert m.condition_prob == Fraction(7, 10)  # P(m >= 1)

    def test_mbm_jensen_positivity(self):
        m = exact_two_sample_moments(100, 30, 50, "mbm-conditional")
        assert m.expectation > 100

    def test_chapman_bias_closed_form_grid(self):
        for nn in range(5, 13):
            for n1 in range(1, nn):
                for n2 in range(1, nn - n1):
                    m = exact_two_sample_moments(nn, n1, n2, "chapman")
                    bias = -Fraction(
                        math.factorial(nn - n1) * math.factorial(nn - n2),
                        math.factorial(nn)
                        * math.factorial(nn - n1 - n2 - 1))
                    assert m.expectation - nn == bias


class TestHTOracle:
    def test_worked_two_cluster(self):
        m = exact_ht_moments((2, 3), 1)
        assert m.expectation == 5
        assert m.variance == 1

    def test_single_cluster(self):
        m = exact_ht_moments((5,), 2)
        assert m.expectation == 5
        assert m.variance == 0

    def test_equal_sizes_zero_variance(self):
        m = exact_ht_moments((3, 3), 2)
        assert m.variance == 0

    def test_variance_closed_form(self):
        # Var = sum_{h<l} (N_h - N_l)^2 / n for the i.i.d. cluster design
        sizes = (2, 5, 9)
        for n in (1, 2, 3):
            m = exact_ht_moments(sizes, n)
            assert m.expectation == sum(sizes)
            # Var = (H/n)^2 * n * Var(N_h) for i.i.d. cluster draws
            h = len(sizes)
            var_nh = (Fraction(sum(s * s for s in sizes), h)
                      - Fraction(sum(sizes), h) ** 2)
            assert m.variance == Fraction(h * h, n) * var_nh

    def test_paper_variance_identity(self):
        # the pairwise-difference display equals the multinomial variance
        sizes = (2, 5, 9, 4)
        h = len(sizes)
        n = 3
        m = exact_ht_moments(sizes, n)
        pairwise = Fraction(sum(
            (sizes[i] - sizes[j]) ** 2
            for i in range(h) for j in range(i + 1, h)), n)
        assert m.variance == pairwise

    def test_oversize_refused(self):
        with pytest.raises(ValueError):
            exact_ht_moments((2,) * 10, 25)


class TestReferenceRootSolve:
    def test_darroch_quadratic(self):
        def f(x):
            return (1 - 4 / x) - (1 - 2 / x) ** 3
        got = reference_root_solve(f, 4.000001, 50.0)
        assert got == pytest.approx(3 + math.sqrt(5), abs=1e-9)

    def test_ztp_mean_equation(self):
        got = reference_root_solve(
            lambda x: x / (1 - math.exp(-x)) - 2.0, 1e-9, 2.0)
        assert got == pytest.approx(1.5936, abs=1e-4)

    def test_lp_algebra(self):
        def f(x):
            return (1 - 3 / x) - (1 - 2 / x) ** 2
        got = reference_root_solve(f, 3.000001, 100.0)
        assert got == pytest.approx(4.0, abs=1e-9)

    def test_no_sign_change(self):
        with pytest.raises(ValueError):
            reference_root_solve(lambda x: 1.0 + x * 0, 0.0, 1.0)


def test_production_solvers_match_reference():
    # 200 random Darroch and ZTP instances against plain bisection
    import numpy as np
    from setsize import _kernels as k
    from setsize.rng import RngState
    r = RngState(77)
    checked = 0
    while checked < 200:
        kk = 2 + r.next_below(3)
        nn = 6 + r.next_below(40)
        sizes = [1 + r.next_below(nn // 2) for _ in range(kk)]
        rmax = min(sum(sizes), nn)
        rmin = max(sizes) + 1
        if rmin >= rmax:
            continue
        rr = rmin + r.next_below(rmax - rmin)
        if sum(sizes) <= rr:
            continue
        got, status = k.darroch_solve(np.int64(rr),
                                      np.asarray(sizes, dtype=np.int64))
        if status != 0:
            continue

        def f(x, rr=rr, sizes=sizes):
            prod = 1.0
            for s in sizes:
                prod *= 1 - s / x
            return (1 - rr / x) - prod
        hi = float(rr) + 1.0
        while f(hi) <= 0:
            hi *= 2
        ref = reference_root_solve(f, rr * (1 + 1e-9), hi)
        assert got == pytest.approx(ref, abs=1e-8, rel=1e-8)
        checked += 1
    for i in range(200):
        xbar = 1.01 + (i / 200) * 6.0
        got = k.ztp_lambda_root(xbar)
        ref = reference_root_solve(
            lambda x: x / (1 - math.exp(-x)) - xbar, 1e-10, xbar)
        assert got == pytest.approx(ref, abs=1e-8, rel=1e-8)
