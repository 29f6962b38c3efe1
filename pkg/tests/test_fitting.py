"""Power-law fitting: closed-form LLS, window detection, NLS, MLE,
exponential-range fits, and the window-sum deviation measure.

Frozen constants were produced by independent oracles (textbook normal
equations via numpy.polyfit, dense 2-D grid minimization for NLS, a fine
1-D likelihood grid for MLE) and are compared here against the package's
own arithmetic.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rankfreq as rq

from conftest import make_table, oracle_scan, oracle_scan_slow, random_rank_table

# Five-point working example used across the LLS tests.
FIVE_POINT = [0.5, 0.24, 0.17, 0.12, 0.10]


# --------------------------------------------------------------------------
# Log-log linear least squares
# --------------------------------------------------------------------------

class TestLoglogLinfit:
    def test_exact_power_law_recovered(self, exact_zipf):
        fit = rq.loglog_linfit(exact_zipf, 1, 500)
        assert abs(fit.gamma - 1.0) < 1e-12
        assert abs(fit.c - 0.2) < 1e-12
        assert fit.ss_err < 1e-24
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.method == "LLS"

    def test_five_point_fixture_frozen_values(self):
        fit = rq.loglog_linfit(make_table(FIVE_POINT), 1, 5)
        assert fit.c == pytest.approx(0.49500226574143896, rel=1e-12)
        assert fit.gamma == pytest.approx(1.00242560600112, rel=1e-12)
        assert fit.ss_err == pytest.approx(0.002950638882966708, rel=1e-10)
        assert fit.r_squared == pytest.approx(0.9981856583026895, rel=1e-12)

    def test_agrees_with_polyfit_route(self):
        rf = make_table(FIVE_POINT)
        fit = rq.loglog_linfit(rf, 1, 5)
        x = np.log(np.arange(1, 6, dtype=np.float64))
        slope, intercept = np.polyfit(x, np.log(rf.freqs), 1)
        assert fit.gamma == pytest.approx(-slope, rel=1e-12)
        assert fit.c == pytest.approx(np.exp(intercept), rel=1e-12)

    def test_window_too_small(self):
        with pytest.raises(rq.FitError, match="too small"):
            rq.loglog_linfit(make_table(FIVE_POINT), 1, 2)

    def test_window_out_of_bounds(self):
        with pytest.raises(rq.FitError, match="out of bounds"):
            rq.loglog_linfit(make_table(FIVE_POINT), 1, 6)

    def test_plateau_rejected(self):
        # zero rank variance in y: gamma would be 0
        with pytest.raises(rq.FitError):
            rq.loglog_linfit(make_table([0.1] * 20), 1, 20)

    def test_predict_evaluates_the_law(self):
        fit = rq.loglog_linfit(make_table(FIVE_POINT), 1, 5)
        r = np.array([1.0, 2.0, 5.0])
        np.testing.assert_allclose(fit.predict(r), fit.c * r ** -fit.gamma,
                                   rtol=1e-15)


# --------------------------------------------------------------------------
# Zipfian-range detection vs the brute-force oracle
# --------------------------------------------------------------------------

class TestDetectZipfRange:
    def test_exact_table_gives_full_range(self, exact_zipf):
        fit = rq.detect_zipf_range(exact_zipf)
        assert (fit.r_min, fit.r_max) == (1, 500)

    def test_tie_broken_by_smaller_r_min(self):
        # Two exact power-law segments of equal window width (24) separated
        # by a 5x frequency cliff that no crossing window can absorb.
        r = np.arange(1, 51, dtype=np.float64)
        f = np.where(r <= 25, 0.3 / r, (0.0024 * 26 ** 1.3) * r ** -1.3)
        rf = make_table(f)
        # both segments individually qualify...
        assert rq.loglog_linfit(rf, 26, 50).ss_err < 1e-20
        # ...and the earlier one wins the tie
        fit = rq.detect_zipf_range(rf)
        assert (fit.r_min, fit.r_max) == (1, 25)
        assert oracle_scan_slow(rf)[:2] == (1, 25)

    def test_no_qualifying_window_raises(self):
        # five 8-rank plateaus with factor-10 steps: windows inside a
        # plateau have zero explained variance, windows across a step have
        # residuals of order ln(10) >> the ss threshold
        f = np.repeat(10.0 ** -np.arange(5, dtype=np.float64), 8)
        with pytest.raises(rq.FitError, match="no Zipfian range"):
            rq.detect_zipf_range(make_table(f / f.sum()))

    def test_short_table_raises(self):
        with pytest.raises(rq.FitError, match="at least 10 ranks"):
            rq.detect_zipf_range(make_table(FIVE_POINT))

    def test_pure_plateau_has_no_range(self):
        with pytest.raises(rq.FitError, match="no Zipfian range"):
            rq.detect_zipf_range(make_table([0.05] * 20))

    def test_thresholds_are_honored(self):
        # a mildly noisy power law qualifies at default thresholds but not
        # at an absurdly strict R^2 requirement
        rng = np.random.default_rng(5)
        r = np.arange(1, 101, dtype=np.float64)
        f = np.sort(0.2 * r ** -1.1 * np.exp(0.03 * rng.standard_normal(100)))[::-1]
        rf = make_table(f)
        assert rq.detect_zipf_range(rf).r_max - rq.detect_zipf_range(rf).r_min >= 10
        with pytest.raises(rq.FitError, match="no Zipfian range"):
            rq.detect_zipf_range(rf, r2_min=1.0 - 1e-15)

    def test_count_rescaling_invariance(self):
        rng = np.random.default_rng(3)
        r = np.arange(1, 201, dtype=np.float64)
        f = np.sort(0.2 * r ** -1.0 * np.exp(0.02 * rng.standard_normal(200)))[::-1]
        a = rq.detect_zipf_range(make_table(f, N=10 ** 6))
        b = rq.detect_zipf_range(make_table(f, N=7 * 10 ** 6))
        assert (a.r_min, a.r_max, a.c, a.gamma) == (b.r_min, b.r_max, b.c, b.gamma)

    def test_structured_tables_match_slow_oracle(self):
        # Also exercises the prefix-sum == per-window-refit equivalence:
        # the oracle recomputes every window from its slice while the
        # implementation walks shared prefix arrays.
        for seed in (0, 1, 2, 3):
            rf = random_rank_table(np.random.default_rng(seed), n_max=120)
            expected = oracle_scan_slow(rf)
            if expected is None:
                with pytest.raises(rq.FitError):
                    rq.detect_zipf_range(rf)
                continue
            fit = rq.detect_zipf_range(rf)
            assert (fit.r_min, fit.r_max) == expected[:2]
            assert fit.c == pytest.approx(expected[2], abs=1e-10)
            assert fit.gamma == pytest.approx(expected[3], abs=1e-10)

    @given(st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_random_tables_match_oracle(self, seed):
        rf = random_rank_table(np.random.default_rng(seed), n_max=80)
        expected = oracle_scan(rf)
        if expected is None:
            with pytest.raises(rq.FitError):
                rq.detect_zipf_range(rf)
            return
        fit = rq.detect_zipf_range(rf)
        assert (fit.r_min, fit.r_max) == expected[:2]
        assert fit.c == pytest.approx(expected[2], abs=1e-10)
        assert fit.gamma == pytest.approx(expected[3], abs=1e-10)

    def test_fast_and_slow_oracles_agree(self):
        for seed in (21, 22, 23):
            rf = random_rank_table(np.random.default_rng(seed), n_max=90)
            assert oracle_scan(rf) == oracle_scan_slow(rf)


# --------------------------------------------------------------------------
# Nonlinear least squares
# --------------------------------------------------------------------------

class TestNlsFit:
    def test_exact_table_machine_precision(self, exact_zipf):
        fit = rq.nls_fit(exact_zipf, 1, 500)
        assert abs(fit.gamma - 1.0) < 1e-12
        assert abs(fit.c - 0.2) < 1e-12
        assert fit.method == "NLS"

    def test_noisy_table_matches_grid_oracle(self):
        # 5% multiplicative lognormal noise on 0.2 r^-1.1, 300 ranks.
        # Frozen oracle: dense 1201x1201 grid minimization of the raw
        # squared error over (c, gamma) in [0.15, 0.25] x [1.0, 1.2],
        # minimum at gamma = 1.106000 (grid pitch 1.67e-4).
        rng = np.random.default_rng(7)
        r = np.arange(1, 301, dtype=np.float64)
        f = np.sort(0.2 * r ** -1.1 * np.exp(0.05 * rng.standard_normal(300)))[::-1]
        fit = rq.nls_fit(make_table(f), 1, 300)
        assert fit.gamma == pytest.approx(1.106000, abs=5e-4)
        assert fit.c == pytest.approx(0.200250, abs=5e-4)
        # NLS weights the head more than LLS; on this draw they differ
        lls = rq.loglog_linfit(make_table(f), 1, 300)
        assert abs(fit.gamma - lls.gamma) > 1e-3

    def test_deterministic(self, exact_zipf):
        a = rq.nls_fit(exact_zipf, 10, 400)
        b = rq.nls_fit(exact_zipf, 10, 400)
        assert (a.c, a.gamma) == (b.c, b.gamma)


# --------------------------------------------------------------------------
# Maximum likelihood
# --------------------------------------------------------------------------

class TestMleExponent:
    def test_three_rank_toy_against_grid_oracle(self):
        # counts (4, 2, 1): likelihood maximized at gamma = 1.172872
        # (independent fine-grid scan of the exact log-likelihood)
        rf = make_table(np.array([4, 2, 1]) / 7.0, N=7)
        fit = rq.mle_exponent(rf, 1, 3)
        assert fit.gamma == pytest.approx(1.172872, abs=1e-4)
        assert fit.method == "MLE"

    def test_exact_table_recovers_exponent(self, exact_zipf):
        fit = rq.mle_exponent(exact_zipf, 1, 500)
        assert fit.gamma == pytest.approx(1.0, abs=1e-6)

    def test_single_rank_window_rejected(self, exact_zipf):
        with pytest.raises(rq.FitError, match="at least two ranks"):
            rq.mle_exponent(exact_zipf, 5, 5)

    def test_stationarity_of_the_likelihood(self):
        # the returned exponent should beat small perturbations
        rf = make_table(np.array([40, 21, 12, 8, 5, 4, 3, 2, 2, 1]) / 98.0, N=98)
        fit = rq.mle_exponent(rf, 1, 10)

        def loglik(g):
            ranks = np.arange(1, 11, dtype=np.float64)
            w = ranks ** -g
            return float(rf.counts @ (np.log(w / w.sum())))

        best = loglik(fit.gamma)
        assert best >= loglik(fit.gamma + 1e-3)
        assert best >= loglik(fit.gamma - 1e-3)


class TestEstimatorAgreement:
    def test_three_routes_agree_on_divisible_counts(self):
        # lcm(1..40)/r is an integer for every r, so counts follow the
        # law exactly and all three estimators must land on gamma = 1.
        import math
        L = math.lcm(*range(1, 41))
        counts = np.array([L // k for k in range(1, 41)], dtype=np.int64)
        N = int(counts.sum())
        rf = rq.RankFrequency.from_frequencies(counts / N, N)
        gammas = [
            rq.loglog_linfit(rf, 1, 40).gamma,
            rq.nls_fit(rf, 1, 40).gamma,
            rq.mle_exponent(rf, 1, 40).gamma,
        ]
        assert max(gammas) - min(gammas) < 1e-6
        assert gammas[0] == pytest.approx(1.0, abs=1e-9)


# --------------------------------------------------------------------------
# Exponential range
# --------------------------------------------------------------------------

class TestFitExponential:
    def test_exact_recovery(self):
        r = np.arange(1, 13, dtype=np.float64)
        rf = make_table(0.05 * np.exp(-0.02 * r))
        fit = rq.fit_exponential(rf, 1, 12)
        assert fit.a == pytest.approx(0.05, rel=1e-12)
        assert fit.b == pytest.approx(0.02, rel=1e-12)

    def test_wiggly_fixture_frozen_values(self):
        # 0.01 exp(-0.13 r) modulated by exp(0.02 sin r); frozen values are
        # numpy.polyfit on (r, ln f), which this fit must reproduce.
        r = np.arange(1, 13, dtype=np.float64)
        f = np.sort(0.01 * np.exp(-0.13 * r) * np.exp(0.02 * np.sin(r)))[::-1]
        rf = make_table(f)
        fit = rq.fit_exponential(rf, 1, 12)
        assert fit.a == pytest.approx(0.010109929365294189, rel=1e-12)
        assert fit.b == pytest.approx(0.13171414020282504, rel=1e-12)
        slope, intercept = np.polyfit(r, np.log(f), 1)
        assert fit.b == pytest.approx(-slope, rel=1e-12)
        assert fit.a == pytest.approx(np.exp(intercept), rel=1e-12)

    def test_short_window_rejected(self, exact_zipf):
        with pytest.raises(rq.FitError, match="too small"):
            rq.fit_exponential(exact_zipf, 1, 5)


# --------------------------------------------------------------------------
# Window-sum deviation
# --------------------------------------------------------------------------

class TestZipfDeviation:
    def test_exact_law_gives_zero(self, exact_zipf):
        fit = rq.detect_zipf_range(exact_zipf)
        assert rq.zipf_deviation(exact_zipf, fit) < 1e-12

    def test_matches_direct_sum(self):
        rf = make_table(FIVE_POINT)
        fit = rq.loglog_linfit(rf, 1, 5)
        r = np.arange(1, 6, dtype=np.float64)
        expected = abs(float(np.sum(fit.c * r ** -fit.gamma - rf.freqs)))
        assert rq.zipf_deviation(rf, fit) == pytest.approx(expected, rel=1e-14)

    def test_window_bounds_checked(self, exact_zipf):
        fit = rq.loglog_linfit(exact_zipf, 1, 500)
        short = make_table(FIVE_POINT)
        with pytest.raises(rq.FitError, match="out of bounds"):
            rq.zipf_deviation(short, fit)


# --------------------------------------------------------------------------
# Fit-object validation
# --------------------------------------------------------------------------

class TestFitValidation:
    def test_reversed_window_rejected(self):
        with pytest.raises(rq.FitError):
            rq.PowerLawFit(c=0.2, gamma=1.0, r_min=10, r_max=5,
                           ss_err=0.0, r_squared=1.0, method="LLS")

    def test_unknown_method_rejected(self):
        with pytest.raises(rq.FitError, match="unknown fit method"):
            rq.PowerLawFit(c=0.2, gamma=1.0, r_min=1, r_max=50,
                           ss_err=0.0, r_squared=1.0, method="OLS")

    def test_exponential_fit_requires_positive_params(self):
        with pytest.raises(rq.FitError, match="a, b > 0"):
            rq.ExpFit(a=-0.1, b=0.2, lo=1, hi=20)
