import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from rpslab.coins import (
    EXACT_SUBSET,
    INDEPENDENT,
    AllHeadsPolicy,
    AllTailsPolicy,
    BudgetHeadsPolicy,
    CBParams,
    CBResult,
    DiscrepancyChaserPolicy,
    ScriptedHeadsPolicy,
    ThresholdHeadsPolicy,
    cb_score,
    empirical_tail,
    make_heads_policy,
    martingale_mean,
    play_coins_buckets,
    run_trials,
    sample_x_ab,
    sample_x_ab_batch,
    tail_bound_bohman,
    tail_bound_bucket,
    tail_bound_simple,
    wilson_interval,
)
from rpslab.seeding import generator, mix


class TestCBParams:
    def test_valid(self):
        p = CBParams(3, 12, 2)
        assert p.b == 9

    def test_a_too_large(self):
        with pytest.raises(ValueError):
            CBParams(7, 12, 2)

    def test_nu0_too_large(self):
        with pytest.raises(ValueError):
            CBParams(3, 12, 13)

    def test_positive(self):
        with pytest.raises(ValueError):
            CBParams(0, 12, 1)


class TestSampleXab:
    def test_exact_values(self):
        rng = generator(0)
        vals = {sample_x_ab(2, 5, rng) for _ in range(200)}
        assert vals == {Fraction(1, 2), Fraction(-1, 5)}

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            sample_x_ab(0, 3, generator(0))
        with pytest.raises(ValueError):
            sample_x_ab_batch(2, -1, 5, generator(0))

    def test_symmetric_case_frequencies(self):
        draws = sample_x_ab_batch(4, 4, 200_000, generator(3))
        plus = int((draws > 0).sum())
        sigma = math.sqrt(200_000 * 0.25)
        assert abs(plus - 100_000) < 4 * sigma

    def test_a1_b3_frequencies(self):
        N = 1_000_000
        draws = sample_x_ab_batch(1, 3, N, generator(5))
        plus = int((draws > 0).sum())
        sigma = math.sqrt(N * 0.25 * 0.75)
        assert abs(plus - N / 4) < 4 * sigma

    def test_mean_within_variance_bound(self):
        # Var(X_{a,b}) = 1/(ab): mean of 10^6 draws within 4*sqrt(1/(ab*10^6))
        N = 1_000_000
        for a, b, seed in [(1, 3, 7), (2, 5, 8), (4, 4, 9)]:
            draws = sample_x_ab_batch(a, b, N, generator(seed))
            assert abs(draws.mean()) < 4 * math.sqrt(1 / (a * b * N))


class TestPlayCoinsBuckets:
    def test_exact_subset_always_a_in_bucket(self):
        params = CBParams(4, 14, 2)
        for seed in range(40):
            res = play_coins_buckets(params, AllHeadsPolicy(), EXACT_SUBSET, seed)
            in_a = sum(1 for b, _ in res.placements if b)
            assert in_a == 4
            assert res.h == 14 and res.h_a == 4

    def test_all_heads_exact_subset_score_zero(self):
        params = CBParams(4, 14, 2)
        res = play_coins_buckets(params, AllHeadsPolicy(), EXACT_SUBSET, 5)
        assert cb_score(res, params) == 0

    def test_all_tails_forfeits(self):
        params = CBParams(4, 14, 2)
        res = play_coins_buckets(params, AllTailsPolicy(), EXACT_SUBSET, 5)
        assert res.h == 0 and res.forfeit
        assert cb_score(res, params) == 0

    def test_placement_log_shape(self):
        params = CBParams(2, 8, 1)
        res = play_coins_buckets(params, BudgetHeadsPolicy(3), INDEPENDENT, 1)
        assert len(res.placements) == 8
        assert res.h == 3

    def test_result_invariants(self):
        params = CBParams(5, 20, 6)
        for seed in range(30):
            res = play_coins_buckets(params, ThresholdHeadsPolicy(0.4), EXACT_SUBSET, seed)
            assert 0 <= res.h_a <= min(res.h, params.a)
            assert res.forfeit == (res.h < params.nu0)


class TestCbScore:
    def test_forfeit_zero(self):
        assert cb_score(CBResult(1, 1, True, []), CBParams(3, 12, 2)) == 0

    def test_exact_fraction(self):
        assert cb_score(CBResult(10, 4, False, []), CBParams(3, 12, 1)) == Fraction(3, 2)

    def test_all_heads_zero(self):
        assert cb_score(CBResult(12, 3, False, []), CBParams(3, 12, 1)) == 0


class TestRunTrials:
    @pytest.mark.parametrize("mode", [EXACT_SUBSET, INDEPENDENT])
    @pytest.mark.parametrize("policy", [
        AllHeadsPolicy(), BudgetHeadsPolicy(7), ThresholdHeadsPolicy(0.35),
    ])
    def test_batch_equals_loop(self, mode, policy):
        params = CBParams(3, 12, 2)
        hs, has = run_trials(params, policy, mode, 64, 424242)
        for i in range(64):
            res = play_coins_buckets(params, policy, mode, mix(424242, i))
            assert (hs[i], has[i]) == (res.h, res.h_a)

    def test_chaser_goes_through_loop(self):
        params = CBParams(3, 12, 2)
        pol = DiscrepancyChaserPolicy()
        hs, has = run_trials(params, pol, INDEPENDENT, 16, 1)
        for i in range(16):
            res = play_coins_buckets(params, pol, INDEPENDENT, mix(1, i))
            assert (hs[i], has[i]) == (res.h, res.h_a)


class TestMartingale:
    @pytest.mark.parametrize("policy", [
        AllHeadsPolicy(), BudgetHeadsPolicy(30), ThresholdHeadsPolicy(0.5),
        DiscrepancyChaserPolicy(),
    ])
    def test_independent_mode_zero_mean(self, policy):
        trials = 4000 if isinstance(policy, DiscrepancyChaserPolicy) else 50_000
        mean, se = martingale_mean(CBParams(10, 60, 5), policy, trials, 2718)
        assert abs(mean) < 4 * se


class TestTailBounds:
    def test_bucket_example(self):
        b = tail_bound_bucket(CBParams(1, 2, 1), Fraction(2, 5))
        assert b.raw == pytest.approx(695.883, rel=1e-4)
        assert b.clamped == 1.0

    def test_bucket_monotone_in_nu0(self):
        prev = None
        for nu0 in range(1, 21):
            b = tail_bound_bucket(CBParams(5, 20, nu0), Fraction(1, 5))
            if prev is not None:
                assert b.raw < prev
            prev = b.raw

    def test_bucket_t_domain(self):
        with pytest.raises(ValueError):
            tail_bound_bucket(CBParams(1, 2, 1), 0)
        with pytest.raises(ValueError):
            tail_bound_bucket(CBParams(1, 2, 1), Fraction(1, 2))

    def test_simple_example(self):
        b = tail_bound_simple(1, 1, 1, 0.5)
        assert b.raw == pytest.approx(156.0496, rel=1e-5)
        assert b.clamped == 1.0

    def test_simple_exponent_linear_in_nu0(self):
        b1 = tail_bound_simple(2, 6, 2, 0.25)
        b2 = tail_bound_simple(2, 6, 4, 0.25)
        # doubling nu0 doubles the exponent: (b2/40t^-2) = (b1/40t^-2)^2
        pref = 40 / 0.25**2
        assert b2.raw / pref == pytest.approx((b1.raw / pref) ** 2, rel=1e-9)

    def test_simple_domain(self):
        with pytest.raises(ValueError):
            tail_bound_simple(3, 2, 1, 0.1)  # a > b
        with pytest.raises(ValueError):
            tail_bound_simple(1, 3, 1, Fraction(1, 3))  # t = a/b not allowed

    def test_bohman_example(self):
        b = tail_bound_bohman(1.0, 10.0, 30, 30 * (1 - 1e-9))
        assert b.raw == pytest.approx(2 * math.exp(-1), rel=1e-6)

    def test_bohman_domain(self):
        with pytest.raises(ValueError):
            tail_bound_bohman(1.0, 10.0, 30, 30.0)  # lam = m*c1
        with pytest.raises(ValueError):
            tail_bound_bohman(2.0, 10.0, 30, 1.0)  # c1 > c2/10


class TestBoundsAgainstHighPrecision:
    """Relative error <= 1e-12 against mpmath at 50 digits on the 20 pinned
    parameter points shared with the acceptance suite."""

    def test_all_pinned_points(self):
        from conftest import check_bounds_against_mpmath

        assert check_bounds_against_mpmath() == 20


class TestEmpiricalTail:
    def test_all_tails_zero_frequency(self):
        params = CBParams(5, 100, 40)
        est = empirical_tail(params, AllTailsPolicy(), Fraction(1, 25), 500, 3)
        assert est.hits == 0 and est.frequency == 0.0

    def test_fixed_pattern_matches_hypergeometric(self):
        # 50 fixed heads among 100 steps, a = 5: h_A ~ Hypergeom(100, 5, 50);
        # event score >= t*h with t = 1/25 means |h_A - 2.5| >= 2: h_A in {0, 5}
        params = CBParams(5, 100, 40)
        pol = ScriptedHeadsPolicy([1, 0] * 50)
        est = empirical_tail(params, pol, Fraction(1, 25), 20_000, 99)
        hg = sps.hypergeom(100, 5, 50)
        exact = float(hg.pmf(0) + hg.pmf(5))
        lo, hi = est.wilson_95_interval
        assert lo <= exact <= hi

    def test_frequency_below_clamped_bound(self):
        params = CBParams(5, 100, 40)
        pol = ScriptedHeadsPolicy([1, 0] * 50)
        est = empirical_tail(params, pol, Fraction(1, 25), 5000, 2)
        assert est.frequency <= est.bound.clamped

    def test_informative_bound_point(self):
        # raw bound < 1: a=500, nu=1000, nu0=1000, t=0.49, all heads
        params = CBParams(500, 1000, 1000)
        est = empirical_tail(params, AllHeadsPolicy(), Fraction(49, 100), 800, 17)
        assert est.bound.raw < 1.0
        assert est.frequency <= est.bound.raw

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            empirical_tail(CBParams(1, 4, 1), AllHeadsPolicy(), Fraction(1, 8), 0, 0)


class TestExactSubsetHypergeom:
    def test_chi_square_fit(self):
        # EXACT_SUBSET with any pre-committed pattern: h_A ~ Hypergeom(nu, a, h)
        params = CBParams(6, 40, 1)
        pol = ScriptedHeadsPolicy(([1] * 15 + [0] * 5) * 2)  # h = 30
        trials = 30_000
        _, has = run_trials(params, pol, EXACT_SUBSET, trials, 31415)
        counts = np.bincount(has, minlength=params.a + 1)
        hg = sps.hypergeom(params.nu, params.a, 30)
        expected = hg.pmf(np.arange(params.a + 1)) * trials
        # merge tail bins with expectation < 5
        keep = expected >= 5
        obs, exp = counts[keep], expected[keep]
        if (~keep).any():
            obs = np.concatenate([obs, [counts[~keep].sum()]])
            exp = np.concatenate([exp, [expected[~keep].sum()]])
        stat, pval = sps.chisquare(obs, exp * obs.sum() / exp.sum())
        assert pval > 0.01


class TestWilson:
    def test_known_value(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0
        assert hi == pytest.approx(0.0370, abs=5e-4)

    def test_contains_phat(self):
        lo, hi = wilson_interval(37, 200)
        assert lo < 37 / 200 < hi


class TestMakeHeadsPolicy:
    def test_kinds(self):
        assert make_heads_policy("all_heads").descriptor == {"kind": "all_heads"}
        assert make_heads_policy("budget", k=3).k == 3
        assert make_heads_policy("threshold", target=0.5).target == 0.5
        with pytest.raises(ValueError):
            make_heads_policy("bogus")

    def test_face_streams_match_choose(self):
        params = CBParams(5, 40, 2)
        for pol in [AllHeadsPolicy(), AllTailsPolicy(), BudgetHeadsPolicy(11),
                    ThresholdHeadsPolicy(0.3), ScriptedHeadsPolicy([1, 0] * 20)]:
            stream = pol.face_stream(40)
            pol.reset(params)
            seq = [pol.choose(t, []) for t in range(40)]
            assert np.array_equal(stream, np.array(seq))
