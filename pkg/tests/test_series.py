import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgb1iwei import distribution as dist
from rgb1iwei.distribution import Params
from rgb1iwei.errors import (DomainError, MomentUndefinedError,
                             SeriesDivergenceError)
from rgb1iwei.oracles import integrate
from rgb1iwei.series import (OrderStatForm, SeriesControl, SeriesPolicy,
                             StressStrengthPair, _entropy_cross_term, coeff_p,
                             formal_mgf, kurtosis, mean, order_stat_moment,
                             order_stat_pdf, raw_moment, reliability,
                             renyi_entropy, shannon_entropy, skewness,
                             variance)
from rgb1iwei.special import EULER_GAMMA, gamma as gamma_fn

UNIT = Params(1.0, 1.0, 1.0, 1.0, 1.0)
INT_SET = Params(3.0, 2.0, 1.0, 1.5, 6.0)  # every expansion terminates


class TestCoeffP:
    def test_frozen_values(self):
        assert coeff_p(0, 2.5) == 1.0
        assert coeff_p(1, 2.5) == -1.5
        assert coeff_p(3, 2.5) == pytest.approx(0.0625, rel=1e-14)
        assert coeff_p(2, 3.0) == 1.0
        assert coeff_p(4, -1.7) == pytest.approx(11.1513375, rel=1e-12)

    def test_matches_scipy(self):
        import scipy.special as sc
        rng = np.random.default_rng(3)
        for _ in range(200):
            j = int(rng.integers(0, 40))
            beta = float(rng.uniform(-3.0, 30.0))
            want = (-1.0) ** j * sc.binom(beta - 1.0, j)
            assert coeff_p(j, beta) == pytest.approx(want, rel=1e-10, abs=1e-280)

    @given(beta=st.integers(min_value=1, max_value=25),
           extra=st.integers(min_value=0, max_value=30))
    def test_integer_beta_exact_zero(self, beta, extra):
        assert coeff_p(beta + extra, float(beta)) == 0.0

    @given(j=st.integers(min_value=0, max_value=60),
           beta=st.floats(min_value=0.05, max_value=40.0,
                          allow_nan=False, allow_infinity=False))
    def test_ratio_recurrence(self, j, beta):
        here = coeff_p(j, beta)
        nxt = coeff_p(j + 1, beta)
        want = here * (j + 1.0 - beta) / (j + 1.0)
        assert nxt == pytest.approx(want, rel=1e-12, abs=1e-280)

    def test_validation(self):
        with pytest.raises(DomainError):
            coeff_p(-1, 2.0)
        with pytest.raises(DomainError):
            coeff_p(2.5, 2.0)
        with pytest.raises(DomainError):
            coeff_p(1, math.inf)

    def test_huge_index_overflows_to_inf(self):
        assert math.isinf(coeff_p(1400, 3000.0))


class TestEngine:
    def test_control_validation(self):
        with pytest.raises(DomainError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(DomainError):
            SeriesControl(max_terms_per_index=3)

    def test_error_policy_raises(self):
        hard = Params(0.8, 6.0, 2.0, 1.0, 4.5)
        with pytest.raises(SeriesDivergenceError):
            raw_moment(1.0, hard, SeriesControl(policy=SeriesPolicy.ERROR))

    def test_fallback_matches_quadrature(self):
        hard = Params(0.8, 6.0, 2.0, 1.0, 4.5)
        sv = raw_moment(1.0, hard)
        assert sv.used_fallback and not sv.converged
        quad, _ = integrate(lambda x: x * dist.pdf(x, hard))
        assert sv.value == quad

    def test_integer_termination_is_exact(self):
        # all expansions of INT_SET terminate, so neither the tolerance
        # nor the term cap can change a single bit of the result
        base = raw_moment(1.0, INT_SET, SeriesControl(rel_tol=1e-10)).value
        tight = raw_moment(1.0, INT_SET, SeriesControl(rel_tol=1e-15)).value
        capped = raw_moment(1.0, INT_SET,
                            SeriesControl(max_terms_per_index=50)).value
        assert base == tight == capped


class TestRawMoment:
    def test_frozen_integer_set(self):
        # independent 40-digit quadrature: 1.0954357161206339308
        assert raw_moment(1.0, INT_SET).value == pytest.approx(
            1.0954357161206339, rel=1e-13)
        # 1.2148471866287835622
        assert raw_moment(2.0, INT_SET).value == pytest.approx(
            1.2148471866287836, rel=1e-13)

    def test_frozen_generic_set(self):
        p = Params(2.1596, 7.0, 1.8915, 2.6831, 7.5284)
        sv = raw_moment(1.0, p)
        # 1.232608048646781026 by 40-digit quadrature
        assert not sv.used_fallback
        assert sv.value == pytest.approx(1.2326080486467810, rel=1e-6)

    def test_iwei_closed_form(self):
        p = Params.iwei(2.0, 5.0)
        sv = raw_moment(2.0, p)
        want = 2.0 ** 0.4 * gamma_fn(0.6)
        assert sv.value == pytest.approx(want, rel=1e-14)
        assert sv.converged and not sv.used_fallback

    def test_existence_guards(self):
        with pytest.raises(MomentUndefinedError):
            raw_moment(6.0, INT_SET)
        with pytest.raises(MomentUndefinedError):
            raw_moment(7.5, INT_SET)
        with pytest.raises(DomainError):
            raw_moment(0.0, INT_SET)
        with pytest.raises(DomainError):
            raw_moment(-1.0, INT_SET)

    def test_against_oracle_grid(self):
        sets = [
            Params(2.9089, 4.0, 1.2699, 2.5651, 9.1407),
            Params(3.9496, 4.0, 2.2191, 2.8927, 7.7035),
            Params(1.8695, 2.0, 1.8845, 0.6300, 6.7163),
            Params(1.9367, 5.0, 1.8437, 2.2616, 8.4747),
        ]
        for p in sets:
            for r in (1.0, 2.0):
                sv = raw_moment(r, p)
                assert not sv.used_fallback
                quad, _ = integrate(lambda x: x ** r * dist.pdf(x, p))
                assert sv.value == pytest.approx(quad, rel=1e-6)

    def test_shape_summaries_against_quadrature(self):
        p = Params(3.0, 2.0, 1.0, 1.5, 9.0)
        ms = []
        for r in (1, 2, 3, 4):
            v, _ = integrate(lambda x: x ** r * dist.pdf(x, p))
            ms.append(v)
        var_q = ms[1] - ms[0] ** 2
        skew_q = (ms[2] - 3 * ms[0] * ms[1] + 2 * ms[0] ** 3) / var_q ** 1.5
        kurt_q = (ms[3] - 4 * ms[0] * ms[2] + 6 * ms[0] ** 2 * ms[1]
                  - 3 * ms[0] ** 4) / var_q ** 2
        assert mean(p).value == pytest.approx(ms[0], rel=1e-9)
        assert variance(p).value == pytest.approx(var_q, rel=1e-6)
        assert skewness(p).value == pytest.approx(skew_q, rel=1e-6)
        assert kurtosis(p).value == pytest.approx(kurt_q, rel=1e-6)

    def test_skewness_needs_third_moment(self):
        with pytest.raises(MomentUndefinedError):
            skewness(Params(3.0, 2.0, 1.0, 1.5, 2.5))


class TestFormalMgf:
    def test_truncated_sum_matches_moments(self):
        p = Params(3.0, 2.0, 1.0, 1.5, 9.0)
        t = 0.3
        want = 1.0
        for r in (1, 2, 3):
            want += t ** r * raw_moment(float(r), p).value / math.factorial(r)
        assert formal_mgf(t, p, 4).value == pytest.approx(want, rel=1e-13)

    def test_zero_t_is_one(self):
        assert formal_mgf(0.0, INT_SET, 3).value == 1.0

    def test_order_beyond_theta_rejected(self):
        with pytest.raises(MomentUndefinedError):
            formal_mgf(0.3, Params(1.0, 1.0, 1.0, 1.0, 2.5), 5)
        with pytest.raises(DomainError):
            formal_mgf(0.3, INT_SET, 0)


class TestRenyi:
    SET = Params(3.4313, 1.0, 2.5047, 0.5055, 4.4933)

    def test_frozen_values(self):
        # 40-digit quadrature: -1.0646035432700656896 and -1.436504334707510646
        half = renyi_entropy(0.5, self.SET)
        two = renyi_entropy(2.0, self.SET)
        assert not half.used_fallback and not two.used_fallback
        assert half.value == pytest.approx(-1.0646035432700657, abs=5e-7)
        assert two.value == pytest.approx(-1.4365043347075106, abs=5e-7)

    def test_scale_shift_law(self):
        # multiplying gamma by s shifts the entropy by log(s)/theta
        p = self.SET
        scaled = Params(p.a, p.b, p.c, p.gamma * 3.7, p.theta)
        for rho in (0.5, 2.0):
            base = renyi_entropy(rho, p)
            moved = renyi_entropy(rho, scaled)
            assert moved.value - base.value == pytest.approx(
                math.log(3.7) / p.theta, abs=1e-6)

    def test_nonincreasing_in_rho(self):
        p = Params(2.0, 3.0, 1.5, 2.0, 5.0)
        values = [renyi_entropy(rho, p).value
                  for rho in (0.5, 0.8, 1.2, 2.0, 4.0)]
        for lo, hi in zip(values, values[1:]):
            assert hi <= lo + 1e-9

    def test_matches_oracle(self):
        for p in [Params(3.7248, 1.0, 2.0266, 0.5793, 4.2602),
                  Params(2.8530, 1.0, 3.0161, 2.9928, 4.4075)]:
            for rho in (0.5, 2.0):
                sv = renyi_entropy(rho, p)
                assert not sv.used_fallback

                def integrand(x, rho=rho):
                    lp = dist.log_pdf(x, p)
                    return np.where(np.isfinite(lp), np.exp(rho * lp), 0.0)

                quad, _ = integrate(integrand)
                assert sv.value == pytest.approx(
                    math.log(quad) / (1.0 - rho), abs=1e-6)

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            renyi_entropy(1.0, self.SET)
        with pytest.raises(DomainError):
            renyi_entropy(-0.5, self.SET)
        with pytest.raises(MomentUndefinedError):
            renyi_entropy(0.5, Params(1.0, 1.0, 1.0, 1.0, 0.5))


class TestShannon:
    def test_unit_closed_form(self):
        # inverse exponential: H = 1 + 2 * Euler-Mascheroni
        sv = shannon_entropy(UNIT)
        assert sv.value == pytest.approx(1.0 + 2.0 * EULER_GAMMA, abs=1e-10)
        assert not sv.used_fallback

    def test_frozen_value(self):
        # 40-digit quadrature: -0.456053198795503612
        sv = shannon_entropy(Params(5.0, 2.0, 1.0, 0.5, 2.0))
        assert sv.value == pytest.approx(-0.4560531987955036, abs=1e-9)
        assert not sv.used_fallback

    def test_matches_oracle(self):
        for p in [Params(2.8687, 3.0, 1.7057, 1.9595, 3.4420),
                  Params(2.1338, 1.0, 1.8966, 2.3376, 5.1288),
                  Params(1.8769, 6.0, 2.1020, 0.5968, 0.9332)]:
            sv = shannon_entropy(p)
            assert not sv.used_fallback

            def integrand(x):
                lp = dist.log_pdf(x, p)
                return np.where(np.isfinite(lp), -np.exp(lp) * lp, 0.0)

            quad, _ = integrate(integrand)
            assert sv.value == pytest.approx(quad, abs=1e-4)

    def test_cross_term_forms_agree(self):
        # the exact finite sum and the same-sign series are two routes
        # to the same quantity; compare them across the switch point
        import rgb1iwei.series as series_mod
        for c in (0.7, 1.0, 2.3):
            for j2 in (4, 8, 12):
                finite = _entropy_cross_term(j2, c, 1e-12)
                saved = series_mod._ENTROPY_I_SERIES_MAX
                series_mod._ENTROPY_I_SERIES_MAX = -1
                try:
                    summed = _entropy_cross_term(j2, c, 1e-13)
                finally:
                    series_mod._ENTROPY_I_SERIES_MAX = saved
                assert summed == pytest.approx(finite, abs=5e-12)
                assert finite < 0.0


class TestOrderStatistics:
    P = Params(2.0, 3.0, 1.5, 2.0, 5.0)

    def test_forms_agree_at_random_points(self):
        rng = np.random.default_rng(20240817)
        xs = rng.uniform(0.05, 6.0, 100)
        for k, n in [(1, 1), (1, 5), (3, 5), (5, 5), (2, 7)]:
            direct = order_stat_pdf(xs, k, n, self.P,
                                    OrderStatForm.BETA_WEIGHTED)
            expanded = order_stat_pdf(xs, k, n, self.P,
                                      OrderStatForm.EXPANSION)
            np.testing.assert_allclose(expanded, direct, atol=1e-12)

    def test_single_draw_reduces_to_pdf(self):
        xs = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(order_stat_pdf(xs, 1, 1, self.P),
                                   dist.pdf(xs, self.P), rtol=1e-14)

    def test_normalizes(self):
        value, _ = integrate(lambda x: order_stat_pdf(x, 2, 5, self.P))
        assert value == pytest.approx(1.0, abs=1e-8)

    def test_frozen_moment(self):
        # 40-digit quadrature: 1.2216393491137021689
        got = order_stat_moment(1.0, 3, 5, self.P)
        assert got == pytest.approx(1.2216393491137022, abs=1e-9)

    def test_maximum_matches_direct_integral(self):
        got = order_stat_moment(1.0, 5, 5, self.P)
        want, _ = integrate(
            lambda x: 5.0 * x * dist.cdf(x, self.P) ** 4 * dist.pdf(x, self.P))
        assert got == pytest.approx(want, rel=1e-10)

    def test_validation(self):
        with pytest.raises(DomainError):
            order_stat_pdf(1.0, 0, 5, self.P)
        with pytest.raises(DomainError):
            order_stat_pdf(1.0, 6, 5, self.P)
        with pytest.raises(DomainError):
            order_stat_moment(1.0, 2.0, 5, self.P)
        with pytest.raises(MomentUndefinedError):
            order_stat_moment(6.0, 3, 5, self.P)


class TestReliability:
    def test_iwei_closed_form(self):
        # both components inverse Weibull with shared theta:
        # P(Y < X) = gamma_x / (gamma_x + gamma_y)
        pair = StressStrengthPair(Params.iwei(2.0, 4.0), Params.iwei(1.0, 4.0))
        sv = reliability(pair)
        assert sv.value == pytest.approx(2.0 / 3.0, rel=1e-14)
        assert not sv.used_fallback

    def test_frozen_pair(self):
        # 40-digit quadrature: 0.63575036426213591776
        pair = StressStrengthPair(
            Params(2.5842, 1.0, 2.3241, 1.1995, 3.8467),
            Params(3.1697, 2.0, 1.7891, 0.6298, 3.8467))
        sv = reliability(pair)
        assert not sv.used_fallback
        assert sv.value == pytest.approx(0.6357503642621359, abs=1e-8)

    def test_swap_sums_to_one(self):
        pairs = [
            (Params(3.9720, 3.0, 1.4149, 2.3272, 1.6215),
             Params(2.6179, 4.0, 1.9335, 2.2353, 1.6215)),
            (Params(3.3480, 1.0, 2.1492, 1.5289, 4.3788),
             Params(3.9511, 3.0, 1.4551, 1.4015, 4.3788)),
            (Params(3.7813, 1.0, 1.9300, 2.1497, 2.2017),
             Params(2.3950, 1.0, 2.0848, 2.8550, 2.2017)),
        ]
        for px, py in pairs:
            fwd = reliability(StressStrengthPair(px, py))
            rev = reliability(StressStrengthPair(py, px))
            assert not fwd.used_fallback and not rev.used_fallback
            assert fwd.value + rev.value == pytest.approx(1.0, abs=1e-8)

    def test_unequal_theta_uses_quadrature(self):
        px = Params(2.0, 3.0, 1.5, 2.0, 5.0)
        py = Params(3.0, 2.0, 1.0, 1.5, 4.0)
        sv = reliability(StressStrengthPair(px, py))
        assert sv.used_fallback
        quad, _ = integrate(lambda t: dist.pdf(t, px) * dist.cdf(t, py))
        assert sv.value == quad

    def test_matches_oracle(self):
        pair = StressStrengthPair(
            Params(2.3192, 2.0, 2.3447, 1.8817, 5.3755),
            Params(3.2189, 2.0, 1.6364, 2.1899, 5.3755))
        sv = reliability(pair)
        assert not sv.used_fallback
        quad, _ = integrate(
            lambda t: dist.pdf(t, pair.strength) * dist.cdf(t, pair.stress))
        assert sv.value == pytest.approx(quad, abs=1e-5)

    def test_pair_validation(self):
        with pytest.raises(DomainError):
            StressStrengthPair(Params.iwei(1.0, 2.0), "not params")
