import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgb1iwei.distribution import (
    Params,
    Seed,
    SubModel,
    baseline_cdf,
    baseline_pdf,
    cdf,
    hazard,
    log_pdf,
    median,
    pdf,
    quantile,
    sample,
    survival,
)
from rgb1iwei.errors import DomainError, ParameterError, TailDegeneracyError

UNIT = Params(1.0, 1.0, 1.0, 1.0, 1.0)
# maximum-likelihood point for the guinea-pig data (full model)
FITTED = Params(a=21.0134, b=76.0581, c=3.9858, gamma=0.8176, theta=0.1284)

param_value = st.floats(min_value=0.2, max_value=50.0)


def random_params(rng):
    return Params(*np.exp(rng.uniform(np.log(0.2), np.log(50.0), 5)))


class TestParams:
    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            Params(0.0, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            Params(1.0, -2.0, 1.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            Params(1.0, 1.0, 1.0, float("inf"), 1.0)
        with pytest.raises(ParameterError):
            Params(1.0, 1.0, float("nan"), 1.0, 1.0)

    def test_array_round_trip(self):
        arr = FITTED.as_array()
        assert Params.from_array(arr) == FITTED
        assert list(arr) == [21.0134, 76.0581, 3.9858, 0.8176, 0.1284]

    def test_submodel_constructors_pin_exactly(self):
        p = Params.iwei(2.0, 3.0)
        assert (p.a, p.b, p.c) == (1.0, 1.0, 1.0)
        p = Params.beta_iwei(2.0, 3.0, 4.0, 5.0)
        assert p.c == 1.0 and p.a == 2.0 and p.b == 3.0
        p = Params.expgen_iwei(2.0, 3.0, 4.0, 5.0)
        assert p.a == 1.0 and p.b == 2.0 and p.c == 3.0


class TestSubModel:
    def test_fixed_sets(self):
        assert SubModel.FULL.fixed == {}
        assert SubModel.IWEI.fixed == {"a": 1.0, "b": 1.0, "c": 1.0}
        assert SubModel.BETA_IWEI.fixed == {"c": 1.0}
        assert SubModel.EXPGEN_IWEI.fixed == {"a": 1.0}

    def test_build_and_conforms(self):
        p = SubModel.IWEI.build([2.0, 3.0])
        assert p == Params.iwei(2.0, 3.0)
        assert SubModel.IWEI.conforms(p)
        assert not SubModel.IWEI.conforms(FITTED)
        assert SubModel.FULL.conforms(FITTED)

    def test_from_name(self):
        assert SubModel.from_name("beta-iwei") is SubModel.BETA_IWEI
        with pytest.raises(ParameterError):
            SubModel.from_name("weibull")

    def test_free_names(self):
        assert SubModel.IWEI.free_names == ("gamma", "theta")
        assert SubModel.FULL.free_names == ("a", "b", "c", "gamma", "theta")


class TestBaseline:
    def test_cdf_values(self):
        assert baseline_cdf(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-12)
        assert baseline_cdf(1.0, math.log(2.0), 5.0) == pytest.approx(0.5, rel=1e-14)
        assert baseline_cdf(2.0, 1.0, 2.0) == pytest.approx(math.exp(-0.25), rel=1e-12)

    def test_pdf_values(self):
        assert baseline_pdf(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-12)
        assert baseline_pdf(1.0, 2.0, 1.0) == pytest.approx(2 * math.exp(-2), rel=1e-12)

    @given(st.floats(min_value=0.05, max_value=20.0), param_value, param_value)
    @settings(max_examples=200, deadline=None)
    def test_pdf_is_cdf_derivative(self, x, gamma, theta):
        from hypothesis import assume

        h = 1e-6 * x
        want = baseline_pdf(x, gamma, theta)
        # below this, cancellation noise in the cdf difference swamps a
        # 1e-6-relative comparison
        assume(want * h > 1e-9)
        fd = (baseline_cdf(x + h, gamma, theta)
              - baseline_cdf(x - h, gamma, theta)) / (2 * h)
        assert fd == pytest.approx(want, rel=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            baseline_cdf(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            baseline_pdf(-1.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            baseline_cdf(1.0, -1.0, 1.0)


class TestCdf:
    def test_reduces_to_baseline(self):
        xs = np.array([0.05, 0.3, 1.0, 4.0, 50.0])
        np.testing.assert_allclose(cdf(xs, UNIT), baseline_cdf(xs, 1.0, 1.0),
                                   rtol=1e-12)

    def test_unit_point(self):
        assert cdf(1.0, UNIT) == pytest.approx(math.exp(-1), rel=1e-12)

    def test_monotone_and_limits(self):
        xs = np.logspace(-3, 3, 400)
        values = cdf(xs, FITTED)
        assert np.all(np.diff(values) >= 0.0)
        assert values[0] >= 0.0 and values[-1] <= 1.0
        assert cdf(1e-8, FITTED) == pytest.approx(0.0, abs=1e-30)
        assert cdf(1e12, FITTED) == pytest.approx(1.0, abs=1e-9)

    def test_matches_quadrature_at_fitted_point(self):
        # frozen from the adaptive-quadrature oracle, cross-checked against
        # a 50-digit direct evaluation (0.64966751595524619888)
        assert cdf(0.1, FITTED) == pytest.approx(0.6496675159552462, rel=1e-10)

    def test_survival_complement(self):
        xs = np.logspace(-2, 2, 50)
        total = cdf(xs, FITTED) + survival(xs, FITTED)
        np.testing.assert_allclose(total, 1.0, atol=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            cdf(0.0, UNIT)
        with pytest.raises(DomainError):
            cdf(-3.0, UNIT)


class TestPdf:
    def test_reduces_to_baseline(self):
        xs = np.array([0.05, 0.3, 1.0, 4.0, 50.0])
        np.testing.assert_allclose(pdf(xs, UNIT), baseline_pdf(xs, 1.0, 1.0),
                                   rtol=1e-12)

    def test_direct_substitution(self):
        # a=2, b=c=1: density is 2 g G ... here 2 e^-1 (1 - e^-1) at x=1
        want = 2.0 * math.exp(-1.0) * (1.0 - math.exp(-1.0))
        assert pdf(1.0, Params(2, 1, 1, 1, 1)) == pytest.approx(want, rel=1e-12)

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(3)
        xs = np.logspace(-6, 6, 200)
        for _ in range(10):
            assert np.all(pdf(xs, random_params(rng)) >= 0.0)

    def test_log_pdf_consistency(self):
        xs = np.logspace(-2, 2, 100)
        dens = pdf(xs, FITTED)
        keep = dens > 1e-300
        np.testing.assert_allclose(np.exp(log_pdf(xs[keep], FITTED)),
                                   dens[keep], rtol=1e-12)

    def test_log_pdf_unit(self):
        assert log_pdf(1.0, UNIT) == pytest.approx(-1.0, rel=1e-12)

    def test_log_pdf_fitted_point(self):
        # frozen from an independent 50-digit direct evaluation
        assert log_pdf(0.05, FITTED) == pytest.approx(2.2653160988640590,
                                                      rel=1e-10)

    def test_log_pdf_finite_or_neginf(self):
        rng = np.random.default_rng(4)
        xs = np.logspace(-12, 12, 300)
        for _ in range(10):
            lp = log_pdf(xs, random_params(rng))
            assert not np.any(np.isnan(lp))
            assert not np.any(np.isposinf(lp))


class TestHazard:
    def test_unit_value(self):
        want = math.exp(-1.0) / (1.0 - math.exp(-1.0))
        assert hazard(1.0, UNIT) == pytest.approx(want, rel=1e-12)

    def test_matches_log_survival_slope(self):
        xs = np.linspace(0.05, 0.4, 8)
        h = 1e-6
        for x in xs:
            fd = -(math.log(survival(x + h * x, FITTED))
                   - math.log(survival(x - h * x, FITTED))) / (2 * h * x)
            assert hazard(x, FITTED) == pytest.approx(fd, rel=1e-5)

    def test_nonmonotone_shape_detected(self):
        # upside-down-bathtub regime: the hazard must show an interior
        # local extremum on a log grid
        grid = np.logspace(-2.5, 1.5, 600)
        hz = hazard(grid, FITTED)
        diffs = np.diff(hz)
        sign_changes = np.sum(np.diff(np.sign(diffs[diffs != 0])) != 0)
        assert sign_changes >= 1

    def test_tail_degeneracy_error(self):
        steep = Params(5.0, 60.0, 5.0, 1.0, 6.0)
        with pytest.raises(TailDegeneracyError):
            hazard(1e9, steep)


class TestQuantile:
    def test_unit_median(self):
        assert quantile(0.5, UNIT) == pytest.approx(1.4426950408889634,
                                                    rel=1e-10)

    def test_median_op(self):
        assert median(FITTED) == quantile(0.5, FITTED)

    def test_round_trip_twenty_sets(self):
        rng = np.random.default_rng(7)
        qs = np.array([1e-6, 1e-4, 0.01, 0.25, 0.5, 0.75, 0.99,
                       1 - 1e-4, 1 - 1e-6])
        for _ in range(20):
            p = random_params(rng)
            xs = quantile(qs, p)
            assert np.all(xs > 0.0) and np.all(np.isfinite(xs))
            np.testing.assert_allclose(cdf(xs, p), qs, atol=1e-9)

    def test_survival_at_upper_quantile(self):
        x = quantile(0.999, FITTED)
        assert survival(x, FITTED) == pytest.approx(1e-3, rel=1e-6)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(DomainError):
                quantile(bad, UNIT)

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_fitted(self, q):
        assert cdf(quantile(q, FITTED), FITTED) == pytest.approx(q, abs=1e-9)


class TestSample:
    def test_deterministic(self):
        one = sample(1000, FITTED, Seed(99))
        two = sample(1000, FITTED, Seed(99))
        assert one.tobytes() == two.tobytes()

    def test_seed_changes_stream(self):
        assert not np.array_equal(sample(100, FITTED, Seed(1)),
                                  sample(100, FITTED, Seed(2)))

    def test_positive_finite(self):
        draws = sample(10000, FITTED, Seed(3))
        assert np.all(draws > 0.0) and np.all(np.isfinite(draws))

    def test_iwei_mean(self):
        draws = sample(100000, Params.iwei(1.0, 2.0), Seed(12))
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - math.sqrt(math.pi)) < 3 * se

    def test_ks_against_analytic_cdf(self):
        n = 100000
        draws = np.sort(sample(n, FITTED, Seed(2024)))
        values = cdf(draws, FITTED)
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - values), np.max(values - (i - 1) / n))
        assert ks < 0.01

    def test_rejects_bad_seed(self):
        with pytest.raises(ParameterError):
            Seed(-1)
        with pytest.raises(ParameterError):
            Seed(2 ** 64)
