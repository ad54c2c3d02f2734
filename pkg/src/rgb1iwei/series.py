"""Series expansions for moments, entropies, order statistics, reliability.

The density admits a mixture representation over inverse Weibull
components indexed by two binomial expansions, so every quantity here is
a weighted sum of closed-form component expectations. Truncation is
adaptive: a sum stops once three consecutive terms fall below rel_tol
times the running partial sum, subject to a hard cap per summation
index, with inner sums completed before the enclosing term is formed.
A result is not trusted when any index hits the cap, a term overflows,
or the accumulated absolute mass exceeds the final sum by more than
eight orders of magnitude (cancellation). Depending on policy the value
is then recomputed by adaptive quadrature or an error is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import distribution as dist
from .distribution import Params
from .errors import DomainError, MomentUndefinedError, SeriesDivergenceError
from .oracles import QuadratureSpec, integrate
from .special import EULER_GAMMA, digamma, log_beta, log_gamma

__all__ = [
    "SeriesPolicy",
    "SeriesControl",
    "SeriesValue",
    "StressStrengthPair",
    "OrderStatForm",
    "coeff_p",
    "raw_moment",
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "formal_mgf",
    "renyi_entropy",
    "shannon_entropy",
    "order_stat_pdf",
    "order_stat_moment",
    "reliability",
]

_SMALL_RUN = 3
_CANCEL_RATIO = 1e8


class SeriesPolicy(Enum):
    """What to do when a series cannot be trusted."""

    FALLBACK_QUADRATURE = "fallback-quadrature"
    ERROR = "error"


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-10
    max_terms_per_index: int = 500
    policy: SeriesPolicy = SeriesPolicy.FALLBACK_QUADRATURE

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0) or not math.isfinite(self.rel_tol):
            raise DomainError("rel_tol must be a positive finite number")
        if self.max_terms_per_index < _SMALL_RUN + 1:
            raise DomainError("max_terms_per_index must be at least 4")


@dataclass(frozen=True)
class SeriesValue:
    """A summed value plus how it was obtained.

    n_terms counts innermost term evaluations across all nested sums.
    converged reports whether the series truncation rule was satisfied;
    used_fallback is set when the value came from quadrature instead.
    """

    value: float
    n_terms: int
    converged: bool
    used_fallback: bool


@dataclass(frozen=True)
class StressStrengthPair:
    """Independent strength X and stress Y; reliability is P(Y < X)."""

    strength: Params
    stress: Params

    def __post_init__(self) -> None:
        if not isinstance(self.strength, Params) \
                or not isinstance(self.stress, Params):
            raise DomainError("strength and stress must be Params")

    def swapped(self) -> "StressStrengthPair":
        return StressStrengthPair(self.stress, self.strength)


class OrderStatForm(Enum):
    BETA_WEIGHTED = "beta-weighted"
    EXPANSION = "expansion"


def coeff_p(j: int, beta: float) -> float:
    """Expansion coefficient (-1)^j C(beta-1, j).

    Computed from the log magnitude with the sign tracked separately,
    so large indices neither overflow nor lose the parity. For integer
    beta >= 1 the coefficient is exactly zero once j >= beta.
    """
    if not isinstance(j, (int, np.integer)) or j < 0:
        raise DomainError("index j must be a nonnegative integer")
    if not math.isfinite(beta):
        raise DomainError("beta must be finite")
    if j == 0:
        return 1.0
    if beta >= 1.0 and float(beta).is_integer() and j >= beta:
        return 0.0
    log_mag = 0.0
    sign = 1.0 if j % 2 == 0 else -1.0
    v = beta - 1.0
    for i in range(j):
        factor = (v - i) / (i + 1.0)
        if factor == 0.0:
            return 0.0
        log_mag += math.log(abs(factor))
        sign = math.copysign(sign, sign * factor)
    if log_mag > 709.0:
        return sign * math.inf
    return sign * math.exp(log_mag)


class _PSeq:
    # lazy coeff_p(j, beta) via the ratio recurrence, identical algebra
    def __init__(self, beta: float):
        self.beta = beta
        self._vals = [1.0]

    def __call__(self, j: int) -> float:
        vals = self._vals
        while len(vals) <= j:
            k = len(vals)
            vals.append(vals[-1] * (k - self.beta) / k)
        return vals[j]


def _sum_single(term, control: SeriesControl):
    """Sum term(j) for j = 0, 1, ... under the truncation rule.

    Returns (value, n_terms, converged, abs_mass).
    """
    total = 0.0
    abs_mass = 0.0
    run = 0
    for j in range(control.max_terms_per_index):
        t = term(j)
        if not math.isfinite(t):
            return total, j + 1, False, math.inf
        total += t
        abs_mass += abs(t)
        if abs(t) <= control.rel_tol * abs(total):
            run += 1
            if run >= _SMALL_RUN:
                return total, j + 1, True, abs_mass
        else:
            run = 0
    return total, control.max_terms_per_index, False, abs_mass


def _sum_double(outer_coef, make_inner, control: SeriesControl):
    """Sum outer_coef(j1) * sum_j2 inner(j2), inner sums completed first."""
    total = 0.0
    abs_mass = 0.0
    n_terms = 0
    run = 0
    for j1 in range(control.max_terms_per_index):
        c1 = outer_coef(j1)
        if not math.isfinite(c1):
            return total, n_terms, False, math.inf
        if c1 == 0.0:
            inner_val, inner_abs = 0.0, 0.0
        else:
            inner_val, inner_n, inner_ok, inner_abs = _sum_single(
                make_inner(j1), control)
            n_terms += inner_n
            if not inner_ok:
                return total, n_terms, False, abs_mass
        t = c1 * inner_val
        total += t
        abs_mass += abs(c1) * inner_abs
        if abs(t) <= control.rel_tol * abs(total):
            run += 1
            if run >= _SMALL_RUN:
                return total, n_terms, True, abs_mass
        else:
            run = 0
    return total, n_terms, False, abs_mass


def _trustworthy(value: float, abs_mass: float, converged: bool) -> bool:
    if not converged or not math.isfinite(value):
        return False
    if abs_mass > abs(value) * _CANCEL_RATIO and abs_mass > 0.0:
        return False
    return True


def _ctrl(control) -> SeriesControl:
    return control if control is not None else SeriesControl()


def _settle(value, n_terms, ok, policy, what, fallback):
    """Return a SeriesValue, invoking the quadrature fallback if needed."""
    if ok:
        return SeriesValue(value, n_terms, True, False)
    if policy is SeriesPolicy.ERROR:
        raise SeriesDivergenceError(
            f"{what} series did not converge within the term budget")
    return SeriesValue(fallback(), n_terms, False, True)


def raw_moment(r: float, params: Params, control: SeriesControl | None = None,
               ) -> SeriesValue:
    """E[X^r] for 0 < r < theta.

    Series over inverse Weibull mixture components; the component moment
    is ((j2+1) gamma)^(r/theta) Gamma(1 - r/theta).
    """
    control = _ctrl(control)
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError("moment order r must be positive and finite")
    if r >= params.theta:
        raise MomentUndefinedError(
            f"E[X^{r}] does not exist: requires r < theta = {params.theta}")
    a, b, c, gam, theta = params.a, params.b, params.c, params.gamma, params.theta
    kappa = r / theta
    front = math.exp(math.log(c) - log_beta(a, b) + log_gamma(1.0 - kappa)
                     + kappa * math.log(gam))
    p_outer = _PSeq(b)

    def make_inner(j1):
        q = _PSeq(c * (a + j1))
        return lambda j2: q(j2) * (j2 + 1.0) ** (kappa - 1.0)

    value, n_terms, converged, abs_mass = _sum_double(p_outer, make_inner,
                                                      control)
    ok = _trustworthy(value, abs_mass, converged)

    def fallback():
        quad, _ = integrate(lambda x: x ** r * dist.pdf(x, params))
        return quad

    return _settle(front * value, n_terms, ok, control.policy,
                   f"raw moment r={r}", fallback)


def mean(params: Params, control: SeriesControl | None = None) -> SeriesValue:
    return raw_moment(1.0, params, control)


def _combine(parts, value) -> SeriesValue:
    return SeriesValue(value,
                       sum(p.n_terms for p in parts),
                       all(p.converged for p in parts),
                       any(p.used_fallback for p in parts))


def variance(params: Params, control: SeriesControl | None = None,
             ) -> SeriesValue:
    m1 = raw_moment(1.0, params, control)
    m2 = raw_moment(2.0, params, control)
    return _combine((m1, m2), m2.value - m1.value ** 2)


def skewness(params: Params, control: SeriesControl | None = None,
             ) -> SeriesValue:
    m1 = raw_moment(1.0, params, control)
    m2 = raw_moment(2.0, params, control)
    m3 = raw_moment(3.0, params, control)
    var = m2.value - m1.value ** 2
    third = m3.value - 3.0 * m1.value * m2.value + 2.0 * m1.value ** 3
    return _combine((m1, m2, m3), third / var ** 1.5)


def kurtosis(params: Params, control: SeriesControl | None = None,
             ) -> SeriesValue:
    m1 = raw_moment(1.0, params, control)
    m2 = raw_moment(2.0, params, control)
    m3 = raw_moment(3.0, params, control)
    m4 = raw_moment(4.0, params, control)
    var = m2.value - m1.value ** 2
    fourth = (m4.value - 4.0 * m1.value * m3.value
              + 6.0 * m1.value ** 2 * m2.value - 3.0 * m1.value ** 4)
    return _combine((m1, m2, m3, m4), fourth / var ** 2)


def formal_mgf(t: float, params: Params, n_terms: int,
               control: SeriesControl | None = None) -> SeriesValue:
    """Truncated exponential generating sum of raw moments.

    The untruncated sum does not converge for t != 0 because moments of
    order r >= theta do not exist, so only the truncated form is
    offered. Requires n_terms - 1 < theta.
    """
    if not isinstance(n_terms, int) or n_terms < 1:
        raise DomainError("n_terms must be a positive integer")
    if n_terms - 1 >= params.theta:
        raise MomentUndefinedError(
            f"truncation order {n_terms - 1} needs moments up to that order; "
            f"only orders below theta = {params.theta} exist")
    total = 1.0
    parts = []
    for r in range(1, n_terms):
        m = raw_moment(float(r), params, control)
        parts.append(m)
        total += t ** r * m.value / math.factorial(r)
    if not parts:
        return SeriesValue(total, 0, True, False)
    return _combine(parts, total)


def renyi_entropy(rho: float, params: Params,
                  control: SeriesControl | None = None) -> SeriesValue:
    """Renyi entropy of order rho (rho > 0, rho != 1).

    log of the integral of the rho-th density power, divided by 1 - rho.
    The integral is finite only when rho + (rho - 1)/theta > 0; for
    rho < 1 that bounds theta away from heavy tails.
    """
    control = _ctrl(control)
    if not (rho > 0.0) or rho == 1.0 or not math.isfinite(rho):
        raise DomainError("rho must be positive, finite and different from 1")
    a, b, c, gam, theta = params.a, params.b, params.c, params.gamma, params.theta
    xi = rho + (rho - 1.0) / theta
    if xi <= 0.0:
        raise MomentUndefinedError(
            f"density power integral diverges: rho + (rho - 1)/theta = {xi}")
    log_front = (rho * (math.log(c * gam * theta) - log_beta(a, b))
                 + log_gamma(xi) - math.log(theta) - xi * math.log(gam))
    p_outer = _PSeq(rho * (b - 1.0) + 1.0)

    def make_inner(j1):
        q = _PSeq(rho * (a * c - 1.0) + j1 * c + 1.0)
        return lambda j2: q(j2) * (j2 + rho) ** (-xi)

    s, n_terms, converged, abs_mass = _sum_double(p_outer, make_inner, control)
    ok = _trustworthy(s, abs_mass, converged) and s > 0.0
    value = (log_front + math.log(s)) / (1.0 - rho) if ok else math.nan

    def fallback():
        def integrand(x):
            lp = dist.log_pdf(x, params)
            return np.where(np.isfinite(lp), np.exp(rho * lp), 0.0)

        power_integral, _ = integrate(integrand)
        if not power_integral > 0.0:
            raise SeriesDivergenceError(
                "density power integral evaluated nonpositive")
        return math.log(power_integral) / (1.0 - rho)

    return _settle(value, n_terms, ok, control.policy,
                   f"renyi entropy rho={rho}", fallback)


_ENTROPY_I_SERIES_MAX = 12
_ENTROPY_M_CAP = 2000


def _entropy_cross_term(j2: int, c: float, rel_tol: float) -> float:
    """E[log(1 - W^c)] / (j2+1) piece of the entropy series.

    For small j2 this is the exact finite sum over i of
    p(i, j2+1)/(i+1) * (psi(1) - psi((i+1)/c + 1)), which terminates at
    i = j2. That alternating sum loses roughly one bit per index, so for
    larger j2 the identical quantity is summed as the same-sign series
    -sum_m B(c m + 1, j2 + 1)/m, which has no cancellation.
    """
    if j2 <= _ENTROPY_I_SERIES_MAX:
        q = _PSeq(float(j2 + 1))
        psi_one = -EULER_GAMMA
        total = 0.0
        for i in range(j2 + 1):
            total += q(i) / (i + 1.0) * (psi_one - digamma((i + 1.0) / c + 1.0))
        return total
    lg_top = log_gamma(float(j2 + 1))
    total = 0.0
    run = 0
    for m in range(1, _ENTROPY_M_CAP + 1):
        t = -math.exp(log_gamma(c * m + 1.0) + lg_top
                      - log_gamma(c * m + j2 + 2.0)) / m
        total += t
        if abs(t) <= rel_tol * abs(total):
            run += 1
            if run >= _SMALL_RUN:
                return total
        else:
            run = 0
    return math.nan


def shannon_entropy(params: Params, control: SeriesControl | None = None,
                    ) -> SeriesValue:
    """Shannon entropy, -E[log f(X)].

    Component expectations reduce to digamma values and log moments of
    unit exponentials; the cross term couples in an extra finite sum.
    """
    control = _ctrl(control)
    a, b, c, gam, theta = params.a, params.b, params.c, params.gamma, params.theta
    lead = -(math.log(c * gam * theta) - log_beta(a, b))
    weight = math.exp(math.log(c) - log_beta(a, b))
    psi_one = -EULER_GAMMA
    t_cache: dict[int, float] = {}

    def t_term(j2: int) -> float:
        got = t_cache.get(j2)
        if got is None:
            n1 = j2 + 1.0
            got = ((theta + 1.0) / theta * (math.log(n1 * gam) + EULER_GAMMA)
                   / n1
                   + 1.0 / (n1 * n1)
                   - (a * c - 1.0) / n1 * (psi_one - digamma(j2 + 2.0))
                   - (b - 1.0) * _entropy_cross_term(j2, c, control.rel_tol))
            t_cache[j2] = got
        return got

    p_outer = _PSeq(b)

    def make_inner(j1):
        q = _PSeq(c * (a + j1))
        return lambda j2: q(j2) * t_term(j2)

    s, n_terms, converged, abs_mass = _sum_double(p_outer, make_inner, control)
    ok = _trustworthy(s, abs_mass, converged)

    def fallback():
        def integrand(x):
            lp = dist.log_pdf(x, params)
            return np.where(np.isfinite(lp), -np.exp(lp) * lp, 0.0)

        quad, _ = integrate(integrand)
        return quad

    return _settle(lead + weight * s, n_terms, ok, control.policy,
                   "shannon entropy", fallback)


def _check_order(k: int, n: int) -> None:
    if not isinstance(k, int) or not isinstance(n, int):
        raise DomainError("order statistic indices must be integers")
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")


def order_stat_pdf(x, k: int, n: int, params: Params,
                   form: OrderStatForm = OrderStatForm.BETA_WEIGHTED):
    """Density of the k-th smallest of n independent draws.

    The beta weighted form evaluates F^(k-1) (1-F)^(n-k) f / B(k, n-k+1)
    directly; the expansion form replaces (1-F)^(n-k) by its alternating
    binomial sum. The two agree to rounding error.
    """
    _check_order(k, n)
    fx = dist.pdf(x, params)
    cdf_x = dist.cdf(x, params)
    norm = math.exp(-log_beta(float(k), float(n - k + 1)))
    if form is OrderStatForm.BETA_WEIGHTED:
        return norm * fx * cdf_x ** (k - 1) * (1.0 - cdf_x) ** (n - k)
    acc = np.zeros_like(np.asarray(cdf_x, dtype=float))
    for j in range(n - k + 1):
        acc = acc + (-1.0) ** j * math.comb(n - k, j) * cdf_x ** (k + j - 1)
    return norm * fx * acc


def order_stat_moment(r: float, k: int, n: int, params: Params,
                      spec: QuadratureSpec | None = None) -> float:
    """E[X_(k:n)^r] by quadrature applied to each expansion term.

    Each term integrates x^r F^(k+j-1) f separately, so every term needs
    r < theta even though the alternating sum would exist more widely.
    """
    _check_order(k, n)
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError("moment order r must be positive and finite")
    if r >= params.theta:
        raise MomentUndefinedError(
            f"term integrals need r < theta = {params.theta}")
    norm = math.exp(-log_beta(float(k), float(n - k + 1)))
    total = 0.0
    for j in range(n - k + 1):
        def integrand(x, power=k + j - 1):
            return x ** r * dist.cdf(x, params) ** power * dist.pdf(x, params)

        piece, _ = integrate(integrand, spec)
        total += (-1.0) ** j * math.comb(n - k, j) * piece
    return norm * total


def _reliability_quadrature(pair: StressStrengthPair) -> float:
    def integrand(t):
        return dist.pdf(t, pair.strength) * dist.cdf(t, pair.stress)

    value, _ = integrate(integrand)
    return value


def reliability(pair: StressStrengthPair,
                control: SeriesControl | None = None) -> SeriesValue:
    """Stress-strength reliability P(Y < X).

    With a shared tail exponent theta the component cross integrals have
    the closed form lam_x / (lam_x + lam_y), giving a quadruple series;
    the two inner sums depend on the outer ones only through one index,
    so they are collapsed and cached per that index. Differing theta has
    no closed component form and goes straight to quadrature.
    """
    control = _ctrl(control)
    px, py = pair.strength, pair.stress
    if px.theta != py.theta:
        value = _reliability_quadrature(pair)
        return SeriesValue(value, 0, False, True)

    front = math.exp(math.log(px.c) + math.log(py.c)
                     - log_beta(px.a, px.b) - log_beta(py.a, py.b))
    x_seqs: dict[int, _PSeq] = {}
    p_bx = _PSeq(px.b)
    # collapsed strength-side double sum, one entry per stress index j2
    cx_cache: dict[int, tuple] = {}
    state = {"n_terms": 0}

    def cx(j2: int):
        got = cx_cache.get(j2)
        if got is not None:
            return got
        lam_y = py.gamma * (j2 + 1.0)

        def make_inner(j3):
            q = x_seqs.get(j3)
            if q is None:
                q = _PSeq(px.c * (px.a + j3))
                x_seqs[j3] = q

            def term(j4):
                lam_x = px.gamma * (j4 + 1.0)
                return q(j4) / (j4 + 1.0) * lam_x / (lam_x + lam_y)

            return term

        value, n_terms, converged, abs_mass = _sum_double(p_bx, make_inner,
                                                          control)
        state["n_terms"] += n_terms
        got = (value, _trustworthy(value, abs_mass, converged))
        cx_cache[j2] = got
        return got

    p_by = _PSeq(py.b)
    bad = {"hit": False}

    def make_inner_y(j1):
        q = _PSeq(py.c * (py.a + j1))

        def term(j2):
            val, x_ok = cx(j2)
            if not x_ok:
                bad["hit"] = True
                return math.nan
            return q(j2) / (j2 + 1.0) * val

        return term

    s, n_terms, converged, abs_mass = _sum_double(p_by, make_inner_y, control)
    n_terms += state["n_terms"]
    ok = _trustworthy(s, abs_mass, converged) and not bad["hit"]

    return _settle(front * s, n_terms, ok, control.policy,
                   "stress-strength reliability",
                   lambda: _reliability_quadrature(pair))
