"""Scale mixtures and mixture representations of the density.

Randomizing the baseline scale over a unit rate gamma law turns the
inverse Weibull kernel into a Burr III law, and turns the full density
into a double series of Dagum densities. The c = 1 subfamily is also a
countable mixture of plain inverse Weibull densities with beta-ratio
weights. The helpers here evaluate both sides of those identities so
tests can pin the agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distribution as dist
from .distribution import Params, Seed
from .errors import DomainError
from .oracles import QuadratureSpec, integrate
from .series import SeriesControl, SeriesPolicy, SeriesValue, _PSeq, \
    _sum_double, _trustworthy
from .special import log_beta, log_gamma

__all__ = [
    "GammaMixing",
    "DagumParams",
    "burr3_cdf",
    "burr3_pdf",
    "dagum_pdf",
    "mixed_baseline_cdf",
    "mixed_pdf",
    "mixed_pdf_series",
    "beta_iwei_pdf",
    "beta_iwei_mixture_weights",
    "beta_iwei_mixture_pdf",
    "sample_scale_mixture",
]


@dataclass(frozen=True)
class GammaMixing:
    """Unit rate gamma law for randomizing the scale parameter."""

    shape: float

    def __post_init__(self) -> None:
        if not (self.shape > 0.0) or not math.isfinite(self.shape):
            raise DomainError("mixing shape must be positive and finite")

    def pdf(self, g):
        g = np.asarray(g, dtype=float)
        out = np.zeros_like(g)
        pos = g > 0.0
        out[pos] = np.exp((self.shape - 1.0) * np.log(g[pos]) - g[pos]
                          - log_gamma(self.shape))
        return out

    def sample(self, n: int, seed: Seed) -> np.ndarray:
        if n < 1:
            raise DomainError("sample size must be positive")
        rng = np.random.default_rng(seed.value)
        return rng.gamma(self.shape, 1.0, size=n)


@dataclass(frozen=True)
class DagumParams:
    shape: float
    scale: float
    theta: float

    def __post_init__(self) -> None:
        for name in ("shape", "scale", "theta"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise DomainError(f"{name} must be positive and finite")


def burr3_cdf(x, shape: float, theta: float):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        t = np.where(x > 0.0, x ** (-theta), np.inf)
        return np.where(x > 0.0, (1.0 + t) ** (-shape), 0.0)


def burr3_pdf(x, shape: float, theta: float):
    return dagum_pdf(x, DagumParams(shape, 1.0, theta))


def dagum_pdf(x, params: DagumParams):
    beta, lam, theta = params.shape, params.scale, params.theta
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        t = x ** (-theta)
        val = (beta * lam * theta * x ** (-theta - 1.0)
               * (1.0 + lam * t) ** (-beta - 1.0))
    return np.where(x > 0.0, np.where(np.isfinite(val), val, 0.0), 0.0)


def mixed_baseline_cdf(x: float, mixing: GammaMixing, theta: float,
                       spec: QuadratureSpec | None = None) -> float:
    """Numerically scale-mixed inverse Weibull cdf at a point.

    Integrates exp(-g x^-theta) against the mixing density; the closed
    form is burr3_cdf(x, mixing.shape, theta).
    """
    if not (x > 0.0):
        return 0.0
    t = x ** (-theta)

    def integrand(g):
        # g*t overflows for the far mixing tail; exp(-inf) = 0 is exact
        with np.errstate(over="ignore"):
            return np.exp(-g * t) * mixing.pdf(g)

    value, _ = integrate(integrand, spec)
    return value


def mixed_pdf(x: float, params: Params, mixing: GammaMixing,
              spec: QuadratureSpec | None = None) -> float:
    """Numerically scale-mixed density at a point.

    The scale enters only through gamma^(1/theta), so the conditional
    density at scale g is the unit scale density shifted along that
    axis. params.gamma is ignored; the mixing law replaces it.
    """
    if not (x > 0.0):
        return 0.0
    unit = Params(params.a, params.b, params.c, 1.0, params.theta)
    inv_theta = 1.0 / params.theta

    def integrand(g):
        shrink = g ** (-inv_theta)
        return dist.pdf(x * shrink, unit) * shrink * mixing.pdf(g)

    value, _ = integrate(integrand, spec)
    return value


def mixed_pdf_series(x: float, params: Params, mixing: GammaMixing,
                     control: SeriesControl | None = None) -> SeriesValue:
    """Scale-mixed density as a double series of Dagum densities.

    Each inverse Weibull mixture component with scale (j2+1) gamma
    integrates against the gamma law to a Dagum density with scale
    j2+1 (params.gamma is replaced by the mixing law, unit rate).
    """
    control = control if control is not None else SeriesControl()
    if not (x > 0.0):
        raise DomainError("x must be positive")
    a, b, c, theta = params.a, params.b, params.c, params.theta
    front = math.exp(math.log(c) - log_beta(a, b))
    p_outer = _PSeq(b)

    def make_inner(j1):
        q = _PSeq(c * (a + j1))

        def term(j2):
            comp = DagumParams(mixing.shape, j2 + 1.0, theta)
            return q(j2) / (j2 + 1.0) * float(dagum_pdf(x, comp))

        return term

    value, n_terms, converged, abs_mass = _sum_double(p_outer, make_inner,
                                                      control)
    ok = _trustworthy(value, abs_mass, converged)
    if ok:
        return SeriesValue(front * value, n_terms, True, False)
    if control.policy is SeriesPolicy.ERROR:
        from .errors import SeriesDivergenceError
        raise SeriesDivergenceError(
            "mixed density series did not converge within the term budget")
    return SeriesValue(mixed_pdf(x, params, mixing), n_terms, False, True)


def beta_iwei_pdf(x, a: float, b: float, gamma: float, theta: float):
    """Classical beta-generated inverse Weibull density.

    Algebraically identical to the c = 1 member of the reflected family
    with the two beta shapes swapped; evaluated through that identity.
    """
    return dist.pdf(x, Params(b, a, 1.0, gamma, theta))


def beta_iwei_mixture_weights(a: float, b: float, n_terms: int) -> np.ndarray:
    """First n_terms weights of the inverse Weibull mixture for c = 1.

    w_j = (-1)^j C(b-1, j) / (B(a, b) (a + j)); the full sequence sums
    to one, exactly truncating when b is a positive integer.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError("shapes must be positive")
    if not isinstance(n_terms, int) or n_terms < 1:
        raise DomainError("n_terms must be a positive integer")
    seq = _PSeq(b)
    inv_beta = math.exp(-log_beta(a, b))
    return np.array([seq(j) * inv_beta / (a + j) for j in range(n_terms)])


def beta_iwei_mixture_pdf(x, a: float, b: float, gamma: float, theta: float,
                          n_terms: int = 200):
    """Weighted sum of inverse Weibull densities with scales (a+j) gamma."""
    w = beta_iwei_mixture_weights(a, b, n_terms)
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for j, wj in enumerate(w):
        if wj == 0.0:
            continue
        total = total + wj * dist.baseline_pdf(x, (a + j) * gamma, theta)
    return total


def sample_scale_mixture(n: int, params: Params, mixing: GammaMixing,
                         seed: Seed) -> np.ndarray:
    """Draws with the scale randomized by the mixing law.

    One generator drives both layers, so results are reproducible per
    seed. Uses the gamma^(1/theta) scale property: a unit scale draw is
    stretched by g^(1/theta).
    """
    if n < 1:
        raise DomainError("sample size must be positive")
    rng = np.random.default_rng(seed.value)
    g = rng.gamma(mixing.shape, 1.0, size=n)
    u = rng.random(n)
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    unit = Params(params.a, params.b, params.c, 1.0, params.theta)
    base = dist.quantile(u, unit)
    return g ** (1.0 / params.theta) * base
