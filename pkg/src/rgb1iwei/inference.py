"""Maximum-likelihood machinery and goodness-of-fit tools.

The log-likelihood is the plain sum of log densities; its gradient and
negative Hessian are assembled from closed forms (digamma/trigamma terms
for the beta-shape block, stabilized expm1/log1p ratios for everything
touching the baseline).  Fitting runs a multi-start Nelder-Mead simplex
over reparameterized (positive) parameters because the five-parameter
likelihood is extremely flat in some directions; an optional Newton
polish with the analytic derivatives sharpens a simplex winner into a
stationary point when asked.

Also here: AIC, the Kolmogorov-Smirnov test with its asymptotic p-value,
the likelihood-ratio test, and scaled total-time-on-test curves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import distribution as dist
from ._linalg import cholesky_factor, cholesky_solve, sym_inverse
from .distribution import Params, Seed, SubModel
from .errors import (DomainError, EmptyDatasetError, NegativeLRError,
                     NoConvergenceError, ParameterError,
                     SingularInformationWarning)
from .oracles import QuadratureSpec, integrate, integrate_interval
from .special import digamma, inc_gamma_upper, trigamma

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class Dataset:
    """Positive observations, held sorted ascending.

    label and scale_note are free-text provenance carried into reports.
    """

    values: np.ndarray
    label: str = ""
    scale_note: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise EmptyDatasetError("dataset has no observations")
        if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
            raise DomainError("observations must be positive and finite")
        object.__setattr__(self, "values", np.sort(arr))

    @property
    def n(self):
        return int(self.values.size)


@dataclass(frozen=True)
class FitResult:
    """One maximum-likelihood fit.

    std_errors is a 5-vector aligned with (a, b, c, gamma, theta); entries
    for pinned or information-degenerate parameters are NaN.  n_iter counts
    simplex iterations summed over every start plus any polish steps.
    """

    params_hat: Params
    loglik: float
    score_at_hat: np.ndarray
    observed_info: np.ndarray
    std_errors: np.ndarray
    cond_number: float
    converged: bool
    n_iter: int
    n_starts: int
    submodel: SubModel

    @property
    def n_free(self):
        return len(self.submodel.free_names)


@dataclass(frozen=True)
class GofReport:
    aic: float
    ks_stat: float
    ks_pvalue: float
    lr_stat: float | None = None
    lr_df: int = 0
    lr_pvalue: float | None = None


class TTTKind(Enum):
    EMPIRICAL = "Empirical"
    FITTED = "Fitted"
    FITTED_TRUNCATED = "FittedTruncated"


@dataclass(frozen=True)
class TTTCurve:
    u_grid: np.ndarray
    phi: np.ndarray
    kind: TTTKind


def log_likelihood(p: Params, d: Dataset) -> float:
    """Sum of log densities; -inf when any observation degenerates."""
    total = float(np.sum(dist.log_pdf(d.values, p)))
    return total if not math.isnan(total) else -math.inf


# series coefficients for the (D + u) / D^2 kernel below
_HC_Q = np.array([1.0 / math.factorial(k + 2) for k in range(18)])
_HC_R = np.array([1.0 / math.factorial(k + 1) for k in range(18)])


def _hc(u):
    """(D + u) / D^2 with D = -expm1(u), stable through u -> 0.

    Near zero both numerator and denominator vanish like u^2; writing
    D = -u r(u) and D + u = -u^2 q(u) leaves -q/r^2 with q, r ordinary
    power series, so nothing cancels.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape)
    near = np.abs(u) < 0.5
    if np.any(near):
        un = u[near]
        q = np.zeros_like(un)
        r = np.zeros_like(un)
        for k in range(17, -1, -1):
            q = q * un + _HC_Q[k]
            r = r * un + _HC_R[k]
        out[near] = -q / (r * r)
    far = ~near
    if np.any(far):
        dd = -np.expm1(u[far])
        out[far] = (dd + u[far]) / (dd * dd)
    return out


def _pieces(p: Params, x: np.ndarray):
    """Shared per-observation ingredients for the derivative formulas.

    With s = gamma x^-theta, L = log(1-G), A = (1-G)^c and D = 1 - A, the
    derivatives need A/D-weighted combinations that hit 0/0 and inf*0 in
    the tails long before the log-likelihood itself degenerates.  Each
    combination is therefore fused in log space and exponentiated once:

      e_q   = s G/(1-G)            (q_gamma = -e_q/gamma, q_theta = ln_x e_q)
      e_w   = e_q A/D
      e_h   = e_q A (D + cL)/D^2
      ald   = A L / D
      al2d2 = A L^2 / D^2

    Once c*L underflows to -0.0 the exact forms are replaced by their
    s -> inf limits, folding the cancelling +-s pair away analytically.
    """
    ln_x, s, L = dist._baseline_logs(x, p)
    c = p.c
    log_c = math.log(c)
    cl = c * L
    with np.errstate(all="ignore"):
        # below ~1e-300 the product c*L is subnormal or -0.0 and the
        # asymptote log(c) - s is the more accurate branch anyway
        exact = cl < -1e-300
        cl_safe = np.where(exact, cl, -1.0)
        ln_d = np.where(exact, dist._log1mexp(cl_safe), log_c - s)
        neg_l = np.where(s > 700.0, 1.0, -L)
        lnabs_l = np.where(s > 700.0, -s, np.log(neg_l))
        ln_s = math.log(p.gamma) - p.theta * ln_x
        e_q = np.exp(ln_s - s - L)
        expo_w = np.where(exact, ln_s - s - L + cl - ln_d,
                          ln_s - L + cl - log_c)
        e_w = np.exp(expo_w)
        ald = -np.exp(np.where(exact, lnabs_l + cl - ln_d, -log_c))
        al2d2 = np.exp(np.where(exact, 2.0 * lnabs_l + cl - 2.0 * ln_d,
                                -2.0 * log_c))
        e_h = np.exp(ln_s - s - L + cl) * _hc(cl)
    return ln_x, s, L, ln_d, e_q, e_w, e_h, ald, al2d2


def score(p: Params, d: Dataset) -> np.ndarray:
    """Analytic gradient of the log-likelihood in (a, b, c, gamma, theta)."""
    n = d.n
    ln_x, s, L, ln_d, e_q, e_w, e_h, ald, al2d2 = _pieces(p, d.values)
    a, b, c = p.a, p.b, p.c
    bfac = b - 1.0
    acm1 = a * c - 1.0
    psi_ab = digamma(a + b)
    sum_l = float(np.sum(L))
    with np.errstate(all="ignore"):
        u_a = -n * (digamma(a) - psi_ab) + c * sum_l
        u_b = -n * (digamma(b) - psi_ab) + float(np.sum(ln_d))
        u_c = n / c + a * sum_l - bfac * float(np.sum(ald))
        u_gamma = (acm1 * float(np.sum(e_q)) - bfac * c * float(np.sum(e_w))
                   + float(np.sum(1.0 - s))) / p.gamma
        u_theta = -acm1 * float(np.sum(ln_x * e_q)) \
            + bfac * c * float(np.sum(ln_x * e_w)) \
            + n / p.theta - float(np.sum(ln_x * (1.0 - s)))
    return np.array([u_a, u_b, u_c, u_gamma, u_theta])


def observed_information(p: Params, d: Dataset) -> np.ndarray:
    """Negative Hessian of the log-likelihood, as a symmetric 5x5 matrix."""
    n = d.n
    ln_x, s, L, ln_d, e_q, e_w, e_h, ald, al2d2 = _pieces(p, d.values)
    a, b, c = p.a, p.b, p.c
    gam, th = p.gamma, p.theta
    bfac = b - 1.0
    acm1 = a * c - 1.0
    tg_ab = trigamma(a + b)

    def tau_pair(rho, gg, lg_sum):
        # l_tt' = -(ac-1) sum(R + q q') + lg_tt' + (b-1) sum(M_tt') with
        # R = rho e_q, q q' = gg e_q^2 and
        # M = c rho e_w + c(1-c) gg e_w e_q - c^2 gg e_w^2
        out = -acm1 * float(np.sum(rho * e_q + gg * e_q * e_q)) + lg_sum
        if bfac != 0.0:
            m_sum = c * float(np.sum(rho * e_w)) \
                + c * (1.0 - c) * float(np.sum(gg * e_w * e_q)) \
                - c * c * float(np.sum(gg * e_w * e_w))
            out += bfac * m_sum
        return out

    with np.errstate(all="ignore"):
        hess = np.empty((5, 5))
        hess[0, 0] = -n * (trigamma(a) - tg_ab)
        hess[0, 1] = hess[1, 0] = n * tg_ab
        hess[1, 1] = -n * (trigamma(b) - tg_ab)
        hess[0, 2] = hess[2, 0] = float(np.sum(L))
        hess[1, 2] = hess[2, 1] = -float(np.sum(ald))
        c2 = c * c
        hess[2, 2] = -n / c2 if c2 > 0.0 else -math.inf
        if bfac != 0.0:
            hess[2, 2] -= bfac * float(np.sum(al2d2))
        sum_eq = float(np.sum(e_q))
        sum_eqt = float(np.sum(ln_x * e_q))
        hess[0, 3] = hess[3, 0] = c * sum_eq / gam
        hess[0, 4] = hess[4, 0] = -c * sum_eqt
        hess[1, 3] = hess[3, 1] = -c * float(np.sum(e_w)) / gam
        hess[1, 4] = hess[4, 1] = c * float(np.sum(ln_x * e_w))
        h_cg = a * sum_eq / gam
        h_ct = -a * sum_eqt
        if bfac != 0.0:
            h_cg -= bfac * float(np.sum(e_h)) / gam
            h_ct += bfac * float(np.sum(ln_x * e_h))
        hess[2, 3] = hess[3, 2] = h_cg
        hess[2, 4] = hess[4, 2] = h_ct
        g2 = gam * gam
        inv_g2 = 1.0 / g2 if g2 > 0.0 else math.inf
        t2 = th * th
        inv_t2 = 1.0 / t2 if t2 > 0.0 else math.inf
        hess[3, 3] = tau_pair(s * inv_g2, inv_g2, -n * inv_g2)
        hess[3, 4] = hess[4, 3] = tau_pair(ln_x * (1.0 - s) / gam,
                                           -ln_x / gam,
                                           float(np.sum(s * ln_x)) / gam)
        hess[4, 4] = tau_pair(ln_x ** 2 * (s - 1.0), ln_x ** 2,
                              -n * inv_t2 - float(np.sum(s * ln_x ** 2)))
    return -hess


class Reparam(Enum):
    """How positivity is enforced during optimization."""

    LOG = "log"
    SOFTPLUS = "softplus"


def _to_eta(z, reparam):
    with np.errstate(over="ignore"):
        if reparam is Reparam.LOG:
            return np.exp(z)
        return np.logaddexp(0.0, z)


def _from_eta(eta, reparam):
    eta = np.asarray(eta, dtype=float)
    if reparam is Reparam.LOG:
        return np.log(eta)
    with np.errstate(over="ignore"):
        return np.where(eta > 500.0, eta, np.log(np.expm1(np.minimum(eta,
                                                                     500.0))))


def _eta_derivs(z, reparam):
    """(eta, d eta/dz, d2 eta/dz2) for the polish step's chain rule."""
    if reparam is Reparam.LOG:
        eta = np.exp(z)
        return eta, eta, eta
    eta = np.logaddexp(0.0, z)
    sig = np.where(z >= 0.0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                   np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
    return eta, sig, sig * (1.0 - sig)


@dataclass(frozen=True)
class FitConfig:
    """Optimizer knobs; the defaults are what every reported number uses."""

    n_starts: int = 16
    seed: Seed = Seed(0)
    reparam: Reparam = Reparam.LOG
    polish: bool = False
    max_iter: int = 4000
    rel_tol: float = 1e-10
    diam_tol: float = 1e-8
    init_step: float = 0.25
    lhs_low: float = -2.0
    lhs_high: float = 4.0

    def __post_init__(self):
        if self.n_starts < 1:
            raise ParameterError("n_starts must be at least 1")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be at least 1")
        if not (self.rel_tol > 0.0 and self.diam_tol > 0.0
                and self.init_step > 0.0):
            raise ParameterError("tolerances and init_step must be positive")
        if not self.lhs_low < self.lhs_high:
            raise ParameterError("need lhs_low < lhs_high")


def _objective(sub: SubModel, d: Dataset, reparam: Reparam):
    def value(z):
        eta = _to_eta(z, reparam)
        if not np.all(np.isfinite(eta)) or np.any(eta <= 0.0):
            return -math.inf
        try:
            p = sub.build(eta)
        except ParameterError:
            return -math.inf
        return log_likelihood(p, d)
    return value


def _nelder_mead(value, z0, cfg: FitConfig):
    """Maximize value from z0; returns (z_best, f_best, n_iter, converged).

    Standard reflection/expansion/contraction/shrink coefficients
    (1, 2, 0.5, 0.5).  Converged means the vertex spread fell below
    rel_tol relative to the best value while the simplex diameter fell
    below diam_tol.  Vertex ordering breaks value ties lexicographically
    so reruns are bit-for-bit identical.
    """
    k = z0.size
    pts = [z0.astype(float)]
    for i in range(k):
        step = np.zeros(k)
        step[i] = cfg.init_step
        pts.append(z0 + step)
    vals = [value(z) for z in pts]

    def sort_key(i):
        return (-vals[i], tuple(pts[i]))

    n_iter = 0
    for n_iter in range(1, cfg.max_iter + 1):
        order = sorted(range(k + 1), key=sort_key)
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        if vals[0] == -math.inf:
            return pts[0], vals[0], n_iter, False
        spread = vals[0] - vals[-1]
        diam = max(float(np.max(np.abs(q - pts[0]))) for q in pts[1:])
        if spread <= cfg.rel_tol * max(1.0, abs(vals[0])) \
                and diam <= cfg.diam_tol:
            return pts[0], vals[0], n_iter, True
        centroid = np.mean(pts[:-1], axis=0)
        reflected = centroid + (centroid - pts[-1])
        f_r = value(reflected)
        if f_r > vals[0]:
            expanded = centroid + 2.0 * (centroid - pts[-1])
            f_e = value(expanded)
            if f_e > f_r:
                pts[-1], vals[-1] = expanded, f_e
            else:
                pts[-1], vals[-1] = reflected, f_r
            continue
        if f_r > vals[-2]:
            pts[-1], vals[-1] = reflected, f_r
            continue
        if f_r > vals[-1]:
            contracted = centroid + 0.5 * (reflected - centroid)
            f_c = value(contracted)
            if f_c >= f_r:
                pts[-1], vals[-1] = contracted, f_c
                continue
        else:
            contracted = centroid - 0.5 * (centroid - pts[-1])
            f_c = value(contracted)
            if f_c > vals[-1]:
                pts[-1], vals[-1] = contracted, f_c
                continue
        for i in range(1, k + 1):
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
            vals[i] = value(pts[i])
    order = sorted(range(k + 1), key=sort_key)
    return pts[order[0]], vals[order[0]], n_iter, False


def _newton_polish(sub, d, z0, cfg, max_steps=60):
    """Sharpen a simplex winner with damped Newton steps on the analytic
    derivatives, in the reparameterized space.  Returns
    (z, loglik, steps, stationary)."""
    value = _objective(sub, d, cfg.reparam)
    mask = sub.free_mask
    z = z0.copy()
    current = value(z)
    for step_no in range(1, max_steps + 1):
        eta, d1, d2 = _eta_derivs(z, cfg.reparam)
        try:
            p = sub.build(eta)
        except ParameterError:
            return z, current, step_no, False
        full_grad = score(p, d)
        if not np.all(np.isfinite(full_grad)):
            return z, current, step_no, False
        grad = full_grad[mask] * d1
        info = observed_information(p, d)[np.ix_(mask, mask)]
        curv = d1[:, None] * info * d1[None, :] - np.diag(d2
                                                          * full_grad[mask])
        if math.sqrt(float(grad @ grad)) <= 1e-8 * max(1.0, abs(current)):
            return z, current, step_no, True
        if not np.all(np.isfinite(curv)):
            return z, current, step_no, False
        low = cholesky_factor(curv)
        if low is not None:
            direction = cholesky_solve(low, grad)
        else:
            direction = sym_inverse(curv, _COND_LIMIT).inverse @ grad
        if not np.all(np.isfinite(direction)) \
                or float(direction @ grad) <= 0.0:
            direction = grad / max(1.0, float(np.max(np.abs(grad))))
        scale = 1.0
        improved = False
        for _ in range(40):
            candidate = z + scale * direction
            f_c = value(candidate)
            if f_c > current:
                z, current = candidate, f_c
                improved = True
                break
            scale *= 0.5
        if not improved:
            return z, current, step_no, False
    return z, current, max_steps, False


def _ascent_gap(sub, d, z, cfg):
    """Newton-model estimate of the log-likelihood still available above z.

    Half the Newton decrement g' C^-1 g, from the analytic derivatives in
    the reparameterized space.  Found by the quadratic model alone, so it
    stays honest where rounding makes the objective itself look flat.
    Returns inf when the derivatives are not finite at z.
    """
    eta, d1, d2 = _eta_derivs(z, cfg.reparam)
    try:
        p = sub.build(eta)
    except ParameterError:
        return math.inf
    mask = sub.free_mask
    g_full = score(p, d)
    if not np.all(np.isfinite(g_full[mask])):
        return math.inf
    g = g_full[mask] * d1
    info = observed_information(p, d)[np.ix_(mask, mask)]
    curv = d1[:, None] * info * d1[None, :] - np.diag(d2 * g_full[mask])
    if not np.all(np.isfinite(curv)):
        return math.inf
    low = cholesky_factor(curv)
    if low is not None:
        step = cholesky_solve(low, g)
    else:
        step = sym_inverse(curv, _COND_LIMIT).inverse @ g
    gap = 0.5 * float(g @ step)
    return abs(gap) if math.isfinite(gap) else math.inf


def _latin_hypercube(n, k, rng, low, high):
    strata = np.column_stack([rng.permutation(n) for _ in range(k)])
    u = (strata + rng.random((n, k))) / n
    return low + (high - low) * u


def _starts(d, sub, cfg):
    k = len(sub.free_names)
    rng = np.random.default_rng(cfg.seed.value)
    z_rows = _latin_hypercube(cfg.n_starts, k, rng, cfg.lhs_low, cfg.lhs_high)
    starts = [row.copy() for row in z_rows]
    if sub is not SubModel.IWEI:
        # warm start: baseline-only fit with the shape block at its pinned 1s
        base = fit(d, SubModel.IWEI, replace(cfg, polish=False))
        full = base.params_hat.as_array()
        eta0 = full[sub.free_mask]
        starts.append(np.asarray(_from_eta(eta0, cfg.reparam), dtype=float))
    return starts


def fit(d: Dataset, sub: SubModel = SubModel.FULL,
        config: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of a sub-model by multi-start simplex search.

    Deterministic for a given config: the winner is the highest
    log-likelihood over all starts, ties broken by the lexicographically
    smallest parameter vector.
    """
    cfg = config if config is not None else FitConfig()
    k = len(sub.free_names)
    if d.n < k:
        raise DomainError(
            f"need at least {k} observations to fit {sub.value}, got {d.n}")
    value = _objective(sub, d, cfg.reparam)
    outcomes = []
    total_iter = 0
    for z0 in _starts(d, sub, cfg):
        z_best, f_best, n_iter, conv = _nelder_mead(value, z0, cfg)
        total_iter += n_iter
        if math.isfinite(f_best):
            outcomes.append((f_best, _to_eta(z_best, cfg.reparam), z_best,
                             conv))
    if not outcomes:
        raise NoConvergenceError(
            f"every start collapsed to -inf log-likelihood for {sub.value} "
            f"(n={d.n}, {cfg.n_starts} starts, seed {cfg.seed.value})")
    # A simplex can stall on a plateau or collapse far from any optimum
    # (this likelihood is unbounded along degenerate parameter rays where
    # rounding also flattens the objective), so candidates are taken
    # best-first and each must survive two checks: a short damped-Newton
    # probe must fail to buy a real improvement, and the Newton decrement
    # at the point must be negligible.  The probe catches stalls the
    # decrement under-rates on indefinite curvature; the decrement catches
    # degenerate rays where rounding blinds the probe's line search.
    outcomes.sort(key=lambda o: (-o[0], tuple(o[1])))
    winner = None
    for f_cand, eta_cand, z_cand, conv_cand in outcomes:
        _, f_probe, steps, _ = _newton_polish(sub, d, z_cand, cfg,
                                              max_steps=8)
        total_iter += steps
        if math.isfinite(f_probe) and f_probe - f_cand <= 1e-3 \
                and _ascent_gap(sub, d, z_cand, cfg) <= 1e-3:
            winner = (f_cand, eta_cand, z_cand, conv_cand)
            break
    if winner is None:
        best = outcomes[0][0]
        raise NoConvergenceError(
            f"no start for {sub.value} reached a verifiable local optimum "
            f"(best raw log-likelihood {best:.6f} over "
            f"{len(outcomes)} starts, seed {cfg.seed.value})")
    f_hat, _, z_hat, converged = winner
    if cfg.polish:
        z_hat, f_hat, steps, stationary = _newton_polish(sub, d, z_hat, cfg)
        total_iter += steps
        converged = converged or stationary
    p_hat = sub.build(_to_eta(z_hat, cfg.reparam))
    info = observed_information(p_hat, d)
    mask = sub.free_mask
    block = info[np.ix_(mask, mask)]
    std_errors = np.full(5, np.nan)
    cond_number = math.inf
    if np.all(np.isfinite(block)):
        decomp = sym_inverse(block, _COND_LIMIT)
        cond_number = decomp.cond_number
        diag = np.diag(decomp.inverse)
        std_errors[mask] = np.where(diag > 0.0, np.sqrt(np.abs(diag)),
                                    np.nan)
        if decomp.used_pseudo:
            warnings.warn(SingularInformationWarning(
                f"observed information for {sub.value} has condition number "
                f"{decomp.cond_number:.3e}; standard errors use a "
                f"pseudo-inverse"))
    else:
        warnings.warn(SingularInformationWarning(
            f"observed information for {sub.value} is not finite at the "
            f"optimum; standard errors unavailable"))
    n_starts = cfg.n_starts + (0 if sub is SubModel.IWEI else 1)
    return FitResult(params_hat=p_hat, loglik=f_hat,
                     score_at_hat=score(p_hat, d), observed_info=info,
                     std_errors=std_errors, cond_number=cond_number,
                     converged=converged, n_iter=total_iter,
                     n_starts=n_starts, submodel=sub)


def aic_value(loglik: float, n_free: int) -> float:
    """Akaike information criterion 2k - 2 loglik."""
    if n_free < 0:
        raise DomainError("n_free must be nonnegative")
    return 2.0 * n_free - 2.0 * float(loglik)


def aic(fit_result: FitResult) -> float:
    return aic_value(fit_result.loglik, fit_result.n_free)


def kolmogorov_pvalue(lam: float) -> float:
    """Asymptotic Kolmogorov upper tail 2 sum (-1)^(k-1) exp(-2 k^2 lam^2),
    truncated at 100 terms and clipped into [0, 1]."""
    lam = float(lam)
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        total += (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(d: Dataset, p: Params):
    """Kolmogorov-Smirnov distance of the data from the model cdf, with the
    asymptotic p-value at sqrt(n) times the statistic."""
    grid = np.atleast_1d(dist.cdf(d.values, p))
    n = d.n
    i = np.arange(1.0, n + 1.0)
    stat = float(max(np.max(i / n - grid), np.max(grid - (i - 1.0) / n)))
    stat = min(max(stat, 0.0), 1.0)
    return stat, kolmogorov_pvalue(math.sqrt(n) * stat)


def lr_test(full: FitResult, restricted: FitResult, df: int = 3):
    """Likelihood-ratio statistic 2(l_full - l_restricted) with a
    chi-square upper-tail p-value."""
    df = int(df)
    if df < 1:
        raise DomainError("df must be a positive integer")
    stat = 2.0 * (full.loglik - restricted.loglik)
    if stat < -1e-8:
        raise NegativeLRError(
            f"likelihood ratio {stat!r} is negative; the restricted fit "
            f"beat the full fit, so at least one optimizer run failed")
    stat = max(stat, 0.0)
    return stat, inc_gamma_upper(df / 2.0, stat / 2.0)


def ttt_empirical(d: Dataset) -> TTTCurve:
    """Scaled total time on test at the order statistics, with (0,0)
    prepended."""
    if d.n < 2:
        raise DomainError("empirical TTT needs at least 2 observations")
    x = d.values
    n = d.n
    cum = np.cumsum(x)
    i = np.arange(1, n + 1)
    phi = (cum + (n - i) * x) / cum[-1]
    return TTTCurve(np.concatenate(([0.0], i / n)),
                    np.concatenate(([0.0], phi)), TTTKind.EMPIRICAL)


def _scaled_ttt(survival_fn, quantile_fn, grid_size, upper):
    """Cumulative integral of a survival function between quantile nodes,
    normalized by the total through `upper` (None means the full line)."""
    u = np.linspace(0.0, 1.0, grid_size)
    nodes = np.atleast_1d(quantile_fn(u[1:-1]))
    if upper is not None:
        nodes = np.minimum(nodes, upper)
    spec = QuadratureSpec(abs_tol=1e-10)
    pieces = np.zeros(nodes.size)
    left = 0.0
    for idx, right in enumerate(nodes):
        if right > left:
            pieces[idx], _ = integrate_interval(survival_fn, left, right,
                                                spec)
            left = float(right)
    cum = np.cumsum(pieces)
    if upper is None:
        denom, _ = integrate(survival_fn, spec)
    else:
        tail = 0.0
        if upper > left:
            tail, _ = integrate_interval(survival_fn, left, upper, spec)
        denom = cum[-1] + tail
    phi = np.concatenate(([0.0], np.clip(cum / denom, 0.0, 1.0), [1.0]))
    return u, np.maximum.accumulate(phi)


def ttt_fitted(p: Params, grid_size: int = 101) -> TTTCurve:
    """Scaled TTT curve of the fitted distribution on a uniform u-grid.

    When theta is at most 1 the mean diverges, so the normalizing integral
    is truncated at the 1 - 1e-6 quantile and the curve is flagged
    FittedTruncated.
    """
    if grid_size < 3:
        raise DomainError("grid_size must be at least 3")
    heavy = p.theta <= 1.0
    upper = float(dist.quantile(1.0 - 1e-6, p)) if heavy else None
    u, phi = _scaled_ttt(lambda t: dist.survival(t, p),
                         lambda q: dist.quantile(q, p), grid_size, upper)
    kind = TTTKind.FITTED_TRUNCATED if heavy else TTTKind.FITTED
    return TTTCurve(u, phi, kind)
