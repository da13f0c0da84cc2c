"""Maximum-likelihood estimation for MLM and the competitor families.

Samples may carry integer weights (one value per unique degree, weighted by
its node count); every sum below is then a weighted sum, which is the same
likelihood as fitting the expanded node-level sample.

Two likelihoods are available. ``continuous`` evaluates the density at each
observation. ``discrete`` treats an integer observation k as the rounded
value of a continuous draw, so it contributes log P(k - 1/2 < X <= k + 1/2),
with degree 1 also absorbing all mass below 1/2 (draws are floored at 1).
The discrete form is the consistent one for degree data; see
``discrete_cells``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize
from scipy.special import gammaln, ndtri

from .distributions import (
    FAMILIES, DistributionModel, Exponential, LogNormal, Lomax, MlmParams, Pareto,
    Poisson, PowerLaw, PowerLawCutoff, log_degree_pmf, model_logpdf,
)

PARAM_NAMES = ("alpha", "beta", "sigma")
LIKELIHOODS = ("continuous", "discrete")


class DegenerateSampleError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    """Positive observations, optionally weighted by integer counts."""

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", v)
        if self.weights is not None:
            wt = np.asarray(self.weights, dtype=float).ravel()
            if wt.shape != v.shape:
                raise ValueError("weights must match values")
            if np.any(wt <= 0) or not np.all(np.isfinite(wt)):
                raise ValueError("weights must be positive and finite")
            object.__setattr__(self, "weights", wt)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("sample values must be positive and finite")
        if self.n < 3:
            raise ValueError(f"sample needs at least 3 observations, got {self.n}")

    @property
    def n(self) -> float:
        return float(v.sum()) if (v := self.weights) is not None else float(self.values.size)

    def wsum(self, a) -> float:
        if self.weights is None:
            return float(np.sum(a))
        return float(np.dot(self.weights, a))

    def mean(self) -> float:
        return self.wsum(self.values) / self.n

    def expand(self) -> np.ndarray:
        if self.weights is None:
            return self.values.copy()
        return np.repeat(self.values, self.weights.astype(np.int64))


# ---------------------------------------------------------------------------
# MLM likelihood, score and information


def _terms(s: Sample, a, b, sig):
    x = s.values
    w = np.log1p(x / sig)
    lw = np.log(w)
    l1w = np.log1p(w)
    c = 1 + b + w
    g = np.exp((b + 1) * lw - b * l1w)
    gp = np.exp(b * lw - (b + 1) * l1w) * c
    return x, w, lw, l1w, c, g, gp


def _loglik_score(s: Sample, a, b, sig, want_score=True):
    x, w, lw, l1w, c, g, gp = _terms(s, a, b, sig)
    n = s.n
    ll = (n * math.log(a) - s.wsum(np.log(sig + x)) + s.wsum(np.log(c)) + b * s.wsum(lw)
          - (b + 1) * s.wsum(l1w) - a * s.wsum(g))
    if not want_score:
        return ll, None
    L = lw - l1w
    r = x / (sig * (sig + x))
    da = n / a - s.wsum(g)
    db = s.wsum(1 / c) + s.wsum(L * (1 - a * g))
    ds = (-s.wsum(1 / (sig + x)) + s.wsum(r * ((b + 1) / (1 + w) - b / w - 1 / c))
          + a * s.wsum(r * gp))
    return ll, np.array([da, db, ds])


def mlm_loglik(s: Sample, p: MlmParams) -> float:
    """Total MLM log-likelihood; -inf if any term is non-finite."""
    ll, _ = _loglik_score(s, p.alpha, p.beta, p.sigma, want_score=False)
    return ll if math.isfinite(ll) else -math.inf


def mlm_score(s: Sample, p: MlmParams) -> np.ndarray:
    """Gradient of the log-likelihood with respect to (alpha, beta, sigma)."""
    _, sc = _loglik_score(s, p.alpha, p.beta, p.sigma)
    if not np.all(np.isfinite(sc)):
        raise ArithmeticError(f"non-finite score at {p}")
    return sc


def mlm_hessian(s: Sample, p: MlmParams) -> np.ndarray:
    """Analytic Hessian of the log-likelihood in (alpha, beta, sigma)."""
    a, b, sig = p.alpha, p.beta, p.sigma
    x, w, lw, l1w, c, g, gp = _terms(s, a, b, sig)
    L = lw - l1w
    r = x / (sig * (sig + x))
    r2 = r * r
    q = x * (2 * sig + x) / (sig * (sig + x)) ** 2
    h_aa = -s.n / a ** 2
    h_ab = -s.wsum(L * g)
    h_as = s.wsum(r * gp)
    h_bb = -s.wsum(1 / c ** 2) - a * s.wsum(L ** 2 * g)
    h_bs = (s.wsum(r / c ** 2) - s.wsum(r * (1 - a * g) / (w * (1 + w)))
            + a * s.wsum(r * gp * L))
    wb1 = np.exp((b - 1) * lw - (b + 1) * l1w) * (b + w)
    h_ss = (s.wsum(1 / (sig + x) ** 2)
            + s.wsum(r2 * ((b + 1) / (1 + w) ** 2 - b / w ** 2 - 1 / c ** 2))
            + s.wsum(q * (b / w + 1 / c - (b + 1) / (1 + w)))
            - a * (1 + b) * s.wsum(r2 * wb1)
            - a * s.wsum(x / (sig ** 2 * (sig + x) ** 2) * gp
                         * ((2 * sig + x) * (1 + w) - x * (b + 1)) / (1 + w)))
    return np.array([[h_aa, h_ab, h_as], [h_ab, h_bb, h_bs], [h_as, h_bs, h_ss]])


def _check_likelihood(likelihood: str):
    if likelihood not in LIKELIHOODS:
        raise ValueError(f"likelihood must be one of {LIKELIHOODS}, got {likelihood!r}")


def discrete_cells(k: np.ndarray):
    """Interval (lo, hi] of continuous values that round to integer degree k.

    Rounding is half away from zero with a floor of 1, so degree 1 collects
    everything below 3/2.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 1) or np.any(k != np.round(k)):
        raise ValueError("discrete likelihood needs integer observations >= 1")
    return np.where(k <= 1, 0.0, k - 0.5), k + 0.5


def _mlm_logsf_grad(y, a, b, sig):
    """log S(y) and its gradient in (alpha, beta, sigma); S(0) = 1."""
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape)
    d = np.zeros((3,) + y.shape)
    m = y > 0
    yy = y[m]
    w = np.log1p(yy / sig)
    lw = np.log(w)
    l1w = np.log1p(w)
    g = np.exp((b + 1) * lw - b * l1w)
    gp = np.exp(b * lw - (b + 1) * l1w) * (1 + b + w)
    out[m] = -a * g
    d[0][m] = -g
    d[1][m] = -a * g * (lw - l1w)
    d[2][m] = a * gp * yy / (sig * (sig + yy))
    return out, d


def _discrete_loglik_score(s: Sample, a, b, sig, want_score=True):
    lo, hi = discrete_cells(s.values)
    sl, dl = _mlm_logsf_grad(lo, a, b, sig)
    sh, dh = _mlm_logsf_grad(hi, a, b, sig)
    delta = sh - sl
    ll = s.wsum(sl + np.log(-np.expm1(delta)))
    if not want_score:
        return ll, None
    # d log(S_lo - S_hi) = d log S_lo + (d log S_lo - d log S_hi) / (S_lo / S_hi - 1)
    g = dl + (dl - dh) / np.expm1(-delta)
    return ll, np.array([s.wsum(row) for row in g])


def _ll_score(s, a, b, sig, likelihood, want_score=True):
    if likelihood == "discrete":
        return _discrete_loglik_score(s, a, b, sig, want_score)
    return _loglik_score(s, a, b, sig, want_score)


def mlm_discrete_loglik(s: Sample, p: MlmParams) -> float:
    """Log-likelihood of integer degrees as rounded MLM draws."""
    with np.errstate(divide="ignore"):
        ll, _ = _discrete_loglik_score(s, p.alpha, p.beta, p.sigma, want_score=False)
    return ll if math.isfinite(ll) else -math.inf


def mlm_discrete_score(s: Sample, p: MlmParams) -> np.ndarray:
    _, sc = _discrete_loglik_score(s, p.alpha, p.beta, p.sigma)
    if not np.all(np.isfinite(sc)):
        raise ArithmeticError(f"non-finite score at {p}")
    return sc


def mlm_discrete_hessian(s: Sample, p: MlmParams, rel_step: float = 1e-5) -> np.ndarray:
    """Hessian of the discrete log-likelihood: central differences of the analytic score."""
    x0 = p.as_array()
    H = np.empty((3, 3))
    for j in range(3):
        h = rel_step * max(abs(x0[j]), 1e-3)
        e = np.zeros(3)
        e[j] = h
        up = _discrete_loglik_score(s, *(x0 + e))[1]
        dn = _discrete_loglik_score(s, *(x0 - e))[1]
        H[:, j] = (up - dn) / (2 * h)
    return 0.5 * (H + H.T)


def _hessian(s, p, likelihood):
    return mlm_discrete_hessian(s, p) if likelihood == "discrete" else mlm_hessian(s, p)


def observed_information(s: Sample, p: MlmParams, likelihood: str = "continuous") -> np.ndarray:
    """Negated Hessian of the log-likelihood (symmetric by construction)."""
    F = -_hessian(s, p, likelihood)
    if not np.all(np.isfinite(F)):
        raise ArithmeticError(f"non-finite information matrix at {p}")
    return F


# ---------------------------------------------------------------------------
# Lomax profile likelihood and the CV existence condition


def cv(s: Sample) -> float:
    """Coefficient of variation with population (1/n) variance."""
    mu = s.mean()
    if mu == 0:
        raise ValueError("coefficient of variation undefined for zero mean")
    var = s.wsum((s.values - mu) ** 2) / s.n
    return math.sqrt(var) / mu


def lomax_alpha_of_sigma(s: Sample, sigma: float) -> float:
    return s.n / s.wsum(np.log1p(s.values / sigma))


def lomax_alpha_prime(s: Sample, sigma: float) -> float:
    """d alpha(sigma) / d sigma."""
    a = lomax_alpha_of_sigma(s, sigma)
    return a * a / (s.n * sigma) * s.wsum(s.values / (sigma + s.values))


def lomax_profile_loglik(s: Sample, sigma: float) -> float:
    """Per-observation Lomax log-likelihood maximized over alpha at fixed sigma."""
    # sigma * log1p(x/sigma) stays accurate for huge sigma, so form alpha/sigma directly
    a_over_s = s.n / s.wsum(sigma * np.log1p(s.values / sigma))
    a = a_over_s * sigma
    return math.log(a_over_s) - 1 - 1 / a


def _log1p_minus_ratio(u):
    """log(1+u) - u/(1+u) without cancellation for small u."""
    u = np.asarray(u, dtype=float)
    out = np.log1p(u) - u / (1 + u)
    small = u < 1e-2
    if np.any(small):
        us = u[small]
        # sum_{k>=2} (-1)^k (k-1) u^k / k
        acc = np.zeros_like(us)
        pw = us * us
        for k in range(2, 14):
            acc += (-1) ** k * (k - 1) / k * pw
            pw = pw * us
        out[small] = acc
    return out


def lomax_profile_score(s: Sample, sigma: float) -> float:
    """Derivative of the per-observation profile log-likelihood in sigma."""
    u = s.values / sigma
    A = s.wsum(np.log1p(u))
    B = s.wsum(u / (1 + u))
    diff = s.wsum(_log1p_minus_ratio(u))
    return -(diff / A) / sigma + B / (s.n * sigma)


@dataclass
class ExistenceDiagnostic:
    cv: float
    verdict: str
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == "finite-maximum-guaranteed"


def mle_existence_check(s: Sample) -> ExistenceDiagnostic:
    v = cv(s)
    if v > 1:
        return ExistenceDiagnostic(v, "finite-maximum-guaranteed")
    return ExistenceDiagnostic(
        v, "no-guarantee",
        f"CV = {v:.4g} <= 1: the Lomax profile likelihood need not have a finite maximum; "
        "estimates may drift toward sigma -> infinity",
    )


# ---------------------------------------------------------------------------
# Fit results and intervals


@dataclass
class FitResult:
    model: DistributionModel | None
    loglik: float
    n: float
    converged: bool
    iterations: int = 0
    grad_norm: float = math.nan
    covariance: np.ndarray | None = None
    information: np.ndarray | None = None
    ci_level: float | None = None
    intervals: dict | None = None
    cv: float = math.nan
    existence: ExistenceDiagnostic | None = None
    condition_number: float | None = None
    pseudo_inverse: bool = False
    singular: bool = False
    family: str = ""
    message: str = ""
    restarts: list = field(default_factory=list)
    likelihood: str = "continuous"

    @property
    def loglik_per_obs(self) -> float:
        return self.loglik / self.n

    @property
    def existence_ok(self) -> bool:
        return bool(self.existence and self.existence.ok)

    @property
    def estimates(self) -> dict:
        if self.model is None:
            return {}
        return {k: float(v) for k, v in vars(self.model).items() if not k.startswith("_")}


@dataclass
class ConfidenceIntervals:
    level: float
    z: float
    intervals: dict
    condition_number: float
    pseudo_inverse: bool
    singular: bool


def invert_information(F: np.ndarray):
    """Covariance from an information matrix via Cholesky, falling back to pinv.

    Returns (covariance, condition_number, pseudo_inverse_used, singular).
    """
    F = 0.5 * (F + F.T)
    cond = float(np.linalg.cond(F))
    singular = not math.isfinite(cond) or cond > 1e12
    try:
        cf = linalg.cho_factor(F)
        cov = linalg.cho_solve(cf, np.eye(F.shape[0]))
        pinv = False
    except linalg.LinAlgError:
        cov = np.linalg.pinv(F)
        pinv = True
    cov = 0.5 * (cov + cov.T)
    return cov, cond, pinv, singular


def normal_quantile(p: float) -> float:
    return float(ndtri(p))


def intervals_from_covariance(estimates: dict, cov: np.ndarray, k: float) -> dict:
    z = normal_quantile(1 - k / 2)
    sd = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return {name: (v - z * e, v + z * e) for (name, v), e in zip(estimates.items(), sd)}


def confidence_intervals(fit: FitResult, k: float = 0.05) -> ConfidenceIntervals:
    """Wald intervals theta_hat +/- z_{k/2} sqrt(Var) from the inverse information."""
    if not 0 < k < 1:
        raise ValueError("k must lie in (0, 1)")
    if not fit.converged:
        raise ValueError("confidence intervals need a converged fit")
    if fit.covariance is None:
        raise ValueError("fit carries no covariance matrix")
    iv = intervals_from_covariance(fit.estimates, fit.covariance, k)
    return ConfidenceIntervals(1 - k, normal_quantile(1 - k / 2), iv,
                               fit.condition_number if fit.condition_number is not None else math.nan,
                               fit.pseudo_inverse, fit.singular)


# ---------------------------------------------------------------------------
# MLM fitting


_T_LO = np.array([-30.0, -30.0, -30.0])
_T_HI = np.array([30.0, 10.0, 45.0])


def _to_t(a, b, sig):
    return np.array([math.log(a), math.log1p(b), math.log(sig)])


def _from_t(t):
    return math.exp(t[0]), math.expm1(t[1]), math.exp(t[2])


def _t_grad(sc, a, b, sig):
    return sc * np.array([a, 1 + b, sig])


def _t_hessian(s, a, b, sig, sc, likelihood="continuous"):
    J = np.array([a, 1 + b, sig])
    H = _hessian(s, MlmParams(a, b, sig), likelihood)
    return H * np.outer(J, J) + np.diag(sc * J)


def _check_degenerate(s: Sample):
    if np.ptp(s.values) == 0:
        raise DegenerateSampleError("degenerate sample: all values are equal")


def fit_mlm(s: Sample, init: MlmParams | None = None, restarts: int = 5, seed: int = 0,
            tol: float = 1e-8, max_iter: int = 500, ci_level: float | None = 0.95,
            likelihood: str = "continuous") -> FitResult:
    """Maximum-likelihood MLM fit.

    L-BFGS-B on t = (log alpha, log(1+beta), log sigma) with the chain-ruled
    analytic score, from ``init`` (default (1, 0, 1)) and ``restarts`` starts
    jittered by a factor in [0.5, 1.5] on each transformed coordinate; the best
    optimum is then polished with Newton steps on the analytic Hessian.
    Non-convergence is reported in the result, never raised.
    """
    _check_likelihood(likelihood)
    _check_degenerate(s)
    if likelihood == "discrete":
        discrete_cells(s.values)
    init = init or MlmParams(1.0, 0.0, 1.0)
    n = s.n
    existence = mle_existence_check(s)

    def objective(t):
        a, b, sig = _from_t(t)
        with np.errstate(all="ignore"):
            ll, sc = _ll_score(s, a, b, sig, likelihood)
        if not math.isfinite(ll) or not np.all(np.isfinite(sc)):
            return math.inf, np.zeros(3)
        return -ll / n, -_t_grad(sc, a, b, sig) / n

    rng = np.random.default_rng(seed)
    t0 = _to_t(init.alpha, init.beta, init.sigma)
    starts = [t0] + [t0 + np.log(rng.uniform(0.5, 1.5, 3)) for _ in range(restarts)]
    bounds = list(zip(_T_LO, _T_HI))
    best = None
    total_iter = 0
    history = []
    for st in starts:
        st = np.clip(st, _T_LO, _T_HI)
        try:
            res = optimize.minimize(objective, st, jac=True, method="L-BFGS-B", bounds=bounds,
                                    options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-12,
                                             "maxcor": 20})
        except (ValueError, ArithmeticError):
            continue
        total_iter += int(res.nit)
        history.append(float(-res.fun * n))
        if math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        return FitResult(None, -math.inf, n, False, total_iter, family="mlm", cv=existence.cv,
                         existence=existence, message="all starts failed", likelihood=likelihood)

    t, step, polish_iter = _newton_polish(s, best.x, tol, likelihood)
    total_iter += polish_iter
    a, b, sig = _from_t(t)
    with np.errstate(all="ignore"):
        ll, sc = _ll_score(s, a, b, sig, likelihood)
    gt = _t_grad(sc, a, b, sig)
    grad_norm = float(np.max(np.abs(gt)))
    interior = bool(np.all(t > _T_LO + 1e-6) and np.all(t < _T_HI - 1e-6))
    converged = interior and math.isfinite(ll) and (
        grad_norm <= tol * max(1.0, abs(ll)) or step < 1e-12)
    msg = "" if converged else ("estimate on the parameter box boundary" if not interior
                                else "gradient tolerance not reached")
    model = MlmParams(a, b, sig)
    fr = FitResult(model, ll, n, converged, total_iter, grad_norm, family="mlm", cv=existence.cv,
                   existence=existence, message=msg, restarts=history, likelihood=likelihood)
    if converged:
        _attach_covariance(fr, s, model, ci_level)
    return fr


def _newton_polish(s, t, tol, likelihood="continuous", max_steps=50):
    a, b, sig = _from_t(t)
    with np.errstate(all="ignore"):
        ll, sc = _ll_score(s, a, b, sig, likelihood)
    step_norm = math.inf
    it = 0
    for it in range(1, max_steps + 1):
        g = _t_grad(sc, a, b, sig)
        if np.max(np.abs(g)) <= 0.01 * tol * max(1.0, abs(ll)):
            break
        with np.errstate(all="ignore"):
            H = _t_hessian(s, a, b, sig, sc, likelihood)
        try:
            # ascent direction only when -H is positive definite
            cf = linalg.cho_factor(-H)
            d = linalg.cho_solve(cf, g)
        except (linalg.LinAlgError, ValueError):
            break
        lam = 1.0
        accepted = False
        for _ in range(30):
            tn = np.clip(t + lam * d, _T_LO, _T_HI)
            an, bn, sn = _from_t(tn)
            with np.errstate(all="ignore"):
                lln, scn = _ll_score(s, an, bn, sn, likelihood)
            if math.isfinite(lln) and lln >= ll - 1e-12 * abs(ll) and np.all(np.isfinite(scn)):
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
        step_norm = float(np.max(np.abs(tn - t)))
        t, a, b, sig, ll, sc = tn, an, bn, sn, lln, scn
        if step_norm < 1e-12:
            break
    return t, step_norm, it


def _attach_covariance(fr: FitResult, s: Sample, model: MlmParams, ci_level):
    try:
        F = observed_information(s, model, fr.likelihood)
    except ArithmeticError as e:
        fr.message = str(e)
        return
    cov, cond, pinv, singular = invert_information(F)
    fr.information = F
    fr.covariance = cov
    fr.condition_number = cond
    fr.pseudo_inverse = pinv
    fr.singular = singular
    if ci_level is not None:
        fr.ci_level = ci_level
        fr.intervals = intervals_from_covariance(fr.estimates, cov, 1 - ci_level)


# ---------------------------------------------------------------------------
# Competitor families


def _weighted_loglik(s: Sample, m: DistributionModel) -> float:
    return s.wsum(np.asarray(model_logpdf(m, s.values)))


def _closed_form(s: Sample, m, family, existence) -> FitResult:
    ll = _weighted_loglik(s, m)
    return FitResult(m, ll, s.n, math.isfinite(ll), 0, 0.0, family=family, cv=existence.cv,
                     existence=existence)


def fit_lomax(s: Sample, existence=None) -> FitResult:
    """Lomax MLE by maximizing the profile likelihood over log sigma.

    A coarse grid locates the maximum; the root of the analytic profile score
    then pins it down. When the profile is still rising at the top of the grid
    (typical for CV <= 1) the fit is flagged as not converged.
    """
    existence = existence or mle_existence_check(s)
    xmax = float(np.max(s.values))
    xmin = float(np.min(s.values))
    grid = np.linspace(math.log(xmin) - 12, math.log(xmax) + 14, 261)
    prof = np.array([lomax_profile_loglik(s, math.exp(g)) for g in grid])
    i = int(np.nanargmax(prof))
    msg = ""
    converged = True
    if i in (0, len(grid) - 1):
        log_sig = grid[i]
        converged = False
        msg = "profile likelihood maximum not bracketed (sigma at search boundary)"
    else:
        f = lambda ls: lomax_profile_score(s, math.exp(ls)) * math.exp(ls)
        lo, hi = grid[i - 1], grid[i + 1]
        if f(lo) > 0 > f(hi):
            log_sig = optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        else:
            log_sig = optimize.minimize_scalar(lambda ls: -lomax_profile_loglik(s, math.exp(ls)),
                                               bounds=(lo, hi), method="bounded",
                                               options={"xatol": 1e-12}).x
    sig = math.exp(log_sig)
    a = lomax_alpha_of_sigma(s, sig)
    m = Lomax(a, sig)
    ll = _weighted_loglik(s, m)
    # gradient in (log alpha, log sigma)
    u = s.values / sig
    g_a = s.n - a * s.wsum(np.log1p(u))
    g_s = -s.n + (1 + a) * s.wsum(u / (1 + u))
    gn = float(max(abs(g_a), abs(g_s)))
    return FitResult(m, ll, s.n, converged, len(grid), gn, family="lomax", cv=existence.cv,
                     existence=existence, message=msg)


def _num_grad(f, t, h=1e-6):
    g = np.empty_like(t)
    for j in range(t.size):
        e = np.zeros_like(t)
        e[j] = h * max(1.0, abs(t[j]))
        g[j] = (f(t + e) - f(t - e)) / (2 * e[j])
    return g


def fit_powerlaw_cutoff(s: Sample, existence=None, tol: float = 1e-6) -> FitResult:
    """Power law with cutoff, xmin fixed at the sample minimum; quasi-Newton on (alpha, log lam)."""
    existence = existence or mle_existence_check(s)
    xmin = float(np.min(s.values))
    x = s.values
    n = s.n
    slog = s.wsum(np.log(x))
    sx = s.wsum(x)

    def nll(t):
        try:
            m = PowerLawCutoff(t[0], math.exp(t[1]), xmin)
        except (ValueError, ArithmeticError, OverflowError):
            return math.inf
        return (t[0] * slog + m.lam * sx + n * m.log_normalizer) / n

    def fg(t):
        v = nll(t)
        if not math.isfinite(v):
            return math.inf, np.zeros(2)
        return v, _num_grad(nll, t)

    mean = s.mean()
    starts = [np.array([1.5, math.log(1 / mean)]), np.array([0.5, math.log(1 / mean)]),
              np.array([2.5, math.log(0.01 / mean)])]
    best = None
    iters = 0
    for st in starts:
        res = optimize.minimize(fg, st, jac=True, method="L-BFGS-B",
                                bounds=[(-20, 20), (-40, 10)],
                                options={"maxiter": 500, "ftol": 1e-14, "gtol": 1e-10})
        iters += int(res.nit)
        if math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        return FitResult(None, -math.inf, n, False, iters, family="powerlaw_cutoff",
                         cv=existence.cv, existence=existence, message="all starts failed")
    t = best.x
    m = PowerLawCutoff(t[0], math.exp(t[1]), xmin)
    ll = _weighted_loglik(s, m)
    gn = float(np.max(np.abs(_num_grad(nll, t)))) * n
    at_bound = bool(t[1] <= -40 + 1e-6 or abs(t[0]) >= 20 - 1e-6)
    conv = (not at_bound) and gn <= tol * max(1.0, abs(ll))
    msg = "" if conv else ("cutoff rate at search boundary" if at_bound else "gradient tolerance not reached")
    return FitResult(m, ll, n, conv, iters, gn, family="powerlaw_cutoff", cv=existence.cv,
                     existence=existence, message=msg)


def discrete_loglik(s: Sample, m: DistributionModel) -> float:
    """Log-likelihood of integer observations as rounded (floor 1) draws from ``m``."""
    with np.errstate(all="ignore"):
        ll = s.wsum(np.asarray(log_degree_pmf(m, s.values)))
    return ll if math.isfinite(ll) else -math.inf


# unconstrained coordinates for the discrete refit of each competitor;
# support bounds (xmin, xm) stay at their continuous-fit values
_COORDS = {
    "lomax": (lambda m: [math.log(m.alpha), math.log(m.sigma)],
              lambda t, m: Lomax(math.exp(t[0]), math.exp(t[1]))),
    "powerlaw": (lambda m: [math.log(m.alpha - 1)],
                 lambda t, m: PowerLaw(1 + math.exp(t[0]), m.xmin)),
    "pareto": (lambda m: [math.log(m.alpha)], lambda t, m: Pareto(math.exp(t[0]), m.xm)),
    "lognormal": (lambda m: [m.mu, math.log(m.s)],
                  lambda t, m: LogNormal(t[0], math.exp(t[1]))),
    "exponential": (lambda m: [math.log(m.lam)], lambda t, m: Exponential(math.exp(t[0]))),
    "powerlaw_cutoff": (lambda m: [m.alpha, math.log(m.lam)],
                        lambda t, m: PowerLawCutoff(t[0], math.exp(t[1]), m.xmin)),
    "poisson": (lambda m: [math.log(m.lam)], lambda t, m: Poisson(math.exp(t[0]))),
}
_COORD_LIMIT = 60.0


def _fit_discrete(s: Sample, start: FitResult, tol: float = 1e-6) -> FitResult:
    """Refit a competitor under the discrete likelihood, starting from its continuous fit."""
    fam = start.family
    to_t, from_t = _COORDS[fam]
    ref = start.model
    n = s.n

    def nll(t):
        try:
            ll = discrete_loglik(s, from_t(t, ref))
        except (ValueError, ArithmeticError, OverflowError):
            return math.inf
        return -ll / n if math.isfinite(ll) else math.inf

    def fg(t):
        v = nll(t)
        if not math.isfinite(v):
            return math.inf, np.zeros_like(t)
        return v, _num_grad(nll, t)

    t0 = np.clip(np.array(to_t(ref), dtype=float), -_COORD_LIMIT + 1, _COORD_LIMIT - 1)
    bounds = [(-_COORD_LIMIT, _COORD_LIMIT)] * t0.size
    res = optimize.minimize(fg, t0, jac=True, method="L-BFGS-B", bounds=bounds,
                            options={"maxiter": 500, "ftol": 1e-14, "gtol": 1e-10})
    if not math.isfinite(res.fun):
        return FitResult(None, -math.inf, n, False, int(res.nit), family=fam, cv=start.cv,
                         existence=start.existence, message="discrete likelihood not finite",
                         likelihood="discrete")
    m = from_t(res.x, ref)
    ll = discrete_loglik(s, m)
    gn = float(np.max(np.abs(_num_grad(nll, res.x)))) * n
    at_bound = bool(np.any(np.abs(res.x) >= _COORD_LIMIT - 1e-6))
    conv = (not at_bound) and gn <= tol * max(1.0, abs(ll))
    msg = "" if conv else ("estimate at search boundary" if at_bound else "gradient tolerance not reached")
    return FitResult(m, ll, n, conv, int(res.nit), gn, family=fam, cv=start.cv,
                     existence=start.existence, message=msg, likelihood="discrete")


def fit_model(s: Sample, family: str, likelihood: str = "continuous", **opts) -> FitResult:
    """Fit one family by maximum likelihood (xmin fixed to the sample minimum where used).

    With ``likelihood="discrete"`` the competitors start from their
    continuous estimates and are refit on the rounded-draw likelihood.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    _check_likelihood(likelihood)
    if family == "mlm":
        return fit_mlm(s, likelihood=likelihood, **opts)
    fr = _fit_continuous(s, family, **opts)
    if likelihood == "discrete" and fr.model is not None:
        discrete_cells(s.values)
        return _fit_discrete(s, fr)
    return fr


def _fit_continuous(s: Sample, family: str, **opts) -> FitResult:
    _check_degenerate(s)
    existence = mle_existence_check(s)
    x = s.values
    n = s.n
    mean = s.mean()
    if family == "exponential":
        return _closed_form(s, Exponential(1 / mean), family, existence)
    if family == "poisson":
        return _closed_form(s, Poisson(mean), family, existence)
    if family == "lognormal":
        lx = np.log(x)
        mu = s.wsum(lx) / n
        sd = math.sqrt(s.wsum((lx - mu) ** 2) / n)
        return _closed_form(s, LogNormal(mu, sd), family, existence)
    if family == "pareto":
        xm = float(np.min(x))
        return _closed_form(s, Pareto(n / s.wsum(np.log(x / xm)), xm), family, existence)
    if family == "powerlaw":
        xm = float(np.min(x))
        return _closed_form(s, PowerLaw(1 + n / s.wsum(np.log(x / xm)), xm), family, existence)
    if family == "lomax":
        return fit_lomax(s, existence)
    return fit_powerlaw_cutoff(s, existence, **opts)
