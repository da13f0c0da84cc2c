"""Numerical checks of the MLM extreme-value limits.

Each check evaluates a limit functional along an increasing grid (default
x = sigma * 10**j, j = 2..10) and compares the value at the last grid point with
the theoretical limit. Survival ratios are formed as exp(log S(a) - log S(b))
from the log-survival function, so nothing underflows far in the tail.

The convergence of several of these limits is only logarithmic in x: writing
w = log(1 + x/sigma), the MLM exponent is alpha * (w - beta + beta(beta+1)/(2w) + ...),
so the tail-equivalence constant carries a relative error of about
alpha*beta*(beta+1)/(2w) even at x = sigma * 1e10 (w ~ 23).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionModel, MlmParams, model_logpdf, model_logsf, model_sample

__all__ = [
    "LimitCheck", "default_grid", "regular_variation_check", "tail_equivalence_check",
    "heavy_tail_check", "class_D_check", "class_L_check", "subexponential_check",
    "von_mises_check", "run_all_checks",
]

SUBEXP_QUANTILES = (0.99, 0.999, 0.9999)
MIN_TAIL_EVENTS = 30


@dataclass
class LimitCheck:
    """Limit functional evaluated along a grid.

    ``final_rel_err`` is relative to ``theoretical`` when that is nonzero and
    absolute when the limit is 0; ``converged`` is final_rel_err <= tolerance.
    """

    name: str
    theoretical: float
    evaluated: np.ndarray  # shape (k, 2): columns x, value
    converged: bool
    final_rel_err: float
    tolerance: float
    inconclusive: bool = False
    std_errors: np.ndarray | None = None
    events: np.ndarray | None = None
    note: str = ""

    @property
    def grid(self) -> np.ndarray:
        return self.evaluated[:, 0]

    @property
    def values(self) -> np.ndarray:
        return self.evaluated[:, 1]

    @property
    def final_value(self) -> float:
        return float(self.evaluated[-1, 1])

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "theoretical": _json_float(self.theoretical),
            "final_value": _json_float(self.final_value),
            "final_rel_err": _json_float(self.final_rel_err),
            "tolerance": _json_float(self.tolerance),
            "converged": bool(self.converged),
            "inconclusive": bool(self.inconclusive),
            "evaluated": [[_json_float(x), _json_float(v)] for x, v in self.evaluated.tolist()],
        }
        if self.std_errors is not None:
            d["std_errors"] = [_json_float(v) for v in self.std_errors.tolist()]
        if self.events is not None:
            d["events"] = [int(v) for v in self.events.tolist()]
        if self.note:
            d["note"] = self.note
        return d


def _json_float(v):
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def default_grid(p=None) -> np.ndarray:
    """sigma * 10**j for j = 2..10 (sigma = 1 for models without a scale)."""
    scale = p.sigma if isinstance(p, MlmParams) else 1.0
    return scale * 10.0 ** np.arange(2, 11)


def _grid(p, grid):
    g = default_grid(p) if grid is None else np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be a nonempty, positive, strictly increasing array")
    return g


def _err(value, theoretical):
    if theoretical == 0:
        return abs(value)
    return abs(value - theoretical) / abs(theoretical)


def _finish(name, x, vals, theoretical, tol, note=""):
    vals = np.asarray(vals, dtype=float)
    err = _err(float(vals[-1]), theoretical)
    ok = bool(np.all(np.isfinite(vals)) and err <= tol)
    return LimitCheck(name, float(theoretical), np.column_stack([x, vals]), ok, err, tol, note=note)


def _logsf(m, x):
    return np.asarray(model_logsf(m, x), dtype=float)


def regular_variation_check(p: MlmParams, t: float, grid=None, tol: float = 1e-3) -> LimitCheck:
    """S(t x) / S(x) -> t**(-alpha) (Frechet domain of attraction)."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = _grid(p, grid)
    vals = np.exp(_logsf(p, t * x) - _logsf(p, x))
    return _finish("regular_variation", x, vals, t ** (-p.alpha), tol)


def tail_equivalence_check(p: MlmParams, grid=None, tol: float = 5e-3) -> LimitCheck:
    """S(x) * (1 + x/sigma)**alpha -> exp(alpha * beta)."""
    x = _grid(p, grid)
    vals = np.exp(_logsf(p, x) + p.alpha * np.log1p(x / p.sigma))
    return _finish("tail_equivalence", x, vals, math.exp(p.alpha * p.beta), tol,
                   note="relative error decays like alpha*beta*(beta+1)/(2*log(x/sigma))")


def heavy_tail_check(p: DistributionModel, lam: float, grid=None, threshold: float = 100.0) -> LimitCheck:
    """exp(lam x) S(x) -> infinity, tracked as log S(x) + lam x.

    Converged (diverging) when the log functional increases along the grid
    and ends above ``threshold``. Works for any model, so a light-tailed
    Exponential makes a negative control.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x = _grid(p, grid)
    vals = _logsf(p, x) + lam * x
    diverges = bool(np.all(np.isfinite(vals)) and np.all(np.diff(vals) > 0) and vals[-1] > threshold)
    return LimitCheck("heavy_tail", math.inf, np.column_stack([x, vals]), diverges,
                      0.0 if diverges else math.inf, 0.0,
                      note=f"values are log(exp(lam x) S(x)); diverging means increasing and > {threshold:g}")


def class_D_check(p: MlmParams, grid=None, tol: float = 1e-3) -> LimitCheck:
    """S(x) / S(2x) -> 2**alpha (dominated variation)."""
    x = _grid(p, grid)
    vals = np.exp(_logsf(p, x) - _logsf(p, 2 * x))
    return _finish("class_D", x, vals, 2.0 ** p.alpha, tol)


def class_L_check(p: MlmParams, y: float = 1.0, grid=None, tol: float = 1e-6) -> LimitCheck:
    """S(x + y) / S(x) -> 1 (long tail)."""
    if y < 0:
        raise ValueError("y must be nonnegative")
    x = _grid(p, grid)
    vals = np.exp(_logsf(p, x + y) - _logsf(p, x))
    return _finish("class_L", x, vals, 1.0, tol)


def von_mises_check(p: DistributionModel, grid=None, tol: float = 1e-3, h: float = 1e-3) -> LimitCheck:
    """x * d/dx [S(x) / (x f(x))] -> 0.

    The derivative is a central difference in log x (x d/dx = d/d log x) with
    step ``h``; the ratio itself is exp(log S - log x - log f).
    """
    x = _grid(p, grid)

    def ratio(z):
        return np.exp(_logsf(p, z) - np.log(z) - np.asarray(model_logpdf(p, z), dtype=float))

    vals = (ratio(x * math.exp(h)) - ratio(x * math.exp(-h))) / (2 * h)
    return _finish("von_mises", x, vals, 0.0, tol)


def subexponential_check(p: DistributionModel, n: int = 1_000_000, seed: int = 0,
                         quantiles=SUBEXP_QUANTILES, tol_band=(1.5, 2.5)) -> LimitCheck:
    """Monte Carlo estimate of P(X1 + X2 > x) / P(X > x) at high empirical quantiles.

    Draws n independent pairs; x runs over the empirical quantiles of the
    pooled 2n draws, and P(X > x) is estimated from the pooled draws too.
    Standard errors come from the binomial variances of both proportions
    (the delta method, ignoring their covariance). The check converges when
    the estimate at the last quantile is within 3 standard errors of
    ``tol_band``; fewer than 30 tail events there marks it inconclusive.
    """
    if n < 100_000:
        raise ValueError("subexponential check needs n >= 1e5 pairs")
    rng = np.random.default_rng(seed)
    x1 = np.asarray(model_sample(p, n, rng))
    x2 = np.asarray(model_sample(p, n, rng))
    pooled = np.concatenate([x1, x2])
    xs = np.quantile(pooled, quantiles)
    s = x1 + x2
    ratios, ses, events = [], [], []
    for xq in xs:
        k_sum = int(np.count_nonzero(s > xq))
        k_one = int(np.count_nonzero(pooled > xq))
        ps = k_sum / n
        px = k_one / (2 * n)
        if k_one == 0 or k_sum == 0:
            ratios.append(math.nan)
            ses.append(math.nan)
        else:
            r = ps / px
            ratios.append(r)
            ses.append(r * math.sqrt((1 - ps) / (n * ps) + (1 - px) / (2 * n * px)))
        events.append(min(k_sum, k_one))
    ratios = np.asarray(ratios)
    ses = np.asarray(ses)
    events = np.asarray(events)
    lo, hi = tol_band
    r, se = ratios[-1], ses[-1]
    inconclusive = bool(events[-1] < MIN_TAIL_EVENTS or not math.isfinite(r))
    within = bool(math.isfinite(r) and r + 3 * se >= lo and r - 3 * se <= hi)
    # distance from the band in standard errors (0 inside it)
    if math.isfinite(r):
        gap = max(lo - r, r - hi, 0.0)
        err = gap / se if se > 0 else (0.0 if gap == 0 else math.inf)
    else:
        err = math.inf
    return LimitCheck("subexponential", 2.0, np.column_stack([xs, ratios]),
                      within and not inconclusive, err, 3.0, inconclusive, ses, events,
                      note="final_rel_err is the distance from the [1.5, 2.5] band in standard errors")


def run_all_checks(p: MlmParams, t: float = 2.0, lam: float = 0.01, y: float = 1.0,
                   n: int = 1_000_000, seed: int = 0, grid=None) -> list:
    return [
        regular_variation_check(p, t, grid),
        tail_equivalence_check(p, grid),
        heavy_tail_check(p, lam, grid),
        class_D_check(p, grid),
        class_L_check(p, y, grid),
        von_mises_check(p, grid),
        subexponential_check(p, n, seed),
    ]
