"""Goodness of fit: adaptive chi-square binning, parametric bootstrap p-values and
the KLD / RMSE / MAE comparison metrics."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import FAMILIES, DistributionModel, MlmParams, degree_pmf, model_logsf
from .estimation import FitResult, Sample, fit_model
from .graph_io import DegreeHistogram

_MAX_DEGREE = 1 << 24


@dataclass
class BinScheme:
    """Consecutive integer-degree bins; ``edges`` are lower boundaries plus a final +inf."""

    edges: np.ndarray
    expected: np.ndarray
    observed: np.ndarray

    @property
    def nbins(self) -> int:
        return int(self.expected.size)


def _tail_start(m: DistributionModel, n: float, min_expected: float) -> int:
    """Smallest power-of-two degree K with n * P(X > K + 1/2) < min_expected."""
    k = 1
    while k < _MAX_DEGREE:
        if n * math.exp(float(model_logsf(m, k + 0.5))) < min_expected:
            return k
        k *= 2
    return _MAX_DEGREE


def build_bins(h: DegreeHistogram, m: DistributionModel, min_expected: float = 5.0) -> BinScheme:
    """Greedy left-to-right merge of integer degrees until each bin expects >= min_expected.

    Expected counts are n * degree_pmf over each bin (the law of rounded,
    floor-1 draws, as in the bootstrap); the last bin is open ended and also
    absorbs the model mass beyond the largest tabulated degree.
    A bin is only closed if what remains to its right can still form a valid bin.
    """
    n = float(h.n)
    kcap = _tail_start(m, n, min_expected)
    ks = np.arange(1, kcap + 1, dtype=float)
    e = n * np.asarray(degree_pmf(m, ks))
    tail = n * math.exp(float(model_logsf(m, kcap + 0.5)))
    total = float(e.sum()) + tail
    if total < 2 * min_expected:
        raise ValueError(f"total expected count {total:.3g} is below {2 * min_expected:g}; sample too small")
    cum = np.cumsum(e)
    starts = []
    start = 0
    while True:
        starts.append(start)
        before = cum[start - 1] if start > 0 else 0.0
        j = int(np.searchsorted(cum, before + min_expected, side="left"))
        if j >= kcap - 1:
            break
        remaining = cum[-1] - cum[j] + tail
        if remaining < min_expected:
            break
        start = j + 1
    starts_arr = np.asarray(starts)
    lower = ks[starts_arr] - 0.5
    edges = np.append(lower, np.inf)
    csum = np.concatenate([[0.0], cum])
    ends = np.append(starts_arr[1:], kcap)
    expected = csum[ends] - csum[starts_arr]
    expected[-1] += tail
    idx = np.searchsorted(lower, h.degrees, side="right") - 1
    observed = np.bincount(idx, weights=h.counts, minlength=lower.size).astype(float)
    return BinScheme(edges, expected, observed)


def chi_square_stat(b: BinScheme) -> float:
    return float(np.sum((b.observed - b.expected) ** 2 / b.expected))


@dataclass
class GofReport:
    statistic: float
    p_value: float
    replicates: int
    refit_per_replicate: bool
    seed: int
    bins: int
    family: str = ""
    exceedances: int = 0
    redraws: int = 0
    min_expected: float = 5.0
    replicate_statistics: np.ndarray | None = field(default=None, repr=False)


def discretize(x: np.ndarray) -> np.ndarray:
    """Round half away from zero to integer degrees, flooring at 1."""
    return np.maximum(np.floor(np.abs(x) + 0.5) * np.sign(x), 1).astype(np.int64)


def _refit_opts(model, likelihood):
    if isinstance(model, MlmParams):
        return {"init": model, "restarts": 0, "ci_level": None, "likelihood": likelihood}
    return {"likelihood": likelihood}


def _replicate(args):
    model, family, n, seed, r, refit, min_expected, max_attempts, likelihood = args
    rng = np.random.default_rng([seed, r])
    redraws = 0
    for _ in range(max_attempts):
        hist = DegreeHistogram.from_values(discretize(model.sample(n, rng)))
        m = model
        try:
            if refit:
                fr = fit_model(hist.to_sample(), family, **_refit_opts(model, likelihood))
                if not fr.converged or fr.model is None:
                    raise ArithmeticError(fr.message or "refit did not converge")
                m = fr.model
            return chi_square_stat(build_bins(hist, m, min_expected)), redraws
        except (ValueError, ArithmeticError):
            redraws += 1
    return math.nan, redraws


def bootstrap_pvalue(h: DegreeHistogram, fit: FitResult, B: int = 1000, seed: int = 0,
                     refit: bool = True, min_expected: float = 5.0, threads: int = 1,
                     progress=None) -> GofReport:
    """Parametric-bootstrap chi-square p-value, (1 + #{T_r >= T_obs}) / (B + 1).

    Replicate r draws from ``numpy.random.default_rng([seed, r])``, so results do
    not depend on ``threads``. Each replicate is refit with the same likelihood
    as ``fit``. Replicates whose refit fails are redrawn; more than B/10
    redraws in total aborts with RuntimeError.
    """
    if B < 99:
        raise ValueError(f"need at least 99 bootstrap replicates, got {B}")
    if not fit.converged or fit.model is None:
        raise ValueError("bootstrap needs a converged fit")
    model = fit.model
    t_obs = chi_square_stat(build_bins(h, model, min_expected))
    max_attempts = max(1, B // 10) + 1
    jobs = [(model, model.family, h.n, seed, r, refit, min_expected, max_attempts, fit.likelihood)
            for r in range(B)]
    stats = np.empty(B)
    redraws = 0
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = ex.map(_replicate, jobs, chunksize=max(1, B // (8 * threads)))
            for r, (t, rd) in enumerate(results):
                stats[r] = t
                redraws += rd
                if progress:
                    progress(r + 1, B)
    else:
        for r, job in enumerate(jobs):
            stats[r], rd = _replicate(job)
            redraws += rd
            if redraws > B / 10:
                break
            if progress:
                progress(r + 1, B)
    if redraws > B / 10 or np.any(np.isnan(stats)):
        raise RuntimeError(f"bootstrap aborted: {redraws} replicate refits failed (limit {B // 10})")
    exceed = int(np.sum(stats >= t_obs))
    return GofReport(t_obs, (1 + exceed) / (B + 1), B, refit, seed,
                     build_bins(h, model, min_expected).nbins, model.family, exceed, redraws,
                     min_expected, stats)


# ---------------------------------------------------------------------------
# comparison metrics


def kld(h: DegreeHistogram, m: DistributionModel) -> float:
    """KL divergence (natural log) of the model PMF from the empirical PMF on observed degrees.

    Model probabilities (degree_pmf) are floored at 1e-12 and renormalized
    over the observed support.
    """
    p = h.counts / h.n
    q = np.maximum(np.asarray(degree_pmf(m, h.degrees.astype(float))), 1e-12)
    q = q / q.sum()
    return float(max(np.sum(p * np.log(p / q)), 0.0))


def rmse_mae(h: DegreeHistogram, m: DistributionModel) -> tuple[float, float]:
    """RMSE and MAE between observed counts and n * degree_pmf, over observed degrees."""
    pred = h.n * np.asarray(degree_pmf(m, h.degrees.astype(float)))
    err = h.counts - pred
    return float(np.sqrt(np.mean(err ** 2))), float(np.mean(np.abs(err)))


@dataclass
class MetricsRow:
    family: str
    kld: float
    rmse: float
    mae: float
    loglik: float
    params: dict
    converged: bool
    error: str = ""
    note: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)


@dataclass
class MetricsReport:
    rows: list

    def families(self) -> list:
        return [r.family for r in self.rows]

    def row(self, family: str) -> MetricsRow:
        for r in self.rows:
            if r.family == family:
                return r
        raise KeyError(family)


ALL_FAMILIES = ("mlm", "lomax", "powerlaw", "pareto", "lognormal", "exponential",
                "powerlaw_cutoff", "poisson")


def compare_models(h: DegreeHistogram, families=None, fit_opts: dict | None = None,
                   likelihood: str = "discrete"):
    """Fit each family to the histogram and rank by KLD (failed fits last).

    Returns (MetricsReport, {family: FitResult or None}).
    """
    families = list(families or ALL_FAMILIES)
    fit_opts = fit_opts or {}
    sample = h.to_sample()
    rows, fits = [], {}
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
        try:
            fr = fit_model(sample, fam, likelihood=likelihood, **fit_opts.get(fam, {}))
            if fr.model is None:
                raise ArithmeticError(fr.message or "fit failed")
            k = kld(h, fr.model)
            rm, ma = rmse_mae(h, fr.model)
            if not all(math.isfinite(v) for v in (k, rm, ma)):
                raise ArithmeticError("non-finite metric")
            fits[fam] = fr
            # non-converged fits keep their metrics but are flagged
            rows.append(MetricsRow(fam, k, rm, ma, fr.loglik, fr.estimates, fr.converged,
                                   note=fr.message))
        except (ValueError, ArithmeticError, RuntimeError) as e:
            fits[fam] = None
            rows.append(MetricsRow(fam, math.nan, math.nan, math.nan, math.nan, {}, False, str(e)))
    rows.sort(key=lambda r: (r.failed, r.kld if math.isfinite(r.kld) else math.inf))
    return MetricsReport(rows), fits
