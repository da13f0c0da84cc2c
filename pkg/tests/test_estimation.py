import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mlmfit.distributions import Lomax, MlmParams, mlm_logpdf, mlm_sample, model_sample
from mlmfit.estimation import (
    DegenerateSampleError, Sample, confidence_intervals, cv, discrete_loglik, fit_mlm, fit_model,
    invert_information, lomax_alpha_of_sigma, lomax_alpha_prime, lomax_profile_loglik,
    lomax_profile_score, mle_existence_check, mlm_discrete_hessian, mlm_discrete_loglik,
    mlm_discrete_score, mlm_hessian, mlm_loglik, mlm_score, normal_quantile, observed_information,
)

FIVE = Sample(np.array([0.5, 1, 3, 10, 250.0]))
P0 = MlmParams(1.5, -0.3, 10)


# log-likelihood, gradient and Hessian of the five-point sample at P0, from
# mpmath.diff on a 40-digit evaluation of the closed-form log density
def test_loglik_score_hessian_match_mpmath():
    assert mlm_loglik(FIVE, P0) == pytest.approx(-20.33391959784723704675768, rel=1e-14)
    g = [-1.844385522074590227569725, 1.272829467210032448625507, 0.05579831033163782477158285]
    assert mlm_score(FIVE, P0) == pytest.approx(g, rel=1e-12)
    H = np.array([[-2.222222222222222222222222, 3.274484107850593677745942, 0.2010853004976399989548819],
                  [3.274484107850593677745942, -11.54506851624937495585203, -0.3050546806798180886687476],
                  [0.2010853004976399989548819, -0.3050546806798180886687476, -0.01811698808957747850471221]])
    assert np.allclose(mlm_hessian(FIVE, P0), H, rtol=1e-11, atol=0)


def test_loglik_examples():
    s = Sample(np.array([1.0, 1.0, 1.0]))
    assert mlm_loglik(s, MlmParams(1, 0, 1)) == pytest.approx(3 * math.log(0.25), rel=1e-14)
    # x = e - 1 and sigma = 1 give w = 1, so w**(b+1) / (1+w)**b is 1 at b = 0 and 1/2 at b = 1
    s = Sample(np.full(3, math.e - 1))
    a = 1.7
    assert mlm_score(s, MlmParams(a, 0, 1))[0] == pytest.approx(3 * (1 / a - 1), rel=1e-13)
    assert mlm_score(s, MlmParams(a, 1, 1))[0] == pytest.approx(3 * (1 / a - 0.5), rel=1e-13)


def test_loglik_equals_sum_of_logpdf(rng):
    p = MlmParams(1.5, -0.3, 10)
    x = mlm_sample(p, 100, rng)
    assert mlm_loglik(Sample(x), p) == pytest.approx(np.sum(mlm_logpdf(p, x)), rel=1e-10)
    q = MlmParams(2.0, 0.0, 5.0)
    assert mlm_loglik(Sample(x), q) == pytest.approx(np.sum(Lomax(2.0, 5.0).logpdf(x)), rel=1e-12)


def test_weighted_sample_matches_expansion(rng):
    vals = np.array([1.0, 2.0, 5.0, 40.0])
    w = np.array([10.0, 4.0, 2.0, 1.0])
    ws, es = Sample(vals, w), Sample(np.repeat(vals, w.astype(int)))
    assert ws.n == es.n == 17
    assert mlm_loglik(ws, P0) == pytest.approx(mlm_loglik(es, P0), rel=1e-13)
    assert np.allclose(mlm_score(ws, P0), mlm_score(es, P0), rtol=1e-12)
    assert cv(ws) == pytest.approx(cv(es), rel=1e-13)


def test_score_continuous_across_beta_zero(rng):
    s = Sample(mlm_sample(MlmParams(2, 0, 3), 200, rng))
    lo = mlm_score(s, MlmParams(2, -1e-8, 3))
    mid = mlm_score(s, MlmParams(2, 0.0, 3))
    hi = mlm_score(s, MlmParams(2, 1e-8, 3))
    assert np.allclose(lo, mid, rtol=1e-6) and np.allclose(hi, mid, rtol=1e-6)


def test_information_symmetric_and_alpha_entry(rng):
    s = Sample(mlm_sample(P0, 200, rng))
    F = observed_information(s, P0)
    assert np.array_equal(F, F.T)
    assert F[0, 0] == s.n / P0.alpha ** 2


def test_sample_validation():
    with pytest.raises(ValueError):
        Sample(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, 0.0, 2.0]))
    with pytest.raises(DegenerateSampleError, match="degenerate"):
        fit_mlm(Sample(np.array([3.0, 3.0, 3.0])))


def test_cv_examples():
    assert cv(Sample(np.array([1.0, 1.0, 10.0]))) == pytest.approx(math.sqrt(18) / 4, rel=1e-14)
    assert cv(Sample(np.full(5, 7.0))) == 0.0
    assert mle_existence_check(Sample(np.array([1.0, 1.0, 10.0]))).verdict == "finite-maximum-guaranteed"
    d = mle_existence_check(Sample(np.full(5, 7.0)))
    assert d.verdict == "no-guarantee" and "CV" in d.message


def test_lomax_profile_pieces():
    one = Sample(np.array([1.0, 1.0, 1.0]))
    assert lomax_alpha_of_sigma(one, 1.0) == pytest.approx(1 / math.log(2), rel=1e-14)
    s = Sample(np.array([1.0, 2.0, 2.0, 3.0, 8.0, 40.0, 150.0]))
    for sig in [0.3, 5.0, 300.0]:
        h = 1e-6 * sig
        fd = (lomax_alpha_of_sigma(s, sig + h) - lomax_alpha_of_sigma(s, sig - h)) / (2 * h)
        assert lomax_alpha_prime(s, sig) == pytest.approx(fd, rel=1e-7)
        fd = (lomax_profile_loglik(s, sig + h) - lomax_profile_loglik(s, sig - h)) / (2 * h)
        assert lomax_profile_score(s, sig) == pytest.approx(fd, rel=1e-6)
    # profile log-likelihood is the per-observation maximum over alpha
    sig = 4.0
    a = lomax_alpha_of_sigma(s, sig)
    ll = np.sum(Lomax(a, sig).logpdf(s.values)) / s.n
    assert lomax_profile_loglik(s, sig) == pytest.approx(ll, rel=1e-13)


def test_profile_limits_and_existence_direction():
    s = Sample(np.array([1.0, 1.0, 2.0, 2.0, 3.0, 5.0, 9.0, 30.0, 120.0]))
    assert cv(s) > 1
    mean = s.mean()
    sig = 1e8 * s.values.max()
    assert lomax_profile_loglik(s, sig) == pytest.approx(math.log(1 / mean) - 1, abs=1e-3)
    grid = np.logspace(6, 8, 20)
    prof = [lomax_profile_loglik(s, g) for g in grid]
    assert np.all(np.diff(prof) < 0)
    # sigma -> 0: l_p = -log(mean log(x/sigma)) - 1 - mean log x + o(1), a log-log divergence
    small = np.logspace(-12, -300, 30)
    prof = np.array([lomax_profile_loglik(s, g) for g in small])
    assert np.all(np.diff(prof) < 0)
    lbar = float(np.mean(np.log(s.values)))
    asym = -math.log(lbar + 300 * math.log(10)) - 1 - lbar
    assert prof[-1] == pytest.approx(asym, rel=1e-3)


def test_normal_quantile_matches_mpmath():
    # sqrt(2) erfinv(0.95) at 50 digits
    assert normal_quantile(0.975) == pytest.approx(1.9599639845400542355, rel=1e-15)


def test_invert_information_fallback():
    cov, cond, pinv, singular = invert_information(np.diag([4.0, 1.0]))
    assert np.allclose(cov, np.diag([0.25, 1.0])) and not pinv and not singular
    cov, cond, pinv, singular = invert_information(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert pinv and singular


def test_fit_recovers_lomax_as_beta_zero():
    x = model_sample(Lomax(2, 30), 100_000, np.random.default_rng(11))
    fr = fit_mlm(Sample(x))
    assert fr.converged and fr.existence_ok
    assert abs(fr.model.beta) < 0.05
    lf = fit_model(Sample(x), "lomax")
    assert lf.converged
    assert lf.model.alpha == pytest.approx(2, rel=0.05) and lf.model.sigma == pytest.approx(30, rel=0.05)


def test_fit_first_order_condition_and_intervals(rng):
    s = Sample(mlm_sample(MlmParams(2, -0.36, 30.5), 5000, rng))
    fr = fit_mlm(s)
    assert fr.converged
    assert np.max(np.abs(mlm_score(s, fr.model))) <= 1e-6 * s.n
    cov = fr.covariance
    assert np.allclose(cov, cov.T) and np.all(np.diag(cov) >= 0)
    ci = confidence_intervals(fr, 0.05)
    for name, (lo, hi) in ci.intervals.items():
        assert lo <= fr.estimates[name] <= hi
    assert ci.z == pytest.approx(1.959963984540054)


def test_reparameterized_fit_matches_direct_constrained_fit(rng):
    from scipy import optimize
    s = Sample(mlm_sample(MlmParams(1.5, 0.3, 5), 3000, rng))
    fr = fit_mlm(s)
    res = optimize.minimize(lambda th: -mlm_loglik(s, MlmParams(*th)), fr.model.as_array() * 1.01,
                            jac=lambda th: -mlm_score(s, MlmParams(*th)), method="L-BFGS-B",
                            bounds=[(1e-6, None), (-1 + 1e-6, None), (1e-6, None)],
                            options={"ftol": 1e-15, "gtol": 1e-10})
    assert fr.loglik == pytest.approx(-res.fun, abs=1e-8 * max(1, abs(fr.loglik)))
    assert fr.loglik >= -res.fun - 1e-8


def test_closed_form_competitors():
    s = Sample(np.array([1.0, 2.0, 3.0]))
    assert fit_model(s, "exponential").model.lam == pytest.approx(0.5)
    assert fit_model(s, "poisson").model.lam == pytest.approx(2.0)
    pa = fit_model(Sample(np.array([1.0, 2.0, 4.0])), "pareto").model
    assert pa.xm == 1 and pa.alpha == pytest.approx(3 / (math.log(2) + math.log(4)))
    with pytest.raises(ValueError):
        fit_model(s, "weibull")


def test_nonconvergence_is_reported_not_raised():
    fr = fit_mlm(Sample(np.array([1.0, 2.0, 3.0, 4.0])), max_iter=1, restarts=0)
    assert isinstance(fr.converged, bool)
    if not fr.converged:
        assert fr.message and fr.covariance is None
        with pytest.raises(ValueError):
            confidence_intervals(fr)


# ---------------------------------------------------------------------------
# discrete likelihood


def _degrees(p, n, seed):
    from mlmfit.gof import discretize
    x = discretize(mlm_sample(p, n, np.random.default_rng(seed)))
    d, c = np.unique(x, return_counts=True)
    return Sample(d.astype(float), c.astype(float))


def test_discrete_score_matches_finite_differences():
    s = _degrees(MlmParams(2, -0.36, 30.5), 2000, 1)
    th = np.array([1.7, 0.3, 12.0])
    sc = mlm_discrete_score(s, MlmParams(*th))
    for j in range(3):
        h = 1e-6 * max(1, abs(th[j]))
        e = np.zeros(3)
        e[j] = h
        fd = (mlm_discrete_loglik(s, MlmParams(*(th + e))) - mlm_discrete_loglik(s, MlmParams(*(th - e)))) / (2 * h)
        assert sc[j] == pytest.approx(fd, rel=1e-5)
    H = mlm_discrete_hessian(s, MlmParams(*th))
    assert np.allclose(H, H.T)


def test_discrete_loglik_generic_matches_mlm_specific():
    s = _degrees(MlmParams(2, -0.36, 30.5), 500, 2)
    p = MlmParams(1.9, -0.3, 25)
    assert discrete_loglik(s, p) == pytest.approx(mlm_discrete_loglik(s, p), rel=1e-12)


def test_discrete_fit_recovers_truth_on_rounded_data():
    truth = MlmParams(2, -0.36, 30.5)
    s = _degrees(truth, 20_000, 3)
    fr = fit_mlm(s, likelihood="discrete")
    assert fr.converged and fr.likelihood == "discrete"
    for est, tr in zip(fr.model.as_array(), truth.as_array()):
        assert est == pytest.approx(tr, rel=0.15)
    for name, (lo, hi) in fr.intervals.items():
        assert lo <= fr.estimates[name] <= hi


def test_discrete_likelihood_requires_integers():
    with pytest.raises(ValueError):
        fit_mlm(Sample(np.array([1.5, 2.0, 3.0])), likelihood="discrete")
    with pytest.raises(ValueError):
        fit_mlm(Sample(np.array([1.0, 2.0, 3.0])), likelihood="binned")


@pytest.mark.parametrize("family", ["lomax", "powerlaw", "pareto", "lognormal", "exponential",
                                    "powerlaw_cutoff", "poisson"])
def test_discrete_competitor_fits_do_not_lose_likelihood(family):
    s = _degrees(MlmParams(2, -0.36, 30.5), 3000, 4)
    cont = fit_model(s, family)
    disc = fit_model(s, family, likelihood="discrete")
    assert disc.model is not None and disc.likelihood == "discrete"
    assert discrete_loglik(s, disc.model) >= discrete_loglik(s, cont.model) - 1e-6


@given(st.floats(0.5, 5), st.floats(-0.9, 1.0), st.floats(0.1, 100), st.integers(0, 10_000))
def test_score_finite_on_random_samples(a, b, sig, seed):
    p = MlmParams(a, b, sig)
    s = Sample(mlm_sample(p, 50, np.random.default_rng(seed)))
    if np.ptp(s.values) > 0:
        assert np.all(np.isfinite(mlm_score(s, p)))
        assert math.isfinite(mlm_loglik(s, p))
