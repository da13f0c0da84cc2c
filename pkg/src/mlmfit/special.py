"""Upper incomplete gamma function for arbitrary real shape.

scipy's ``gammaincc`` only covers positive shape, while the power law with
exponential cutoff needs Gamma(1 - alpha, x) for alpha > 1.  The routines here
work on the log scale so that very large arguments do not underflow.
"""
from __future__ import annotations

import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _log_cf(s: float, x: float) -> float:
    """log Gamma(s, x) from the Legendre continued fraction (modified Lentz).

    Converges for any real s when x > 0; fast once x > s + 1.
    """
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"continued fraction for Gamma({s}, {x}) did not converge")
    return s * math.log(x) - x + math.log(h)


def _log_lower_series(s: float, x: float) -> float:
    """log of the lower incomplete gamma gamma(s, x), s > 0, via its power series."""
    term = 1.0 / s
    total = term
    a = s
    for _ in range(_MAX_ITER):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"series for gamma({s}, {x}) did not converge")
    return math.log(total) + s * math.log(x) - x


def _band_integral(s: float, x: float) -> float:
    """Integral of t**(s-1) * exp(-t) over [x, 1] for 0 < x < 1 and any real s.

    Term-wise integration of the exponential series; each term is
    (1 - x**(s+n)) / (s+n), evaluated without cancellation via expm1, with the
    s + n == 0 term replaced by its limit -log(x).
    """
    logx = math.log(x)
    total = 0.0
    fact = 1.0
    for n in range(_MAX_ITER):
        if n > 0:
            fact *= -1.0 / n
        a = s + n
        if a == 0.0:
            piece = -logx
        else:
            piece = -math.expm1(a * logx) / a
        term = fact * piece
        total += term
        if n > 2 and abs(term) < abs(total) * _EPS:
            break
    return total


def log_upper_gamma(s: float, x: float) -> float:
    """Natural log of the upper incomplete gamma function Gamma(s, x), x > 0."""
    s = float(s)
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        if x == 0.0 and s > 0.0:
            return math.lgamma(s)
        raise ValueError(f"x must be positive and finite, got {x}")
    if x >= 1.0 and (s <= 1.0 or x >= s + 1.0):
        return _log_cf(s, x)
    if s <= 1.0:
        # x < 1: Gamma(s, 1) plus the integral over [x, 1]
        return math.log(math.exp(_log_cf(s, 1.0)) + _band_integral(s, x))
    # s > 1 and x < s + 1: complement of the lower series
    ratio = math.exp(_log_lower_series(s, x) - math.lgamma(s))
    return math.lgamma(s) + math.log1p(-ratio)


def upper_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma function Gamma(s, x) (unregularized)."""
    return math.exp(log_upper_gamma(s, x))
