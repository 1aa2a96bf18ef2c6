"""Student-t quantiles via the regularized incomplete beta function.

Self-contained (continued-fraction evaluation plus Newton inversion) so the
confidence-interval code does not depend on a statistics runtime.
"""
from __future__ import annotations

import math

_TINY = 1e-300
_ABS_TOL = 1e-10


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cf(a, b, x) / a
    return 1.0 - bt * _beta_cf(b, a, 1.0 - x) / b


def t_cdf(x: float, dof: float) -> float:
    """CDF of Student's t with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError("dof must be positive")
    if x == 0.0:
        return 0.5
    p = 0.5 * reg_inc_beta(0.5 * dof, 0.5, dof / (dof + x * x))
    return 1.0 - p if x > 0 else p


def t_pdf(x: float, dof: float) -> float:
    ln = (math.lgamma(0.5 * (dof + 1.0)) - math.lgamma(0.5 * dof)
          - 0.5 * math.log(dof * math.pi)
          - 0.5 * (dof + 1.0) * math.log1p(x * x / dof))
    return math.exp(ln)


def t_quantile(dof: float, level: float = 0.975) -> float:
    """Quantile of Student's t (default: two-sided 95%, i.e. level 0.975).

    Newton inversion of the CDF, safeguarded by bisection, to absolute
    tolerance 1e-10.
    """
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if level == 0.5:
        return 0.0
    flip = level < 0.5
    p = 1.0 - level if flip else level

    lo, hi = 0.0, 2.0
    while t_cdf(hi, dof) < p:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("quantile bracket failed")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = t_cdf(x, dof) - p
        if fx > 0:
            hi = x
        else:
            lo = x
        dfx = t_pdf(x, dof)
        step = fx / dfx if dfx > 0 else 0.0
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < _ABS_TOL:
            x = x_new
            break
        x = x_new
    return -x if flip else x
