"""Special functions used by the closed-form daughter distributions.

All functions accept scalars or arrays and broadcast like numpy ufuncs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

EULER_GAMMA = 0.57721566490153286061
CATALAN = 0.91596559417721901505


class ConvergenceError(ArithmeticError):
    def __init__(self, message, partial_sum):
        super().__init__(message)
        self.partial_sum = partial_sum


@dataclass(frozen=True)
class SpecFunConfig:
    series_tol: float = 1e-16
    max_terms: int = 500

    def __post_init__(self):
        if not self.series_tol > 0 or self.max_terms < 1:
            raise ValueError("series_tol must be positive and max_terms >= 1")


DEFAULT_CONFIG = SpecFunConfig()


def std_normal_cdf(x):
    return _sp.ndtr(x)


def std_normal_sf(x):
    return _sp.ndtr(-np.asarray(x, dtype=float))


def log_std_normal_cdf(x):
    return _sp.log_ndtr(x)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2 * np.pi)


def _e1_scaled_cf(x, max_iter=200):
    # modified Lentz evaluation of exp(x) E1(x); only used for large x, where
    # a handful of terms suffice
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


_E1_CF_SWITCH = 50.0


def exp_integral_e1_scaled(x):
    """``exp(x) * E1(x)`` for ``x > 0``; stays finite where ``E1`` underflows."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("E1 requires x > 0")
    out = np.empty_like(x)
    small = x <= _E1_CF_SWITCH
    if np.any(small):
        out[small] = _sp.exp1(x[small]) * np.exp(x[small])
    if np.any(~small):
        out[~small] = _e1_scaled_cf(x[~small])
    return out if out.ndim else float(out)


def exp_integral_e1(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("E1 requires x > 0")
    out = _sp.exp1(x)
    return out if out.ndim else float(out)


def exp_integral_ei(x):
    """Exponential integral ``Ei``; for ``x < 0`` this is ``-E1(-x)``, for
    ``x > 0`` the Cauchy principal value by its power series."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    neg = x < 0
    pos = x > 0
    if np.any(x == 0):
        raise ValueError("Ei is singular at 0")
    if np.any(neg):
        out[neg] = -exp_integral_e1(-x[neg])
    if np.any(pos):
        out[pos] = EULER_GAMMA + np.log(x[pos]) + ei_series_tail(x[pos], 0.0)
    return out if out.ndim else float(out)


def ei_series_tail(y1, y2, config: SpecFunConfig = DEFAULT_CONFIG):
    """``sum_{k>=1} (y1**k - y2**k) / (k k!)`` for ``y1, y2 >= 0``.

    With this, ``Ei(y1) - Ei(y2) = ln(y1/y2) + ei_series_tail(y1, y2)`` for
    positive arguments, without forming either Ei separately.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    t1 = np.ones(np.broadcast(y1, y2).shape)
    t2 = t1.copy()
    total = np.zeros_like(t1)
    kmax = max(config.max_terms, int(np.max(np.maximum(y1, y2), initial=0.0) * 3) + 50)
    for k in range(1, kmax):
        t1 = t1 * y1 / k
        t2 = t2 * y2 / k
        inc = (t1 - t2) / k
        total = total + inc
        if k > np.max(np.maximum(y1, y2), initial=0.0) and np.all(np.abs(inc) <= config.series_tol * np.abs(total)):
            break
    return total if total.ndim else float(total)


def reg_inc_gamma(beta, t):
    """Regularized incomplete gamma functions ``(P(beta, t), Q(beta, t))``."""
    beta = np.asarray(beta, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(beta > 0)):
        raise ValueError("beta must be positive")
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    return _sp.gammainc(beta, t), _sp.gammaincc(beta, t)


def lower_gamma_star(s, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """``P(s, x) / x**s`` computed without dividing by ``x**s``.

    Uses ``exp(-x) * sum_k x**k / Gamma(s + k + 1)``; finite at ``x = 0``.
    """
    x = np.asarray(x, dtype=float)
    s = float(s)
    term = np.full_like(x, 1.0 / _sp.gamma(s + 1.0))
    total = term.copy()
    for k in range(1, config.max_terms):
        term = term * x / (s + k)
        total = total + term
        if np.all(term <= config.series_tol * total):
            break
    out = np.exp(-x) * total
    return out if out.ndim else float(out)


def dilog(z):
    """Real dilogarithm ``Li2(z) = -int_0^z ln(1-u)/u du`` for ``z <= 1``."""
    z = np.asarray(z, dtype=float)
    if np.any(z > 1):
        raise ValueError("dilog is real only for z <= 1")
    out = _sp.spence(1.0 - z)
    return out if out.ndim else float(out)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


def _atan_over_u(u):
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.arctan(u) / u
    return np.where(u == 0, 1.0, v)


def inv_tan_integral(x):
    """Inverse tangent integral ``Ti2(x) = int_0^x arctan(u)/u du``.

    For ``|x| <= 1`` a 40-point Gauss-Legendre rule on an analytic integrand;
    larger arguments use ``Ti2(x) = Ti2(1/x) + (pi/2) ln x`` for ``x > 1``.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inner = np.where(ax > 1, 1.0 / np.where(ax > 1, ax, 1.0), ax)
    nodes = 0.5 * inner[..., None] * (_GL_X + 1.0)
    core = 0.5 * inner * np.sum(_GL_W * _atan_over_u(nodes), axis=-1)
    with np.errstate(divide="ignore"):
        val = np.where(ax > 1, core + 0.5 * np.pi * np.log(np.where(ax > 1, ax, 1.0)), core)
    out = np.sign(x) * val
    return out if out.ndim else float(out)


def _hyp_alpha_one(alpha, w, config: SpecFunConfig):
    """``2F1(alpha, 1; alpha+1; w)`` for ``0 <= w < 1``."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    direct = w <= 0.5
    if np.any(direct):
        ww = w[direct]
        term = np.ones_like(ww)
        total = np.ones_like(ww)
        for k in range(1, config.max_terms):
            term = term * ww
            inc = term * alpha / (alpha + k)
            total = total + inc
            if np.all(inc <= config.series_tol * total):
                break
        else:
            raise ConvergenceError("2F1 series did not converge", total)
        out[direct] = total
    if np.any(~direct):
        # c - a - b = 0: logarithmic connection formula around w = 1
        v = 1.0 - w[~direct]
        lv = np.log(v)
        coef = 1.0  # (alpha)_n / n!
        total = np.zeros_like(v)
        vn = np.ones_like(v)
        for n in range(config.max_terms):
            psi_term = 2 * _sp.psi(n + 1.0) - _sp.psi(alpha + n) - _sp.psi(1.0 + n) - lv
            inc = coef * vn * psi_term
            total = total + inc
            if n > 2 and np.all(np.abs(inc) <= config.series_tol * np.abs(total)):
                break
            coef = coef * (alpha + n) / (n + 1)
            vn = vn * v
        else:
            raise ConvergenceError("2F1 connection series did not converge", alpha * total)
        out[~direct] = alpha * total
    return out


def gauss_2f1_neg(alpha, z, config: SpecFunConfig = DEFAULT_CONFIG):
    """``2F1(alpha, alpha; alpha + 1; z)`` for ``alpha > 0`` and ``z <= 0``.

    The Pfaff transformation maps ``z`` to ``w = z/(z-1)`` in ``[0, 1)``;
    ``w <= 1/2`` (i.e. ``z >= -1``) is summed directly and ``w > 1/2`` through
    the logarithmic expansion about ``w = 1``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    z = np.asarray(z, dtype=float)
    if np.any(z > 0):
        raise ValueError("z must be <= 0")
    w = z / (z - 1.0)
    out = (1.0 - z) ** (-alpha) * _hyp_alpha_one(float(alpha), w, config)
    return out if out.ndim else float(out)


def pareto_tail_integral(alpha, t, config: SpecFunConfig = DEFAULT_CONFIG):
    """``int_t^inf (1+x)**(-alpha) / x dx``, equal to
    ``t**(-alpha) 2F1(alpha, alpha; alpha+1; -1/t) / alpha``."""
    t = np.asarray(t, dtype=float)
    w = 1.0 / (1.0 + t)
    out = (1.0 + t) ** (-alpha) * _hyp_alpha_one(float(alpha), w, config) / alpha
    return out if out.ndim else float(out)
