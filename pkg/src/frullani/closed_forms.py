"""Named daughter distributions whose survival functions have closed forms.

Each ``f1_*`` function works on the standard ``b = 1`` expression with the
rate put back through ``t -> b t``. Importing this module registers the fast
survival paths with :class:`frullani.core.ScaleMixture`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special as _sp

from . import specfun
from .core import ScaleMixture, register_logpdf, register_logsf
from .numerics import RandomStream, integrate
from .parents import (Exponential, Gamma, HalfCauchy, LogLogistic, LogNormal, Pareto,
                      Weibull, _as_positive, log_gammaincc)
from .specfun import ConvergenceError


class PdfSf(NamedTuple):
    pdf: np.ndarray
    sf: np.ndarray


class ParetoEval(NamedTuple):
    pdf: np.ndarray
    sf: np.ndarray
    used_quadrature: bool


def _check(b, r):
    if not b > 0:
        raise ValueError("b must be positive")
    if not r > 1:
        raise ValueError("r must exceed 1")


# Weibull / exponential ---------------------------------------------------------

def _f1_weibull_logsf(beta, b, r, t):
    x1 = (b * t) ** beta
    x2 = (r ** beta) * x1
    e1s = specfun.exp_integral_e1_scaled
    # E1(x1) - E1(x2) = exp(-x1) [e1s(x1) - exp(x1 - x2) e1s(x2)]
    diff = e1s(x1) - np.exp(x1 - x2) * e1s(x2)
    with np.errstate(divide="ignore"):
        return -x1 + np.log(diff) - math.log(beta * math.log(r))


def _f1_weibull_logpdf(beta, b, r, t):
    # Fbar(x1) - Fbar(x2) = exp(-x1^beta) (1 - exp(-x1^beta (r^beta - 1)))
    x1 = (b * t) ** beta
    with np.errstate(divide="ignore"):
        return -x1 + np.log(-np.expm1(-x1 * math.expm1(beta * math.log(r)))) \
            - np.log(t) - math.log(math.log(r))


def f1_weibull_sf(beta, b, r, t):
    """``(E1((b t)^beta) - E1((r b t)^beta)) / (beta ln r)``."""
    _check(b, r)
    return np.exp(_f1_weibull_logsf(beta, b, r, _as_positive(t)))


def f1_exponential_sf(b, r, t):
    return f1_weibull_sf(1.0, b, r, t)


# log-logistic ------------------------------------------------------------------

def _f1_loglogistic_logsf(alpha, b, r, t):
    lx = np.log(b * t)
    num = np.logaddexp(0.0, -alpha * lx) - np.logaddexp(0.0, -alpha * (lx + math.log(r)))
    with np.errstate(divide="ignore"):
        return np.log(num) - math.log(alpha * math.log(r))


def _f1_loglogistic_logpdf(alpha, b, r, t):
    # 1/(1 + x1^alpha) - 1/(1 + x2^alpha) = x2^alpha (1 - r^-alpha) / ((1 + x1^alpha)(1 + x2^alpha))
    lx1 = np.log(b * t)
    lx2 = lx1 + math.log(r)
    return (alpha * lx2 + math.log(-math.expm1(-alpha * math.log(r)))
            - np.logaddexp(0.0, alpha * lx1) - np.logaddexp(0.0, alpha * lx2)
            - np.log(t) - math.log(math.log(r)))


def f1_loglogistic_sf(alpha, b, r, t):
    """``ln{(1 + (b t)^-alpha) / (1 + (r b t)^-alpha)} / (alpha ln r)``."""
    _check(b, r)
    return np.exp(_f1_loglogistic_logsf(alpha, b, r, _as_positive(t)))


@dataclass(frozen=True)
class F2LogLogistic:
    """Log-logistic mixed twice, with ratios ``r1`` and ``r2`` above rate ``b``."""

    alpha: float
    b: float
    r1: float
    r2: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        _check(self.b, self.r1)
        if not self.r2 >= 1:
            raise ValueError("r2 must be >= 1")

    def _first(self):
        return ScaleMixture(LogLogistic(alpha=self.alpha), self.b, self.r1)

    def _li_terms(self, t, order):
        x = self.b * _as_positive(t)
        lx = np.log(x)
        l1, l2 = math.log(self.r1), math.log(self.r2)
        args = [lx, lx + l1, lx + l2, lx + l1 + l2]
        if order == 2:
            vals = [specfun.dilog(-np.exp(-self.alpha * y)) for y in args]
        else:
            # -Li1(-z) = ln(1 + z)
            vals = [-np.logaddexp(0.0, -self.alpha * y) for y in args]
        return vals[0] - vals[1] - vals[2] + vals[3]

    def sf(self, t):
        if math.log(self.r2) < 1e-6:
            return self._first().sf(t)
        comb = self._li_terms(t, 2)
        return -comb / (self.alpha ** 2 * math.log(self.r1) * math.log(self.r2))

    def pdf(self, t):
        if math.log(self.r2) < 1e-6:
            return self._first().pdf(t)
        t = _as_positive(t)
        comb = self._li_terms(t, 1)
        return -comb / (self.alpha * math.log(self.r1) * math.log(self.r2) * t)

    def logpdf(self, t):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(t))

    def logsf(self, t):
        with np.errstate(divide="ignore"):
            return np.log(self.sf(t))

    def cdf(self, t):
        return 1.0 - self.sf(t)

    def hazard(self, t):
        return self.pdf(t) / self.sf(t)

    def moment(self, k):
        mu = LogLogistic(alpha=self.alpha).moment1(k)
        if not math.isfinite(mu):
            return math.inf
        return (mu * self.b ** (-k) * (1 - self.r1 ** (-k)) * (1 - self.r2 ** (-k))
                / (k * k * math.log(self.r1) * math.log(self.r2)))

    def sample(self, stream: RandomStream, size=None):
        u = self.b * self.r1 ** stream.uniform(size) * self.r2 ** stream.uniform(size)
        return LogLogistic(alpha=self.alpha).sample(stream, size) / u


def f2_loglogistic_eval(alpha, r1, r2, b, t) -> PdfSf:
    d = F2LogLogistic(alpha, b, r1, r2)
    return PdfSf(d.pdf(t), d.sf(t))


def f2_loglogistic_printed(alpha, r1, r2, b, t) -> PdfSf:
    """pdf and survival with the overall sign reversed; kept for comparison only."""
    d = F2LogLogistic(alpha, b, r1, r2)
    return PdfSf(-d.pdf(t), -d.sf(t))


# gamma -------------------------------------------------------------------------

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _f1_gamma_logsf(beta, b, r, t):
    # composite 16-point Gauss-Legendre in y = ln x over [ln(bt), ln(bt) + ln r]
    L = math.log(r)
    panels = max(2, int(math.ceil(L / 0.25)))
    h = L / panels
    offs = (np.arange(panels)[:, None] + 0.5 * (_GL16_X + 1.0)[None, :]).ravel() * h
    w = np.tile(_GL16_W, panels) * 0.5 * h
    y1 = np.log(b * np.asarray(t, dtype=float))
    ref = log_gammaincc(beta, np.exp(y1))
    ok = np.isfinite(ref)
    lv = log_gammaincc(beta, np.exp(y1[..., None] + offs))
    rel = np.exp(lv - np.where(ok, ref, 0.0)[..., None])
    integral = np.sum(w * rel, axis=-1)
    with np.errstate(divide="ignore"):
        return np.where(ok, ref + np.log(integral / L), -np.inf)


def f1_gamma_by_parts(beta, b, r, t, printed=False) -> float:
    """Survival function through integration by parts.

    ``(1/ln r){Q(beta, rx) ln(rx) - Q(beta, x) ln x + int_x^{rx} ln(y) f(y) dy}``
    with ``x = b t``. ``printed=True`` moves the final integral outside the
    ``1/ln r`` factor; that variant is not an identity and is kept for comparison.
    """
    x1 = b * t
    x2 = r * x1
    head = _sp.gammaincc(beta, x2) * math.log(x2) - _sp.gammaincc(beta, x1) * math.log(x1)
    tail = integrate(lambda y: math.log(y) * math.exp((beta - 1) * math.log(y) - y - math.lgamma(beta)),
                     x1, x2).value
    L = math.log(r)
    return head / L + tail if printed else (head + tail) / L


def f1_gamma_eval(beta, b, r, t) -> PdfSf:
    _check(b, r)
    m = ScaleMixture(Gamma(beta=beta), b, r)
    return PdfSf(m.pdf(t), m.sf(t))


def f1_gamma_moments(beta, b, r) -> tuple[float, float]:
    a = r * b
    L = math.log(r)
    mean = (1 / b - 1 / a) * beta / L
    var = beta * (beta + 1) * (b ** -2 - a ** -2) / (2 * L) - mean ** 2
    return mean, var


# lognormal ---------------------------------------------------------------------

def _f1_lognormal_logsf(sigma, b, r, t):
    L = math.log(r)
    z1 = np.log(b * np.asarray(t, dtype=float)) / sigma
    z2 = z1 + L / sigma
    pdf = specfun.std_normal_pdf
    cdf = specfun.std_normal_cdf
    sfn = specfun.std_normal_sf
    # sigma * int_{z1}^{z2} Phibar(z) dz, two cancellation-safe antiderivatives
    upper = (pdf(z1) - z1 * sfn(z1)) - (pdf(z2) - z2 * sfn(z2))
    lower = (z2 - z1) - ((z2 * cdf(z2) + pdf(z2)) - (z1 * cdf(z1) + pdf(z1)))
    integral = sigma * np.where(z1 > 0, upper, lower)
    with np.errstate(divide="ignore"):
        return np.log(np.maximum(integral, 0.0) / L)


def f1_lognormal_eval(b, r, t, sigma=1.0) -> PdfSf:
    _check(b, r)
    m = ScaleMixture(LogNormal(sigma=sigma), b, r)
    return PdfSf(m.pdf(t), np.exp(_f1_lognormal_logsf(sigma, b, r, _as_positive(t))))


# Pareto ------------------------------------------------------------------------

def _f1_pareto_sf_closed(alpha, b, r, t):
    x = b * np.asarray(t, dtype=float)
    T = specfun.pareto_tail_integral
    return (T(alpha, x) - T(alpha, r * x)) / math.log(r)


def _f1_pareto_logsf(alpha, b, r, t):
    try:
        sf = _f1_pareto_sf_closed(alpha, b, r, t)
    except ConvergenceError:
        return ScaleMixture(Pareto(alpha=alpha), b, r, guard_eps=0.0).logsf_quad(t)
    with np.errstate(divide="ignore"):
        return np.log(sf)


def f1_pareto_eval(alpha, b, r, t) -> ParetoEval:
    """pdf and survival through ``2F1(alpha, alpha; alpha+1; -1/x)``; falls back
    to quadrature (flagged) if the hypergeometric series does not converge."""
    _check(b, r)
    t = _as_positive(t)
    m = ScaleMixture(Pareto(alpha=alpha), b, r)
    try:
        sf = _f1_pareto_sf_closed(alpha, b, r, t)
        used = False
    except ConvergenceError:
        sf = np.exp(m.logsf_quad(t))
        used = True
    return ParetoEval(m.pdf(t), sf, used)


# half-Cauchy -------------------------------------------------------------------

def _f1_halfcauchy_logsf(b, r, t):
    x1 = b * np.asarray(t, dtype=float)
    x2 = r * x1
    L = math.log(r)
    ti = specfun.inv_tan_integral
    # for x1 >= 1 use Ti2(x) = Ti2(1/x) + (pi/2) ln x to avoid cancelling
    big = x1 >= 1
    sf_big = 2.0 / (math.pi * L) * (ti(1.0 / np.where(big, x1, 1.0)) - ti(1.0 / np.where(big, x2, 1.0)))
    sf_small = 1.0 - 2.0 / (math.pi * L) * (ti(x2) - ti(x1))
    with np.errstate(divide="ignore"):
        return np.log(np.where(big, sf_big, sf_small))


register_logsf(Weibull, lambda p, b, r, t: _f1_weibull_logsf(p.beta, b, r, t))
register_logsf(Exponential, lambda p, b, r, t: _f1_weibull_logsf(1.0, b, r, t))
register_logsf(LogLogistic, lambda p, b, r, t: _f1_loglogistic_logsf(p.alpha, b, r, t))
register_logsf(Gamma, lambda p, b, r, t: _f1_gamma_logsf(p.beta, b, r, t))
register_logsf(LogNormal, lambda p, b, r, t: _f1_lognormal_logsf(p.sigma, b, r, t))
register_logsf(Pareto, lambda p, b, r, t: _f1_pareto_logsf(p.alpha, b, r, t))
register_logsf(HalfCauchy, lambda p, b, r, t: _f1_halfcauchy_logsf(b, r, t))
register_logpdf(Weibull, lambda p, b, r, t: _f1_weibull_logpdf(p.beta, b, r, t))
register_logpdf(Exponential, lambda p, b, r, t: _f1_weibull_logpdf(1.0, b, r, t))
register_logpdf(LogLogistic, lambda p, b, r, t: _f1_loglogistic_logpdf(p.alpha, b, r, t))


def F1Exponential(b, r):
    return ScaleMixture(Exponential(), b, r)


def F1Weibull(beta, b, r):
    return ScaleMixture(Weibull(beta=beta), b, r)


def F1LogLogistic(alpha, b, r):
    return ScaleMixture(LogLogistic(alpha=alpha), b, r)


def F1Gamma(beta, b, r):
    return ScaleMixture(Gamma(beta=beta), b, r)


def F1LogNormal(b, r, sigma=1.0):
    return ScaleMixture(LogNormal(sigma=sigma), b, r)


def F1Pareto(alpha, b, r):
    return ScaleMixture(Pareto(alpha=alpha), b, r)
