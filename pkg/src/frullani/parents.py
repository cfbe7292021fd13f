"""Parent lifetime distributions with a rate-like scale.

A parent with rate ``u`` has distribution function ``F(t | u) = F(u t)``:
larger ``u`` gives stochastically smaller lifetimes. Every family is written
once at unit rate (the ``_log*1`` hooks, argument ``x = u t``) and the public
methods apply the rate, so the scale law holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import ClassVar, NamedTuple

import numpy as np
from scipy import special as _sp

from .numerics import RandomStream, find_root

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


class ParentEval(NamedTuple):
    pdf: np.ndarray
    cdf: np.ndarray
    sf: np.ndarray
    hazard: np.ndarray


def _log1mexp(x):
    """``log(1 - exp(x))`` for ``x <= 0``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > -0.6931471805599453, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def _as_positive(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("lifetimes must be positive")
    return t


def log_gammaincc(a, x):
    """``log Q(a, x)``; continued fraction in log space where ``Q`` underflows."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.atleast_1d(np.log(_sp.gammaincc(a, x)))
    x1d = np.broadcast_to(np.atleast_1d(x), out.shape)
    # the continued fraction is only needed where Q itself loses precision
    far = (x1d > a + 1.0) & ~(out > -600.0)
    if np.any(far):
        xf = x1d[far]
        tiny = 1e-300
        b = xf + 1.0 - a
        c = np.full_like(xf, 1.0 / tiny)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, 500):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = b + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
        out[far] = -xf + a * np.log(xf) - math.lgamma(a) + np.log(h)
    return out.reshape(x.shape) if x.ndim else float(out[0])


@dataclass(frozen=True)
class Parent:
    """Base class; subclasses implement the unit-rate hooks."""

    rate: float = 1.0

    family_id: ClassVar[str] = ""
    shape_name: ClassVar[str | None] = None

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        shape = self.shape
        if shape is not None and not shape > 0:
            raise ValueError(f"{self.shape_name} must be positive")

    @property
    def shape(self):
        return getattr(self, self.shape_name) if self.shape_name else None

    def with_rate(self, rate):
        return replace(self, rate=float(rate))

    # unit-rate hooks ----------------------------------------------------

    def _logsf1(self, x):
        raise NotImplementedError

    def _logcdf1(self, x):
        return _log1mexp(self._logsf1(x))

    def _logpdf1(self, x):
        raise NotImplementedError

    def _ppf1(self, p):
        raise NotImplementedError

    def _sample1(self, stream, size):
        return self._ppf1(stream.uniform(size))

    def moment1(self, k):
        raise NotImplementedError

    def mgf1(self, s):
        return None

    @property
    def density_at_zero(self) -> float:
        """Unit-rate pdf limit at ``0+`` (may be 0 or inf)."""
        with np.errstate(all="ignore"):
            return float(np.exp(self._logpdf1(np.array(1e-300))))

    # public, rate-aware -------------------------------------------------

    def logsf(self, t):
        return self._logsf1(self.rate * _as_positive(t))

    def logcdf(self, t):
        return self._logcdf1(self.rate * _as_positive(t))

    def logpdf(self, t):
        t = _as_positive(t)
        return math.log(self.rate) + self._logpdf1(self.rate * t)

    def sf(self, t):
        return np.exp(self.logsf(t))

    def cdf(self, t):
        return np.exp(self.logcdf(t))

    def pdf(self, t):
        return np.exp(self.logpdf(t))

    def hazard(self, t):
        return np.exp(self.logpdf(t) - self.logsf(t))

    def evaluate(self, t) -> ParentEval:
        lsf = self.logsf(t)
        lpdf = self.logpdf(t)
        return ParentEval(np.exp(lpdf), -np.expm1(lsf), np.exp(lsf), np.exp(lpdf - lsf))

    def ppf(self, p):
        return self._ppf1(np.asarray(p, dtype=float)) / self.rate

    def moment(self, k) -> float:
        """Raw moment of order ``k`` at this rate, ``inf`` when it does not exist."""
        return self.moment1(k) * self.rate ** (-k)

    def sample(self, stream: RandomStream, size=None):
        return self._sample1(stream, size) / self.rate

    def label(self):
        if self.shape_name:
            return f"{self.family_id}({self.shape_name}={self.shape:g})"
        return self.family_id


@dataclass(frozen=True)
class Exponential(Parent):
    family_id: ClassVar[str] = "exponential"

    def _logsf1(self, x):
        return -x

    def _logpdf1(self, x):
        return -x

    def _ppf1(self, p):
        return -np.log1p(-p)

    def moment1(self, k):
        return math.gamma(k + 1.0)

    def mgf1(self, s):
        return 1.0 / (1.0 - s) if s < 1 else math.inf

    @property
    def density_at_zero(self):
        return 1.0


@dataclass(frozen=True)
class Weibull(Parent):
    beta: float = 1.0
    family_id: ClassVar[str] = "weibull"
    shape_name: ClassVar[str] = "beta"

    def _logsf1(self, x):
        with np.errstate(over="ignore"):
            return -(x ** self.beta)

    def _logpdf1(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return math.log(self.beta) + (self.beta - 1) * np.log(x) - x ** self.beta

    def _ppf1(self, p):
        return (-np.log1p(-p)) ** (1.0 / self.beta)

    def moment1(self, k):
        return math.gamma(1.0 + k / self.beta)

    @property
    def density_at_zero(self):
        return 1.0 if self.beta == 1 else (0.0 if self.beta > 1 else math.inf)


@dataclass(frozen=True)
class Gamma(Parent):
    beta: float = 1.0
    family_id: ClassVar[str] = "gamma"
    shape_name: ClassVar[str] = "beta"

    def _logsf1(self, x):
        return log_gammaincc(self.beta, x)

    def _logcdf1(self, x):
        with np.errstate(divide="ignore"):
            return np.log(_sp.gammainc(self.beta, x))

    def _logpdf1(self, x):
        with np.errstate(divide="ignore"):
            return (self.beta - 1) * np.log(x) - x - math.lgamma(self.beta)

    def _ppf1(self, p):
        # Newton on the cdf with a bisection guard
        p = np.asarray(p, dtype=float)
        out = np.empty_like(p)
        beta = self.beta
        for idx, pi in np.ndenumerate(p):
            if pi <= 0:
                out[idx] = 0.0
                continue
            if pi >= 1:
                out[idx] = math.inf
                continue
            hi = max(1.0, beta)
            while _sp.gammainc(beta, hi) < pi:
                hi *= 2.0
            out[idx] = find_root(lambda x: _sp.gammainc(beta, x) - pi, (0.0, hi), tol=1e-14,
                                 fprime=lambda x: math.exp((beta - 1) * math.log(x) - x - math.lgamma(beta)) if x > 0 else 0.0)
        return out if out.ndim else float(out)

    def _sample1(self, stream, size):
        return stream.gamma(self.beta, size)

    def moment1(self, k):
        return math.exp(math.lgamma(self.beta + k) - math.lgamma(self.beta))

    def mgf1(self, s):
        return (1.0 - s) ** (-self.beta) if s < 1 else math.inf

    @property
    def density_at_zero(self):
        return 1.0 if self.beta == 1 else (0.0 if self.beta > 1 else math.inf)


@dataclass(frozen=True)
class LogNormal(Parent):
    """``ln(u T) ~ N(0, sigma^2)``."""

    sigma: float = 1.0
    family_id: ClassVar[str] = "lognormal"
    shape_name: ClassVar[str] = "sigma"

    def _logsf1(self, x):
        return _sp.log_ndtr(-np.log(x) / self.sigma)

    def _logcdf1(self, x):
        return _sp.log_ndtr(np.log(x) / self.sigma)

    def _logpdf1(self, x):
        lx = np.log(x)
        return -lx - math.log(self.sigma) - _LOG_SQRT_2PI - 0.5 * (lx / self.sigma) ** 2

    def _ppf1(self, p):
        return np.exp(self.sigma * _sp.ndtri(p))

    def _sample1(self, stream, size):
        return np.exp(self.sigma * stream.normal(size))

    def moment1(self, k):
        return math.exp(0.5 * (k * self.sigma) ** 2)

    @property
    def density_at_zero(self):
        return 0.0


@dataclass(frozen=True)
class LogLogistic(Parent):
    alpha: float = 1.0
    family_id: ClassVar[str] = "loglogistic"
    shape_name: ClassVar[str] = "alpha"

    def _logsf1(self, x):
        return -np.logaddexp(0.0, self.alpha * np.log(x))

    def _logcdf1(self, x):
        return -np.logaddexp(0.0, -self.alpha * np.log(x))

    def _logpdf1(self, x):
        lx = np.log(x)
        return math.log(self.alpha) + (self.alpha - 1) * lx - 2 * np.logaddexp(0.0, self.alpha * lx)

    def _ppf1(self, p):
        return (p / (1.0 - p)) ** (1.0 / self.alpha)

    def moment1(self, k):
        if k >= self.alpha:
            return math.inf
        z = math.pi * k / self.alpha
        return z / math.sin(z)

    @property
    def density_at_zero(self):
        return 1.0 if self.alpha == 1 else (0.0 if self.alpha > 1 else math.inf)


@dataclass(frozen=True)
class Pareto(Parent):
    """Pareto distribution of the second kind, ``sf(x) = (1 + x)^(-alpha)``."""

    alpha: float = 1.0
    family_id: ClassVar[str] = "pareto"
    shape_name: ClassVar[str] = "alpha"

    def _logsf1(self, x):
        return -self.alpha * np.log1p(x)

    def _logpdf1(self, x):
        return math.log(self.alpha) - (self.alpha + 1) * np.log1p(x)

    def _ppf1(self, p):
        return np.expm1(-np.log1p(-p) / self.alpha)

    def moment1(self, k):
        if k >= self.alpha:
            return math.inf
        return math.exp(math.lgamma(k + 1.0) + math.lgamma(self.alpha - k) - math.lgamma(self.alpha))

    @property
    def density_at_zero(self):
        return self.alpha


@dataclass(frozen=True)
class HalfNormal(Parent):
    family_id: ClassVar[str] = "halfnormal"

    def _logsf1(self, x):
        return math.log(2.0) + _sp.log_ndtr(-x)

    def _logcdf1(self, x):
        with np.errstate(divide="ignore"):
            return np.log(_sp.erf(x / math.sqrt(2.0)))

    def _logpdf1(self, x):
        return math.log(2.0) - _LOG_SQRT_2PI - 0.5 * x * x

    def _ppf1(self, p):
        return _sp.ndtri(0.5 * (1.0 + p))

    def _sample1(self, stream, size):
        return np.abs(stream.normal(size))

    def moment1(self, k):
        return 2 ** (k / 2) * math.gamma((k + 1) / 2) / math.sqrt(math.pi)

    def mgf1(self, s):
        return 2.0 * math.exp(0.5 * s * s) * _sp.ndtr(s)

    @property
    def density_at_zero(self):
        return math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class HalfCauchy(Parent):
    """Cauchy restricted to the positive half line, ``cdf = (2/pi) arctan(x)``."""

    family_id: ClassVar[str] = "cauchy"

    def _logsf1(self, x):
        return np.log(2.0 / math.pi * np.arctan(1.0 / x))

    def _logcdf1(self, x):
        return np.log(2.0 / math.pi * np.arctan(x))

    def _logpdf1(self, x):
        return math.log(2.0 / math.pi) - np.log1p(x * x)

    def _ppf1(self, p):
        return np.tan(0.5 * math.pi * p)

    def moment1(self, k):
        return math.inf

    @property
    def density_at_zero(self):
        return 2.0 / math.pi


PARENTS: dict[str, type[Parent]] = {
    cls.family_id: cls
    for cls in (Exponential, Weibull, Gamma, LogNormal, LogLogistic, Pareto, HalfNormal, HalfCauchy)
}
PARENTS["exp"] = Exponential


def make_parent(family: str, shape: float | None = None, rate: float = 1.0) -> Parent:
    try:
        cls = PARENTS[family]
    except KeyError:
        raise KeyError(f"unknown parent family {family!r}; known: {sorted(PARENTS)}") from None
    if cls.shape_name is None:
        return cls(rate=rate)
    return cls(rate=rate, **{cls.shape_name: 1.0 if shape is None else float(shape)})


def parent_eval(parent: Parent, t) -> ParentEval:
    return parent.evaluate(t)


def parent_moment(parent: Parent, r: int) -> float:
    """Unit-rate raw moment, ``inf`` when it does not exist."""
    if r < 1:
        raise ValueError("moment order must be >= 1")
    return parent.moment1(r)


def parent_sample(parent: Parent, stream: RandomStream, size=None):
    return parent.sample(stream, size)
