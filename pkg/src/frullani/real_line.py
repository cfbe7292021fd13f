"""Frullani-type distributions on the whole real line.

The symmetric families reflect a half-line daughter about the origin: with
half-normal parent this gives the F1-Gaussian

    g(x) = (Phi(a|x|) - Phi(b|x|)) / (ln(a/b) |x|),

and with half-Cauchy parent the F1-Cauchy. Skewed versions use either the
``2 Phi(lambda x)`` perturbation or two half-densities matched at the mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special as _sp

from .core import DEFAULT_GUARD_EPS, ScaleMixture
from .numerics import RandomStream, find_root, integrate
from .parents import HalfCauchy, HalfNormal
from .specfun import ei_series_tail, inv_tan_integral, std_normal_cdf, std_normal_pdf

SQRT_2PI = math.sqrt(2.0 * math.pi)


class PdfCdf(NamedTuple):
    pdf: np.ndarray
    cdf: np.ndarray


class SkewMoments(NamedTuple):
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def _ret(x):
    return x if np.ndim(x) else float(x)


def log_mean(hi: float, lo: float) -> float:
    """Logarithmic mean ``(hi - lo)/ln(hi/lo)``, equal to ``lo`` when they coincide."""
    L = math.log(hi / lo)
    if abs(L) < 1e-8:
        return lo * (1.0 + 0.5 * L)
    return (hi - lo) / L


def _gauss_diff_over_x(lo: float, hi: float, x):
    """``(Phi(hi x) - Phi(lo x)) / x`` for ``x >= 0``, finite at ``x = 0``."""
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        # upper-tail difference keeps relative accuracy for large x
        direct = (_sp.ndtr(-lo * x) - _sp.ndtr(-hi * x)) / x
    small = hi * x < 1e-4
    series = (hi - lo) / SQRT_2PI * (1.0 - (hi * hi + hi * lo + lo * lo) * x * x / 6.0)
    return np.where(small, series, direct)


def _half_gauss_pdf(lo: float, hi: float, x, guard_eps=DEFAULT_GUARD_EPS):
    """Half-line F1 half-normal density with rates ``lo`` to ``hi``, at ``x >= 0``."""
    L = math.log(hi / lo)
    if L < guard_eps:
        c = math.sqrt(lo * hi)
        return 2.0 * c * std_normal_pdf(c * np.asarray(x, dtype=float))
    return 2.0 * _gauss_diff_over_x(lo, hi, x) / L


# ---------------------------------------------------------------------------
# F1-Gaussian

@dataclass(frozen=True)
class F1Gaussian:
    """Symmetric F1-Gaussian with rates ``b < a`` and location ``loc``."""

    a: float
    b: float
    loc: float = 0.0
    guard_eps: float = DEFAULT_GUARD_EPS

    def __post_init__(self):
        if not (self.b > 0 and self.a >= self.b):
            raise ValueError("need a >= b > 0")

    @property
    def log_ratio(self):
        return math.log(self.a / self.b)

    @property
    def half(self) -> ScaleMixture:
        return ScaleMixture(HalfNormal(), self.b, self.a / self.b, guard_eps=self.guard_eps)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) - self.loc
        return _ret(0.5 * _half_gauss_pdf(self.b, self.a, z, self.guard_eps))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def pdf_at_zero(self) -> float:
        return log_mean(self.a, self.b) / SQRT_2PI

    def cdf(self, x):
        z = np.asarray(x, dtype=float) - self.loc
        az = np.abs(z)
        pos = np.where(az > 0, az, 1.0)
        # half-line daughter survival at |z|, by quadrature in ln x
        tail = np.where(az > 0, 0.5 * np.asarray(self.half.sf(pos)), 0.5)
        return _ret(np.where(z >= 0, 1.0 - tail, tail))

    def sf(self, x):
        return _ret(1.0 - np.asarray(self.cdf(x)))

    def variance(self) -> float:
        if self.log_ratio < self.guard_eps:
            return 1.0 / (self.a * self.b)
        return (self.b ** -2 - self.a ** -2) / (2.0 * self.log_ratio)

    def fourth_moment(self) -> float:
        """Central ``E (X - loc)^4 = 3 (b^-4 - a^-4) / (4 ln(a/b))``."""
        if self.log_ratio < self.guard_eps:
            return 3.0 / (self.a * self.b) ** 2
        return 3.0 * (self.b ** -4 - self.a ** -4) / (4.0 * self.log_ratio)

    def kurtosis(self) -> float:
        """Excess kurtosis ``3 (r^2 + 1)/(r^2 - 1) ln r - 3`` with ``r = a/b``."""
        return ratio_kurtosis(self.a / self.b)

    def mgf(self, s: float) -> float:
        if s == 0:
            return 1.0
        shift = math.exp(self.loc * s)
        if self.log_ratio < self.guard_eps:
            return shift * math.exp(0.5 * s * s / (self.a * self.b))
        y1 = s * s / (2.0 * self.b ** 2)
        y2 = s * s / (2.0 * self.a ** 2)
        # Ei(y1) - Ei(y2) = ln(y1/y2) + tail, and ln(y1/y2) = 2 ln(a/b)
        return shift * (1.0 + ei_series_tail(y1, y2) / (2.0 * self.log_ratio))

    def sample(self, stream: RandomStream, size=None):
        mag = self.half.sample(stream, size)
        return self.loc + stream.choice_sign(size) * mag


def f1_gauss_eval(d: F1Gaussian, x) -> PdfCdf:
    return PdfCdf(d.pdf(x), d.cdf(x))


def f1_gauss_moments(d: F1Gaussian):
    """``(variance, excess kurtosis, mgf)``."""
    return d.variance(), d.kurtosis(), d.mgf


def f1_gauss_fourth_moment(a: float, b: float, printed: bool = False) -> float:
    """Fourth moment of the F1-Gaussian.

    ``printed=True`` returns the variant carrying an extra ``1/sqrt(2 pi)``
    factor, kept for comparison only; it is not a moment of the distribution.
    """
    val = F1Gaussian(a, b).fourth_moment()
    return val / SQRT_2PI if printed else val


def _lcoth_minus_one(L):
    if L < 1e-3:
        L2 = L * L
        return L2 / 3.0 - L2 * L2 / 45.0 + 2.0 * L2 ** 3 / 945.0
    return L / math.tanh(L) - 1.0


def _lcoth_slope(L):
    if L < 1e-3:
        return 2.0 * L / 3.0 - 4.0 * L ** 3 / 45.0
    return 1.0 / math.tanh(L) - L / math.sinh(L) ** 2


def ratio_kurtosis(ratio: float) -> float:
    """Excess kurtosis of the F1-Gaussian as a function of ``a/b``."""
    if not ratio >= 1:
        raise ValueError("ratio must be >= 1")
    return 3.0 * _lcoth_minus_one(math.log(ratio))


def kurtosis_to_ratio(target_kappa: float, tol: float = 1e-15) -> float:
    """Invert :func:`ratio_kurtosis` for ``a/b``.

    Newton on ``L = ln(a/b)`` safeguarded by bisection, started at ``a/b = 3``
    where the slope is comfortably away from zero. The bracket
    ``[sqrt(kappa), kappa/3 + 1]`` follows from
    ``L - 1 <= L coth L - 1 <= L^2 / 3``.
    """
    if not target_kappa > 0:
        raise ValueError("target kurtosis must be positive")
    k = float(target_kappa) / 3.0
    lo, hi = math.sqrt(3.0 * k) * (1 - 1e-12), k + 1.0 + 1e-12
    x0 = min(max(math.log(3.0), lo), hi)
    L = find_root(lambda L: _lcoth_minus_one(L) - k, (lo, hi), tol=tol * max(1.0, hi),
                  fprime=_lcoth_slope, x0=x0)
    return math.exp(L)


# ---------------------------------------------------------------------------
# skewed F1-Gaussian, weight 2 Phi(lambda x)

@dataclass(frozen=True)
class SkewF1Gaussian:
    a: float
    b: float
    lam: float = 0.0
    loc: float = 0.0
    guard_eps: float = DEFAULT_GUARD_EPS

    def __post_init__(self):
        if not (self.b > 0 and self.a >= self.b):
            raise ValueError("need a >= b > 0")

    @property
    def symmetric(self) -> F1Gaussian:
        return F1Gaussian(self.a, self.b, self.loc, self.guard_eps)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) - self.loc
        return _ret(2.0 * std_normal_cdf(self.lam * z) * np.asarray(self.symmetric.pdf(x)))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        """Distribution function by quadrature of the density (no closed form)."""
        x = np.asarray(x, dtype=float)
        f = lambda v: float(self.pdf(v))
        out = np.empty(x.shape)
        for i, v in np.ndenumerate(x):
            if v <= self.loc:
                out[i] = integrate(f, -np.inf, float(v)).value
            else:
                out[i] = 1.0 - integrate(f, float(v), np.inf).value
        return _ret(out)

    def sf(self, x):
        return _ret(1.0 - np.asarray(self.cdf(x)))

    def mean(self) -> float:
        """``2{(1+(l/b)^2)^(1/2) - (1+(l/a)^2)^(1/2)} / (sqrt(2 pi) ln(a/b) l)``,
        rationalised so that small ``lambda`` loses no digits."""
        lam, a, b = self.lam, self.a, self.b
        sb = math.sqrt(1.0 + (lam / b) ** 2)
        sa = math.sqrt(1.0 + (lam / a) ** 2)
        L = math.log(a / b)
        if L < self.guard_eps:
            c = math.sqrt(a * b)
            return self.loc + 2.0 * lam / (c * c * math.sqrt(1.0 + (lam / c) ** 2) * SQRT_2PI)
        return self.loc + 2.0 * lam * (b ** -2 - a ** -2) / ((sb + sa) * SQRT_2PI * L)

    def third_moment(self) -> float:
        """Raw ``E (X - loc)^3``.

        Same value as the ``2/3 (1 + y)^(3/2)`` form in ``y = (lambda/b)^2`` and
        ``(lambda/a)^2``, rearranged to ``lambda y^2 w(y)`` so that the
        ``O(lambda^3)`` cancellation is done analytically.
        """
        lam = self.lam
        L = math.log(self.a / self.b)

        def w(y):
            s = math.sqrt(1.0 + y)
            return (1.0 / (3.0 * (1.0 + s) ** 2) + 2.0 / 3.0) / s

        yb, ya = (lam / self.b) ** 2, (lam / self.a) ** 2
        if L < self.guard_eps:
            # derivative of b^-4 w((lam/b)^2) in ln b, at the geometric mean rate
            c = math.sqrt(self.a * self.b)
            h = 1e-6
            f = lambda lc: math.exp(-4 * lc) * w((lam * math.exp(-lc)) ** 2)
            deriv = (f(math.log(c) - h) - f(math.log(c) + h)) / (2 * h)
            return 2.0 * lam * deriv / SQRT_2PI
        return 2.0 * lam * (self.b ** -4 * w(yb) - self.a ** -4 * w(ya)) / (SQRT_2PI * L)

    def moments(self) -> SkewMoments:
        """Mean, variance, skewness and excess kurtosis."""
        sym = self.symmetric
        mu = self.mean() - self.loc
        m2, m3, m4 = sym.variance(), self.third_moment(), sym.fourth_moment()
        var = m2 - mu * mu
        c3 = m3 - 3 * mu * m2 + 2 * mu ** 3
        c4 = m4 - 4 * mu * m3 + 6 * mu * mu * m2 - 3 * mu ** 4
        return SkewMoments(mu + self.loc, var, c3 / var ** 1.5, c4 / var ** 2 - 3.0)

    def sample(self, stream: RandomStream, size=None):
        # selection representation: keep X with probability Phi(lambda X), else reflect it
        z = self.symmetric.sample(stream, size) - self.loc
        keep = stream.uniform(size) < std_normal_cdf(self.lam * z)
        return self.loc + np.where(keep, z, -z)


def skew_f1_eval(d: SkewF1Gaussian, x):
    return d.pdf(x)


def skew_f1_moments(d: SkewF1Gaussian) -> SkewMoments:
    return d.moments()


# ---------------------------------------------------------------------------
# two-piece F1-Gaussian

@dataclass(frozen=True)
class TwoPieceF1Gaussian:
    """Half-densities with rates ``(b, a)`` above the mode and ``(c, a)`` below."""

    a: float
    b: float
    c: float
    mode: float = 0.0
    guard_eps: float = DEFAULT_GUARD_EPS

    def __post_init__(self):
        if not (self.b > 0 and self.c > 0 and self.a >= self.b and self.a >= self.c):
            raise ValueError("need a >= b > 0 and a >= c > 0")

    @property
    def s(self) -> float:
        """Probability of exceeding the mode."""
        mb, mc = log_mean(self.a, self.b), log_mean(self.a, self.c)
        return mc / (mb + mc)

    def _upper(self):
        return ScaleMixture(HalfNormal(), self.b, self.a / self.b, guard_eps=self.guard_eps)

    def _lower(self):
        return ScaleMixture(HalfNormal(), self.c, self.a / self.c, guard_eps=self.guard_eps)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) - self.mode
        s = self.s
        up = s * _half_gauss_pdf(self.b, self.a, z, self.guard_eps)
        dn = (1.0 - s) * _half_gauss_pdf(self.c, self.a, z, self.guard_eps)
        return _ret(np.where(z >= 0, up, dn))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        z = np.asarray(x, dtype=float) - self.mode
        az = np.where(z != 0, np.abs(z), 1.0)
        s = self.s
        up = 1.0 - s * np.asarray(self._upper().sf(az))
        dn = (1.0 - s) * np.asarray(self._lower().sf(az))
        out = np.where(z > 0, up, np.where(z < 0, dn, 1.0 - s))
        return _ret(out)

    def sf(self, x):
        return _ret(1.0 - np.asarray(self.cdf(x)))

    def moment(self, n: int) -> float:
        """``E (X - mode)^n`` from the two half-line daughter moments."""
        s = self.s
        return s * self._upper().moment(n) + (-1) ** n * (1.0 - s) * self._lower().moment(n)

    def mean_offset(self) -> float:
        """``E X - mode`` in closed form."""
        a, b, c = self.a, self.b, self.c
        den = (a - b) * math.log(a / c) + (a - c) * math.log(a / b)
        if den == 0:
            return 0.0
        return math.sqrt(2.0) * (a - b) * (a - c) * (c - b) / (math.sqrt(math.pi) * a * b * c * den)

    def mean(self) -> float:
        return self.mode + self.moment(1)

    def variance(self) -> float:
        m1 = self.moment(1)
        return self.moment(2) - m1 * m1

    def sample(self, stream: RandomStream, size=None):
        up = stream.uniform(size) < self.s
        xu = self._upper().sample(stream, size)
        xl = self._lower().sample(stream, size)
        return self.mode + np.where(up, xu, -xl)


def twopiece_eval(d: TwoPieceF1Gaussian, x) -> PdfCdf:
    return PdfCdf(d.pdf(x), d.cdf(x))


def twopiece_moments(d: TwoPieceF1Gaussian, n: int) -> float:
    return d.moment(n)


def twopiece_moment_series(a, b, c, n: int) -> float:
    """Central-at-mode moment of order ``n`` from the double-factorial series."""
    d = TwoPieceF1Gaussian(a, b, c)
    s = d.s
    Lb, Lc = math.log(a / b), math.log(a / c)
    if n % 2 == 0:
        m = n // 2
        dfact = float(_sp.factorial2(2 * m - 1)) if m > 0 else 1.0
        return dfact / (2 * m) * (s * (b ** -n - a ** -n) / Lb + (1 - s) * (c ** -n - a ** -n) / Lc)
    m = (n - 1) // 2
    coef = 2 ** (m + 1) * math.factorial(m) / (SQRT_2PI * (2 * m + 1))
    return coef * (s * (b ** -n - a ** -n) / Lb - (1 - s) * (c ** -n - a ** -n) / Lc)


# ---------------------------------------------------------------------------
# normal with uniformly distributed location

@dataclass(frozen=True)
class UniformLocationNormal:
    """``N(m, 1)`` with ``m`` uniform on ``(loc - alpha, loc + alpha)``."""

    alpha: float
    loc: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def pdf(self, x):
        z = np.abs(np.asarray(x, dtype=float) - self.loc)
        al = self.alpha
        return _ret((_sp.ndtr(al - z) - _sp.ndtr(-al - z)) / (2.0 * al))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    @staticmethod
    def _upper_int(y):
        # int_y^inf (1 - Phi(u)) du
        return std_normal_pdf(y) - y * _sp.ndtr(-y)

    def sf(self, x):
        z = np.asarray(x, dtype=float) - self.loc
        az = np.abs(z)
        al = self.alpha
        tail = (self._upper_int(az - al) - self._upper_int(az + al)) / (2.0 * al)
        return _ret(np.where(z >= 0, tail, 1.0 - tail))

    def cdf(self, x):
        return _ret(1.0 - np.asarray(self.sf(x)))

    def variance(self) -> float:
        return 1.0 + self.alpha ** 2 / 3.0

    def kurtosis(self) -> float:
        return uniform_location_kurtosis(self.alpha)

    def sample(self, stream: RandomStream, size=None):
        u = stream.uniform(size)
        return self.loc + stream.normal(size) + self.alpha * (2.0 * u - 1.0)


def uniform_location_eval(d: UniformLocationNormal, x):
    return d.pdf(x)


def uniform_location_kurtosis(alpha: float, printed: bool = False) -> float:
    """Excess kurtosis ``-6 alpha^4 / (5 (3 + alpha^2)^2)``.

    The uniform's fourth cumulant is ``-2 alpha^4 / 15``, the normal's is 0.
    ``printed=True`` returns the variant with denominator 4 for comparison.
    """
    den = 4.0 if printed else 5.0
    return -6.0 * alpha ** 4 / (den * (3.0 + alpha ** 2) ** 2)


# ---------------------------------------------------------------------------
# F1-Cauchy

@dataclass(frozen=True)
class F1Cauchy:
    """Reflected F1 half-Cauchy, rates ``b`` to ``r b``."""

    b: float = 1.0
    r: float = 2.0
    loc: float = 0.0
    guard_eps: float = DEFAULT_GUARD_EPS

    def __post_init__(self):
        if not (self.b > 0 and self.r >= 1):
            raise ValueError("need b > 0 and r >= 1")

    @property
    def half(self) -> ScaleMixture:
        return ScaleMixture(HalfCauchy(), self.b, self.r, guard_eps=self.guard_eps)

    def pdf(self, x):
        z = np.abs(np.asarray(x, dtype=float) - self.loc)
        b, r = self.b, self.r
        L = math.log(r)
        if L < self.guard_eps:
            c = b * math.sqrt(r)
            return _ret(c / (math.pi * (1.0 + (c * z) ** 2)))
        u1, u2 = b * z, r * b * z
        # atan(u2) - atan(u1) = atan((u2 - u1)/(1 + u1 u2)), no cancellation
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.arctan2(u2 - u1, 1.0 + u1 * u2) / (math.pi * L * z)
        return _ret(np.where(z > 0, val, b * (r - 1.0) / (math.pi * L)))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def sf(self, x):
        z = np.asarray(x, dtype=float) - self.loc
        az = np.abs(z)
        b, r = self.b, self.r
        L = math.log(r)
        if L < self.guard_eps:
            c = b * math.sqrt(r)
            tail = 0.5 - np.arctan(c * az) / math.pi
        else:
            u1, u2 = b * az, r * b * az
            with np.errstate(divide="ignore"):
                inv = np.where(u1 > 1, 1.0 / np.where(u1 > 1, u1, 1.0), 0.0)
                far = (inv_tan_integral(inv) - inv_tan_integral(inv / r)) / (math.pi * L)
            near = 0.5 - (inv_tan_integral(u2) - inv_tan_integral(u1)) / (math.pi * L)
            tail = np.where(u1 > 1, far, near)
        return _ret(np.where(z >= 0, tail, 1.0 - tail))

    def cdf(self, x):
        return _ret(1.0 - np.asarray(self.sf(x)))

    def sample(self, stream: RandomStream, size=None):
        mag = self.half.sample(stream, size)
        return self.loc + stream.choice_sign(size) * mag


def f1_cauchy_eval(b: float, r: float, x) -> PdfCdf:
    d = F1Cauchy(b, r)
    return PdfCdf(d.pdf(x), d.cdf(x))


def real_line_sample(d, stream: RandomStream, size=None):
    """Draw from any real-line family in this module."""
    return d.sample(stream, size)
