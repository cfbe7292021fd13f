"""Log-uniform scale mixing of a parent lifetime distribution.

With parent rate ``U`` drawn from the density ``1 / (u ln r)`` on ``(b, r b)``
the daughter has

    g(t)  = (Fbar(b t) - Fbar(r b t)) / (t ln r)
    Gbar(t) = (1 / ln r) * int_{b t}^{r b t} Fbar(x) / x dx

where ``Fbar`` is the unit-rate parent survival function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .numerics import DEFAULT_QUAD_TOL, RandomStream, integrate
from .parents import Exponential, Parent, _as_positive, _log1mexp

DEFAULT_GUARD_EPS = 1e-6

# closed-form survival functions registered by closed_forms, keyed on parent type
_SF_REGISTRY: dict[type, Callable] = {}
_PDF_REGISTRY: dict[type, Callable] = {}


def register_logsf(parent_type: type, func: Callable) -> None:
    """Register ``func(parent, b, r, t) -> log Gbar(t)`` as a fast path."""
    _SF_REGISTRY[parent_type] = func


def register_logpdf(parent_type: type, func: Callable) -> None:
    """Register ``func(parent, b, r, t) -> log g(t)`` as a fast path."""
    _PDF_REGISTRY[parent_type] = func


class DaughterEval(NamedTuple):
    pdf: np.ndarray
    cdf: np.ndarray
    sf: np.ndarray
    hazard: np.ndarray


@dataclass(frozen=True)
class MixingDensity:
    """Density ``1/(u ln(a/b))`` of the rate on ``(b, a)``; usable as a frailty law."""

    b: float
    a: float

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u >= self.b) & (u <= self.a)
        return np.where(inside, 1.0 / (np.where(inside, u, 1.0) * math.log(self.a / self.b)), 0.0)

    def cdf(self, u):
        u = np.clip(np.asarray(u, dtype=float), self.b, self.a)
        return np.log(u / self.b) / math.log(self.a / self.b)

    def sample(self, stream: RandomStream, size=None):
        return self.b * (self.a / self.b) ** stream.uniform(size)

    def moment(self, k):
        if k == 0:
            return 1.0
        return (self.a ** k - self.b ** k) / (k * math.log(self.a / self.b))


def canonical_scales(s1: float, s2: float) -> tuple[float, float]:
    """``(b, r)`` from two rates given in either order."""
    lo, hi = min(s1, s2), max(s1, s2)
    if not lo > 0:
        raise ValueError("scales must be positive")
    return lo, hi / lo


@dataclass(frozen=True)
class ScaleMixture:
    """Daughter of ``parent`` (its own rate is ignored) with rates ``b`` to ``r b``."""

    parent: Parent
    b: float
    r: float
    guard_eps: float = DEFAULT_GUARD_EPS
    quad_tol: float = field(default=DEFAULT_QUAD_TOL, compare=False)

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("b must be positive")
        if not self.r >= 1:
            raise ValueError("r must be >= 1 (use canonical_scales for unordered rates)")

    @classmethod
    def from_rates(cls, parent, s1, s2, **kw):
        b, r = canonical_scales(s1, s2)
        return cls(parent, b, r, **kw)

    @property
    def a(self):
        return self.r * self.b

    @property
    def log_r(self):
        return math.log(self.r)

    @property
    def degenerate(self):
        return self.log_r < self.guard_eps

    @property
    def mixing(self):
        return MixingDensity(self.b, self.a)

    def _unit(self):
        return self.parent.with_rate(1.0)

    def _guard_parent(self):
        return self.parent.with_rate(self.b * math.sqrt(self.r))

    # density ------------------------------------------------------------

    def logpdf(self, t):
        t = _as_positive(t)
        if self.degenerate:
            return self._guard_parent().logpdf(t)
        fast = _PDF_REGISTRY.get(type(self.parent))
        if fast is not None:
            return fast(self.parent, self.b, self.r, t)
        p = self._unit()
        x1 = self.b * t
        x2 = self.a * t
        with np.errstate(divide="ignore", invalid="ignore"):
            ls1, ls2 = p._logsf1(x1), p._logsf1(x2)
            lc1, lc2 = p._logcdf1(x1), p._logcdf1(x2)
            # Fbar(x1) - Fbar(x2) == F(x2) - F(x1); take the one free of cancellation
            via_sf = ls1 + _log1mexp(np.minimum(ls2 - ls1, 0.0))
            via_cdf = lc2 + _log1mexp(np.minimum(lc1 - lc2, 0.0))
            diff = np.where(lc2 < math.log(0.5), via_cdf, via_sf)
            diff = np.where(np.isneginf(ls1), -np.inf, diff)
        return diff - np.log(t) - math.log(self.log_r)

    def pdf(self, t):
        return np.exp(self.logpdf(t))

    def pdf_at_zero(self) -> float:
        """Limit of the pdf as ``t -> 0+``: ``b (r - 1) f(0|1) / ln r``."""
        f0 = self.parent.density_at_zero
        if self.degenerate:
            return self.b * math.sqrt(self.r) * f0
        return self.b * (self.r - 1.0) * f0 / self.log_r

    def pdf_mixture_integral(self, t: float, tol=DEFAULT_QUAD_TOL) -> float:
        """``(1/ln r) int_b^a f(t|u) du/u`` by quadrature (mixture form of the pdf)."""
        p = self.parent
        val = integrate(lambda lu: float(p.with_rate(math.exp(lu)).pdf(t)),
                        math.log(self.b), math.log(self.a), tol=tol).value
        return val / self.log_r

    # survival -----------------------------------------------------------

    def logsf_quad(self, t):
        """Reference survival function by adaptive quadrature in ``log x``."""
        t = _as_positive(t)
        if self.degenerate:
            return self._guard_parent().logsf(t)
        p = self._unit()
        out = np.empty(t.shape)
        for idx, ti in np.ndenumerate(t):
            y1 = math.log(self.b * ti)
            # scale the integrand by Fbar(b t) to keep relative accuracy deep in the tail
            ref = float(p._logsf1(np.array(self.b * ti)))
            if not np.isfinite(ref):
                out[idx] = -math.inf
                continue
            res = integrate(lambda y: math.exp(float(p._logsf1(np.array(math.exp(y)))) - ref),
                            y1, y1 + self.log_r, tol=self.quad_tol)
            out[idx] = ref + math.log(res.value / self.log_r) if res.value > 0 else -math.inf
        return out if out.ndim else float(out)

    def logsf(self, t):
        fast = _SF_REGISTRY.get(type(self.parent))
        if fast is not None and not self.degenerate:
            return fast(self.parent, self.b, self.r, _as_positive(t))
        return self.logsf_quad(t)

    def sf(self, t):
        return np.exp(self.logsf(t))

    def cdf(self, t):
        return -np.expm1(self.logsf(t))

    def hazard(self, t):
        return np.exp(self.logpdf(t) - self.logsf(t))

    def evaluate(self, t) -> DaughterEval:
        lsf = self.logsf(t)
        lpdf = self.logpdf(t)
        return DaughterEval(np.exp(lpdf), -np.expm1(lsf), np.exp(lsf), np.exp(lpdf - lsf))

    # moments, mgf, sampling --------------------------------------------

    def moment(self, k: int) -> float:
        mu = self.parent.moment1(k)
        if not math.isfinite(mu):
            return math.inf
        if self.degenerate:
            return mu * (self.b * math.sqrt(self.r)) ** (-k)
        return (self.b ** (-k) - self.a ** (-k)) * mu / (k * self.log_r)

    def cv(self) -> float:
        m1, m2 = self.moment(1), self.moment(2)
        return math.sqrt(m2 - m1 * m1) / m1

    def mgf(self, s: float) -> float:
        if s == 0:
            return 1.0
        if isinstance(self.parent, Exponential):
            if s >= self.b:
                raise ValueError("mgf of the exponential daughter needs s < b")
            if self.degenerate:
                c = self.b * math.sqrt(self.r)
                return c / (c - s)
            return math.log((self.a - s) / (self.b - s)) / self.log_r
        unit = self._unit()
        if unit.mgf1(s / self.a) is not None:
            def integrand(lu):
                m = unit.mgf1(s / math.exp(lu))
                if not math.isfinite(m):
                    raise ValueError("parent mgf diverges inside the mixing range")
                return m
            return integrate(integrand, math.log(self.b), math.log(self.a)).value / self.log_r
        if s > 0:
            raise ValueError("no parent mgf available for positive s")
        res = integrate(lambda t: math.exp(s * t) * float(self.pdf(t)) if t > 0 else 0.0, 0.0, math.inf)
        return res.value

    def sample(self, stream: RandomStream, size=None):
        x = stream.uniform(size)
        u = self.b * self.r ** x
        return self._unit().sample(stream, size) / u

    def hazard_tail_ratio(self, t) -> float:
        """``h_g(t) / h(t | b)``; tends to 1 as ``t -> inf``."""
        num = self.logpdf(t) - self.logsf(t)
        pb = self.parent.with_rate(self.b)
        den = pb.logpdf(t) - pb.logsf(t)
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise FloatingPointError("hazard underflow")
        return np.exp(num - den)

    def label(self):
        return f"F1-{self.parent.label()}[b={self.b:g}, r={self.r:g}]"


# module-level operation names -----------------------------------------------

def daughter_eval(m: ScaleMixture, t) -> DaughterEval:
    return m.evaluate(t)


def daughter_moment(m: ScaleMixture, k: int) -> tuple[float, float]:
    """``(E T^k, CV)``; the CV is NaN when the second moment is infinite."""
    mom = m.moment(k)
    try:
        cv = m.cv()
    except (ValueError, OverflowError):
        cv = math.nan
    if not math.isfinite(m.moment(2)):
        cv = math.nan
    return mom, cv


def daughter_mgf(m: ScaleMixture, s: float) -> float:
    return m.mgf(s)


def daughter_sample(m: ScaleMixture, stream: RandomStream, size=None):
    return m.sample(stream, size)


def daughter_hazard_tail_ratio(m: ScaleMixture, t):
    return m.hazard_tail_ratio(t)


def slash_cdf(m: ScaleMixture, q: float, t: float, tol=DEFAULT_QUAD_TOL) -> float:
    """Distribution function of the slash-type mixture with power ``q``:
    ``q int_b^a F(u t) u^(q-1) du / (a^q - b^q)``."""
    if not q > 0:
        raise ValueError("q must be positive")
    p = m.parent.with_rate(1.0)
    if m.degenerate:
        return float(np.exp(p._logcdf1(np.array(m.b * t))))
    lb, L = math.log(m.b), m.log_r
    # u = b e^y, du u^(q-1) = b^q e^(q y) dy
    res = integrate(lambda y: math.exp(q * y + float(p._logcdf1(np.array(m.b * math.exp(y) * t)))),
                    0.0, L, tol=tol)
    return q * res.value / math.expm1(q * L)


def frullani_identity_check(F: Callable[[float], float], a: float, b: float,
                            tol=1e-12) -> tuple[float, float]:
    """Both sides of ``int_0^inf (F(a t) - F(b t))/t dt = ln(a/b)(F(inf) - F(0))``.

    The left side is integrated in ``y = ln t`` over the real line.
    """
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if a == b:
        return 0.0, 0.0

    def g(y):
        # past exp overflow both arguments are infinite and the difference vanishes
        t = math.exp(y) if y < 709.0 else math.inf
        return F(a * t) - F(b * t)

    # split at the point where the integrand is centred for unit-scale F
    mid = -0.5 * (math.log(a) + math.log(b))
    lhs = integrate(g, -math.inf, mid, tol=tol).value + integrate(g, mid, math.inf, tol=tol).value
    rhs = math.log(a / b) * (F(math.inf) - F(0.0))
    return lhs, rhs


def printed_survival_by_parts(m: ScaleMixture, t: float) -> tuple[float, float]:
    """Integration-by-parts survival expression evaluated two ways (b = 1 form).

    Returns ``(with_sf, with_pdf)``: the last integral taken over ``ln x Fbar(x)``,
    and over ``ln x f(x)`` as integration by parts actually gives. Only the
    second equals the survival function.
    """
    p = m.parent.with_rate(1.0)
    x1, x2 = m.b * t, m.a * t
    head = math.log(x2) * float(p.sf(x2)) - math.log(x1) * float(p.sf(x1))
    with_sf = integrate(lambda x: math.log(x) * float(p.sf(x)), x1, x2).value
    with_pdf = integrate(lambda x: math.log(x) * float(p.pdf(x)), x1, x2).value
    return (head + with_sf) / m.log_r, (head + with_pdf) / m.log_r
