"""Bivariate Frullani mixing of a joint cdf and the elliptical F1-multivariate normal."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special as _sp

from .core import DEFAULT_GUARD_EPS
from .numerics import DEFAULT_QUAD_TOL, RandomStream, integrate
from .specfun import ei_series_tail, lower_gamma_star

JointCdf = Callable[[float, float], float]


# ---------------------------------------------------------------------------
# bivariate mixture

@dataclass(frozen=True)
class BivariateMixture:
    """Independent log-uniform rates on ``(b, a)`` and ``(d, c)`` applied to a joint cdf."""

    joint_cdf: JointCdf
    b: float
    a: float
    d: float
    c: float

    def __post_init__(self):
        if not (self.a > self.b > 0 and self.c > self.d > 0):
            raise ValueError("need a > b > 0 and c > d > 0")

    def pdf(self, x: float, y: float) -> float:
        if not (x > 0 and y > 0):
            raise ValueError("x and y must be positive")
        F = self.joint_cdf
        num = F(self.a * x, self.c * y) - F(self.b * x, self.c * y) \
            - F(self.a * x, self.d * y) + F(self.b * x, self.d * y)
        return num / (math.log(self.a / self.b) * math.log(self.c / self.d) * x * y)

    def marginal_cdf(self, which: int) -> Callable[[float], float]:
        if which == 0:
            return lambda x: self.joint_cdf(x, math.inf)
        return lambda y: self.joint_cdf(math.inf, y)


def biv_pdf(m: BivariateMixture, x: float, y: float) -> float:
    return m.pdf(x, y)


def product_cdf(F1: Callable[[float], float], F2: Callable[[float], float]) -> JointCdf:
    """Joint cdf of independent coordinates."""
    return lambda x, y: F1(x) * F2(y)


def _exp_cdf(x):
    return 1.0 if x == math.inf else -math.expm1(-x)


def exponential_product_cdf(x: float, y: float) -> float:
    return _exp_cdf(x) * _exp_cdf(y)


def fgm_exponential_cdf(theta: float) -> JointCdf:
    """Farlie-Gumbel-Morgenstern joint cdf with unit exponential margins, ``|theta| <= 1``."""
    if not -1 <= theta <= 1:
        raise ValueError("FGM parameter must lie in [-1, 1]")

    def F(x, y):
        u, v = _exp_cdf(x), _exp_cdf(y)
        return u * v * (1.0 + theta * (1.0 - u) * (1.0 - v))
    return F


def integrate_positive_quadrant(h: Callable[[float, float], float],
                                tol: float = DEFAULT_QUAD_TOL,
                                log_range: tuple[float, float] = (-50.0, 50.0)) -> float:
    """``int_0^inf int_0^inf h(x, y) dx dy`` by nested quadrature in log coordinates.

    ``log_range`` bounds ``ln x`` and ``ln y``; ``x y h(x, y)`` must be
    negligible outside it.
    """
    lo, hi = log_range
    pts = [0.0] if lo < 0 < hi else None

    def inner(v):
        y = math.exp(v)
        return integrate(lambda u: h(math.exp(u), y) * math.exp(u), lo, hi,
                         tol=tol, points=pts).value * y
    return integrate(inner, lo, hi, tol=tol, points=pts).value


def biv_identity_check(f: JointCdf, a: float, b: float, c: float, d: float,
                       tol: float = 1e-10) -> tuple[float, float]:
    """Both sides of the two-dimensional Frullani identity.

    ``f`` must accept ``0`` and ``math.inf`` in either argument for the corner
    limits. The left side is integrated over ``(ln x, ln y)``.
    """
    for v in (a, b, c, d):
        if not v > 0:
            raise ValueError("scales must be positive")
    rhs = math.log(a / b) * math.log(c / d) * (
        f(math.inf, math.inf) - f(0.0, math.inf) - f(math.inf, 0.0) + f(0.0, 0.0))
    if a == b or c == d:
        return 0.0, rhs

    def h(x, y):
        return (f(a * x, c * y) - f(b * x, c * y) - f(a * x, d * y) + f(b * x, d * y)) / (x * y)

    return integrate_positive_quadrant(h, tol=tol), rhs


# ---------------------------------------------------------------------------
# F1-multivariate normal

def _normal_moment(cov: np.ndarray, powers: tuple[int, ...]) -> float:
    """``E prod Z_i^{k_i}`` for ``Z ~ N(0, cov)`` by the Isserlis recursion."""
    p = len(powers)

    @lru_cache(maxsize=None)
    def m(k):
        if sum(k) == 0:
            return 1.0
        if sum(k) % 2:
            return 0.0
        i = next(j for j in range(p) if k[j] > 0)
        rest = list(k)
        rest[i] -= 1
        total = 0.0
        for j in range(p):
            if rest[j] == 0 or cov[i, j] == 0:
                continue
            nxt = rest.copy()
            nxt[j] -= 1
            total += cov[i, j] * rest[j] * m(tuple(nxt))
        return total

    return m(tuple(int(k) for k in powers))


@dataclass(frozen=True, eq=False)
class F1MultivariateNormal:
    """``xi + Z / U`` with ``Z ~ N(0, V)`` and ``U`` log-uniform on ``(b, 1)``."""

    cov: np.ndarray
    b: float
    mean: np.ndarray | None = None
    guard_eps: float = DEFAULT_GUARD_EPS
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        V = np.atleast_2d(np.array(self.cov, dtype=float))
        if V.shape[0] != V.shape[1] or not np.allclose(V, V.T):
            raise ValueError("V must be square and symmetric")
        try:
            chol = np.linalg.cholesky(V)
        except np.linalg.LinAlgError as exc:
            raise ValueError("V is not positive definite") from exc
        if not 0 < self.b <= 1:
            raise ValueError("b must lie in (0, 1]")
        mu = np.zeros(V.shape[0]) if self.mean is None else np.array(self.mean, dtype=float)
        if mu.shape != (V.shape[0],):
            raise ValueError("mean has the wrong length")
        for arr in (V, chol, mu):
            arr.setflags(write=False)
        object.__setattr__(self, "cov", V)
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]

    @property
    def log_inv_b(self) -> float:
        return -math.log(self.b)

    @property
    def log_det(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self._chol))))

    def mahalanobis(self, x) -> np.ndarray:
        z = np.asarray(x, dtype=float) - self.mean
        w = np.linalg.solve(self._chol, z.reshape(-1, self.dim).T)
        q = np.sum(w * w, axis=0)
        return q.reshape(z.shape[:-1]) if z.ndim > 1 else q[0]

    def pdf_of_q(self, Q):
        """Density as a function of the Mahalanobis form ``Q``."""
        Q = np.asarray(Q, dtype=float)
        p = self.dim
        s = 0.5 * p
        L = self.log_inv_b
        norm = math.exp(-0.5 * self.log_det)
        if L < self.guard_eps:
            u2 = self.b
            return norm * u2 ** s * np.exp(-0.5 * u2 * Q) / (2 * math.pi) ** s
        b2 = self.b ** 2
        # P(s, x) / x^s is finite at 0; use it near the centre
        near = Q < 2.0
        qn = np.where(near, Q, 0.0)
        diff_near = 2.0 ** -s * (lower_gamma_star(s, 0.5 * qn) - b2 ** s * lower_gamma_star(s, 0.5 * b2 * qn))
        qf = np.where(near, 1.0, Q)
        diff_far = (_sp.gammaincc(s, 0.5 * b2 * qf) - _sp.gammaincc(s, 0.5 * qf)) / qf ** s
        diff = np.where(near, diff_near, diff_far)
        out = math.gamma(s) * diff * norm / (2.0 * math.pi ** s * L)
        return out if out.ndim else float(out)

    def pdf(self, x, printed: bool = False):
        """Density at ``x`` (last axis of length ``p``).

        ``printed=True`` doubles the value, reproducing a normalising constant
        that integrates to 2; useful only for comparison.
        """
        val = self.pdf_of_q(self.mahalanobis(x))
        return 2.0 * val if printed else val

    def sample(self, stream: RandomStream, size: int):
        x = stream.uniform(size)
        u = self.b ** (1.0 - x)
        z = stream.multivariate_normal(self.cov, size)
        return self.mean + z / u[:, None]

    def moment(self, powers, printed: bool = False) -> float:
        """``E prod (X_i - xi_i)^{k_i} = (b^-K - 1) mu_k / (K ln(1/b))`` with ``K = sum k``.

        ``printed=True`` drops the ``1/ln(1/b)`` factor (comparison only).
        """
        powers = tuple(int(k) for k in powers)
        if len(powers) != self.dim or any(k < 0 for k in powers):
            raise ValueError("need one nonnegative power per coordinate")
        K = sum(powers)
        mu = _normal_moment(self.cov, powers)
        if K == 0:
            return 1.0
        L = self.log_inv_b
        if L < self.guard_eps:
            return mu * self.b ** (-0.5 * K)
        factor = (self.b ** -K - 1.0) / K
        return factor * mu if printed else factor * mu / L

    def mgf(self, s) -> float:
        s = np.asarray(s, dtype=float)
        y = float(s @ self.cov @ s)
        shift = math.exp(float(self.mean @ s))
        if y == 0:
            return shift
        L = self.log_inv_b
        if L < self.guard_eps:
            return shift * math.exp(0.5 * y / self.b)
        # Ei(y/2b^2) - Ei(y/2) = 2 ln(1/b) + series tail
        return shift * (1.0 + ei_series_tail(0.5 * y / self.b ** 2, 0.5 * y) / (2.0 * L))


def f1_mvn_pdf(d: F1MultivariateNormal, x, printed: bool = False):
    return d.pdf(x, printed=printed)


def f1_mvn_sample(d: F1MultivariateNormal, stream: RandomStream, size: int):
    return d.sample(stream, size)


def f1_mvn_moment(d: F1MultivariateNormal, r: int, s: int, printed: bool = False) -> float:
    """Mixed moment ``E (X - xi)^r (Y - xi)^s`` of a bivariate member."""
    if d.dim != 2:
        raise ValueError("f1_mvn_moment takes a bivariate distribution; use d.moment")
    if r + s < 1:
        raise ValueError("need r + s >= 1")
    return d.moment((r, s), printed=printed)


def f1_mvn_mgf(d: F1MultivariateNormal, s) -> float:
    return d.mgf(s)
