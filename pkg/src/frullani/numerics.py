"""Numerical foundation: quadrature, root finding, simplex minimization,
finite-difference Hessians, seeded random streams and Monte Carlo moments."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_OPT_TOL = 1e-8


class IntegrationError(RuntimeError):
    """Quadrature failed to reach tolerance; ``estimate`` holds the best value."""

    def __init__(self, message, estimate, error_estimate):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class RootFindingError(ValueError):
    pass


class NonFiniteError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


@dataclass
class OptimResult:
    argmin: np.ndarray
    min_value: float
    converged: bool
    iterations: int
    evaluations: int = 0
    restarts: int = 0


def integrate(f: Callable[[float], float], lo: float, hi: float,
              tol: float = DEFAULT_QUAD_TOL, points: Sequence[float] | None = None,
              limit: int = 200) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``hi`` (or ``lo``) may be infinite; QUADPACK maps the range onto a finite
    interval. ``tol`` is used as both the absolute and relative tolerance
    target. Raises :class:`IntegrationError` when the subdivision limit is hit
    and the reported error exceeds ``max(tol, 1e3 * tol * |value|)``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if lo == hi:
        return QuadratureResult(0.0, 0.0, 1)
    kwargs = dict(epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    if points is not None and np.isfinite(lo) and np.isfinite(hi):
        kwargs["points"] = list(points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        out = _spi.quad(f, lo, hi, **kwargs)
    value, err, info = out[0], out[1], out[2]
    neval = int(info["neval"])
    if not np.isfinite(value):
        raise IntegrationError("integral is not finite", value, err)
    if len(out) > 3 and err > max(tol, 1e3 * tol * abs(value)):
        raise IntegrationError(f"quadrature did not converge: {out[3].splitlines()[0]}",
                               value, err)
    return QuadratureResult(float(value), float(abs(err)), max(neval, 1))


def find_root(f: Callable[[float], float], bracket: tuple[float, float],
              tol: float = 1e-12, fprime: Callable[[float], float] | None = None,
              x0: float | None = None, max_iter: int = 200) -> float:
    """Newton iteration safeguarded by bisection.

    A Newton step is taken only when it stays strictly inside the current
    bracket and shrinks the residual fast enough; otherwise the bracket is
    bisected, so a vanishing slope cannot send the iterate away. Without
    ``fprime`` a secant slope from the last two iterates is used.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise RootFindingError(f"f does not change sign on [{lo}, {hi}]")
    if flo > 0:
        # orient so that f(lo) < 0 < f(hi)
        lo, hi = hi, lo
        flo, fhi = fhi, flo
    x = 0.5 * (lo + hi) if x0 is None or not min(lo, hi) < x0 < max(lo, hi) else float(x0)
    fx = f(x)
    x_prev, f_prev = lo, flo
    dx_old = abs(hi - lo)
    for _ in range(max_iter):
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        if fprime is not None:
            slope = fprime(x)
        else:
            slope = (fx - f_prev) / (x - x_prev) if x != x_prev else 0.0
        a, b = min(lo, hi), max(lo, hi)
        newton_ok = slope != 0 and np.isfinite(slope)
        if newton_ok:
            xn = x - fx / slope
            newton_ok = a < xn < b and abs(xn - x) < 0.5 * dx_old
        if newton_ok:
            dx_old = abs(xn - x)
        else:
            xn = 0.5 * (lo + hi)
            dx_old = abs(hi - lo) / 2
        x_prev, f_prev = x, fx
        x = xn
        fx = f(x)
        if abs(hi - lo) <= tol or dx_old <= tol:
            return x
    return x


def minimize(f: Callable[[np.ndarray], float], x0, tol: float = DEFAULT_OPT_TOL,
             max_iter: int = 20000, restarts: int = 1, step: float = 0.1,
             seed: int = 0) -> OptimResult:
    """Nelder-Mead minimization with perturbed restarts.

    After each simplex run a fresh simplex of size ``step`` (randomly signed
    per coordinate) is built around the incumbent and the search restarted.
    At least one restart is always done: a start at a stationary point of a
    flat direction would otherwise exit immediately. Restarts continue (up to
    ``restarts`` extra) while they improve the objective by more than ``tol``.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f0 = float(f(x0))
    if not np.isfinite(f0):
        raise NonFiniteError("objective is not finite at the starting point")
    rng = np.random.default_rng(seed)
    n = x0.size
    # relative to the objective's size: a log-likelihood of a few thousand
    # carries ~1e-10 of summation noise
    fatol = 1e-2 * tol * max(1.0, abs(f0))

    def safe(x):
        v = f(x)
        return float(v) if np.isfinite(v) else np.inf

    best_x, best_f = x0.copy(), f0
    total_iter = total_eval = 0
    converged = False
    runs = 0
    start = x0.copy()
    while True:
        signs = rng.choice([-1.0, 1.0], size=n)
        scale = step * np.maximum(1.0, np.abs(start))
        simplex = np.vstack([start] + [start + np.eye(n)[i] * signs[i] * scale[i]
                                       for i in range(n)])
        res = _spo.minimize(safe, start, method="Nelder-Mead",
                            options=dict(initial_simplex=simplex, xatol=tol,
                                         fatol=fatol, maxiter=max_iter,
                                         maxfev=4 * max_iter, adaptive=n > 2))
        total_iter += int(res.nit)
        total_eval += int(res.nfev)
        improved = best_f - res.fun
        if res.fun <= best_f:
            best_x, best_f = np.asarray(res.x, dtype=float), float(res.fun)
        converged = bool(res.success)
        runs += 1
        if converged and runs >= 2 and improved <= tol:
            break
        if runs > 1 + restarts:
            break
        start = best_x.copy()
        step = max(step * 0.1, 1e3 * tol)
    return OptimResult(argmin=best_x, min_value=best_f, converged=converged,
                       iterations=total_iter, evaluations=total_eval, restarts=runs - 1)


def fd_hessian(f: Callable[[np.ndarray], float], x, h: float | Sequence[float] = 1e-4) -> np.ndarray:
    """Central-difference Hessian, symmetric by construction.

    ``h`` is an absolute step (scalar or per coordinate).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    hs = np.broadcast_to(np.asarray(h, dtype=float), (n,)).copy()
    if np.any(hs <= 0):
        raise ValueError("step must be positive")

    def ev(dx, where):
        v = float(f(x + dx))
        if not np.isfinite(v):
            raise NonFiniteError(f"objective not finite when perturbing coordinate {where}")
        return v

    f0 = ev(np.zeros(n), "none")
    H = np.empty((n, n))
    e = np.eye(n)
    for i in range(n):
        fp = ev(hs[i] * e[i], i)
        fm = ev(-hs[i] * e[i], i)
        H[i, i] = (fp - 2 * f0 + fm) / hs[i] ** 2
        for j in range(i):
            fpp = ev(hs[i] * e[i] + hs[j] * e[j], (i, j))
            fpm = ev(hs[i] * e[i] - hs[j] * e[j], (i, j))
            fmp = ev(-hs[i] * e[i] + hs[j] * e[j], (i, j))
            fmm = ev(-hs[i] * e[i] - hs[j] * e[j], (i, j))
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4 * hs[i] * hs[j])
    return H


@dataclass
class RandomStream:
    """Seeded source of variates with a running draw count.

    Wraps a PCG64 generator. ``position`` counts the scalar variates consumed.
    One stream per worker; the object is not thread safe.
    """

    seed: int = 0
    position: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._gen = np.random.Generator(np.random.PCG64(int(self.seed) & (2**64 - 1)))

    def _advance(self, size):
        self.position += int(np.prod(size)) if size is not None else 1

    def uniform(self, size=None):
        self._advance(size)
        return self._gen.random(size)

    def normal(self, size=None):
        self._advance(size)
        return self._gen.standard_normal(size)

    def exponential(self, size=None):
        self._advance(size)
        return self._gen.standard_exponential(size)

    def gamma(self, shape, size=None):
        self._advance(size)
        return self._gen.standard_gamma(shape, size)

    def choice_sign(self, size=None):
        return np.where(self.uniform(size) < 0.5, -1.0, 1.0)

    def multivariate_normal(self, cov, size):
        chol = np.linalg.cholesky(np.asarray(cov, dtype=float))
        z = self.normal((size, chol.shape[0]))
        return z @ chol.T

    def spawn(self, key: int) -> "RandomStream":
        """Independent child stream, deterministic in ``(seed, key)``."""
        ss = np.random.SeedSequence([int(self.seed) & (2**64 - 1), int(key)])
        return RandomStream(int(ss.generate_state(1, dtype=np.uint64)[0]))


def mc_moment(sampler: Callable[[RandomStream, int], np.ndarray], k: int, n: int,
              stream: RandomStream, chunk: int = 250_000) -> tuple[float, float]:
    """Monte Carlo estimate of ``E[X**k]`` with its standard error.

    ``sampler(stream, m)`` must return ``m`` independent draws.
    """
    if n < 2:
        raise ValueError("need at least two draws")
    s1 = s2 = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        v = np.asarray(sampler(stream, m), dtype=float) ** k
        s1 += v.sum()
        s2 += (v * v).sum()
        done += m
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)
