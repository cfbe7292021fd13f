"""Censored-data maximum likelihood for parent and Frullani-mixed survival models.

Covariates act multiplicatively on both rates, ``a_i = a exp(-gamma' z_i)`` and
``b_i = b exp(-gamma' z_i)``, so the ratio ``a/b`` is common to all subjects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import special as _sp

from .core import ScaleMixture, canonical_scales
from .data import DataError, SurvivalDataset
from .numerics import DEFAULT_OPT_TOL, NonFiniteError, fd_hessian, minimize
from .parents import PARENTS, Parent, make_parent

Z95 = 1.959963984540054


class LikelihoodError(ValueError):
    """A log-likelihood term is not finite; ``index`` is the 0-based observation."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class InferenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# model registry

@dataclass(frozen=True)
class Family:
    id: str
    parent: str
    mixed: bool
    label: str


_FAMILY_LIST = [
    Family("exp", "exponential", False, "Exponential"),
    Family("f1-exp", "exponential", True, "Mixed exponential"),
    Family("weibull", "weibull", False, "Weibull"),
    Family("f1-weibull", "weibull", True, "Mixed Weibull"),
    Family("gamma", "gamma", False, "Gamma"),
    Family("f1-gamma", "gamma", True, "Mixed gamma"),
    Family("lognormal", "lognormal", False, "Lognormal"),
    Family("f1-lognormal", "lognormal", True, "Mixed lognormal"),
    Family("loglogistic", "loglogistic", False, "Log-logistic"),
    Family("f1-loglogistic", "loglogistic", True, "Mixed log-logistic"),
    Family("pareto", "pareto", False, "Pareto"),
    Family("f1-pareto", "pareto", True, "Mixed Pareto"),
]
FAMILIES: dict[str, Family] = {f.id: f for f in _FAMILY_LIST}
COMPARISON_ORDER = [f.id for f in _FAMILY_LIST[:10]]


def get_family(family_id: str) -> Family:
    try:
        return FAMILIES[family_id]
    except KeyError:
        raise KeyError(f"unknown family {family_id!r}; known: {', '.join(FAMILIES)}") from None


def parent_family_id(family_id: str) -> str:
    fam = get_family(family_id)
    return next(f.id for f in _FAMILY_LIST if f.parent == fam.parent and not f.mixed)


@dataclass(frozen=True)
class ModelSpec:
    """A family id plus whether the dataset's covariates enter the rates."""

    family: str
    covariate_link: bool = True

    def __post_init__(self):
        get_family(self.family)

    @property
    def fam(self) -> Family:
        return FAMILIES[self.family]

    @property
    def has_shape(self) -> bool:
        return PARENTS[self.fam.parent].shape_name is not None

    def n_covariates(self, data: SurvivalDataset) -> int:
        return data.n_covariates if self.covariate_link else 0

    def n_params(self, data: SurvivalDataset) -> int:
        return (2 if self.fam.mixed else 1) + int(self.has_shape) + self.n_covariates(data)

    def param_names(self, data: SurvivalDataset) -> list[str]:
        """Reporting order: shape, a, b (or rate), then covariates."""
        names = ["shape"] if self.has_shape else []
        names += ["a", "b"] if self.fam.mixed else ["rate"]
        if self.covariate_link:
            names += list(data.covariate_names)
        return names

    def positive(self, data: SurvivalDataset) -> list[bool]:
        return [n in ("shape", "a", "b", "rate") for n in self.param_names(data)]

    # theta <-> model -----------------------------------------------------
    # parents:   theta = [ln c, (ln shape), gamma...]
    # mixtures:  theta = [ln c, s, (ln shape), gamma...] with c = b sqrt(r) the
    #            geometric-mean rate and ln r = |s|; -loglik is smooth and even
    #            in s near r = 1, so a boundary MLE is reached without drifting

    def build(self, theta) -> tuple[Parent | ScaleMixture, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        fam = self.fam
        i = 0
        if fam.mixed:
            log_r = abs(float(theta[1]))
            b = math.exp(theta[0] - 0.5 * log_r)
            r = math.exp(log_r)
            i = 2
        else:
            c = math.exp(theta[0])
            i = 1
        shape = None
        if self.has_shape:
            shape = math.exp(theta[i])
            i += 1
        gamma = theta[i:]
        if fam.mixed:
            return ScaleMixture(make_parent(fam.parent, shape), b, r), gamma
        return make_parent(fam.parent, shape, rate=c), gamma

    def natural(self, theta, data: SurvivalDataset) -> dict[str, float]:
        dist, gamma = self.build(theta)
        out = {}
        if isinstance(dist, ScaleMixture):
            if self.has_shape:
                out["shape"] = float(dist.parent.shape)
            out["a"] = float(dist.a)
            out["b"] = float(dist.b)
        else:
            if self.has_shape:
                out["shape"] = float(dist.shape)
            out["rate"] = float(dist.rate)
        if self.covariate_link:
            out.update({n: float(g) for n, g in zip(data.covariate_names, gamma)})
        return out

    def theta_from_natural(self, params: Mapping, data: SurvivalDataset) -> np.ndarray:
        """Accepts ``rate`` (parents), ``a``/``b``/``r`` (mixtures, either order
        for ``a`` and ``b``), ``shape`` or the parent's own shape name, and
        covariate coefficients by name or as a ``gamma`` sequence."""
        p = dict(params)
        shape_name = PARENTS[self.fam.parent].shape_name
        theta = []
        if self.fam.mixed:
            if "r" in p:
                b, r = float(p["b"]), float(p["r"])
                if "a" in p:
                    raise ValueError("give either a or r, not both")
            else:
                b, r = canonical_scales(float(p["a"]), float(p["b"]))
            if not (b > 0 and r >= 1):
                raise ValueError("need b > 0 and r >= 1")
            theta += [math.log(b) + 0.5 * math.log(r), math.log(r)]
        else:
            rate = float(p.get("rate", p.get("a", 1.0)))
            theta.append(math.log(rate))
        if self.has_shape:
            shape = float(p.get("shape", p.get(shape_name, 1.0)))
            theta.append(math.log(shape))
        k = self.n_covariates(data)
        if k:
            if "gamma" in p:
                g = list(map(float, p["gamma"]))
            else:
                g = [float(p.get(n, 0.0)) for n in data.covariate_names]
            if len(g) != k:
                raise ValueError(f"need {k} covariate coefficients")
            theta += g
        return np.array(theta, dtype=float)


# ---------------------------------------------------------------------------
# likelihood

def _loglik_terms(spec: ModelSpec, theta, data: SurvivalDataset) -> np.ndarray:
    dist, gamma = spec.build(theta)
    t = data.times
    if gamma.size:
        eta = data.covariates @ gamma
        tt = np.exp(-eta) * t
    else:
        eta = np.zeros_like(t)
        tt = t
    out = np.empty_like(t)
    ev = data.events
    with np.errstate(all="ignore"):
        if np.any(ev):
            out[ev] = dist.logpdf(tt[ev]) - eta[ev]
        if np.any(~ev):
            out[~ev] = dist.logsf(tt[~ev])
    return out


# a fitted ln r below this is reported as the r = 1 boundary
BOUNDARY_LOG_R = 1e-5


def _objective(spec, data):
    def f(theta):
        try:
            terms = _loglik_terms(spec, theta, data)
        except (ValueError, OverflowError, ArithmeticError):
            return math.inf
        v = -float(np.sum(terms))
        return v if math.isfinite(v) else math.inf
    return f


def neg_log_lik(spec: ModelSpec, params, data: SurvivalDataset) -> float:
    """Minus the censored-data log-likelihood at natural parameters ``params``."""
    theta = params if isinstance(params, np.ndarray) else spec.theta_from_natural(params, data)
    terms = _loglik_terms(spec, theta, data)
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        i = int(bad[0])
        kind = "log density" if data.events[i] else "log survival"
        raise LikelihoodError(f"{kind} not finite at observation {i} (time {data.times[i]:g})", i)
    return -float(np.sum(terms))


# ---------------------------------------------------------------------------
# fitting

@dataclass
class FitResult:
    family: str
    estimates: dict[str, float]
    neg_log_lik: float
    converged: bool
    theta: np.ndarray
    n_obs: int
    n_events: int
    parent_neg_log_lik: float | None = None
    se_or_cv: dict[str, float] = field(default_factory=dict)
    dispersion: dict[str, str] = field(default_factory=dict)
    ci95: dict[str, tuple[float, float]] = field(default_factory=dict)
    covariance: np.ndarray | None = None
    iterations: int = 0
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "estimates": dict(self.estimates),
            "se_or_cv": {k: self.se_or_cv.get(k) for k in self.estimates},
            "ci95": {k: list(self.ci95[k]) if k in self.ci95 else None for k in self.estimates},
            "neg_log_lik": self.neg_log_lik,
            "converged": self.converged,
        }

    def table(self) -> str:
        lines = [f"{self.family}: -loglik {self.neg_log_lik:.6f}"
                 + ("" if self.parent_neg_log_lik is None else f" (parent {self.parent_neg_log_lik:.6f})")
                 + ("" if self.converged else "  NOT CONVERGED"),
                 f"{'parameter':<16}{'estimate':>14}  {'SE/CV':>14}  95% CI"]
        for k, v in self.estimates.items():
            se = self.se_or_cv.get(k)
            tag = " (CV)" if self.dispersion.get(k) == "cv" else ""
            ci = self.ci95.get(k)
            se_s = "" if se is None else f"{se:.4g}{tag}"
            ci_s = "" if ci is None else f"({ci[0]:.6g}, {ci[1]:.6g})"
            lines.append(f"{k:<16}{v:>14.6g}  {se_s:>14}  {ci_s}")
        if self.message:
            lines.append(f"note: {self.message}")
        return "\n".join(lines)


def _check_data(spec: ModelSpec, data: SurvivalDataset):
    need = max(5, spec.n_params(data) + 1)
    if len(data) < need:
        raise DataError(f"need at least {need} observations for {spec.family}, got {len(data)}")
    if data.n_events == 0:
        raise DataError("no uncensored observations")
    if np.ptp(data.times) == 0:
        raise DataError("all times are equal; the likelihood has no interior maximum")


def _parent_start(spec: ModelSpec, data: SurvivalDataset) -> np.ndarray:
    t, ev = data.times, data.events
    lt = np.log(t[ev]) if ev.sum() > 1 else np.log(t)
    fam = spec.fam.parent
    rate = data.n_events / t.sum()
    shape = 1.0
    sd = float(np.std(lt)) or 1.0
    if fam == "lognormal":
        rate, shape = math.exp(-float(np.mean(lt))), sd
    elif fam == "loglogistic":
        rate, shape = math.exp(-float(np.median(lt))), math.pi / (math.sqrt(3.0) * sd)
    elif fam == "weibull":
        shape = min(max(1.2825 / sd, 0.05), 50.0)
    elif fam == "pareto":
        rate = 1.0 / float(np.median(t))
    theta = [math.log(rate)] + ([math.log(shape)] if spec.has_shape else [])
    return np.array(theta + [0.0] * spec.n_covariates(data))


def _run(spec, data, starts, tol, seed, restarts=2):
    obj = _objective(spec, data)
    best = None
    for j, x0 in enumerate(starts):
        if not math.isfinite(obj(x0)):
            continue
        res = minimize(obj, x0, tol=tol, restarts=restarts, seed=seed + j)
        if best is None or res.min_value < best.min_value:
            best = res
    if best is None:
        raise NonFiniteError("log-likelihood is not finite at any starting point")
    return best


MIXTURE_START_RATIOS = (1.1, 5.0, 50.0)


def fit(spec: ModelSpec, data: SurvivalDataset, init: Mapping | None = None,
        tol: float = DEFAULT_OPT_TOL, seed: int = 0,
        parent_result: FitResult | None = None) -> FitResult:
    """Maximum-likelihood fit of ``spec`` to ``data``.

    A mixture is started from the fitted parent: the parent cannot be
    recovered exactly at ``a = b`` (the ratio direction is stationary there),
    so starts are placed at ratios ``1.1``, ``5`` and ``50`` with the geometric
    mean rate kept at the parent estimate. ``init`` adds one more start.
    """
    _check_data(spec, data)
    starts = []
    parent_nll = None
    if spec.fam.mixed:
        pspec = ModelSpec(parent_family_id(spec.family), spec.covariate_link)
        pfit = parent_result if parent_result is not None else fit(pspec, data, tol=tol, seed=seed)
        parent_nll = pfit.neg_log_lik
        lc = pfit.theta[0]
        rest = pfit.theta[1:]
        for r0 in MIXTURE_START_RATIOS:
            starts.append(np.concatenate([[lc, math.log(r0)], rest]))
            if spec.has_shape:
                # mixing spreads the rates, so the fitted parent shape tends to rise
                wide = rest.copy()
                wide[0] += math.log(3.0)
                starts.append(np.concatenate([[lc, math.log(r0)], wide]))
    elif spec.family == "exp" and spec.n_covariates(data) == 0:
        rate = data.n_events / float(np.sum(data.times))
        theta = np.array([math.log(rate)])
        nll = neg_log_lik(spec, theta, data)
        return FitResult(spec.family, spec.natural(theta, data), nll, True, theta,
                         len(data), data.n_events, message="closed-form MLE")
    else:
        starts.append(_parent_start(spec, data))
    if init is not None:
        starts.insert(0, spec.theta_from_natural(init, data))
    res = _run(spec, data, starts, tol, seed)
    theta = res.argmin
    try:
        nll = neg_log_lik(spec, theta, data)
    except LikelihoodError as exc:
        return FitResult(spec.family, spec.natural(theta, data), math.inf, False, theta,
                         len(data), data.n_events, parent_nll, message=str(exc))
    converged, message = bool(res.converged), ""
    if spec.fam.mixed and abs(theta[1]) < BOUNDARY_LOG_R:
        # the ratio sits on r = 1: the fit is the parent, and the ratio is not identified
        converged, message = True, "ratio at the r = 1 boundary; the mixture reduces to the parent"
    elif not converged:
        message = "simplex search hit its iteration limit"
    return FitResult(spec.family, spec.natural(theta, data), nll, converged, theta,
                     len(data), data.n_events, parent_nll, iterations=res.iterations,
                     message=message)


# ---------------------------------------------------------------------------
# standard errors

def _phi_objective(spec: ModelSpec, data: SurvivalDataset):
    """-loglik in reporting coordinates: logs of positive parameters, raw gammas."""
    names = spec.param_names(data)
    pos = spec.positive(data)

    def f(phi):
        nat = {n: (math.exp(v) if p else v) for n, v, p in zip(names, phi, pos)}
        if spec.fam.mixed and not nat["a"] > nat["b"]:
            return math.inf
        try:
            return neg_log_lik(spec, spec.theta_from_natural(nat, data), data)
        except (LikelihoodError, ValueError, OverflowError):
            return math.inf
    return f


def infer_errors(result: FitResult, spec: ModelSpec, data: SurvivalDataset,
                 step: float = 1e-3) -> FitResult:
    """Observed-information standard errors and 95% intervals.

    Positive parameters report ``CV = SE(ln theta)`` with interval
    ``theta exp(+-1.96 SE)``; covariate coefficients report SE with a Wald
    interval.
    """
    if not result.converged:
        raise InferenceError("fit did not converge; standard errors are not meaningful")
    names = spec.param_names(data)
    pos = spec.positive(data)
    est = result.estimates
    phi = np.array([math.log(est[n]) if p else est[n] for n, p in zip(names, pos)])
    h = np.full(phi.size, step)
    zsd = data.covariates.std(axis=0) if spec.covariate_link else np.zeros(0)
    for j, n in enumerate(names):
        if not pos[j]:
            sd = zsd[list(data.covariate_names).index(n)]
            h[j] = step / max(sd, 1e-12)
    try:
        H = fd_hessian(_phi_objective(spec, data), phi, h)
    except NonFiniteError as exc:
        raise InferenceError(f"{exc}; the estimate may lie on a boundary, try a profile refit") from exc
    try:
        np.linalg.cholesky(H)
        cov = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        raise InferenceError("observed information is not positive definite; "
                             "the estimate may be on a flat ridge (r near 1), try a profile refit") from None
    se = np.sqrt(np.diag(cov))
    out = FitResult(**{**result.__dict__})
    out.covariance = cov
    out.se_or_cv, out.dispersion, out.ci95 = {}, {}, {}
    for j, n in enumerate(names):
        out.se_or_cv[n] = float(se[j])
        if pos[j]:
            out.dispersion[n] = "cv"
            out.ci95[n] = (est[n] * math.exp(-Z95 * se[j]), est[n] * math.exp(Z95 * se[j]))
        else:
            out.dispersion[n] = "se"
            out.ci95[n] = (est[n] - Z95 * se[j], est[n] + Z95 * se[j])
    return out


# ---------------------------------------------------------------------------
# flat direction at the parent estimate

def flat_direction_derivative(parent_family: str, data: SurvivalDataset,
                              parent_result: FitResult | None = None,
                              rel_step: float = 1e-4) -> float:
    """Central difference of the mixture log-likelihood in ``delta`` at ``delta = 0``.

    The mixture has rates ``b`` and ``b + delta`` with ``b`` and the shape held
    at the parent estimate; negative ``delta`` swaps the two rates. The
    derivative vanishes because the parent score in ``b`` is zero.
    """
    pspec = ModelSpec(parent_family, covariate_link=data.n_covariates > 0)
    if pspec.fam.mixed:
        raise ValueError("give a parent family")
    pfit = parent_result or fit(pspec, data)
    mspec = ModelSpec("f1-" + parent_family, pspec.covariate_link)
    b = pfit.estimates["rate"]
    base = {k: v for k, v in pfit.estimates.items() if k != "rate"}
    h = rel_step * b

    def ll(delta):
        lo, r = canonical_scales(b, b + delta)
        return -neg_log_lik(mspec, {**base, "b": lo, "r": r}, data)

    return (ll(h) - ll(-h)) / (2.0 * h)


# ---------------------------------------------------------------------------
# score test for mixing

@dataclass(frozen=True)
class ScoreTestResult:
    """Score ``U = dl/d(delta^2)`` at ``delta = 0`` for rates ``c -+ delta``.

    ``variance`` is the efficient information (nuisance rate and shape
    projected out), so ``z = statistic / sqrt(variance)``. ``naive_variance``
    is the unadjusted sample sum of squared per-observation scores.
    """

    statistic: float
    variance: float
    z: float
    one_sided_p: float
    n: int
    family: str
    rate: float
    shape: float | None = None
    naive_variance: float | None = None
    closed_form: float | None = None
    printed_closed_form: float | None = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _dlog(fun, y, h):
    """First and second derivatives by fourth-order central differences."""
    f2p, fp, f0, fm, f2m = fun(y + 2 * h), fun(y + h), fun(y), fun(y - h), fun(y - 2 * h)
    d1 = (-f2p + 8 * fp - 8 * fm + f2m) / (12 * h)
    d2 = (-f2p + 16 * fp - 30 * f0 + 16 * fm - f2m) / (12 * h * h)
    return d1, d2


def _unit_scores(unit: Parent, y, rel_h=1e-3):
    """Per-observation mixing score ``u`` and nuisance scores at unit-rate points ``y``."""
    y = np.asarray(y, dtype=float)
    h = rel_h * y
    lp = unit._logpdf1
    d1, d2 = _dlog(lp, y, h)
    u = (y * y * (d2 + d1 * d1)) / 6.0 - 1.0 / 3.0
    scores = [1.0 + y * d1]
    if unit.shape_name is not None:
        eps = 1e-4
        s0 = unit.shape
        up = type(unit)(**{unit.shape_name: s0 * math.exp(eps)})
        dn = type(unit)(**{unit.shape_name: s0 * math.exp(-eps)})
        scores.append((up._logpdf1(y) - dn._logpdf1(y)) / (2 * eps))
    return u, np.vstack(scores)


_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _efficient_information(unit: Parent, panels: int = 80) -> tuple[float, float]:
    """Per-observation ``(Var u, efficient information)`` under the unit-rate parent.

    Expectations by composite Gauss-Legendre in ``ln y`` between the
    ``1e-13`` and ``1 - 1e-13`` quantiles.
    """
    lo, hi = math.log(float(unit._ppf1(np.array(1e-13)))), math.log(float(unit._ppf1(np.array(1 - 1e-13))))
    edges = np.linspace(lo, hi, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    v = (mid[:, None] + half[:, None] * _GL16_X).ravel()
    w = (half[:, None] * _GL16_W).ravel()
    y = np.exp(v)
    dens = np.exp(unit._logpdf1(y)) * y * w
    u, s = _unit_scores(unit, y)
    Euu = float(np.sum(dens * u * u))
    Eus = s @ (dens * u)
    Ess = (s * dens) @ s.T
    eff = Euu - float(Eus @ np.linalg.solve(Ess, Eus))
    return Euu, eff


def score_test(data: SurvivalDataset | Sequence[float], parent: str = "exp",
               censored: str = "error") -> ScoreTestResult:
    """One-sided score test of no mixing against a Frullani mixture of ``parent``.

    Per observation the score is ``u = y^2 f''(y) / (6 f(y)) - 1/3`` with
    ``y = c x`` and ``f`` the unit-rate parent density (derivatives by finite
    differences), and ``U = sum(u) / c^2``. For the exponential parent this
    reduces to ``U = {sum (x - xbar)^2 - n xbar^2} / 6``. Large positive ``z``
    favours mixing.

    ``censored='drop'`` discards censored rows; the default refuses them.
    """
    if not isinstance(data, SurvivalDataset):
        x = np.asarray(data, dtype=float)
        data = SurvivalDataset(x, np.ones(x.size, dtype=bool))
    if not data.events.all():
        if censored == "drop":
            data = data.uncensored()
        else:
            raise DataError("the score test is defined for uncensored samples; "
                            "drop censored rows explicitly (censored='drop')")
    data = data.without_covariates()
    fam = get_family(parent)
    if fam.mixed:
        raise ValueError("score_test takes a parent family")
    x = data.times
    n = x.size
    if n < 2:
        raise DataError("need at least two observations")
    if fam.id == "exp":
        c, shape = 1.0 / float(np.mean(x)), None
    else:
        pf = fit(ModelSpec(fam.id, covariate_link=False), data)
        c, shape = pf.estimates["rate"], pf.estimates.get("shape")
    unit = make_parent(fam.parent, shape)
    u, _ = _unit_scores(unit, c * x)
    stat = float(np.sum(u)) / c ** 2
    _, eff = _efficient_information(unit)
    var = n * eff / c ** 4
    z = stat / math.sqrt(var)
    closed = printed = None
    if fam.id == "exp":
        xbar = float(np.mean(x))
        ss = float(np.sum((x - xbar) ** 2))
        closed = (ss - n * xbar ** 2) / 6.0
        printed = (ss - xbar ** 2) / 6.0
    return ScoreTestResult(stat, var, z, float(_sp.ndtr(-z)), n, fam.id, c, shape,
                           float(np.sum(u * u)) / c ** 4, closed, printed)


# ---------------------------------------------------------------------------
# model comparison

@dataclass(frozen=True)
class ComparisonRow:
    family: str
    label: str
    neg_log_lik: float | None
    shape: float | None
    a: float | None
    b: float | None
    converged: bool
    error: str = ""


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def row(self, family: str) -> ComparisonRow:
        return next(r for r in self.rows if r.family == family)

    def to_records(self) -> list[dict]:
        return [r.__dict__.copy() for r in self.rows]


def compare_models(data: SurvivalDataset, families: Sequence[str] | None = None,
                   covariate_link: bool = False, tol: float = DEFAULT_OPT_TOL,
                   seed: int = 0) -> ComparisonTable:
    """Fit each family and tabulate ``-loglik``, shape, ``a`` and ``b``.

    Rows follow the parent/mixed pairing order. A parent's rate goes in the
    ``a`` column with ``b`` empty; the exponential shape is reported as 1.
    Per-family failures are recorded in the row.
    """
    if families is None:
        families = COMPARISON_ORDER
    families = list(families)
    if not families:
        raise ValueError("no families to compare")
    for f in families:
        get_family(f)
    order = {f: i for i, f in enumerate(FAMILIES)}
    families = sorted(dict.fromkeys(families), key=lambda f: order[f])
    parent_fits: dict[str, FitResult] = {}
    rows = []
    for fid in families:
        spec = ModelSpec(fid, covariate_link)
        fam = spec.fam
        try:
            pr = None
            if fam.mixed:
                pid = parent_family_id(fid)
                if pid not in parent_fits:
                    parent_fits[pid] = fit(ModelSpec(pid, covariate_link), data, tol=tol, seed=seed)
                pr = parent_fits[pid]
            res = fit(spec, data, tol=tol, seed=seed, parent_result=pr)
            if not fam.mixed:
                parent_fits[fid] = res
            e = res.estimates
            shape = e.get("shape", 1.0 if fam.parent == "exponential" else None)
            rows.append(ComparisonRow(fid, fam.label, res.neg_log_lik, shape,
                                      e["a"] if fam.mixed else e["rate"],
                                      e["b"] if fam.mixed else None, res.converged,
                                      "" if res.converged else res.message))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            rows.append(ComparisonRow(fid, fam.label, None, None, None, None, False, str(exc)))
    return ComparisonTable(tuple(rows))
