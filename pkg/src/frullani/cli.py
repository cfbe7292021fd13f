"""Command-line entry point: fit, compare, eval, sample and score-test.

Exit codes: 0 ok, 1 usage, 2 data error, 3 fit failure (or an unmet
``--expect`` check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import closed_forms  # noqa: F401  (registers the closed-form fast paths)
from .closed_forms import F2LogLogistic
from .core import ScaleMixture, canonical_scales
from .data import DataError, SurvivalDataset, load_dataset
from .inference import (COMPARISON_ORDER, FAMILIES, InferenceError, LikelihoodError, ModelSpec,
                        compare_models, fit, infer_errors, score_test)
from .multivariate import F1MultivariateNormal
from .numerics import DEFAULT_OPT_TOL, NonFiniteError, RandomStream
from .parents import make_parent
from .real_line import (F1Cauchy, F1Gaussian, SkewF1Gaussian, TwoPieceF1Gaussian,
                        UniformLocationNormal)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_FIT = 0, 1, 2, 3
FIELDS = ("pdf", "cdf", "sf", "hazard")

# -loglik, shape, a, b for the weaning data (927 mothers), used by --expect table1
TABLE1 = {
    "exp": (3409.29, 1.0, 0.0594826, None),
    "f1-exp": (3406.36, 1.0, 0.108615, 0.0359083),
    "weibull": (3408.56, 0.970074, 0.0602816, None),
    "f1-weibull": (3388.41, 2.01358, 0.482310, 0.0152277),
    "gamma": (3409.27, 0.992376, 0.0590219, None),
    "f1-gamma": (3379.93, 5.35736, 3.90543, 0.0865375),
    "lognormal": (3402.77, 1.17603, 0.106397, None),
    "f1-lognormal": (3374.38, 0.403807, 0.856643, 0.0173032),
    "loglogistic": (3429.32, 1.43847, 0.101974, None),
    "f1-loglogistic": (3372.66, 7.38682, 1.06599, 0.0159815),
}
TABLE1_NLL_TOL = 0.5


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.points < 1:
            raise UsageError("grid needs at least 1 point")
        if self.points == 1 and self.lo != self.hi:
            raise UsageError("a 1-point grid needs min equal to max")
        if self.points > 1 and not self.lo < self.hi:
            raise UsageError("grid min must be below max")
        if self.log and not self.lo > 0:
            raise UsageError("a log grid needs a positive minimum")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise UsageError(f"grid must look like min:max:n[:log], got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"grid must look like min:max:n[:log], got {text!r}") from None
        return cls(lo, hi, n, len(parts) == 4 and parts[3] == "log")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass
class RunConfig:
    command: str
    dist: str | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    grid: GridSpec | None = None
    field: str = "pdf"
    n: int = 1000
    fmt: str = "csv"
    tol: float = DEFAULT_OPT_TOL
    data: str | None = None
    time_col: str = "time"
    status_col: str | None = None
    covariates: tuple[str, ...] = ()
    categorical: tuple[str, ...] = ()
    families: tuple[str, ...] = ()
    out: str | None = None
    plot: str | None = None
    expect: str | None = None
    drop_censored: bool = False


# ---------------------------------------------------------------------------
# distributions for eval and sample

def _need(params, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + m for m in missing))
    return [float(params[n]) for n in names]


def _b_and_r(params):
    """Mixture rates from ``--b`` with either ``--r`` or ``--a``."""
    if params.get("r") is not None and params.get("a") is not None:
        raise UsageError("give either --a or --r, not both")
    if params.get("r") is not None:
        b, r = _need(params, "b", "r")
        return b, r
    a, b = _need(params, "a", "b")
    return canonical_scales(a, b)


def _parent(family, params, rate=1.0):
    shape = params.get("shape")
    if shape is None and family in ("loglogistic", "pareto"):
        shape = params.get("alpha")
    return make_parent(family, shape, rate=rate)


def _build_parent(family):
    def build(params):
        # --a is accepted as a synonym of --rate for a parent
        rate = params.get("rate", params.get("a"))
        return _parent(family, params, 1.0 if rate is None else float(rate))
    return build


def _build_mixture(family):
    def build(params):
        b, r = _b_and_r(params)
        return ScaleMixture(_parent(family, params), b, r)
    return build


def _build_f1_gauss(params):
    b, r = _b_and_r(params)
    return F1Gaussian(b * r, b, float(params.get("loc") or 0.0))


def _build_skew(params):
    b, r = _b_and_r(params)
    return SkewF1Gaussian(b * r, b, float(params.get("lam") or 0.0), float(params.get("loc") or 0.0))


def _build_two_piece(params):
    a, b, c = _need(params, "a", "b", "c")
    return TwoPieceF1Gaussian(a, b, c, float(params.get("loc") or 0.0))


def _build_uniform_normal(params):
    (alpha,) = _need(params, "alpha")
    return UniformLocationNormal(alpha, float(params.get("loc") or 0.0))


def _build_cauchy(params):
    b, r = _b_and_r(params)
    return F1Cauchy(b, r, float(params.get("loc") or 0.0))


def _build_f2(params):
    shape = params.get("shape", params.get("alpha"))
    if shape is None:
        raise UsageError("missing --shape")
    b, r1, r2 = _need(params, "b", "r1", "r2")
    return F2LogLogistic(float(shape), b, r1, r2)


def parse_cov(text: str) -> np.ndarray:
    """``"1,0.5;0.5,1"`` -> 2x2 matrix."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise UsageError(f"cannot parse covariance {text!r}") from None
    if any(len(r) != len(rows) for r in rows):
        raise UsageError("covariance must be square, rows separated by ';'")
    return np.array(rows)


def _build_mvn(params):
    (b,) = _need(params, "b")
    cov = params.get("cov") or "1,0;0,1"
    return F1MultivariateNormal(parse_cov(cov), b)


@dataclass(frozen=True)
class DistEntry:
    build: Callable[[dict], object]
    kind: str  # "positive", "real" or "multivariate"
    help: str


def _registry() -> dict[str, DistEntry]:
    reg = {}
    for name in ("exp", "weibull", "gamma", "lognormal", "loglogistic", "pareto", "halfnormal"):
        reg[name] = DistEntry(_build_parent(name), "positive", f"{name} parent")
        reg["f1-" + name] = DistEntry(_build_mixture(name), "positive", f"F1 mixture of {name}")
    reg["halfcauchy"] = DistEntry(_build_parent("cauchy"), "positive", "half-Cauchy parent")
    reg["f1-halfcauchy"] = DistEntry(_build_mixture("cauchy"), "positive", "F1 mixture of half-Cauchy")
    reg["f2-loglogistic"] = DistEntry(_build_f2, "positive", "log-logistic mixed twice")
    reg["f1-normal"] = DistEntry(_build_f1_gauss, "real", "symmetric F1-Gaussian")
    reg["skew-f1-normal"] = DistEntry(_build_skew, "real", "skewed F1-Gaussian")
    reg["twopiece-f1-normal"] = DistEntry(_build_two_piece, "real", "two-piece F1-Gaussian")
    reg["uniloc-normal"] = DistEntry(_build_uniform_normal, "real", "uniform-location normal")
    reg["f1-cauchy"] = DistEntry(_build_cauchy, "real", "F1-Cauchy")
    reg["f1-mvnormal"] = DistEntry(_build_mvn, "multivariate", "F1-multivariate normal")
    return reg


DISTRIBUTIONS = _registry()


def build_distribution(name: str, params: dict):
    try:
        entry = DISTRIBUTIONS[name]
    except KeyError:
        raise UsageError(f"unknown distribution {name!r}; known: {', '.join(DISTRIBUTIONS)}") from None
    try:
        return entry.build(params), entry.kind
    except (ValueError, KeyError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{name}: {exc}") from None


def evaluate_field(dist, kind: str, field_name: str, t: np.ndarray) -> np.ndarray:
    if kind == "multivariate":
        if field_name != "pdf":
            raise UsageError("f1-mvnormal supports --field pdf only (evaluated along the first axis)")
        x = np.zeros((t.size, dist.dim))
        x[:, 0] = t
        return np.asarray(dist.pdf(x + dist.mean), dtype=float)
    if kind == "positive" and not np.all(t > 0):
        raise UsageError("grid must be positive for a lifetime distribution")
    with np.errstate(all="ignore"):
        if field_name == "pdf":
            return np.asarray(dist.pdf(t), dtype=float)
        if field_name == "cdf":
            return np.asarray(dist.cdf(t), dtype=float)
        if field_name == "sf":
            return np.asarray(dist.sf(t), dtype=float)
        if hasattr(dist, "hazard"):
            return np.asarray(dist.hazard(t), dtype=float)
        return np.asarray(dist.pdf(t), dtype=float) / np.asarray(dist.sf(t), dtype=float)


# ---------------------------------------------------------------------------
# output

def _num(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def dumps_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(msg: str):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands

def _load(cfg: RunConfig) -> SurvivalDataset:
    if not cfg.data:
        raise UsageError("--data is required")
    try:
        ds = load_dataset(cfg.data, cfg.time_col, cfg.status_col, cfg.covariates, cfg.categorical)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.data}: {exc.strerror or exc}") from None
    s = ds.summary()
    _log(f"{cfg.data}: {s['rows']} rows, {s['events']} events, {s['censored']} censored"
         + (f", covariates {', '.join(ds.covariate_names)}" if ds.n_covariates else ""))
    return ds


def _check_family(name):
    if name not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")


def cmd_fit(cfg: RunConfig) -> int:
    if not cfg.dist:
        raise UsageError("--dist is required")
    _check_family(cfg.dist)
    data = _load(cfg)
    spec = ModelSpec(cfg.dist, covariate_link=True)
    try:
        res = fit(spec, data, tol=cfg.tol, seed=cfg.seed)
    except (NonFiniteError, LikelihoodError) as exc:
        _emit(dumps_json({"estimates": {}, "se_or_cv": {}, "ci95": {}, "neg_log_lik": None,
                          "converged": False, "error": str(exc)}), cfg.out)
        _log(f"fit failed: {exc}")
        return EXIT_FIT
    if not res.converged:
        payload = res.to_dict()
        payload["error"] = res.message or "fit did not converge"
        _emit(dumps_json(payload), cfg.out)
        _log(f"fit failed: {payload['error']}")
        return EXIT_FIT
    try:
        res = infer_errors(res, spec, data)
    except InferenceError as exc:
        _log(f"warning: no standard errors: {exc}")
    _emit(dumps_json(res.to_dict()), cfg.out)
    _log(res.table())
    return EXIT_OK


def _check_table1(table) -> bool:
    ok = True
    for fid, (nll, *_rest) in TABLE1.items():
        try:
            row = table.row(fid)
        except StopIteration:
            continue
        got = row.neg_log_lik
        good = got is not None and abs(got - nll) <= TABLE1_NLL_TOL
        ok &= good
        _log(f"expect {fid:<16} {nll:>10.2f}  got {_num(got):<22} {'ok' if good else 'MISMATCH'}")
    return ok


def cmd_compare(cfg: RunConfig) -> int:
    data = _load(cfg)
    families = list(cfg.families) or COMPARISON_ORDER
    for f in families:
        _check_family(f)
    table = compare_models(data, families, covariate_link=False, tol=cfg.tol, seed=cfg.seed)
    cols = ["family", "label", "neg_log_lik", "shape", "a", "b", "converged", "error"]
    if cfg.fmt == "json":
        _emit(dumps_json(table.to_records()), cfg.out)
    else:
        _emit(dumps_csv(cols, ([getattr(r, c) for c in cols] for r in table.rows)), cfg.out)
    status = EXIT_OK
    if any(r.neg_log_lik is None or not r.converged for r in table.rows):
        _log("some families failed to fit; see the error column")
        status = EXIT_FIT
    if cfg.expect:
        if cfg.expect != "table1":
            raise UsageError(f"unknown --expect target {cfg.expect!r}; known: table1")
        if not _check_table1(table):
            status = EXIT_FIT
    return status


def cmd_eval(cfg: RunConfig) -> int:
    if not cfg.dist:
        raise UsageError("--dist is required")
    if cfg.field not in FIELDS:
        raise UsageError(f"--field must be one of {', '.join(FIELDS)}")
    dist, kind = build_distribution(cfg.dist, cfg.params)
    grid = cfg.grid
    if grid is None:
        grid = GridSpec(0.1, 10.0, 100) if kind == "positive" else GridSpec(-5.0, 5.0, 101)
    t = grid.values()
    vals = evaluate_field(dist, kind, cfg.field, t)
    if cfg.fmt == "json":
        _emit(dumps_json({"dist": cfg.dist, "field": cfg.field, "t": t, "value": vals}), cfg.out)
    else:
        _emit(dumps_csv(["t", "value"], zip(t, vals)), cfg.out)
    if cfg.plot:
        from .plotting import plot_grid
        plot_grid(t, vals, cfg.plot, field=cfg.field, label=cfg.dist, log_x=grid.log)
    return EXIT_OK


def cmd_sample(cfg: RunConfig) -> int:
    if not cfg.dist:
        raise UsageError("--dist is required")
    if cfg.n < 1:
        raise UsageError("--n must be positive")
    dist, kind = build_distribution(cfg.dist, cfg.params)
    x = np.asarray(dist.sample(RandomStream(cfg.seed), cfg.n), dtype=float)
    if kind == "multivariate":
        header = [f"x{j + 1}" for j in range(x.shape[1])]
        rows = x.tolist()
    else:
        header = ["value"]
        rows = ([v] for v in x.ravel())
    if cfg.fmt == "json":
        _emit(dumps_json({"dist": cfg.dist, "seed": cfg.seed, "values": x}), cfg.out)
    else:
        _emit(dumps_csv(header, rows), cfg.out)
    if cfg.plot:
        from .plotting import plot_sample
        plot_sample(x, cfg.plot, label=cfg.dist)
    return EXIT_OK


def cmd_score_test(cfg: RunConfig) -> int:
    parent = cfg.dist or "exp"
    _check_family(parent)
    if FAMILIES[parent].mixed:
        raise UsageError("score-test takes a parent family, e.g. --dist exp")
    data = _load(cfg)
    res = score_test(data, parent, censored="drop" if cfg.drop_censored else "error")
    _emit(dumps_json(res.to_dict()), cfg.out)
    _log(f"{parent}: U = {res.statistic:.6g}, z = {res.z:.4f}, one-sided p = {res.one_sided_p:.4g}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "eval": cmd_eval,
            "sample": cmd_sample, "score-test": cmd_score_test}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except DataError as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


PARAM_FLAGS = ("shape", "rate", "a", "b", "r", "c", "lam", "alpha", "loc", "r1", "r2")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frullani", description="Frullani scale-mixture distributions and survival fits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, data=False, params=False):
        sp.add_argument("--dist", help="family or distribution id")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        sp.add_argument("--tol", type=float, default=DEFAULT_OPT_TOL)
        if data:
            sp.add_argument("--data", help="CSV file with a header row")
            sp.add_argument("--time-col", default="time")
            sp.add_argument("--status-col", default=None, help="1 = event, 0 = censored")
            sp.add_argument("--covariates", type=_csv_list, default=(), help="comma-separated numeric columns")
            sp.add_argument("--categorical", type=_csv_list, default=(),
                            help="comma-separated columns expanded to indicators")
        if params:
            for name in PARAM_FLAGS:
                sp.add_argument(f"--{name}", type=float, default=None)
            sp.add_argument("--cov", default=None, help='covariance for f1-mvnormal, e.g. "1,0.5;0.5,1"')
            sp.add_argument("--plot", default=None, help="also write a PNG figure to this path")

    sp = sub.add_parser("fit", help="maximum-likelihood fit with covariates")
    common(sp, data=True)
    sp = sub.add_parser("compare", help="fit every family and tabulate -loglik")
    common(sp, data=True)
    sp.add_argument("--families", type=_csv_list, default=())
    sp.add_argument("--expect", default=None, help="check against a built-in table (table1)")
    sp = sub.add_parser("eval", help="evaluate pdf/cdf/sf/hazard on a grid")
    common(sp, params=True)
    sp.add_argument("--grid", type=str, default=None, help="min:max:n[:log]")
    sp.add_argument("--field", choices=FIELDS, default="pdf")
    sp = sub.add_parser("sample", help="seeded random draws")
    common(sp, params=True)
    sp.add_argument("--n", type=int, default=1000)
    sp = sub.add_parser("score-test", help="score test for mixing against a parent")
    common(sp, data=True)
    sp.add_argument("--drop-censored", action="store_true")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: getattr(ns, k) for k in PARAM_FLAGS if getattr(ns, k, None) is not None}
    if getattr(ns, "cov", None):
        params["cov"] = ns.cov
    default_fmt = "json" if ns.command in ("fit", "score-test") else "csv"
    return RunConfig(
        command=ns.command, dist=ns.dist, params=params, seed=ns.seed,
        grid=GridSpec.parse(ns.grid) if getattr(ns, "grid", None) else None,
        field=getattr(ns, "field", "pdf"), n=getattr(ns, "n", 1000), fmt=ns.fmt or default_fmt,
        tol=ns.tol, data=getattr(ns, "data", None), time_col=getattr(ns, "time_col", "time"),
        status_col=getattr(ns, "status_col", None), covariates=getattr(ns, "covariates", ()),
        categorical=getattr(ns, "categorical", ()), families=getattr(ns, "families", ()),
        out=ns.out, plot=getattr(ns, "plot", None), expect=getattr(ns, "expect", None),
        drop_censored=getattr(ns, "drop_censored", False))


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
