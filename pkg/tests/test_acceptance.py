"""Acceptance criteria 1-14, one PASS/FAIL line each in the terminal summary.

Run with ``pytest tests/test_acceptance.py -v``. Criterion 13 needs the
weaning CSV and is skipped unless ``FRULLANI_WEANING_CSV`` points at it.
"""

import math
import os
import time

import numpy as np
import pytest
from scipy import integrate, stats

from frullani import (F1Exponential, F1Gamma, F1Gaussian, F1LogLogistic, F1LogNormal,
                      F1MultivariateNormal, F1Pareto, F1Weibull, F2LogLogistic, ModelSpec,
                      RandomStream, ScaleMixture, SkewF1Gaussian, SurvivalDataset,
                      TwoPieceF1Gaussian, biv_identity_check, compare_models, fit,
                      flat_direction_derivative, frullani_identity_check, infer_errors,
                      kurtosis_to_ratio, load_dataset, make_parent, score_test, slash_cdf)
from frullani.cli import TABLE1, TABLE1_NLL_TOL
from frullani.core import printed_survival_by_parts
from frullani.multivariate import exponential_product_cdf
from frullani.real_line import UniformLocationNormal, f1_gauss_fourth_moment, uniform_location_kurtosis


def _cdf(parent):
    def F(t):
        if t <= 0.0:
            return 0.0
        if t == math.inf:
            return 1.0
        return float(parent.cdf(t))
    return F


def _mc_mean(v):
    v = np.asarray(v, dtype=float)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


# ---------------------------------------------------------------------------

def test_c01_frullani_identity(criterion):
    cases = [("exponential", None, 2.0, 1.0), ("weibull", 2.0, 3.0, 0.5), ("gamma", 2.5, 5.0, 0.2),
             ("lognormal", 0.8, 10.0, 1.0), ("loglogistic", 3.0, 1.5, 0.1), ("pareto", 2.0, 7.0, 3.0)]
    t0 = time.perf_counter()
    worst = 0.0
    for fam, shape, a, b in cases:
        lhs, rhs = frullani_identity_check(_cdf(make_parent(fam, shape)), a, b)
        worst = max(worst, abs(lhs - math.log(a / b)), abs(rhs - math.log(a / b)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 5.0
    criterion(1, "Frullani identity", ok, f"max |lhs - ln(a/b)| = {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_c02_closed_form_vs_quadrature(criterion):
    grid = np.array([0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0])
    settings = {
        "f1-exp": [F1Exponential(1.0, 2.0), F1Exponential(0.3, 40.0)],
        "f1-weibull": [F1Weibull(2.0, 1.0, 5.0), F1Weibull(0.7, 0.4, 3.0)],
        "f1-loglogistic": [F1LogLogistic(1.0, 1.0, 2.0), F1LogLogistic(7.0, 0.016, 66.0)],
        "f1-gamma": [F1Gamma(2.0, 1.0, 2.0), F1Gamma(0.6, 0.5, 12.0)],
        "f1-lognormal": [F1LogNormal(1.0, 2.0), F1LogNormal(0.3, 8.0, sigma=0.5)],
        "f1-pareto": [F1Pareto(1.0, 1.0, 2.0), F1Pareto(3.0, 0.7, 9.0)],
        "f1-halfcauchy": [ScaleMixture(make_parent("cauchy"), 1.0, 2.0),
                          ScaleMixture(make_parent("cauchy"), 0.2, 25.0)],
    }
    t0 = time.perf_counter()
    worst = {}
    for name, ms in settings.items():
        err = 0.0
        for m in ms:
            fast, ref = m.sf(grid), np.exp(m.logsf_quad(grid))
            err = max(err, float(np.max(np.abs(fast - ref) / ref)))
        worst[name] = err
    # twice-mixed log-logistic against nested quadrature of the single mixture
    err = 0.0
    for alpha, b, r1, r2 in [(2.0, 1.0, 3.0, 3.0), (1.5, 0.7, 2.0, 5.0)]:
        d = F2LogLogistic(alpha, b, r1, r2)
        for t in grid:
            ref = integrate.quad(lambda v: float(F1LogLogistic(alpha, b * v, r1).sf(t)) / v, 1.0, r2,
                                 epsabs=0, epsrel=1e-12)[0] / math.log(r2)
            err = max(err, abs(float(d.sf(t)) - ref) / ref)
    worst["f2-loglogistic"] = err
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-8 and elapsed < 10.0
    criterion(2, "closed-form vs quadrature survival", ok,
              f"max rel err {max(worst.values()):.1e} ({max(worst, key=worst.get)}), {elapsed:.2f} s")
    assert ok


def test_c03_moments_monte_carlo(criterion):
    n = 10**6
    cases = {"f1-exp": F1Exponential(1.0, 2.0), "f1-weibull(2)": F1Weibull(2.0, 1.0, 2.0),
             "f1-gamma(2)": F1Gamma(2.0, 1.0, 2.0), "f1-loglogistic(4)": F1LogLogistic(4.0, 1.0, 2.0)}
    t0 = time.perf_counter()
    worst, detail = 0.0, []
    for i, (name, m) in enumerate(cases.items()):
        x = m.sample(RandomStream(300 + i), n)
        for k in (1, 2):
            est, se = _mc_mean(x ** k)
            zk = abs(est - m.moment(k)) / se
            worst = max(worst, zk)
            detail.append(f"{name} k={k} |z|={zk:.2f}")
    elapsed = time.perf_counter() - t0
    ok = worst < 4.0 and elapsed < 60.0
    criterion(3, "moments vs Monte Carlo", ok, f"max |z| = {worst:.2f}, {elapsed:.1f} s")
    assert ok, detail


def test_c04_left_tail(criterion):
    errs = {}
    for name, m in {"exponential": F1Exponential(1.0, 2.0), "pareto": F1Pareto(2.0, 0.5, 4.0)}.items():
        f0 = m.parent.density_at_zero
        formula = m.b * (m.r - 1.0) * f0 / m.log_r
        errs[name] = abs(float(m.pdf(1e-8)) - formula) / formula
    ok = max(errs.values()) < 1e-6
    criterion(4, "left-tail pdf limit", ok, ", ".join(f"{k} rel err {v:.1e}" for k, v in errs.items()))
    assert ok


def test_c05_hazard_tail(criterion):
    m = F1Weibull(2.0, 1.0, 5.0)
    p = make_parent("weibull", 2.0)
    grid = np.geomspace(0.1, 100.0, 301)
    ratio_sf = np.exp(p.logsf(m.a * grid) - p.logsf(m.b * grid))
    t_star = float(grid[np.argmax(ratio_sf < 1e-12)])
    weib = float(m.hazard_tail_ratio(t_star))
    pm = F1Pareto(1.0, 1.0, 2.0)
    par = 1e6 * float(pm.hazard(1e6))
    # the approach is like 1 + 1/(b t)^beta, so the 1e-12 survival-ratio trigger is too early
    # for the 2% bound; this part is expected to fail (see the unit test of the exact rate)
    ok = abs(weib - 1) < 0.02 and abs(par - 1) < 0.02
    criterion(5, "hazard tail", ok, f"Weibull h_g/h_b = {weib:.5f} at t = {t_star:.3f}; Pareto t h_g = {par:.6f}")
    assert ok


def test_c06_slash_limit(criterion):
    m = F1Exponential(1.0, 2.0)
    grid = [0.1, 0.5, 1.0, 2.0, 5.0]
    err = max(abs(slash_cdf(m, 1e-4, t) - float(m.cdf(t))) for t in grid)
    ok = err < 1e-4
    criterion(6, "slash limit q -> 0", ok, f"max |diff| = {err:.2e}")
    assert ok


def test_c07_f1_gaussian(criterion):
    d = F1Gaussian(2.0, 1.0)
    x = d.sample(RandomStream(700), 10**6)
    x2, x4 = x ** 2, x ** 4
    m2, se2 = _mc_mean(x2)
    z_var = abs(m2 - d.variance()) / se2
    m4 = float(x4.mean())
    kap_mc = m4 / m2 ** 2 - 3.0
    # delta method on (mean x^2, mean x^4)
    C = np.cov(np.vstack([x2, x4])) / x.size
    g = np.array([-2.0 * m4 / m2 ** 3, 1.0 / m2 ** 2])
    z_kap = abs(kap_mc - d.kurtosis()) / math.sqrt(g @ C @ g)
    rt = abs(kurtosis_to_ratio(d.kurtosis()) - 2.0)
    h = 1e-3
    fd = (d.mgf(h) - 2.0 * d.mgf(0.0) + d.mgf(-h)) / h ** 2
    mgf_err = abs(fd - d.variance())
    ok = z_var < 4 and z_kap < 4 and rt < 1e-10 and mgf_err < 1e-5
    criterion(7, "F1-Gaussian moments", ok, f"var |z| {z_var:.2f}, kurtosis |z| {z_kap:.2f}, "
              f"round trip {rt:.1e}, mgf'' err {mgf_err:.1e}")
    assert ok


def test_c08_skew_variants(criterion):
    s = RandomStream(800)
    sk = SkewF1Gaussian(2.0, 1.0, 1.0)
    est, se = _mc_mean(sk.sample(s, 10**6))
    z_skew = abs(est - sk.mean()) / se
    tp = TwoPieceF1Gaussian(2.0, 1.0, 0.5, mode=0.0)
    jump = abs(float(tp.pdf(0.0)) - float(tp.pdf(-1e-300)))
    y = tp.sample(s, 10**6)
    frac = float(np.mean(y > 0.0))
    z_s = abs(frac - tp.s) / math.sqrt(tp.s * (1 - tp.s) / y.size)
    est2, se2 = _mc_mean(y)
    z_off = abs(est2 - tp.mean_offset()) / se2
    ok = z_skew < 4 and jump < 1e-12 and z_s < 4 and z_off < 4
    criterion(8, "skew variants", ok, f"skew mean |z| {z_skew:.2f}, mode jump {jump:.1e}, "
              f"s |z| {z_s:.2f}, offset |z| {z_off:.2f}")
    assert ok


def test_c09_multivariate(criterion):
    lhs, rhs = biv_identity_check(exponential_product_cdf, 2.0, 1.0, 3.0, 1.0)
    ident = abs(lhs - rhs)
    V = np.array([[1.0, 0.5], [0.5, 1.0]])
    d = F1MultivariateNormal(V, 0.3)
    # 2-D quadrature in polar coordinates
    total = integrate.dblquad(lambda rho, phi: rho * d.pdf([rho * math.cos(phi), rho * math.sin(phi)]),
                              0.0, 2 * math.pi, 0.0, np.inf, epsabs=1e-10, epsrel=1e-10)[0]
    dm = F1MultivariateNormal(np.eye(2), 0.5)
    x = dm.sample(RandomStream(900), 10**6)
    est, se = _mc_mean(x[:, 0] ** 2)
    z_ok = abs(est - dm.moment((2, 0))) / se
    z_printed = abs(est - dm.moment((2, 0), printed=True)) / se
    ok = ident < 1e-5 and abs(total - 1.0) < 1e-6 and z_ok < 4 and z_printed > 4
    criterion(9, "multivariate", ok, f"identity err {ident:.1e}, mass {total:.9f}, "
              f"E X1^2 |z| {z_ok:.2f} with 1/ln(1/b), {z_printed:.0f} without")
    assert ok


@pytest.mark.slow
def test_c10_mle_recovery(criterion):
    truth = {"shape": 7.0, "b": 0.016, "a": 0.016 * 66.0}
    spec = ModelSpec("f1-loglogistic", covariate_link=False)
    gen = ScaleMixture(make_parent("loglogistic", 7.0), 0.016, 66.0)
    t0 = time.perf_counter()

    def one(seed):
        x = gen.sample(RandomStream(seed), 2000)
        ds = SurvivalDataset(x, np.ones(x.size, bool))
        return infer_errors(fit(spec, ds, seed=seed), spec, ds)

    first = one(1000)
    within = {k: abs(math.log(first.estimates[k] / v)) / first.se_or_cv[k] for k, v in truth.items()}
    covered = {k: 0 for k in truth}
    reps = 200
    for i in range(reps):
        res = first if i == 0 else one(1000 + i)
        for k, v in truth.items():
            lo, hi = res.ci95[k]
            covered[k] += lo <= v <= hi
    cov_b = covered["b"] / reps
    elapsed = time.perf_counter() - t0
    ok = max(within.values()) < 3 and 0.90 <= cov_b <= 0.98 and elapsed < 600
    criterion(10, "MLE recovery", ok, "max |err|/SE " + f"{max(within.values()):.2f}; coverage "
              + ", ".join(f"{k} {c / reps:.3f}" for k, c in covered.items()) + f"; {elapsed:.0f} s")
    assert ok


def _null_z(seed, reps, n):
    s = RandomStream(seed)
    return np.array([score_test(s.exponential(n)).z for _ in range(reps)])


def test_c11_score_calibration(criterion):
    z = _null_z(11, 1000, 200)
    mean, sd = float(z.mean()), float(z.std(ddof=1))
    s = RandomStream(1100)
    agree = 0
    for i in range(20):
        x = s.exponential(50 + 10 * i) * (1.0 + i / 10)
        r = score_test(x)
        agree += (np.sign(r.closed_form) == np.sign(r.statistic)
                  and abs(r.closed_form - r.statistic) <= 0.05 * abs(r.statistic))
    ok = -0.1 < mean < 0.1 and 0.9 < sd < 1.1 and agree == 20
    criterion(11, "score test calibration", ok, f"z mean {mean:.4f}, SD {sd:.4f}; closed form agrees on {agree}/20")
    assert ok


@pytest.mark.xfail(strict=True, reason="z is right-skewed at n = 200; normal only asymptotically")
def test_score_z_normal_at_n200():
    assert stats.kstest(_null_z(11, 1000, 200), "norm").pvalue > 0.01


def test_score_z_normal_large_n():
    assert stats.kstest(_null_z(12, 200, 20000), "norm").pvalue > 0.01


def test_c12_flat_direction(criterion):
    rows = []
    ok = True
    for i, (fam, sample) in enumerate([("exp", lambda s: s.exponential(500)),
                                       ("weibull", lambda s: make_parent("weibull", 1.6).sample(s, 500)),
                                       ("loglogistic", lambda s: make_parent("loglogistic", 3.0).sample(s, 500)),
                                       ("lognormal", lambda s: make_parent("lognormal", 0.7).sample(s, 500)),
                                       ("gamma", lambda s: make_parent("gamma", 2.0).sample(s, 500))]):
        x = sample(RandomStream(1200 + i))
        ds = SurvivalDataset(x, np.ones(x.size, bool))
        d = flat_direction_derivative(fam, ds)
        rows.append(f"{fam} {d:.1e}")
        ok &= abs(d) < 1e-4 * len(ds)
    criterion(12, "flat direction at the parent MLE", ok, "; ".join(rows))
    assert ok


def _weaning_paths():
    path = os.environ.get("FRULLANI_WEANING_CSV")
    env = lambda k, d: os.environ.get(f"FRULLANI_WEANING_{k}", d)
    cols = {"time": env("TIME", "duration"), "status": env("STATUS", "delta"), "race": env("RACE", "race"),
            "smoke": env("SMOKE", "smoke"), "yschool": env("YSCHOOL", "yschool"),
            "poverty": env("POVERTY", "poverty")}
    return path, cols


TABLE2 = {"race=2": (-0.155922, 0.07564), "race=3": (-0.0009, 0.09047), "smoke": (-0.109407, 0.06312),
          "yschool": (0.0440546, 0.01878), "poverty": (0.196038, 0.07658)}


def test_c13_weaning_reproduction(criterion):
    path, cols = _weaning_paths()
    if not path:
        criterion(13, "weaning reproduction", None, "FRULLANI_WEANING_CSV not set")
        pytest.skip("weaning dataset not supplied (set FRULLANI_WEANING_CSV)")
    ds = load_dataset(path, cols["time"], cols["status"])
    table = compare_models(ds)
    nll_err = max(abs(table.row(f).neg_log_lik - v[0]) for f, v in TABLE1.items())
    row = table.row("f1-loglogistic")
    ref = TABLE1["f1-loglogistic"]
    par_err = max(abs(row.shape / ref[1] - 1), abs(row.a / ref[2] - 1), abs(row.b / ref[3] - 1))
    full = load_dataset(path, cols["time"], cols["status"],
                        covariate_cols=[cols["smoke"], cols["yschool"], cols["poverty"]],
                        categorical=[cols["race"]])
    spec = ModelSpec("f1-loglogistic", covariate_link=True)
    res = fit(spec, full)
    names = {"race=2": f"{cols['race']}=2", "race=3": f"{cols['race']}=3", "smoke": cols["smoke"],
             "yschool": cols["yschool"], "poverty": cols["poverty"]}
    cov_ok = True
    for key, (est, se) in TABLE2.items():
        got = res.estimates[names[key]]
        cov_ok &= abs(got - est) <= max(0.05 * abs(est), 0.05 * se)
    gain = row.neg_log_lik - res.neg_log_lik
    ok = nll_err <= TABLE1_NLL_TOL and par_err < 0.02 and cov_ok and abs(gain - 7.84) <= 0.5
    criterion(13, "weaning reproduction", ok, f"max -l err {nll_err:.3f}, mixed log-logistic rel err "
              f"{par_err:.4f}, covariates {'ok' if cov_ok else 'off'}, gain {gain:.2f}")
    assert ok


def test_c14_discrepancies(criterion):
    lines = []
    # by-parts survival: integrand must be the density
    m = F1Weibull(2.0, 1.0, 3.0)
    with_sf, with_pdf = printed_survival_by_parts(m, 0.8)
    sf = float(m.sf(0.8))
    ok1 = abs(with_pdf - sf) < 1e-9 and abs(with_sf - sf) > 1e-3
    lines.append(f"by-parts sf {with_pdf:.6f} (printed {with_sf:.6f})")
    # uniform-location kurtosis denominator: moments of the convolution by quadrature
    u = UniformLocationNormal(2.0)
    q = lambda k: integrate.quad(lambda x: x ** k * float(u.pdf(x)), -np.inf, np.inf, epsabs=1e-13)[0]
    kap = q(4) / q(2) ** 2 - 3.0
    ok2 = abs(u.kurtosis() - kap) < 1e-8 and abs(uniform_location_kurtosis(2.0, printed=True) - kap) > 1e-2
    lines.append(f"kurtosis {u.kurtosis():.6f} (printed {uniform_location_kurtosis(2.0, printed=True):.6f})")
    # F1-Gaussian fourth moment constant
    g = F1Gaussian(2.0, 1.0)
    m4 = 2 * integrate.quad(lambda x: x ** 4 * float(g.pdf(x)), 0, np.inf, epsabs=1e-13)[0]
    ok3 = abs(f1_gauss_fourth_moment(2.0, 1.0) - m4) < 1e-8 and abs(f1_gauss_fourth_moment(2.0, 1.0, printed=True) - m4) > 1e-2
    lines.append(f"E X^4 {f1_gauss_fourth_moment(2.0, 1.0):.6f} (printed {f1_gauss_fourth_moment(2.0, 1.0, printed=True):.6f})")
    # multivariate moment factor: check against a 1-D mixture integral of normal moments
    d = F1MultivariateNormal(np.eye(2), 0.5)
    mix = integrate.quad(lambda v: v ** -2 / (v * math.log(2.0)), 0.5, 1.0)[0]
    ok4 = abs(d.moment((2, 0)) - mix) < 1e-10 and abs(d.moment((2, 0), printed=True) - mix) > 1e-2
    lines.append(f"E X1^2 {d.moment((2, 0)):.6f} (printed {d.moment((2, 0), printed=True):.6f})")
    ok = ok1 and ok2 and ok3 and ok4
    criterion(14, "discrepancy checks", ok, "; ".join(lines))
    assert ok
