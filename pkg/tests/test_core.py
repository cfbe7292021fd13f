import math

import numpy as np
import pytest
from scipy import integrate

from frullani import (MixingDensity, RandomStream, ScaleMixture, canonical_scales,
                      frullani_identity_check, make_parent, slash_cdf)
from frullani.core import daughter_eval, daughter_moment, printed_survival_by_parts

EXP = make_parent("exponential")
PARENT_CASES = [("exponential", None), ("weibull", 2.0), ("gamma", 2.0), ("lognormal", 0.8),
                ("loglogistic", 4.0), ("pareto", 3.0), ("halfnormal", None)]


def test_daughter_pdf_exponential():
    m = ScaleMixture(EXP, 1.0, 2.0)
    expected = (math.exp(-1) - math.exp(-2)) / math.log(2)
    ev = daughter_eval(m, 1.0)
    assert ev.pdf == pytest.approx(expected, rel=1e-13)
    assert ev.pdf == pytest.approx(m.pdf_mixture_integral(1.0), rel=1e-9)
    assert ev.cdf + ev.sf == pytest.approx(1.0)
    assert ev.hazard == pytest.approx(ev.pdf / ev.sf)


@pytest.mark.parametrize("family,shape", PARENT_CASES)
def test_pdf_matches_mixture_integral(family, shape):
    m = ScaleMixture(make_parent(family, shape), 0.7, 6.0)
    for t in (0.05, 0.8, 4.0):
        assert float(m.pdf(t)) == pytest.approx(m.pdf_mixture_integral(t), rel=1e-8)


@pytest.mark.parametrize("family,shape", PARENT_CASES)
def test_normalized_and_sf_derivative(family, shape):
    m = ScaleMixture(make_parent(family, shape), 0.5, 4.0)
    total = integrate.quad(lambda t: float(m.pdf(t)), 0, np.inf, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-7)
    t, h = 1.3, 1e-5
    nd = -(float(m.sf(t + h)) - float(m.sf(t - h))) / (2 * h)
    assert nd == pytest.approx(float(m.pdf(t)), rel=1e-6)


def test_degenerate_ratio_reduces_to_parent():
    m = ScaleMixture(EXP, 1.0, 1.0 + 1e-9)
    p = EXP.with_rate(1.0)
    t = np.array([0.1, 1.0, 5.0])
    np.testing.assert_allclose(m.pdf(t), p.pdf(t), rtol=1e-6)
    np.testing.assert_allclose(m.sf(t), p.sf(t), rtol=1e-6)
    assert m.moment(1) == pytest.approx(1.0, rel=1e-6)


def test_pdf_at_zero():
    m = ScaleMixture(EXP, 1.0, 2.0)
    assert m.pdf_at_zero() == pytest.approx(1 / math.log(2), rel=1e-14)
    assert float(m.pdf(1e-8)) == pytest.approx(m.pdf_at_zero(), rel=1e-6)


def test_moments():
    m = ScaleMixture(EXP, 1.0, 2.0)
    mom, cv = daughter_moment(m, 1)
    assert mom == pytest.approx(0.5 / math.log(2), rel=1e-14)
    assert math.isfinite(cv)
    # lies between the parent moments at the two end rates
    m3 = ScaleMixture(EXP, 1.0, 3.0)
    assert 2.0 / 9.0 < m3.moment(2) < 2.0
    # each moment order is the integral of t^k g(t)
    m2 = ScaleMixture(make_parent("weibull", 2.0), 0.8, 3.0)
    oracle = integrate.quad(lambda t: t * t * float(m2.pdf(t)), 0, np.inf, limit=200)[0]
    assert m2.moment(2) == pytest.approx(oracle, rel=1e-8)
    pm = ScaleMixture(make_parent("pareto", 1.0), 1.0, 2.0)
    assert pm.moment(1) == math.inf
    assert math.isnan(daughter_moment(pm, 1)[1])


def test_mgf():
    m = ScaleMixture(EXP, 1.0, 2.0)
    assert m.mgf(0.0) == 1.0
    assert m.mgf(0.5) == pytest.approx(math.log(3) / math.log(2), rel=1e-14)
    h = 1e-5
    assert (m.mgf(h) - m.mgf(-h)) / (2 * h) == pytest.approx(m.moment(1), abs=1e-5)
    with pytest.raises(ValueError):
        m.mgf(1.5)
    g = ScaleMixture(make_parent("gamma", 2.0), 1.0, 2.0)
    oracle = integrate.quad(lambda t: math.exp(0.3 * t) * float(g.pdf(t)), 0, 400.0, limit=200)[0]
    assert g.mgf(0.3) == pytest.approx(oracle, rel=1e-8)


def test_sampler_mean_and_ks():
    m = ScaleMixture(EXP, 1.0, 2.0)
    x = m.sample(RandomStream(7), 10**6)
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - m.moment(1)) < 4 * se
    xs = np.sort(x[:200_000])
    ecdf = np.arange(1, xs.size + 1) / xs.size
    grid = xs[::500]
    assert np.max(np.abs(ecdf[::500] - m.cdf(grid))) < 0.005


def test_mixing_density():
    md = MixingDensity(1.0, 2.0)
    assert md.cdf(1.0) == 0.0 and md.cdf(2.0) == 1.0
    assert integrate.quad(lambda u: float(md.pdf(u)), 1, 2)[0] == pytest.approx(1.0)
    assert md.moment(1) == pytest.approx(1 / math.log(2))


def test_canonical_scales_and_swap_invariance():
    assert canonical_scales(4.0, 1.0) == (1.0, 4.0)
    m1 = ScaleMixture.from_rates(EXP, 3.0, 0.5)
    m2 = ScaleMixture.from_rates(EXP, 0.5, 3.0)
    assert m1 == m2
    with pytest.raises(ValueError):
        canonical_scales(0.0, 1.0)
    with pytest.raises(ValueError):
        ScaleMixture(EXP, 1.0, 0.5)


def test_slash_limits():
    m = ScaleMixture(EXP, 1.0, 2.0)
    assert slash_cdf(m, 1e-4, 1.0) == pytest.approx(float(m.cdf(1.0)), abs=1e-4)
    d = ScaleMixture(EXP, 1.0, 1.0 + 1e-9)
    assert slash_cdf(d, 3.0, 0.7) == pytest.approx(-math.expm1(-0.7), rel=1e-6)
    with pytest.raises(ValueError):
        slash_cdf(m, 0.0, 1.0)


def test_slash_q1_monte_carlo():
    # q = 1: X / V with V uniform on (b, a)
    m = ScaleMixture(EXP, 1.0, 2.0)
    s = RandomStream(3)
    x = s.exponential(10**6) / (1.0 + s.uniform(10**6))
    for t in (0.3, 1.0, 2.5):
        p = float(np.mean(x <= t))
        se = math.sqrt(p * (1 - p) / x.size)
        assert abs(slash_cdf(m, 1.0, t) - p) < 4 * se


def test_frullani_identity():
    F = lambda t: -math.expm1(-t) if t < math.inf else 1.0
    lhs, rhs = frullani_identity_check(F, 2.0, 1.0)
    assert abs(lhs - math.log(2)) < 1e-6 and rhs == pytest.approx(math.log(2))
    assert frullani_identity_check(F, 1.5, 1.5) == (0.0, 0.0)
    W = lambda t: -math.expm1(-min(t, 1e150) ** 2)
    lhs, _ = frullani_identity_check(W, 3.0, 0.5)
    assert abs(lhs - math.log(6)) < 1e-6


def test_hazard_tail_ratio():
    d = ScaleMixture(EXP, 1.0, 1.0 + 1e-9)
    np.testing.assert_allclose(d.hazard_tail_ratio(np.array([0.5, 3.0])), 1.0, atol=1e-6)


def test_hazard_tail_ratio_weibull_rate():
    # with Fbar(at) negligible, h_g / h(t|b) = exp(-y) / (y E1(y)) with y = (b t)^2 for beta = 2,
    # which behaves like 1 + 1/y: the approach to 1 is algebraic, not exponential
    from scipy.special import exp1
    m = ScaleMixture(make_parent("weibull", 2.0), 1.0, 5.0)
    for t in (1.1, 3.0, 8.0):
        y = t * t
        assert float(m.hazard_tail_ratio(t)) == pytest.approx(math.exp(-y) / (y * exp1(y)), rel=1e-9)
    assert abs(float(m.hazard_tail_ratio(8.0)) - 1.0) < 0.02


def test_by_parts_survival_forms():
    # for the exponential parent f = Fbar and both forms agree, so use a Weibull
    m = ScaleMixture(make_parent("weibull", 2.0), 1.0, 3.0)
    with_sf, with_pdf = printed_survival_by_parts(m, 0.8)
    assert with_pdf == pytest.approx(float(m.sf(0.8)), rel=1e-9)
    assert abs(with_sf - float(m.sf(0.8))) > 1e-3
