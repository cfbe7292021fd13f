import math

import numpy as np
import pytest
from scipy import integrate, stats

from frullani import (F1Cauchy, F1Gaussian, RandomStream, SkewF1Gaussian, TwoPieceF1Gaussian,
                      UniformLocationNormal, kurtosis_to_ratio)
from frullani.real_line import (f1_gauss_fourth_moment, ratio_kurtosis, twopiece_moment_series,
                                uniform_location_kurtosis)

SQRT_2PI = math.sqrt(2 * math.pi)


def _quad(f, lo=-np.inf, hi=np.inf):
    return integrate.quad(lambda x: float(f(x)), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)[0]


def test_f1_gaussian_pdf_at_zero_and_normalization():
    d = F1Gaussian(2.0, 1.0)
    expected = 1.0 / (math.log(2) * SQRT_2PI)
    assert float(d.pdf(0.0)) == pytest.approx(expected, rel=1e-12)
    assert d.pdf_at_zero() == pytest.approx(expected, rel=1e-12)
    assert abs(_quad(F1Gaussian(5.0, 1.0).pdf, 0, np.inf) * 2 - 1.0) < 1e-8


def test_f1_gaussian_degenerate_is_normal():
    d = F1Gaussian(1.0 + 1e-9, 1.0)
    x = np.array([-2.0, 0.0, 0.7])
    np.testing.assert_allclose(d.pdf(x), stats.norm.pdf(x), rtol=1e-6)
    np.testing.assert_allclose(d.cdf(x), stats.norm.cdf(x), rtol=1e-6)


def test_f1_gaussian_moments_exact():
    d = F1Gaussian(2.0, 1.0)
    assert d.variance() == pytest.approx(0.75 / (2 * math.log(2)), rel=1e-14)
    assert d.variance() == pytest.approx(_quad(lambda x: x * x * d.pdf(x)), rel=1e-9)
    assert d.fourth_moment() == pytest.approx(_quad(lambda x: x ** 4 * d.pdf(x)), rel=1e-9)
    assert d.kurtosis() == pytest.approx(3 * (5 / 3) * math.log(2) - 3, rel=1e-13)
    assert ratio_kurtosis(1.0) == 0.0
    assert f1_gauss_fourth_moment(2.0, 1.0) == pytest.approx(d.fourth_moment())
    assert f1_gauss_fourth_moment(2.0, 1.0, printed=True) == pytest.approx(d.fourth_moment() / SQRT_2PI)


def test_f1_gaussian_cdf():
    d = F1Gaussian(3.0, 0.5, loc=1.0)
    assert float(d.cdf(1.0)) == 0.5
    for x in (-2.0, 0.3, 4.0):
        lo = -np.inf
        assert float(d.cdf(x)) == pytest.approx(_quad(d.pdf, lo, x), abs=1e-10)


def test_f1_gaussian_mgf():
    d = F1Gaussian(2.0, 1.0)
    assert d.mgf(0.8) == pytest.approx(_quad(lambda x: math.exp(0.8 * x) * d.pdf(x), -80, 80), rel=1e-9)
    h = 1e-3
    second = (d.mgf(h) - 2 * d.mgf(0.0) + d.mgf(-h)) / h ** 2
    assert abs(second - d.variance()) < 1e-5


def test_kurtosis_to_ratio():
    assert kurtosis_to_ratio(ratio_kurtosis(2.0)) == pytest.approx(2.0, abs=1e-8)
    r = kurtosis_to_ratio(3.0)
    assert abs(ratio_kurtosis(r) - 3.0) < 1e-10
    assert kurtosis_to_ratio(1e-8) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValueError):
        kurtosis_to_ratio(-1.0)


def test_skew_reduces_and_antisymmetry():
    x = np.linspace(-4, 4, 9)
    np.testing.assert_allclose(SkewF1Gaussian(2.0, 1.0, 0.0).pdf(x), F1Gaussian(2.0, 1.0).pdf(x), rtol=1e-15)
    assert SkewF1Gaussian(2.0, 1.0, 1.3).mean() == pytest.approx(-SkewF1Gaussian(2.0, 1.0, -1.3).mean())


def test_skew_moments_by_quadrature():
    d = SkewF1Gaussian(2.0, 1.0, 1.0)
    assert _quad(d.pdf) == pytest.approx(1.0, abs=1e-9)
    assert d.mean() == pytest.approx(_quad(lambda x: x * d.pdf(x)), rel=1e-9)
    assert d.third_moment() == pytest.approx(_quad(lambda x: x ** 3 * d.pdf(x)), rel=1e-9)
    tiny = SkewF1Gaussian(2.0, 1.0, 1e-6)
    assert tiny.third_moment() == pytest.approx(_quad(lambda x: x ** 3 * tiny.pdf(x)), rel=1e-5)
    assert float(d.cdf(0.4)) == pytest.approx(_quad(d.pdf, -np.inf, 0.4), abs=1e-9)


def test_skew_sampler_mean(stream):
    d = SkewF1Gaussian(2.0, 1.0, 1.0)
    x = d.sample(stream, 200_000)
    assert abs(x.mean() - d.mean()) < 4 * x.std() / math.sqrt(x.size)


def test_twopiece():
    sym = TwoPieceF1Gaussian(2.0, 1.0, 1.0)
    x = np.linspace(-3, 3, 7)
    assert sym.s == 0.5
    np.testing.assert_allclose(sym.pdf(x), F1Gaussian(2.0, 1.0).pdf(x), rtol=1e-14)
    d = TwoPieceF1Gaussian(2.0, 1.0, 0.5, mode=0.3)
    assert TwoPieceF1Gaussian(2.0, 1.0, 0.5).s < 0.5 < TwoPieceF1Gaussian(2.0, 0.5, 1.0).s
    assert float(d.pdf(0.3)) == pytest.approx(float(d.pdf(0.3 - 1e-13)), abs=1e-12)
    assert _quad(d.pdf) == pytest.approx(1.0, abs=1e-9)
    assert d.mean_offset() == pytest.approx(d.moment(1), rel=1e-12)
    for n in (1, 2, 3, 4):
        assert twopiece_moment_series(2.0, 1.0, 0.5, n) == pytest.approx(
            _quad(lambda v: (v - 0.3) ** n * d.pdf(v)), rel=1e-8)
    assert float(d.cdf(0.3)) == pytest.approx(1 - d.s)


def test_uniform_location_normal():
    d = UniformLocationNormal(2.0)
    assert _quad(d.pdf) == pytest.approx(1.0, abs=1e-10)
    m2 = _quad(lambda x: x * x * d.pdf(x))
    m4 = _quad(lambda x: x ** 4 * d.pdf(x))
    assert d.variance() == pytest.approx(m2, rel=1e-9)
    assert d.kurtosis() == pytest.approx(m4 / m2 ** 2 - 3, rel=1e-8)
    assert d.kurtosis() == pytest.approx(-96 / 245, rel=1e-13)
    assert uniform_location_kurtosis(2.0, printed=True) == pytest.approx(-0.4897959183673469)
    small = UniformLocationNormal(1e-6)
    np.testing.assert_allclose(small.pdf([0.0, 1.0]), stats.norm.pdf([0.0, 1.0]), rtol=1e-9)
    assert float(d.cdf(0.9)) == pytest.approx(_quad(d.pdf, -np.inf, 0.9), abs=1e-10)


def test_f1_cauchy():
    d = F1Cauchy(1.0, 2.0)
    assert float(d.pdf(0.0)) == pytest.approx(1 / (math.pi * math.log(2)), rel=1e-14)
    assert float(d.cdf(0.0)) == 0.5
    assert float(d.cdf(np.inf)) == 1.0
    for x in (0.5, 3.0, 40.0):
        assert float(d.sf(x)) == pytest.approx(_quad(d.pdf, x, np.inf), rel=1e-9)
    deg = F1Cauchy(1.0, 1.0 + 1e-9)
    np.testing.assert_allclose(deg.pdf([0.0, 2.0]), stats.cauchy.pdf([0.0, 2.0]), rtol=1e-6)


def test_samplers(stream):
    g = F1Gaussian(2.0, 1.0).sample(stream, 200_000)
    v = g.var()
    se = math.sqrt((np.mean(g ** 4) - v * v) / g.size)
    assert abs(v - F1Gaussian(2.0, 1.0).variance()) < 4 * se
    d = TwoPieceF1Gaussian(2.0, 1.0, 0.5)
    frac = float(np.mean(d.sample(stream, 200_000) > 0))
    assert abs(frac - d.s) < 4 * math.sqrt(d.s * (1 - d.s) / 200_000)
    sk = SkewF1Gaussian(2.0, 1.0, 0.0).sample(stream, 200_000)
    c3 = sk ** 3
    assert abs(c3.mean()) < 4 * c3.std() / math.sqrt(sk.size)
