import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy import integrate, special, stats

from hetnetsim.specfun import (GammaRatioParams, beta, gamma_ccdf_integer_shape,
                               gamma_ratio_ccdf, gamma_ratio_cdf,
                               interference_constant, interference_constant_limit,
                               log_gamma)


def test_log_gamma_known_values():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)
    assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-13)


def test_log_gamma_accuracy_over_range():
    for x in np.logspace(-3, 3, 200):
        npt.assert_allclose(log_gamma(float(x)), special.gammaln(x), rtol=1e-12, atol=1e-300)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(-1.5)


def test_beta_known_values():
    assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert beta(1.5, 0.5) == pytest.approx(math.pi / 2.0, rel=1e-10)
    assert beta(0.5, 1.5) == pytest.approx(beta(1.5, 0.5), rel=1e-14)


def test_beta_matches_scipy():
    for x in (0.1, 0.7, 2.3, 17.0):
        for y in (0.03, 1.0, 5.5):
            npt.assert_allclose(beta(x, y), special.beta(x, y), rtol=1e-10)


def test_beta_domain():
    with pytest.raises(ValueError):
        beta(0.0, 1.0)
    with pytest.raises(ValueError):
        beta(1.0, -2.0)


def test_interference_constant_hand_values():
    # psi=1: (2pi/4) B(1/2, 1/2) = pi^2/2; psi=2: two Beta terms of pi/2 each
    assert interference_constant(4.0, 1).value == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    assert interference_constant(4.0, 2).value == pytest.approx(3 * math.pi ** 2 / 4, rel=1e-12)


def test_interference_constant_quadrature_oracle():
    # independent oracle: C(alpha, 1) = (2pi/a) Int_0^1 t^(2/a-1)(1-t)^(-2/a) dt
    alpha = 3.8
    integrand = lambda t: t ** (2 / alpha - 1) * (1 - t) ** (-2 / alpha)
    oracle, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10)
    oracle *= 2 * math.pi / alpha
    assert err < 1e-8
    value = interference_constant(alpha, 1).value
    npt.assert_allclose(value, oracle, rtol=1e-9)
    assert value == pytest.approx(5.212, abs=5e-4)


def test_interference_constant_reflection_identity():
    for alpha in np.linspace(2.005, 6.0, 50):
        csc = 1.0 / math.sin(2 * math.pi / alpha)
        closed = 2 * math.pi ** 2 * csc / alpha
        value = interference_constant(float(alpha), 1).value
        assert abs(value - closed) / closed < 1e-10


@pytest.mark.parametrize("alpha", [2.5, 3.0, 3.8, 4.0, 5.5])
def test_interference_constant_increasing_in_psi(alpha):
    values = [interference_constant(alpha, psi).value for psi in range(1, 17)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_interference_constant_domain():
    with pytest.raises(ValueError):
        interference_constant(2.0, 1)
    with pytest.raises(ValueError):
        interference_constant(4.0, 0)
    with pytest.raises(ValueError):
        interference_constant(4.0, 1.5)


def test_interference_constant_limit_values():
    assert interference_constant_limit(4.0) == pytest.approx(math.pi ** 1.5, rel=1e-12)
    # oracle through log-Gamma; cross-checked against C(3.8, M)/M^(2/a)
    # which reaches 5.8732 by M=1024
    alpha = 3.8
    expected = math.pi * math.exp(special.gammaln(1 - 2 / alpha))
    assert interference_constant_limit(alpha) == pytest.approx(expected, rel=1e-12)
    assert interference_constant_limit(3.8) == pytest.approx(5.87395, abs=5e-5)
    with pytest.raises(ValueError):
        interference_constant_limit(1.9)


def test_interference_constant_limit_convergence():
    scaled = interference_constant(4.0, 64).value / 64 ** 0.5
    assert abs(scaled - math.pi ** 1.5) / math.pi ** 1.5 < 0.03


def test_gamma_ratio_cdf_exact_points():
    assert gamma_ratio_cdf(GammaRatioParams(1, 1), 1.0) == pytest.approx(0.5, abs=1e-14)
    assert abs(gamma_ratio_cdf(GammaRatioParams(2, 1), 1.0) - 0.25) < 1e-12
    assert gamma_ratio_cdf(GammaRatioParams(4, 2), 0.0) == 0.0


def test_gamma_ratio_cdf_is_valid_cdf():
    grid = np.logspace(-4, 8, 400)
    for k in range(1, 9):
        for m in range(1, 9):
            params = GammaRatioParams(k, m)
            vals = gamma_ratio_cdf(params, grid)
            assert gamma_ratio_cdf(params, 0.0) == 0.0
            assert np.all(np.diff(vals) >= -1e-14)
            assert np.all((vals >= -1e-14) & (vals <= 1.0 + 1e-14))
            # tail mass ~ k/z for m=1, so push the grid end out far enough
            assert 1.0 - vals[-1] < 1e-6


def test_gamma_ratio_ccdf_complements_cdf():
    grid = np.logspace(-3, 3, 50)
    params = GammaRatioParams(4, 2)
    npt.assert_allclose(gamma_ratio_ccdf(params, grid) + gamma_ratio_cdf(params, grid),
                        1.0, rtol=0, atol=1e-12)


@pytest.mark.parametrize("k,m", [(1, 1), (2, 1), (1, 4), (4, 2), (4, 4)])
def test_gamma_ratio_cdf_matches_sampling(k, m):
    rng = np.random.default_rng(1234 + 10 * k + m)
    n = 200_000
    samples = rng.standard_gamma(k, n) / rng.standard_gamma(m, n)
    d, _ = stats.kstest(samples, lambda z: gamma_ratio_cdf(GammaRatioParams(k, m), z))
    assert d < 0.01


def test_gamma_ratio_domain():
    with pytest.raises(ValueError):
        gamma_ratio_cdf(GammaRatioParams(1, 1), -0.5)
    with pytest.raises(ValueError):
        GammaRatioParams(0, 1)
    with pytest.raises(ValueError):
        GammaRatioParams(2, -1)


def test_gamma_ccdf_integer_shape_known_values():
    assert gamma_ccdf_integer_shape(1, math.log(2.0)) == pytest.approx(0.5, rel=1e-14)
    assert gamma_ccdf_integer_shape(2, 1.0) == pytest.approx(2.0 / math.e, rel=1e-12)
    assert gamma_ccdf_integer_shape(4, 0.0) == 1.0


def test_gamma_ccdf_integer_shape_matches_incomplete_gamma():
    zs = np.linspace(0.0, 50.0, 101)
    for delta in range(1, 9):
        ours = gamma_ccdf_integer_shape(delta, zs)
        ref = special.gammaincc(delta, zs)
        npt.assert_allclose(ours, ref, rtol=1e-9, atol=1e-300)


def test_gamma_ccdf_domain():
    with pytest.raises(ValueError):
        gamma_ccdf_integer_shape(0, 1.0)
    with pytest.raises(ValueError):
        gamma_ccdf_integer_shape(2, -1.0)
