import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from mbprocess.special_functions import (
    ConvergenceError,
    PoleError,
    RNGStream,
    bessel_j,
    bessel_j_series,
    gauss_legendre,
    log_gamma,
    log_pochhammer,
    log_q_pochhammer_exp,
    pochhammer,
    q_pochhammer,
    sample_geom,
    sample_geom_trunc,
    sample_pow,
    sample_pow_trunc,
    wright_j,
)


def test_log_gamma_examples():
    assert log_gamma(5.0) == pytest.approx(math.log(24), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    z = 3.7 + 2.1j
    assert abs(log_gamma(z) - complex(mpmath.loggamma(z))) < 1e-13
    with pytest.raises(PoleError):
        log_gamma(-2.0)


def test_log_gamma_real_accuracy():
    x = np.linspace(0.5, 170, 3000)
    rel = np.abs(log_gamma(x) - gammaln(x)) / np.maximum(np.abs(gammaln(x)), 1e-300)
    # gammaln vanishes at 1 and 2; compare absolutely there
    assert np.all((rel < 1e-13) | (np.abs(log_gamma(x) - gammaln(x)) < 1e-14))


def test_log_gamma_left_half_plane():
    # the reflection branch may differ from the principal one by 2 pi i; exp must agree
    for z in (-0.3 + 0.2j, -2.7 - 1.5j, -5.5 + 25j, 0.2 + 300j, -0.4 - 40j):
        ref = complex(mpmath.gamma(z))
        assert abs(np.exp(log_gamma(z)) / ref - 1) < 1e-12
    assert np.exp(log_gamma(-1.5 + 0j)).real == pytest.approx(float(mpmath.gamma(-1.5)), rel=1e-13)


@settings(max_examples=60)
@given(st.floats(-8, 8), st.floats(0.1, 30))
def test_log_gamma_recurrence(re, im):
    z = complex(re, im)
    d = log_gamma(z + 1) - log_gamma(z) - np.log(z)
    # equality modulo 2 pi i
    k = round(d.imag / (2 * math.pi))
    assert abs(d - 2j * math.pi * k) < 1e-12


def test_pochhammer_examples():
    assert pochhammer(2, 3) == 24
    assert pochhammer(0.5, 0) == 1
    assert pochhammer(1.25, 4) == pytest.approx(1.25 * 2.25 * 3.25 * 4.25, rel=1e-15)
    assert log_pochhammer(1.25, 4) == pytest.approx(math.log(1.25 * 2.25 * 3.25 * 4.25), rel=1e-13)


def test_q_pochhammer_examples():
    assert q_pochhammer(0.7, 0.2, 0) == 1
    assert q_pochhammer(0.5, 0.5, 2) == 0.375
    assert q_pochhammer(1, 0.3, 3) == 0
    s, lg = log_q_pochhammer_exp(math.log(0.5), math.log(0.5), 2)
    assert s == 1 and math.exp(lg) == pytest.approx(0.375, rel=1e-15)


@given(st.floats(-2, 2), st.floats(0.01, 0.99), st.integers(0, 12), st.data())
def test_q_pochhammer_split(x, q, n, data):
    m = data.draw(st.integers(0, n))
    lhs = q_pochhammer(x, q, n)
    rhs = q_pochhammer(x, q, m) * q_pochhammer(x * q ** m, q, n - m)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


def test_wright_examples():
    assert wright_j(1, 1, 0) == 1.0
    assert wright_j(1, 1, 1.0) == pytest.approx(bessel_j(0, 2.0), abs=1e-14)
    assert wright_j(2, 1, 1.0) == pytest.approx(bessel_j(1, 2.0), abs=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_wright_bessel_identity(alpha):
    for x in np.linspace(0.05, 20, 40):
        lhs = wright_j(alpha + 1, 1, x)
        rhs = x ** (-alpha / 2) * bessel_j(alpha, 2 * math.sqrt(x))
        assert abs(lhs - rhs) < 1e-10


def test_bessel_examples():
    assert bessel_j(0, 0) == 1.0
    assert bessel_j(1, 0) == 0.0
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10
    for a in (0.0, 1.0, 2.5):
        for x in (0.1, 1.0, 5.0):
            assert abs(bessel_j(a, x) - bessel_j_series(a, x)) < 1e-12
    for x in np.linspace(0, 50, 11):
        assert abs(bessel_j(0.5, x) - float(mpmath.besselj(0.5, x))) < 1e-12


def test_gauss_legendre():
    x, w = gauss_legendre(1)
    assert x[0] == 0 and w[0] == 2
    x, w = gauss_legendre(2)
    assert np.allclose(sorted(x), [-1 / math.sqrt(3), 1 / math.sqrt(3)]) and np.allclose(w, 1)
    x, w = gauss_legendre(20)
    assert abs(np.sum(w * x ** 6) - 2 / 7) < 1e-14
    assert abs(w.sum() - 2) < 1e-14


def test_rng_reproducible_and_distinct():
    a = RNGStream(42, 3).random(5)
    b = RNGStream(42, 3).random(5)
    c = RNGStream(42, 4).random(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    u = RNGStream(1).uniform_open(10000)
    assert u.min() > 0 and u.max() <= 1


def test_geometric_samplers():
    rng = RNGStream(5)
    assert sample_geom(0.0, rng) == 0
    draws = sample_geom(0.5, rng, size=100000)
    assert abs(draws.mean() - 1.0) < 0.02
    assert all(sample_geom_trunc(0.5, 0, rng) == 0 for _ in range(50))
    tr = np.array([sample_geom_trunc(0.7, 3, rng) for _ in range(40000)])
    p = 0.3 * 0.7 ** np.arange(4) / (1 - 0.7 ** 4)
    emp = np.bincount(tr, minlength=4) / tr.size
    assert tr.max() <= 3 and np.all(np.abs(emp - p) < 0.01)


def test_power_samplers():
    rng = RNGStream(9)
    u = np.sort(sample_pow(1.0, rng, size=100000))
    assert np.max(np.abs(u - np.arange(1, u.size + 1) / u.size)) < 0.01
    assert abs(sample_pow(2.0, rng, size=100000).mean() - 2 / 3) < 0.01
    tr = [sample_pow_trunc(2.0, 0.99, rng) for _ in range(1000)]
    assert min(tr) >= 0.99 and max(tr) <= 1.0


def test_wright_nonconvergence_flag():
    with pytest.raises(ConvergenceError):
        wright_j(1, 1, 1e4, max_terms=100)
