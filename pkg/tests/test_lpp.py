import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mbprocess.core_types import DomainError, ModelParams
from mbprocess.growth_sampler import LocalRule, sample_weights_geo
from mbprocess.lpp import EmpiricalCDF, greene_check, ks_distance, lpp_geo, lpp_pow, monte_carlo_lpp
from mbprocess.oracle import exhaustive_lpp
from mbprocess.special_functions import RNGStream


def test_lpp_geo_examples():
    assert lpp_geo(np.array([[5]]), "diag") == 5
    assert lpp_geo(np.array([[5]]), "antidiag") == 5
    assert lpp_geo(np.array([[1, 2], [3, 4]]), "diag") == 8
    assert lpp_geo(np.zeros((3, 4), dtype=int)) == 0


def test_lpp_pow_examples():
    assert lpp_pow(np.array([[0.3]])) == pytest.approx(0.3, rel=1e-15)
    assert lpp_pow(np.array([[0.5, 0.6], [0.7, 0.8]])) == pytest.approx(0.24, rel=1e-14)
    e = 1e-3
    assert lpp_pow(np.full((3, 5), 1 - e)) == pytest.approx((1 - e) ** 7, rel=1e-12)
    with pytest.raises(DomainError):
        lpp_pow(np.array([[0.5, 0.0]]))


shapes = st.tuples(st.integers(1, 5), st.integers(1, 4)).filter(lambda s: s[0] + s[1] <= 9)


@settings(max_examples=200)
@given(shapes.flatmap(lambda s: arrays(np.int64, s, elements=st.integers(0, 9))),
       st.sampled_from(["diag", "antidiag"]))
def test_lpp_geo_matches_exhaustive(w, direction):
    assert lpp_geo(w, direction) == exhaustive_lpp(w, direction)


@settings(max_examples=200)
@given(shapes.flatmap(lambda s: arrays(float, s, elements=st.floats(0.01, 1.0))),
       st.sampled_from(["diag", "antidiag"]))
def test_lpp_pow_is_min_product(w, direction):
    # min product = exp(-max sum of -log w)
    ref = math.exp(-exhaustive_lpp(-np.log(w), direction))
    assert lpp_pow(w, direction) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("rule", ["row", "col", "push"])
@pytest.mark.parametrize("flavor", ["geo", "pow"])
def test_greene_random_instances(rule, flavor):
    gen = np.random.default_rng(5)
    report = None
    for k in range(340):
        M = int(gen.integers(1, 9))
        N = int(gen.integers(M, 9))
        params = ModelParams(q=float(gen.uniform(0.2, 0.9)), a=float(gen.uniform(0.1, 0.9)),
                             eta=float(gen.uniform(0.3, 2)), theta=float(gen.uniform(0.3, 2)),
                             M=M, N=N, alpha=float(gen.uniform(0, 2)))
        report = greene_check(params, LocalRule.parse(rule, flavor), RNGStream(k), 1, report)
    assert report.runs == 340 and report.ok, report.failures[:3]


def test_l1_l2_equal_in_distribution():
    params = ModelParams(q=0.6, a=0.8, eta=1.0, theta=0.5, M=4, N=6)
    rng = RNGStream(17)
    l1, l2 = [], []
    for _ in range(10000):
        w = sample_weights_geo(params, rng)
        l1.append(lpp_geo(w, "diag"))
        l2.append(lpp_geo(w, "antidiag"))
    F, G = EmpiricalCDF(l1), EmpiricalCDF(l2)
    assert ks_distance(F, G) < 0.03


def test_empirical_cdf():
    F = EmpiricalCDF([3.0, 1.0, 2.0, 2.0])
    assert F(0.5) == 0 and F(1.0) == 0.25 and F(2.0) == 0.75 and F(10) == 1
    with pytest.raises(DomainError):
        EmpiricalCDF([])


def test_ks_distance_examples():
    F = EmpiricalCDF(RNGStream(2).random(100000))
    assert ks_distance(F, F) == 0
    assert ks_distance(F, lambda x: np.clip(x, 0, 1), left_limits=True) < 0.01
    c = EmpiricalCDF(np.full(50, 2.0))
    assert ks_distance(c, lambda x: (np.asarray(x) >= 2.0).astype(float)) <= 1 / 50


def test_monte_carlo_single_cell_law():
    params = ModelParams(q=0.5, a=0.5, eta=1.0, theta=2.0, M=1, N=1, alpha=0.5)
    res = monte_carlo_lpp(params, "pow_square", 100000, seed=3)
    gam = 0.5 + 0.5 + 1.0
    assert ks_distance(EmpiricalCDF(res.raw), lambda r: np.asarray(r) ** gam, left_limits=True) < 0.01


def test_monte_carlo_geo_small_a_and_determinism():
    # alpha large means a = q^alpha tiny, so L is almost surely 0
    params = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.0, M=1, N=1, alpha=40.0)
    res = monte_carlo_lpp(params, "geo_infinite", 200, seed=1)
    assert np.all(res.raw == 0)
    params = ModelParams(q=0.7, a=0.5, eta=1.0, theta=1.0, M=1, N=1, alpha=0.5)
    r1 = monte_carlo_lpp(params, "geo_infinite", 50, seed=9)
    r2 = monte_carlo_lpp(params, "geo_infinite", 50, seed=9)
    assert np.array_equal(r1.raw, r2.raw) and np.array_equal(r1.scaled, r2.scaled)
    eps = -math.log(0.7)
    assert np.allclose(r1.scaled, eps * r1.raw + 2 * math.log(eps), rtol=1e-14)


def test_monte_carlo_rejects_unknown_mode():
    params = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.0, M=1, N=1)
    with pytest.raises(DomainError):
        monte_carlo_lpp(params, "square", 10, seed=0)
