import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbprocess.core_types import DomainError, ModelParams, slice_length_bound
from mbprocess.kernels import (
    FoxHSpec,
    bessel_kernel,
    borodin_finite_kernel,
    check_hard_edge,
    check_q_to_1,
    conjugate,
    fox_h,
    fox_h_01_11_series,
    kernel_c,
    kernel_c_borodin_conj,
    kernel_c_grid,
    kernel_d,
    kernel_he,
    kernel_he_exp,
    kernel_he_exp_grid,
    kernel_he_fox,
    kernel_he_grid,
    trace_c,
    trace_d,
)
from mbprocess.oracle import TransferOracle, choose_cap
from mbprocess.special_functions import ConvergenceError, wright_j

P22 = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.0, M=2, N=2)


@pytest.fixture(scope="module")
def oracle22():
    return TransferOracle.build(P22, choose_cap(P22).cap)


# ------------------------------------------------------------------ K_d

def test_kernel_d_frozen_limit():
    # a -> 0 freezes every particle at 0..M-1; the residue sums cancel like a^{-M},
    # so the limit is followed down to a = 1e-3 rather than evaluated at a = 0
    prev = None
    for a in (1e-1, 1e-2, 1e-3):
        p = ModelParams(q=0.5, a=a, eta=1.0, theta=1.5, M=3, N=4)
        err = max(abs(kernel_d(p, t, k, t, l) - float(k == l and k < p.M))
                  for t in (-2, 0, 2) for k in range(5) for l in range(5))
        # off-diagonal entries carry the gauge a^{(k-l)/2}, so the rate is sqrt(a)
        assert err < 2 * math.sqrt(a)
        if prev is not None:
            assert err < prev
        prev = err


def test_kernel_d_diagonal_matches_oracle(oracle22):
    for k in range(6):
        assert abs(kernel_d(P22, 0, k, 0, k) - oracle22.correlation([(0, k)])) < 1e-6


@pytest.mark.parametrize("pts", [
    [(0, 0), (0, 2)], [(0, 1), (1, 1)], [(1, 1), (-1, 2)], [(-1, 1), (1, 0)], [(1, 0), (0, 3)],
])
def test_kernel_d_two_point_determinants(oracle22, pts):
    K = np.array([[kernel_d(P22, s, k, t, l) for (t, l) in pts] for (s, k) in pts])
    assert abs(np.linalg.det(K) - oracle22.correlation(pts)) < 1e-5


@pytest.mark.parametrize("params", [
    P22,
    ModelParams(q=0.6, a=0.4, eta=0.5, theta=2.0, M=2, N=3),
    ModelParams(q=0.4, a=0.7, eta=1.0, theta=1.0, M=3, N=3),
])
def test_kernel_d_trace(params):
    for t in range(-params.M + 1, params.N):
        assert abs(trace_d(params, t) - params.M) < 1e-8


def test_kernel_d_diagonal_in_unit_interval():
    p = ModelParams(q=0.6, a=0.6, eta=1.0, theta=0.5, M=3, N=4)
    for t in (-2, 0, 3):
        for k in range(30):
            assert -1e-10 <= kernel_d(p, t, k, t, k) <= 1 + 1e-10


def test_kernel_d_rejects_bad_times():
    with pytest.raises(DomainError):
        kernel_d(P22, 2, 0, 0, 0)
    with pytest.raises(DomainError):
        kernel_d(P22, 0, -1, 0, 0)


# ------------------------------------------------------------------ K_c

def test_kernel_c_single_particle():
    for al, eta, th in ((0.0, 1.0, 1.0), (1.5, 0.5, 2.0)):
        p = ModelParams(q=0.5, a=0.5, eta=eta, theta=th, M=1, N=1, alpha=al)
        c = al + eta / 2 + th / 2
        for x in (0.1, 0.5, 0.9):
            assert kernel_c(p, 0, x, 0, x) == pytest.approx(c * x ** (c - 1), rel=1e-12)


@pytest.mark.parametrize("al, th, N", [(0.0, 1.0, 2), (1.0, 2.0, 3), (0.5, 0.5, 4)])
def test_kernel_c_borodin(al, th, N):
    p = ModelParams(q=0.5, a=0.5, eta=1.0, theta=th, M=N, N=N, alpha=al)
    for x, y in ((0.3, 0.6), (0.8, 0.2), (0.5, 0.5)):
        assert abs(kernel_c_borodin_conj(p, x, y) - borodin_finite_kernel(al, th, N, x, y)) < 1e-10


@pytest.mark.parametrize("params", [
    ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.0, M=1, N=2, alpha=0.0),
    ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.5, M=2, N=3, alpha=0.5),
    ModelParams(q=0.5, a=0.5, eta=0.5, theta=2.0, M=3, N=4, alpha=1.0),
])
def test_kernel_c_trace(params):
    for t in range(-params.M + 1, params.N):
        assert abs(trace_c(params, t) - slice_length_bound(t, params.M, params.N)) < 1e-6


def test_kernel_c_grid_matches_pointwise():
    p = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.5, M=2, N=3, alpha=0.5)
    xs, ys = np.array([0.2, 0.7]), np.array([0.4, 0.9, 0.1])
    G = kernel_c_grid(p, 1, xs, -1, ys)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert G[i, j] == pytest.approx(kernel_c(p, 1, x, -1, y), rel=1e-13)
    with pytest.raises(DomainError):
        kernel_c(p, 0, 1.0, 0, 0.5)


def _by_point(rows, n_pts, n_eps):
    return [[rows[i * n_pts + j].error for i in range(n_eps)] for j in range(n_pts)]


def test_q_to_1_limit():
    p = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.0, M=3, N=5, alpha=0.0)
    pts = [(0.3, 0.6), (0.7, 0.2), (0.5, 0.5)]
    eps = [1e-1, 1e-2, 1e-3]
    for errs in _by_point(check_q_to_1(p, 0, 0, pts, eps), len(pts), len(eps)):
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-2


@pytest.mark.parametrize("s, t", [(0, 0), (1, -1), (-1, 2), (2, 1)])
def test_q_to_1_first_order_on_lattice(s, t):
    # off-diagonal points only: for s > t the correction switches branch at x = y,
    # and the discrete and continuous sides put the tie on opposite branches
    p = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.5, M=3, N=5, alpha=0.5)
    pts = [(0.3, 0.6), (0.8, 0.4), (0.45, 0.15)]
    eps = [4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3]
    rows = check_q_to_1(p, s, t, pts, eps, snap=True)
    for j in range(len(pts)):
        sub = [rows[i * len(pts) + j] for i in range(len(eps))]
        abs_err = [r.error * abs(r.reference) for r in sub]
        for r, e in zip(sub, abs_err):
            assert e < 40 * max(1.0, abs(r.reference)) * r.param
        assert abs_err[-1] < max(abs_err[0] / 4, 1e-3)


# ------------------------------------------------------------------ K_he

def test_kernel_he_bessel_reduction():
    g = np.logspace(-2, 1, 10)
    for al in (0.0, 1.0, 2.5):
        K = kernel_he_grid(al, 1.0, 1.0, 0, g, 0, g)
        B = np.array([[bessel_kernel(al, x, y) for y in g] for x in g])
        assert np.max(np.abs(K - B)) < 1e-8


def test_kernel_he_near_origin():
    assert kernel_he(0.0, 1.0, 1.0, 0, 1e-10, 0, 1e-10) == pytest.approx(1.0, abs=1e-8)


def test_kernel_he_equal_times_have_no_correction():
    # the s > t correction is the only asymmetry in time; s = t uses the series alone
    a = kernel_he(1.0, 1.0, 2.0, 1, 0.7, 1, 0.3)
    b = kernel_he(1.0, 1.0, 2.0, 1, 0.7, 0, 0.3)
    assert np.isfinite(a) and np.isfinite(b)


def test_hard_edge_limit():
    rows = check_hard_edge(1.0, 1.0, 1.0, 0, 0, [(1.0, 1.0)], [8, 16, 32, 64])
    errs = [r.error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 5e-2


def test_kernel_he_exp_identity():
    xs = np.array([-2.0, 0.0, 3.5])
    ys = np.array([-1.0, 1.0, 12.0])
    G = kernel_he_exp_grid(0.5, 1.0, 2.0, xs, ys)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            want = math.exp(-x / 2 - y / 2) * kernel_he(0.5, 1.0, 2.0, 0, math.exp(-x), 0, math.exp(-y))
            assert kernel_he_exp(0.5, 1.0, 2.0, x, y) == want
            # the grid truncates the series once for all points
            assert G[i, j] == pytest.approx(want, rel=1e-11)


def test_kernel_he_exp_finite_and_decaying():
    xs = np.linspace(-3, 30, 34)
    d = np.array([kernel_he_exp(0.0, 1.0, 1.0, x, x) for x in xs])
    assert np.all(np.isfinite(d)) and np.all(d >= -1e-10)
    for al, eta, th in ((0.0, 1.0, 1.0), (1.0, 0.5, 2.0)):
        gam = (al + min(eta, th)) / 2
        big = np.linspace(2, 30, 15)
        vals = np.array([abs(kernel_he_exp(al, eta, th, x, x)) for x in big])
        C = np.max(vals * np.exp(gam * big))
        assert np.all(vals <= C * np.exp(-gam * big) * (1 + 1e-12))
        assert C < 10


def test_bessel_kernel_examples():
    assert bessel_kernel(0.0, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    for al in (0.0, 1.0, 2.5):
        for x, y in ((0.5, 3.0), (9.0, 1.2)):
            assert bessel_kernel(al, x, y) == bessel_kernel(al, y, x)
    g = np.linspace(0.1, 10, 12)
    for x in g:
        for y in g:
            assert abs(bessel_kernel(1.0, x, y) - bessel_kernel(1.0, x, y, order=128)) < 1e-12


def test_conjugate_wrapper():
    f = conjugate(lambda x, y: x + y, 0.5)
    assert f(4.0, 1.0) == pytest.approx(10.0)


# ------------------------------------------------------------------ Fox H

def test_fox_h_spec_validation():
    with pytest.raises(DomainError):
        FoxHSpec(0, 0)
    with pytest.raises(DomainError):
        FoxHSpec(2, 0, (), ((1.0, 1.0),))
    with pytest.raises(DomainError):
        FoxHSpec(0, 1, ((1.0, -1.0),), ((1.0, 1.0),))


def test_fox_h_matches_wright_series():
    # the first pole of Gamma(a - e z) sits at z = a/e; the contour stays left of it
    for (a, e, b, c, delta, x) in ((3.0, 1.0, 3.0, 1.0, 2.5, 0.2), (2.0, 2.0, 1.5, 1.0, 0.5, 3.0),
                                   (1.5, 1.5, 2.0, 0.5, 0.3, 1.0)):
        spec = FoxHSpec(0, 1, ((a, e),), ((b, c),), delta=delta)
        assert fox_h(spec, x) == pytest.approx(fox_h_01_11_series(a, e, b, c, x), rel=1e-8, abs=1e-10)
    assert fox_h_01_11_series(1.0, 1.0, 1.0, 1.0, 1.0) == pytest.approx(wright_j(2.0, 1.0, 1.0), rel=1e-14)


def test_fox_h_flags_growth():
    # c > e: the gamma ratio grows along the vertical line
    with pytest.raises(ConvergenceError):
        fox_h(FoxHSpec(0, 1, ((2.0, 1.0),), ((2.0, 2.0),), delta=1.0), 0.5)


def test_fox_h_mellin_shift():
    # x^sigma H[x | (a, e); (b, c)] = H[x | (a + e sigma, e); (b + c sigma, c)] with delta shifted by -sigma
    a, e, b, c, delta, x, sig = 3.0, 1.0, 3.0, 1.0, 2.5, 0.3, 0.5
    base = fox_h(FoxHSpec(0, 1, ((a, e),), ((b, c),), delta=delta), x)
    shifted = fox_h(FoxHSpec(0, 1, ((a + e * sig, e),), ((b - c * sig, c),), delta=delta + sig), x)
    assert x ** sig * shifted == pytest.approx(base, rel=1e-7)


def test_fox_h_reassembles_kernel_he():
    ref = kernel_he(3.0, 1.0, 1.0, 0, 0.5, 0, 1.0)
    got = kernel_he_fox(3.0, 1.0, 1.0, 0, 0.5, 0, 1.0, delta_f=1.9, delta_g=-1.9)
    assert abs(got - ref) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 8), st.floats(0.05, 8))
def test_kernel_he_symmetric_when_eta_equals_theta(x, y):
    # with eta = theta and s = t the series is symmetric in (x, y)
    assert kernel_he(1.0, 1.0, 1.0, 0, x, 0, y) == pytest.approx(kernel_he(1.0, 1.0, 1.0, 0, y, 0, x), rel=1e-10, abs=1e-14)
