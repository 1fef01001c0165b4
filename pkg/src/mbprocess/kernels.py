"""Correlation kernels of the discrete, continuous and hard-edge processes.

All kernels are evaluated from finite residue sums (discrete, continuous) or
entire double series (hard edge). The double sums are separable,

    sum_{i,j} X_i(x) W_ij Y_j(y),

so grids of points cost two matrix products once the term vectors are built
in log space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate as spi

from .core_types import DomainError, ModelParams, pm
from .special_functions import (
    ConvergenceError,
    bessel_j,
    gauss_legendre,
    log_gamma,
    log_pochhammer,
    log_q_pochhammer_exp,
    pochhammer,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelEval:
    """A kernel at fixed times, callable on arrays of positions."""

    func: Callable
    s: int
    t: int
    domain: tuple[float, float]
    label: str = ""

    def __call__(self, u, v):
        return self.func(u, v)


def _lgamma(x):
    return np.real(log_gamma(np.asarray(x, dtype=float)))


def _signed_sum(signs: np.ndarray, logs: np.ndarray) -> float:
    if logs.size == 0:
        return 0.0
    m = float(np.max(logs))
    if not np.isfinite(m):
        return 0.0
    return math.fsum((signs * np.exp(logs - m)).ravel()) * math.exp(m)


# ================================================================ discrete

def _log1m_exp(e):
    """log(1 - e^e) for e < 0, vectorized."""
    e = np.asarray(e, dtype=float)
    return np.log(-np.expm1(e))


def _log_qfact(lu: float, n: int) -> np.ndarray:
    """[log (u; u)_m for m = 0..n] with u = e^{lu}."""
    out = np.zeros(n + 1)
    if n > 0:
        out[1:] = np.cumsum(_log1m_exp(lu * np.arange(1, n + 1)))
    return out


def _logqp_vec(start: np.ndarray, lu: float, n: int) -> np.ndarray:
    """log (e^{start}; e^{lu})_n for each entry of start (all factors positive)."""
    start = np.asarray(start, dtype=float)
    if n <= 0:
        return np.zeros_like(start)
    m = np.arange(n)
    return np.sum(_log1m_exp(start[..., None] + lu * m), axis=-1)


def _check_times(s: int, t: int, M: int, N: int):
    for u in (s, t):
        if not (-M + 1 <= u <= N - 1):
            raise DomainError(f"time {u} outside [{-M + 1}, {N - 1}]")


def _kd_double_sum(params: ModelParams, s, k, t, l) -> float:
    M, N = params.M, params.N
    lq = math.log(params.q)
    lQ, lQt = params.eta * lq, params.theta * lq
    la = math.log(params.a)
    sp, sm = pm(s)
    tp, tm = pm(t)
    i = np.arange(M - sm)
    j = np.arange(N - tp)
    lA = lQ * (sm + i + 0.5)
    lB = lQt * (tp + j + 0.5)
    qf = _log_qfact(lQ, M)
    qft = _log_qfact(lQt, N)
    Xi = ((k - M + 1) * lA + lQ * i * (i + 1) / 2
          + _logqp_vec(la + lA + lQt * (sp + 0.5), lQt, N - sp)
          - qf[i] - qf[M - sm - 1 - i])
    Yj = ((l - M + 1) * lB + lQt * j * (j + 1) / 2
          + _logqp_vec(la + lQ * (tm + 0.5) + lB, lQ, M - tm)
          - qft[j] - qft[N - tp - 1 - j])
    logs = (Xi[:, None] + Yj[None, :] - _log1m_exp(la + lA[:, None] + lB[None, :])
            + (k + l - 2 * M + 2) * 0.5 * la)
    signs = np.where((i[:, None] + j[None, :]) % 2 == 0, 1.0, -1.0)
    return _signed_sum(signs, logs)


def _kd_residue_correction(params: ModelParams, s, k, t, l) -> float:
    """V_d: the single-contour term, nonzero only for s > t."""
    if s <= t:
        return 0.0
    lq = math.log(params.q)
    lQ, lQt = params.eta * lq, params.theta * lq
    lsa = 0.5 * math.log(params.a)
    sp, sm = pm(s)
    tp, tm = pm(t)
    n1, n2 = sp - tp, tm - sm
    if k - l < n1:
        i = np.arange(n1)
        lc = lsa + lQt * (tp + i + 0.5)
        qf = _log_qfact(lQt, n1)
        logs = (lQt * i * (i + 1) / 2 + (l - k) * lc - qf[i] - qf[n1 - 1 - i]
                - _logqp_vec(lsa + lQ * (sm + 0.5) + lc, lQ, n2))
    else:
        i = np.arange(n2)
        ld = lsa + lQ * (sm + i + 0.5)
        qf = _log_qfact(lQ, n2)
        logs = (lQ * i * (i + 1) / 2 + (k - l) * ld - qf[i] - qf[n2 - 1 - i]
                - _logqp_vec(lsa + lQt * (tp + 0.5) + ld, lQt, n1))
    signs = np.where(i % 2 == 0, 1.0, -1.0)
    return _signed_sum(signs, logs)


def _series_mul(a, b, n):
    return np.convolve(a, b)[:n]


def _geom_series(r, n):
    return r ** np.arange(n)


def _kd_frozen_correction(params: ModelParams, s, k, t, l) -> float:
    """Residues at z = infinity and w = 0 that the residue double sum omits.

    They are nonzero only at frozen positions, k < M - L_s or l < M - L_t.
    """
    M, N = params.M, params.N
    Q, Qt, sa = params.Q, params.Qt, math.sqrt(params.a)
    sp, sm = pm(s)
    tp, tm = pm(t)
    deg = sm - k - 1
    e0 = l - M + N - tp
    if deg < 0 and e0 >= 0:
        return 0.0
    c = np.array([sa * Qt ** (tp + j + 0.5) for j in range(N - tp)])
    dp = np.array([sa * Q ** (tm + i + 0.5) for i in range(M - tm)])
    cp = np.array([sa * Qt ** (sp + j + 0.5) for j in range(N - sp)])
    d = np.array([sa * Q ** (sm + i + 0.5) for i in range(M - sm)])
    total = 0.0
    if deg >= 0:
        n = deg + 1
        base = np.zeros(n)
        base[0] = 1.0
        for r in cp:
            base = _series_mul(base, np.array([1.0, -r]), n)
        for di in d:
            base = _series_mul(base, _geom_series(1.0 / di, n), n)
        base *= (-1) ** len(d) / np.prod(d)
        for j, cj in enumerate(c):
            others = np.delete(c, j)
            rho = (cj ** (l - M + 1) * np.prod(1.0 - dp * cj) / np.prod(1.0 - others / cj))
            total += rho * _series_mul(base, _geom_series(cj, n), n)[deg]
    if e0 < 0:
        m0 = -e0
        G = np.zeros(m0)
        G[0] = 1.0
        for r in dp:
            G = _series_mul(G, np.array([1.0, -r]), m0)
        for cj in c:
            G = _series_mul(G, _geom_series(1.0 / cj, m0), m0) * (-1.0 / cj)
        e1 = M - k - 1 - (N - sp)
        length = m0 + abs(e1) + len(cp) + 2
        P = np.array([1.0])
        for r in cp:
            P = np.convolve(P, np.array([-r, 1.0]))
        S = np.zeros(length)
        S[:min(len(P), length)] = P[:length]
        for di in d:
            S = _series_mul(S, _geom_series(di, length), length)
        for n_ in range(m0):
            gi = -n_ - 1 - e0
            fi = n_ - e1
            if 0 <= fi < length and 0 <= gi < m0:
                total += G[gi] * S[fi]
    return float(total)


def kernel_d(params: ModelParams, s: int, k: int, t: int, l: int) -> float:
    """Extended kernel of the discrete process at (s, k; t, l)."""
    s, t = int(getattr(s, "t", s)), int(getattr(t, "t", t))
    _check_times(s, t, params.M, params.N)
    if params.q <= 0 or params.a <= 0:
        raise DomainError("kernel_d needs q, a > 0")
    if k < 0 or l < 0:
        raise DomainError("positions must be non-negative")
    return (_kd_double_sum(params, s, k, t, l)
            - _kd_residue_correction(params, s, k, t, l)
            + _kd_frozen_correction(params, s, k, t, l))


# ============================================================== continuous

def _as_pos(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError(f"{name} must be positive")
    return x


def _v_continuous(alpha, eta, theta, s, t, x, y):
    """V_c (= V_he) on broadcast arrays x, y; zero unless s > t."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    out = np.zeros(x.shape)
    if s <= t:
        return out
    sp, sm = pm(s)
    tp, tm = pm(t)
    n1, n2 = sp - tp, tm - sm
    above = x > y
    lr = np.log(y) - np.log(x)
    if n1 > 0 and np.any(above):
        i = np.arange(n1)
        expo = alpha / 2 + theta * (tp + i + 0.5)
        lcoef = (-tm * math.log(eta) + (1 - n1) * math.log(theta)
                 - _lgamma(i + 1) - _lgamma(n1 - i)
                 - np.array([log_pochhammer(alpha / eta + sm + 0.5 + (tp + ii + 0.5) * theta / eta, n2)
                             for ii in i]))
        sg = np.where(i % 2 == 0, 1.0, -1.0)
        val = np.einsum("i,...i->...", sg, np.exp(lcoef + expo * lr[above][..., None]))
        out[above] = val
    below = ~above
    if n2 > 0 and np.any(below):
        i = np.arange(n2)
        expo = alpha / 2 + eta * (sm + i + 0.5)
        lcoef = ((1 - n2) * math.log(eta) - n1 * math.log(theta)
                 - _lgamma(i + 1) - _lgamma(n2 - i)
                 - np.array([log_pochhammer(alpha / theta + (sm + ii + 0.5) * eta / theta + tp + 0.5, n1)
                             for ii in i]))
        sg = np.where(i % 2 == 0, 1.0, -1.0)
        val = np.einsum("i,...i->...", sg, np.exp(lcoef - expo * lr[below][..., None]))
        out[below] = val
    return out / np.sqrt(x * y)


def _kc_terms(params: ModelParams, s: int, t: int):
    """log-magnitudes and exponents of the separable continuous double sum."""
    M, N = params.M, params.N
    al, eta, th = params.alpha, params.eta, params.theta
    sp, sm = pm(s)
    tp, tm = pm(t)
    i = np.arange(M - sm)
    j = np.arange(N - tp)
    ex = eta * (sm + i + 0.5)
    ey = th * (tp + j + 0.5)
    lX = (log_pochhammer(al / th + (sm + i + 0.5) * eta / th + sp + 0.5, N - sp)
          - _lgamma(i + 1) - _lgamma(M - sm - i))
    lY = (log_pochhammer(al / eta + tm + 0.5 + (tp + j + 0.5) * th / eta, M - tm)
          - _lgamma(j + 1) - _lgamma(N - tp - j))
    return i, j, ex, ey, np.atleast_1d(lX), np.atleast_1d(lY)


def _separable_sum(lx, ly, i, j, ex, ey, lX, lY, A0):
    """sum_{ij} (-1)^{i+j} e^{ex_i lx + lX_i} e^{ey_j ly + lY_j} / (A0 + ex_i + ey_j).

    lx, ly are 1-d arrays of log-positions; returns the len(lx) x len(ly) matrix.
    Each side is rescaled by its row maximum to stay in range.
    """
    LX = lX[:, None] + ex[:, None] * lx[None, :]
    LY = lY[:, None] + ey[:, None] * ly[None, :]
    mx = LX.max(axis=0)
    my = LY.max(axis=0)
    sx = np.where(i % 2 == 0, 1.0, -1.0)[:, None]
    sy = np.where(j % 2 == 0, 1.0, -1.0)[:, None]
    X = sx * np.exp(LX - mx)
    Y = sy * np.exp(LY - my)
    W = 1.0 / (A0 + ex[:, None] + ey[None, :])
    return (X.T @ W @ Y) * np.exp(mx[:, None] + my[None, :])


def kernel_c_grid(params: ModelParams, s: int, xs, t: int, ys) -> np.ndarray:
    """Matrix [K_c(s, x_a; t, y_b)]."""
    _check_times(s, t, params.M, params.N)
    if not (params.eta > 0 and params.theta > 0):
        raise DomainError("kernel_c needs eta, theta > 0")
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    if np.any((xs <= 0) | (xs >= 1)) or np.any((ys <= 0) | (ys >= 1)):
        raise DomainError("positions must lie in (0, 1)")
    al, eta, th = params.alpha, params.eta, params.theta
    sp, sm = pm(s)
    tp, tm = pm(t)
    i, j, ex, ey, lX, lY = _kc_terms(params, s, t)
    lx, ly = np.log(xs), np.log(ys)
    D = _separable_sum(lx, ly, i, j, ex, ey, lX, lY, al)
    pref = (sm - tm + 1) * math.log(eta) + (tp - sp + 1) * math.log(th)
    D = D * np.exp(pref + (al - 1) / 2 * (lx[:, None] + ly[None, :]))
    return D - _v_continuous(al, eta, th, s, t, xs[:, None], ys[None, :])


def kernel_c(params: ModelParams, s: int, x: float, t: int, y: float) -> float:
    s, t = int(getattr(s, "t", s)), int(getattr(t, "t", t))
    return float(kernel_c_grid(params, s, [x], t, [y])[0, 0])


# =============================================================== hard edge

_MAX_TERMS = 10 ** 4


def _he_side(lpos_max: float, first: float, step: float, gamma_arg0: float, gamma_step: float,
             tol: float) -> int:
    """Number of series terms needed on one side.

    Terms have log-magnitude (first + step k) lpos - log k! - log Gamma(g0 + gs k);
    we go past the peak until they fall tol below it.
    """
    k = np.arange(0, 64)
    n = 64
    while True:
        lm = (first + step * k) * lpos_max - _lgamma(k + 1) - _lgamma(gamma_arg0 + gamma_step * k)
        peak = int(np.argmax(lm))
        tail = lm[peak:]
        below = np.nonzero(tail < lm[peak] + math.log(tol) - 2.0)[0]
        if below.size and np.all(np.diff(tail[below[0]:]) < 0):
            return int(peak + below[0] + 1)
        n *= 2
        if n > _MAX_TERMS:
            raise ConvergenceError("hard-edge series needs more than 1e4 terms")
        k = np.arange(n)


def kernel_he_grid(alpha: float, eta: float, theta: float, s: int, xs, t: int, ys,
                   tol: float = 1e-14) -> np.ndarray:
    if not (eta > 0 and theta > 0) or alpha < 0:
        raise DomainError("need eta, theta > 0 and alpha >= 0")
    xs = _as_pos(np.atleast_1d(xs), "x")
    ys = _as_pos(np.atleast_1d(ys), "y")
    sp, sm = pm(s)
    tp, tm = pm(t)
    gx0 = alpha / theta + (sm + 0.5) * eta / theta + sp + 0.5
    gy0 = alpha / eta + tm + 0.5 + (tp + 0.5) * theta / eta
    lx, ly = np.log(xs), np.log(ys)
    nI = _he_side(max(float(lx.max()), 0.0), 1.0 * 0 + eta * (sm + 0.5), eta, gx0, eta / theta, tol)
    nJ = _he_side(max(float(ly.max()), 0.0), theta * (tp + 0.5), theta, gy0, theta / eta, tol)
    i = np.arange(nI)
    j = np.arange(nJ)
    ex = eta * (sm + i + 0.5)
    ey = theta * (tp + j + 0.5)
    lX = -_lgamma(i + 1) - _lgamma(gx0 + i * eta / theta)
    lY = -_lgamma(j + 1) - _lgamma(gy0 + j * theta / eta)
    D = _separable_sum(lx, ly, i, j, ex, ey, lX, lY, alpha)
    pref = (sm - tm + 1) * math.log(eta) + (tp - sp + 1) * math.log(theta)
    D = D * np.exp(pref + (alpha - 1) / 2 * (lx[:, None] + ly[None, :]))
    return D - _v_continuous(alpha, eta, theta, s, t, xs[:, None], ys[None, :])


def kernel_he(alpha: float, eta: float, theta: float, s: int, x: float, t: int, y: float,
              tol: float = 1e-14) -> float:
    return float(kernel_he_grid(alpha, eta, theta, s, [x], t, [y], tol)[0, 0])


def kernel_he_exp_grid(alpha: float, eta: float, theta: float, xs, ys) -> np.ndarray:
    """e^{-x/2 - y/2} K_he(0, e^{-x}; 0, e^{-y})."""
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    K = kernel_he_grid(alpha, eta, theta, 0, np.exp(-xs), 0, np.exp(-ys))
    return np.exp(-xs[:, None] / 2 - ys[None, :] / 2) * K


def kernel_he_exp(alpha: float, eta: float, theta: float, x: float, y: float) -> float:
    return float(kernel_he_exp_grid(alpha, eta, theta, [x], [y])[0, 0])


def bessel_kernel(alpha: float, x: float, y: float, order: int = 64) -> float:
    """int_0^1 J_a(2 sqrt(ux)) J_a(2 sqrt(uy)) du by Gauss-Legendre in v = sqrt(u)."""
    if x < 0 or y < 0:
        raise DomainError("bessel_kernel needs x, y >= 0")
    nodes, weights = gauss_legendre(order)
    v = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    # u = v^2, du = 2 v dv; the integrand becomes smooth in v
    from scipy.special import jv
    fx = jv(alpha, 2.0 * v * math.sqrt(x))
    fy = jv(alpha, 2.0 * v * math.sqrt(y))
    return float(np.sum(w * 2.0 * v * (fx * fy)))


# ============================================================ conjugations

def conjugate(kernel: Callable, power: float) -> Callable:
    """K(x, y) -> (x/y)^power K(x, y); leaves Fredholm determinants unchanged."""

    def conj(x, y):
        return (np.asarray(x, float) / np.asarray(y, float)) ** power * kernel(x, y)

    return conj


def borodin_finite_kernel(alpha: float, theta: float, N: int, x: float, y: float) -> float:
    """Finite-N Jacobi-type Muttalib-Borodin kernel in its double-sum form.

    Uses alpha_B = alpha + theta/2 - 1/2 and the alternating sign (-1)^{i+j}.
    """
    aB = alpha + theta / 2 - 0.5
    # small exact sum; plain products keep full precision here
    terms = []
    for i in range(N):
        for j in range(N):
            c = (pochhammer(aB + 1 + j * theta, N) * pochhammer((aB + 1 + i) / theta, N)
                 / (math.factorial(i) * math.factorial(j) * math.factorial(N - 1 - i)
                    * math.factorial(N - 1 - j)))
            terms.append((-1) ** (i + j) * c * x ** i * y ** (j * theta) / (aB + 1 + i + theta * j))
    return theta * x ** aB * math.fsum(terms)


def kernel_c_borodin_conj(params: ModelParams, x: float, y: float) -> float:
    """K_c(0, x; 0, y) conjugated by (x/y)^{alpha/2 + theta/2 - 1/2}."""
    p = params.alpha / 2 + params.theta / 2 - 0.5
    return (x / y) ** p * kernel_c(params, 0, x, 0, y)


# ================================================================== Fox H

@dataclass(frozen=True)
class FoxHSpec:
    """H^{m,n} with top pairs (a_i, e_i), i <= p, and bottom pairs (b_j, c_j), j <= q.

    The first n top pairs and first m bottom pairs sit in the numerator.
    """

    m: int
    n: int
    top: tuple = ()
    bottom: tuple = ()
    delta: float = 0.0
    T: float = 50.0
    density: int = 8

    def __post_init__(self):
        p, q = len(self.top), len(self.bottom)
        if p == 0 and q == 0:
            raise DomainError("need at least one parameter pair")
        if not (0 <= self.m <= q and 0 <= self.n <= p):
            raise DomainError("need 0 <= m <= q, 0 <= n <= p")
        if any(e <= 0 for _, e in self.top) or any(c <= 0 for _, c in self.bottom):
            raise DomainError("scale parameters must be positive")


def _fox_integrand(spec: FoxHSpec, z: np.ndarray, lx: float) -> np.ndarray:
    acc = -z * lx
    for idx, (b, c) in enumerate(spec.bottom):
        g = log_gamma(b + c * z)
        acc = acc + g if idx < spec.m else acc - g
    for idx, (a, e) in enumerate(spec.top):
        g = log_gamma(a - e * z)
        acc = acc + g if idx < spec.n else acc - g
    with np.errstate(over="ignore"):
        return np.exp(acc)


_MAX_FOX_NODES = 4_000_000


def fox_h(spec: FoxHSpec, x: float, tol: float = 1e-8, max_T: float = 4000.0) -> float:
    """Line integral along Re z = delta, truncated at |Im z| = T, trapezoid refined."""
    if x <= 0:
        raise DomainError("fox_h needs x > 0")
    lx = math.log(x)

    def peak_and_edge(T):
        tau = np.linspace(0.0, T, 2001)
        f = np.abs(_fox_integrand(spec, spec.delta + 1j * tau, lx))
        if not np.all(np.isfinite(f)):
            raise ConvergenceError("Fox H integrand overflows on the contour")
        return float(f.max()), float(f[-50:].max())

    T = spec.T
    peak, edge = peak_and_edge(T)
    while edge > 1e-3 * tol * peak:
        T *= 2
        if T > max_T:
            raise ConvergenceError(f"Fox H integrand does not decay (edge/peak = {edge / peak:.2e})")
        peak, edge = peak_and_edge(T)

    def trap(h):
        tau = np.arange(-T, T + h / 2, h)
        f = _fox_integrand(spec, spec.delta + 1j * tau, lx)
        return float(np.real(np.sum(f) * h / (2 * math.pi)))

    h = 1.0 / spec.density
    prev = trap(h)
    for _ in range(12):
        if 2 * T / h > _MAX_FOX_NODES:
            break
        h /= 2
        cur = trap(h)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError("Fox H trapezoid refinement did not settle")


def fox_h_01_11_series(a: float, e: float, b: float, c: float, x: float) -> float:
    """Residue series of H^{0,1}_{1,1}[x | (a, e); (b, c)] in Wright form.

    Closing to the right picks the poles z_k = (a + k)/e of Gamma(a - e z):
    H = (1/e) X^a J_{b + c a/e, c/e}(X) with X = x^{-1/e}.
    """
    from .special_functions import wright_j
    X = x ** (-1.0 / e)
    return X ** a * wright_j(b + c * a / e, c / e, X) / e


def fhe_spec(alpha: float, eta: float, theta: float, s: int, which: str, delta: float) -> tuple[FoxHSpec, float]:
    """The f_he (which='f') or g_he (which='g') Fox H pieces with their scalar prefactors."""
    sp, sm = pm(s)
    top = ((alpha / (2 * eta) + sm + 0.5, 1.0 / eta),)
    bottom = ((alpha / (2 * theta) + sp + 0.5, 1.0 / theta),)
    if which == "f":
        return FoxHSpec(0, 1, top, bottom, delta=delta), eta ** sm / theta ** sp
    return FoxHSpec(1, 0, top, bottom, delta=delta), theta ** sp / eta ** sm


def kernel_he_fox(alpha: float, eta: float, theta: float, s: int, x: float, t: int, y: float,
                  delta_f: float, delta_g: float, order: int = 40) -> float:
    """Double-contour part of K_he reassembled from Fox H pieces (no V term).

    (1/sqrt(xy)) int_0^1 f(1/(ux)) g(uy) du/u, with u = v^2 for a smooth integrand.
    """
    fs, cf = fhe_spec(alpha, eta, theta, s, "f", delta_f)
    gs, cg = fhe_spec(alpha, eta, theta, t, "g", delta_g)
    nodes, weights = gauss_legendre(order)
    v = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    total = 0.0
    for vi, wi in zip(v, w):
        u = vi * vi
        total += wi * 2.0 / vi * cf * fox_h(fs, 1.0 / (u * x)) * cg * fox_h(gs, u * y)
    return total / math.sqrt(x * y)


# ====================================================== limit consistency

@dataclass(frozen=True)
class _RawParams:
    q: float
    a: float
    eta: float
    theta: float
    M: int
    N: int

    @property
    def Q(self):
        return self.q ** self.eta

    @property
    def Qt(self):
        return self.q ** self.theta


@dataclass
class LimitRow:
    param: float
    point: tuple
    reference: float
    approx: float
    error: float


def check_q_to_1(params: ModelParams, s: int, t: int, points: Sequence[tuple[float, float]],
                 eps_list: Sequence[float], snap: bool = False) -> list[LimitRow]:
    """Relative error of eps^{s-t-1} K_d / sqrt(xy) against K_c along q = e^{-eps}.

    The 1/sqrt(xy) is the Jacobian dk ~ dx/(eps x), split symmetrically.
    With snap=True K_c is taken at the lattice points e^{-eps k}, e^{-eps l}
    instead of (x, y); this removes the rounding jitter of the floor and
    leaves a clean first-order error.
    """
    rows = []
    for eps in eps_list:
        q = math.exp(-eps)
        a = math.exp(-params.alpha * eps)
        # alpha = 0 gives a = 1, outside the ModelParams range but fine for the kernel
        pd = _RawParams(q, a, params.eta, params.theta, params.M, params.N)
        for (x, y) in points:
            k = math.floor(-math.log(x) / eps)
            l = math.floor(-math.log(y) / eps)
            if snap:
                x, y = math.exp(-eps * k), math.exp(-eps * l)
            ref = kernel_c(params, s, x, t, y)
            approx = eps ** (s - t - 1) * kernel_d(pd, s, k, t, l) / math.sqrt(x * y)
            rows.append(LimitRow(eps, (x, y), ref, approx, abs(approx - ref) / abs(ref)))
    return rows


def check_hard_edge(alpha: float, eta: float, theta: float, s: int, t: int,
                    points: Sequence[tuple[float, float]], N_list: Sequence[int]) -> list[LimitRow]:
    rows = []
    for N in N_list:
        params = ModelParams(q=0.5, a=0.5, eta=eta, theta=theta, M=N, N=N, alpha=alpha)
        scale = N ** (1.0 / eta) * N ** (1.0 / theta)
        for (x, y) in points:
            ref = kernel_he(alpha, eta, theta, s, x, t, y)
            approx = kernel_c(params, s, x / scale, t, y / scale) / scale
            rows.append(LimitRow(N, (x, y), ref, approx, abs(approx - ref)))
    return rows


def trace_c(params: ModelParams, t: int) -> float:
    """int_0^1 K_c(t, x; t, x) dx by adaptive quadrature."""
    f = lambda x: kernel_c(params, t, x, t, x)
    val, _ = spi.quad(f, 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-11)
    return float(val)


def trace_d(params: ModelParams, t: int, tail_tol: float = 1e-12, k_max: int = 100000) -> float:
    """sum_k K_d(t, k; t, k), stopped once the diagonal decays below tail_tol."""
    total = 0.0
    quiet = 0
    for k in range(k_max):
        v = kernel_d(params, t, k, t, k)
        total += v
        quiet = quiet + 1 if abs(v) < tail_tol else 0
        if quiet >= 20 and k > params.M:
            break
    return total
