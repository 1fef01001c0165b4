"""Brute-force ground truth for the discrete model.

Everything here is computed by summing the plane-partition measure
  q^{eta leftvol} (a q^{(eta+theta)/2})^{centralvol} q^{theta rightvol}
directly, either by listing arrays or by transfer matrices along the slice
sequence (the same sum, factored through the interlacing decomposition).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .core_types import DomainError, ModelParams, Partition, pm, slice_length_bound

log = logging.getLogger(__name__)

STATE_GUARD = 10 ** 7


class GuardExceeded(DomainError):
    pass


@dataclass(frozen=True)
class EnumerationCap:
    cap: int
    tail_bound: float


def _negbin_tail_direct(p: float, r: int, c: int) -> float:
    """P(sum of r iid Geom(p) >= c), Geom(p) with P(k) = (1-p) p^k."""
    total, k = 0.0, c
    while True:
        term = math.exp(math.lgamma(k + r) - math.lgamma(k + 1) - math.lgamma(r)
                        + k * math.log(p) + r * math.log1p(-p))
        total += term
        if k > c + 10 and term < 1e-18 * total:
            return total
        k += 1


def choose_cap(params: ModelParams, tol: float = 1e-9) -> EnumerationCap:
    """Smallest cap with P(Lambda_11 > cap) provably below tol.

    Lambda_11 is at most the total weight, which is dominated by a sum of MN
    geometric variables at the largest cell parameter a sqrt(Q Qt).
    """
    pmax = params.a * math.sqrt(params.Q * params.Qt)
    r = params.M * params.N
    cap = 0
    while True:
        b = _negbin_tail_direct(pmax, r, cap + 1) if pmax > 0 else 0.0
        if b < tol:
            return EnumerationCap(cap, b)
        cap += 1
        if cap > 10 ** 4:
            raise GuardExceeded("no feasible cap")


def _cell_weight_logs(params: ModelParams):
    lq = math.log(params.q) if params.q > 0 else -math.inf
    la = math.log(params.a) if params.a > 0 else -math.inf
    return params.eta * lq, la + 0.5 * (params.eta + params.theta) * lq, params.theta * lq


def enumerate_plane_partitions(M: int, N: int, cap: int, params: ModelParams | None = None
                               ) -> Iterator[tuple[np.ndarray, float]]:
    """Every M x N array, entries in [0, cap], non-increasing along rows and columns.

    Yields (Lambda, weight); weight is 1.0 when params is None.
    """
    count = 1
    for i in range(1, M + 1):
        for j in range(1, N + 1):
            count = count * (i + j + cap - 1) // (i + j - 1)
    if count > STATE_GUARD:
        raise GuardExceeded(f"{count} plane partitions exceed the guard {STATE_GUARD}")
    if params is not None:
        l_left, l_cent, l_right = _cell_weight_logs(params)
    cells = [(i, j) for i in range(M) for j in range(N)]
    grid = np.zeros((M, N), dtype=np.int64)

    def rec(idx):
        if idx == len(cells):
            if params is None:
                yield grid.copy(), 1.0
                return
            left = int(np.tril(grid, -1).sum())
            cent = int(np.trace(grid))
            right = int(np.triu(grid, 1).sum())
            lw = 0.0
            for v, lc in ((left, l_left), (cent, l_cent), (right, l_right)):
                if v:
                    lw += v * lc
            yield grid.copy(), math.exp(lw)
            return
        i, j = cells[idx]
        hi = cap
        if i > 0:
            hi = min(hi, grid[i - 1, j])
        if j > 0:
            hi = min(hi, grid[i, j - 1])
        for v in range(hi, -1, -1):
            grid[i, j] = v
            yield from rec(idx + 1)
        grid[i, j] = 0

    yield from rec(0)


def slice_of(Lambda: np.ndarray, t: int) -> Partition:
    """lambda^{(t)} = (Lambda_{k+|t|, k}) for t <= 0, (Lambda_{k, k+t}) for t > 0."""
    d = np.diagonal(Lambda, offset=t)
    return Partition(tuple(int(v) for v in d))


# --------------------------------------------------------- transfer matrices

@lru_cache(maxsize=64)
def _states(L: int, cap: int) -> np.ndarray:
    """All partitions with at most L parts, each <= cap, as rows of an (S, L) array."""
    if L == 0:
        return np.zeros((1, 0), dtype=np.int64)
    n = math.comb(L + cap, L)
    if n > STATE_GUARD:
        raise GuardExceeded(f"{n} slice states exceed the guard")
    rows = [c[::-1] for c in itertools.combinations_with_replacement(range(cap + 1), L)]
    return np.array(rows, dtype=np.int64)


def _interlace_matrix(small: np.ndarray, big: np.ndarray) -> np.ndarray:
    """[mu < lam] for mu in small rows, lam in big rows: lam_i >= mu_i >= lam_{i+1}."""
    n = max(small.shape[1], big.shape[1]) + 1
    mu = np.zeros((small.shape[0], n), dtype=np.int64)
    lam = np.zeros((big.shape[0], n), dtype=np.int64)
    mu[:, :small.shape[1]] = small
    lam[:, :big.shape[1]] = big
    ok = np.ones((small.shape[0], big.shape[0]), dtype=bool)
    for i in range(n):
        ok &= lam[None, :, i] >= mu[:, None, i]
        if i + 1 < n:
            ok &= mu[:, None, i] >= lam[None, :, i + 1]
    return ok


@dataclass
class TransferOracle:
    """Forward and backward vectors of the slice chain t = -M+1 .. N-1."""

    params: ModelParams
    cap: int
    states: dict
    steps: dict
    fw: dict
    bw: dict
    Z: float

    @classmethod
    def build(cls, params: ModelParams, cap: int) -> "TransferOracle":
        M, N = params.M, params.N
        sa = math.sqrt(params.a)
        Q, Qt = params.Q, params.Qt
        times = list(range(-M + 1, N))
        states = {t: _states(slice_length_bound(t, M, N), cap) for t in times}
        sizes = {t: states[t].sum(axis=1) for t in times}
        steps = {}
        for t in times[1:]:
            if t <= 0:
                x = sa * Q ** (-t + 0.5)
                ok = _interlace_matrix(states[t - 1], states[t])
                steps[t] = ok * x ** (sizes[t][None, :] - sizes[t - 1][:, None]).astype(float)
            else:
                x = sa * Qt ** (t - 1 + 0.5)
                ok = _interlace_matrix(states[t], states[t - 1]).T
                steps[t] = ok * x ** (sizes[t - 1][:, None] - sizes[t][None, :]).astype(float)
        t0, t1 = times[0], times[-1]
        # the first and last slices have at most one part, so they interlace with the empty partition
        left = (sa * Q ** (M - 0.5)) ** sizes[t0].astype(float)
        right = (sa * Qt ** (N - 0.5)) ** sizes[t1].astype(float)
        fw = {t0: left}
        for t in times[1:]:
            fw[t] = fw[t - 1] @ steps[t]
        bw = {t1: right}
        for t in reversed(times[:-1]):
            bw[t] = steps[t + 1] @ bw[t + 1]
        Z = float(fw[t1] @ right)
        return cls(params, cap, states, steps, fw, bw, Z)

    def positions(self, t: int) -> np.ndarray:
        """(S, M) particle positions lambda_i + M - i over i = 1..M (frozen ones included)."""
        M = self.params.M
        st = self.states[t]
        full = np.zeros((st.shape[0], M), dtype=np.int64)
        full[:, :st.shape[1]] = st
        return full + (M - np.arange(1, M + 1))[None, :]

    def marginal(self, t: int) -> np.ndarray:
        return self.fw[t] * self.bw[t] / self.Z

    def correlation(self, points: Sequence[tuple[int, int]]) -> float:
        pts = sorted((int(t), int(k)) for t, k in points)
        times = sorted({t for t, _ in pts})
        for t in times:
            if t not in self.states:
                raise DomainError(f"time {t} outside the process")

        def mask(t):
            pos = self.positions(t)
            m = np.ones(pos.shape[0], dtype=bool)
            for tt, k in pts:
                if tt == t:
                    m &= np.any(pos == k, axis=1)
            return m.astype(float)

        cur = times[0]
        vec = self.fw[cur] * mask(cur)
        for t in times[1:]:
            while cur < t:
                cur += 1
                vec = vec @ self.steps[cur]
            vec = vec * mask(t)
        return float(vec @ self.bw[cur] / self.Z)


# ------------------------------------------------------------- marginals

def w_d(params: ModelParams, t: int, x) -> np.ndarray:
    """Discrete weight of slice t, up to l-independent gauge factors."""
    M, N = params.M, params.N
    Q, Qt, a = params.Q, params.Qt, params.a
    x = np.asarray(x, dtype=np.int64)
    base = a ** x * (Q * Qt) ** (x / 2)
    if t <= 0:
        n, u, first = N - (M + t), Qt, x + t + 1
        base = base * Q ** (-t * x)
    elif N - t >= M:
        n, u, first = N - t - M, Qt, x + 1
        base = base * Qt ** (t * x)
    else:
        n, u, first = M - (N - t), Q, x + N - t - M + 1
        base = base * Qt ** (t * x)
    jac = np.ones(x.shape)
    for i in range(n):
        jac = jac * (1.0 - u ** (first + i))
    return base * jac


def _configs(L: int, top: int) -> np.ndarray:
    """Strictly decreasing L-tuples from {0..top}."""
    if L == 0:
        return np.zeros((1, 0), dtype=np.int64)
    n = math.comb(top + 1, L)
    if n > STATE_GUARD:
        raise GuardExceeded(f"{n} configurations exceed the guard")
    return np.array([c[::-1] for c in itertools.combinations(range(top + 1), L)], dtype=np.int64)


def _mb_unnormalized(params: ModelParams, t: int, conf: np.ndarray) -> np.ndarray:
    Q, Qt = params.Q, params.Qt
    L = conf.shape[1]
    val = np.prod(w_d(params, t, conf), axis=1) if L else np.ones(conf.shape[0])
    for i in range(L):
        for j in range(i + 1, L):
            val = val * (Q ** conf[:, j] - Q ** conf[:, i]) * (Qt ** conf[:, j] - Qt ** conf[:, i])
    return val


@dataclass
class SliceMarginal:
    t: int
    cap: int
    enumeration: dict
    formula: dict

    def total_variation(self) -> float:
        keys = set(self.enumeration) | set(self.formula)
        return 0.5 * sum(abs(self.enumeration.get(k, 0.0) - self.formula.get(k, 0.0)) for k in keys)


def exact_slice_marginal(params: ModelParams, t: int, cap: int | None = None) -> SliceMarginal:
    """Law of the L_t non-frozen positions at slice t, by two independent routes.

    enumeration: marginal of the plane-partition measure (all entries <= cap);
    formula:     normalized Vandermonde-squared-type product with weight w_d
                 over configurations with l_1 <= cap + M - 1.
    """
    cap = choose_cap(params).cap if cap is None else cap
    M, N = params.M, params.N
    if t in (-M, N):
        # the outer boundary slices are always empty
        return SliceMarginal(t, cap, {(): 1.0}, {(): 1.0})
    if not -M + 1 <= t <= N - 1:
        raise DomainError("slice time outside the process")
    L = slice_length_bound(t, M, N)
    orc = TransferOracle.build(params, cap)
    p = orc.marginal(t)
    pos = orc.positions(t)[:, :L]
    enum = {}
    for row, v in zip(pos, p):
        if v > 0:
            enum[tuple(int(r) for r in row)] = enum.get(tuple(int(r) for r in row), 0.0) + float(v)
    conf = _configs(L, cap + M - 1)
    u = _mb_unnormalized(params, t, conf)
    u = u / u.sum()
    form = {tuple(int(r) for r in row): float(v) for row, v in zip(conf, u) if v > 0}
    return SliceMarginal(t, cap, enum, form)


def direct_normalization(params: ModelParams, t: int, cap: int) -> float:
    """Sum of the unnormalized slice law over all labelled L_t-tuples (= n! times the ordered sum)."""
    L = slice_length_bound(t, params.M, params.N)
    conf = _configs(L, cap + params.M)
    return math.factorial(L) * float(_mb_unnormalized(params, t, conf).sum())


def cauchy_binet_normalization(params: ModelParams, t: int, cap: int | None = None,
                               kind: str = "discrete") -> float:
    """n! det[G_ij] with G the Gram matrix of the two bases against the slice weight."""
    M, N = params.M, params.N
    n = slice_length_bound(t, M, N)
    if n == 0:
        return 1.0
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    if kind == "discrete":
        cap = choose_cap(params).cap if cap is None else cap
        x = np.arange(cap + M + 1)
        w = w_d(params, t, x)
        G = np.einsum("x,ix,jx->ij", w, params.Q ** (np.arange(n)[:, None] * x[None, :]),
                      params.Qt ** (np.arange(n)[:, None] * x[None, :]))
    elif kind == "continuous":
        G = np.exp(_log_gram_continuous(params, t, i, j))
    else:
        raise DomainError(f"unknown kind {kind}")
    return math.factorial(n) * float(np.linalg.det(G))


def w_c_exponents(params: ModelParams, t: int) -> tuple[float, float, int]:
    """(beta, rho, n) with w_c(x) = x^{beta - 1} (1 - x^rho)^n."""
    M, N = params.M, params.N
    al, eta, th = params.alpha, params.eta, params.theta
    if t <= 0:
        return al + (eta + th) / 2 - t * eta, th, N - (M + t)
    if N - t >= M:
        return al + (eta + th) / 2 + t * th, th, N - t - M
    return al + (eta + th) / 2 + t * th, eta, M - (N - t)


def w_c(params: ModelParams, t: int, x):
    beta, rho, n = w_c_exponents(params, t)
    x = np.asarray(x, dtype=float)
    return x ** (beta - 1) * (1 - x ** rho) ** n


def _log_gram_continuous(params, t, i, j):
    # int_0^1 x^{c-1} (1 - x^rho)^n dx = B(c/rho, n+1) / rho
    beta, rho, n = w_c_exponents(params, t)
    c = params.eta * i + params.theta * j + beta
    return (np.vectorize(math.lgamma)(c / rho) + math.lgamma(n + 1)
            - np.vectorize(math.lgamma)(c / rho + n + 1) - math.log(rho))


def exact_correlation(params: ModelParams, points: Sequence[tuple[int, int]], cap: int | None = None,
                      oracle: TransferOracle | None = None) -> float:
    """P(slice t_i has a particle at k_i for every i), frozen particles included."""
    if len(points) > 3:
        raise DomainError("at most three points")
    if oracle is None:
        cap = choose_cap(params).cap if cap is None else cap
        oracle = TransferOracle.build(params, cap)
    return oracle.correlation(points)


# ------------------------------------------------------------------ Schur

def schur_principal(lam: Partition, u: float, n: int) -> float:
    """s_lam(1, u, ..., u^{n-1}) by the principal specialization product."""
    if len(lam) > n:
        return 0.0
    if not 0.0 <= u <= 1.0:
        raise DomainError("need u in [0, 1]")
    parts = [lam.part(i) for i in range(1, n + 1)]
    out = 1.0
    if u == 0.0:
        # only the x_1^{|lam|} monomial survives
        return 1.0 if len(lam) <= 1 else 0.0
    lu = math.log(u)
    for i in range(n):
        for j in range(i + 1, n):
            d1 = (parts[i] - i) - (parts[j] - j)
            d0 = j - i
            if u == 1.0:
                out *= d1 / d0
            else:
                out *= u ** parts[j] * math.expm1(d1 * lu) / math.expm1(d0 * lu)
    return out


# -------------------------------------------------------------------- LPP

def exhaustive_lpp(weights, direction: str = "diag") -> float:
    """Maximum over all up-right paths, listed explicitly."""
    w = np.asarray(weights)
    M, N = w.shape
    if M + N > 9:
        raise GuardExceeded("exhaustive_lpp needs M + N <= 9")
    if direction == "antidiag":
        w = w[:, ::-1]
    elif direction != "diag":
        raise DomainError(f"unknown direction {direction}")
    best = None
    steps = M + N - 2
    for downs in itertools.combinations(range(steps), M - 1):
        i = j = 0
        tot = w[0, 0]
        ds = set(downs)
        for s in range(steps):
            if s in ds:
                i += 1
            else:
                j += 1
            tot = tot + w[i, j]
        best = tot if best is None or tot > best else best
    return best.item() if hasattr(best, "item") else best
