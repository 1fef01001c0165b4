"""Last-passage percolation solvers and the Monte Carlo harness."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .core_types import DomainError, ModelParams
from .growth_sampler import (
    Flavor,
    LocalRule,
    Rule,
    grow,
    sample_weights_geo,
    sample_weights_pow,
    truncate_infinite_base,
    infinite_tail_bound,
    pow_parameter_matrix,
)
from .special_functions import RNGStream

log = logging.getLogger(__name__)

DIAG = "diag"
ANTIDIAG = "antidiag"


@numba.njit(cache=True)
def _max_path_sum(w):
    M, N = w.shape
    D = np.zeros(N + 1, dtype=w.dtype)
    for i in range(M):
        for j in range(N):
            best = D[j + 1] if D[j + 1] > D[j] else D[j]
            D[j + 1] = best + w[i, j]
    return D[N]


@numba.njit(cache=True)
def _max_path_sum_float(w):
    # first row/column must not take the zero boundary when weights are negative
    M, N = w.shape
    D = np.full(N + 1, -np.inf)
    D[1] = 0.0
    for i in range(M):
        prev = -np.inf
        for j in range(N):
            up = D[j + 1]
            best = up if up > prev else prev
            if i == 0 and j == 0:
                best = 0.0
            val = best + w[i, j]
            D[j + 1] = val
            prev = val
    return D[N]


def _oriented(weights: np.ndarray, direction: str) -> np.ndarray:
    if direction == DIAG:
        return weights
    if direction == ANTIDIAG:
        # down-right paths from (1, N) to (M, 1) become up-right paths after a column flip
        return weights[:, ::-1]
    raise DomainError(f"unknown direction {direction}")


def lpp_geo(weights, direction: str = DIAG) -> int:
    w = np.ascontiguousarray(_oriented(np.asarray(weights, dtype=np.int64), direction))
    if w.size == 0:
        raise DomainError("empty weight matrix")
    if np.any(w < 0):
        raise DomainError("geometric weights must be non-negative")
    return int(_max_path_sum(w))


def lpp_pow(weights, direction: str = DIAG) -> float:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise DomainError("empty weight matrix")
    if np.any(w <= 0):
        raise DomainError("power weights must be positive")
    cost = np.ascontiguousarray(_oriented(-np.log(w), direction))
    return float(math.exp(-_max_path_sum_float(cost)))


@dataclass
class GreeneReport:
    runs: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def greene_check(params: ModelParams, rule: LocalRule, rng: RNGStream, runs: int = 1,
                 report: GreeneReport | None = None) -> GreeneReport:
    """Compare the first part of slice 0 with the matching last-passage value."""
    report = report if report is not None else GreeneReport()
    direction = ANTIDIAG if rule.rule == Rule.COL else DIAG
    for _ in range(runs):
        if rule.flavor == Flavor.GEO:
            w = sample_weights_geo(params, rng)
            seq = grow(params, rule, w, rng)
            got, want = seq.slice(0).part(1), lpp_geo(w, direction)
            bad = got != want
        else:
            w = sample_weights_pow(params, rng)
            seq = grow(params, rule, w, rng)
            got, want = seq.slice(0).entry(1), lpp_pow(w, direction)
            bad = abs(got - want) > 1e-10 * abs(want)
        report.runs += 1
        if bad:
            report.failures.append(dict(params=params.as_dict(), rule=rule.rule.value,
                                        flavor=rule.flavor.value, got=got, want=want))
    return report


# ------------------------------------------------------------ Monte Carlo

@dataclass
class EmpiricalCDF:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.sort(np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise DomainError("empty sample")

    @property
    def n(self) -> int:
        return self.values.size

    def __call__(self, x):
        return np.searchsorted(self.values, x, side="right") / self.n


def ks_distance(F: EmpiricalCDF, G: Callable, left_limits: bool = False) -> float:
    """sup over sample points of |F - G|.

    With left_limits=True the left limit of F at each jump is also compared,
    which gives the classical Kolmogorov statistic for continuous G.
    """
    xs = F.values
    g = np.asarray(G(xs), dtype=float)
    d = np.max(np.abs(np.searchsorted(xs, xs, side="right") / F.n - g))
    if left_limits:
        d = max(d, np.max(np.abs(np.searchsorted(xs, xs, side="left") / F.n - g)))
    return float(d)


@dataclass
class MonteCarloResult:
    cdf: EmpiricalCDF
    raw: np.ndarray
    scaled: np.ndarray
    mode: str
    seed: int
    box: tuple[int, int]
    tail_bound: float


@numba.njit(cache=True)
def _geo_lpp_from_uniforms(u, p, logp):
    M, N = u.shape
    D = np.zeros(N + 1, dtype=np.int64)
    for i in range(M):
        for j in range(N):
            x = u[i, j]
            w = 0
            # inversion k = floor(log u / log p) is non-zero only when u < p
            if x < p[i, j]:
                w = int(math.floor(math.log(x) / logp[i, j]))
            best = D[j + 1] if D[j + 1] > D[j] else D[j]
            D[j + 1] = best + w
    return D[N]


def geo_infinite_logp(a: float, Q: float, Qt: float, M: int, N: int) -> np.ndarray:
    """log of the cell parameters a Q^{i-1/2} Qt^{j-1/2} on the truncated quadrant."""
    i = np.arange(1, M + 1)[:, None]
    j = np.arange(1, N + 1)[None, :]
    return np.ascontiguousarray(math.log(a) + math.log(Q) * (i - 0.5) + math.log(Qt) * (j - 0.5))


def geo_infinite_sample(logp: np.ndarray, rng: RNGStream, p: np.ndarray | None = None) -> int:
    """One draw of the corner-anchored LPP on the truncated quadrant.

    The path value does not depend on the orientation of the box, so cells are
    kept in quadrant coordinates (i, j) rather than flipped to (M-i+1, N-j+1).
    """
    p = np.exp(logp) if p is None else p
    u = rng.uniform_open(logp.shape)
    return int(_geo_lpp_from_uniforms(u, p, logp))


def monte_carlo_lpp(params: ModelParams, mode: str, n_samples: int, seed: int,
                    tol: float = 1e-9) -> MonteCarloResult:
    """Independent samples, sample i drawn from RNGStream(seed, i).

    geo_infinite: scaled = eps L + log(eps eta)/eta + log(eps theta)/theta, eps = -log q,
                  with a = e^{-alpha eps} taken from params.alpha (params.a is ignored,
                  since alpha = 0 needs a = 1, outside the finite-model range).
    pow_square:   scaled = L * N^{1/eta + 1/theta} (M = N = params.N).
    """
    raw = np.empty(n_samples)
    if mode == "geo_infinite":
        q, eta, theta = params.q, params.eta, params.theta
        if not (eta > 0 and theta > 0):
            raise DomainError("geo_infinite needs eta, theta > 0")
        eps = -math.log(q)
        a = math.exp(-params.alpha * eps)
        M, N = truncate_infinite_base(a, params.Q, params.Qt, tol)
        bound = infinite_tail_bound(a, params.Q, params.Qt, M, N)
        log.info("geo_infinite truncation box %dx%d, tail bound %.3g", M, N, bound)
        if a == 0:
            raw[:] = 0
        else:
            logp = geo_infinite_logp(a, params.Q, params.Qt, M, N)
            p = np.exp(logp)
            for s in range(n_samples):
                raw[s] = geo_infinite_sample(logp, RNGStream(seed, s), p)
        scaled = eps * raw + math.log(eps * eta) / eta + math.log(eps * theta) / theta
    elif mode == "pow_square":
        if not (params.eta > 0 and params.theta > 0):
            raise DomainError("pow_square needs eta, theta > 0")
        N = params.N
        M = N
        sq = ModelParams(q=params.q, a=params.a, eta=params.eta, theta=params.theta,
                         M=N, N=N, alpha=params.alpha)
        gam = pow_parameter_matrix(sq)
        for s in range(n_samples):
            u = RNGStream(seed, s).uniform_open((N, N))
            cost = np.ascontiguousarray(-np.log(u) / gam)
            raw[s] = math.exp(-_max_path_sum_float(cost))
        scaled = raw * N ** (1.0 / params.eta + 1.0 / params.theta)
        bound = 0.0
    else:
        raise DomainError(f"unknown mode {mode}")
    return MonteCarloResult(EmpiricalCDF(scaled), raw, scaled, mode, seed, (M, N), bound)
