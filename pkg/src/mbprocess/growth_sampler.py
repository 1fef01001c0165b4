"""Local growth rules and the growth-diagram driver for exact sampling."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_types import (
    DomainError,
    InterlacingSequence,
    ModelParams,
    Partition,
    RealVector,
    interlaces_continuous,
    interlaces_discrete,
)
from .special_functions import RNGStream, sample_geom_trunc, sample_pow_trunc

INF = math.inf


class Rule(str, Enum):
    ROW = "row"
    COL = "col"
    PUSH = "push"


class Flavor(str, Enum):
    GEO = "geo"
    POW = "pow"


@dataclass(frozen=True)
class LocalRule:
    rule: Rule
    flavor: Flavor

    @classmethod
    def parse(cls, rule: str, flavor: str) -> "LocalRule":
        return cls(Rule(rule), Flavor(flavor))


def _check_geo_triple(alpha: Partition, beta: Partition, kappa: Partition):
    if not (interlaces_discrete(kappa, alpha) and interlaces_discrete(kappa, beta)):
        raise DomainError(f"need alpha > kappa < beta, got {alpha}, {beta}, {kappa}")


def _check_pow_triple(a: RealVector, b: RealVector, u: RealVector):
    if not (interlaces_continuous(u, a, strict=False) and interlaces_continuous(u, b, strict=False)):
        raise DomainError(f"need a > u < b, got {a}, {b}, {u}")


# ---------------------------------------------------------------- discrete

def row_rsk_geo(alpha: Partition, beta: Partition, kappa: Partition, G: int) -> Partition:
    _check_geo_triple(alpha, beta, kappa)
    if G < 0:
        raise DomainError("G must be non-negative")
    ell = min(len(alpha), len(beta)) + 1
    nu = [max(alpha.part(1), beta.part(1)) + int(G)]
    for s in range(2, ell + 1):
        nu.append(max(alpha.part(s), beta.part(s))
                  + min(alpha.part(s - 1), beta.part(s - 1)) - kappa.part(s - 1))
    return Partition(tuple(nu))


def row_rsk_geo_inverse(alpha: Partition, beta: Partition, nu: Partition) -> tuple[Partition, int]:
    if not (interlaces_discrete(alpha, nu) and interlaces_discrete(beta, nu)):
        raise DomainError(f"need alpha < nu > beta, got {alpha}, {beta}, {nu}")
    ell = min(len(alpha), len(beta)) + 1
    if len(nu) > ell:
        raise DomainError("nu too long to come from (alpha, beta)")
    G = nu.part(1) - max(alpha.part(1), beta.part(1))
    kap = []
    for s in range(2, ell + 1):
        kap.append(min(alpha.part(s - 1), beta.part(s - 1)) + max(alpha.part(s), beta.part(s)) - nu.part(s))
    try:
        kappa = Partition(tuple(kap))
    except DomainError as exc:
        raise DomainError("not invertible") from exc
    if not (interlaces_discrete(kappa, alpha) and interlaces_discrete(kappa, beta)):
        raise DomainError("not invertible")
    return kappa, int(G)


def col_rsk_geo(alpha: Partition, beta: Partition, kappa: Partition, G: int) -> Partition:
    _check_geo_triple(alpha, beta, kappa)
    if G < 0:
        raise DomainError("G must be non-negative")
    ell = min(len(alpha), len(beta)) + 1

    def kap(i):
        return INF if i == 0 else kappa.part(i)

    nu = [0] * (ell + 1)
    Gs = int(G)
    for s in range(ell, 0, -1):
        top = max(alpha.part(s), beta.part(s))
        nu[s] = int(min(top + Gs, kap(s - 1)))
        if s > 1:
            Gs = Gs - min(Gs, kappa.part(s - 1) - top) + min(alpha.part(s - 1), beta.part(s - 1)) - kappa.part(s - 1)
    return Partition(tuple(nu[1:]))


def push_block_geo(alpha: Partition, beta: Partition, G: int, p: float, rng: RNGStream) -> Partition:
    if G < 0:
        raise DomainError("G must be non-negative")
    ell = min(len(alpha), len(beta)) + 1
    nu = [max(alpha.part(1), beta.part(1)) + int(G)]
    for s in range(2, ell + 1):
        top = max(alpha.part(s), beta.part(s))
        ceiling = min(alpha.part(s - 1), beta.part(s - 1)) - top
        if ceiling < 0:
            raise DomainError("negative truncation ceiling")
        nu.append(top + sample_geom_trunc(p, ceiling, rng))
    return Partition(tuple(nu))


# -------------------------------------------------------------- continuous

def _row_rsk_pow_raw(a: RealVector, b: RealVector, u: RealVector, g: float) -> list[float]:
    ell = min(len(a), len(b)) + 1
    v = [g * min(a.entry(1), b.entry(1))]
    for s in range(2, ell + 1):
        v.append(min(a.entry(s), b.entry(s)) * max(a.entry(s - 1), b.entry(s - 1)) / u.entry(s - 1))
    return v


def row_rsk_pow(a: RealVector, b: RealVector, u: RealVector, g: float) -> RealVector:
    _check_pow_triple(a, b, u)
    return RealVector(tuple(_row_rsk_pow_raw(a, b, u, g)))


def _col_rsk_pow_raw(a: RealVector, b: RealVector, u: RealVector, g: float) -> list[float]:
    ell = min(len(a), len(b)) + 1
    v = [0.0] * (ell + 1)
    gs = g
    for s in range(ell, 0, -1):
        lo = min(a.entry(s), b.entry(s))
        us = u.entry(s - 1)  # entry(0) = 0
        v[s] = max(gs * lo, us)
        if s > 1:
            gs = gs * max(a.entry(s - 1), b.entry(s - 1)) / (us * max(gs, us / lo))
    return v[1:]


def col_rsk_pow(a: RealVector, b: RealVector, u: RealVector, g: float) -> RealVector:
    _check_pow_triple(a, b, u)
    return RealVector(tuple(_col_rsk_pow_raw(a, b, u, g)))


def push_block_pow(a: RealVector, b: RealVector, g: float, gamma: float, rng: RNGStream) -> RealVector:
    ell = min(len(a), len(b)) + 1
    v = [g * min(a.entry(1), b.entry(1))]
    for s in range(2, ell + 1):
        lo = min(a.entry(s), b.entry(s))
        A = max(a.entry(s - 1), b.entry(s - 1)) / lo
        if A >= 1.0:
            raise DomainError("degenerate truncated-power interval")
        v.append(lo * sample_pow_trunc(gamma, A, rng))
    return RealVector(tuple(v))


# ------------------------------------------------------------------ weights

def geo_parameter(params: ModelParams, I: int, J: int) -> float:
    M, N = params.M, params.N
    return params.a * params.Q ** (M - I + 0.5) * params.Qt ** (N - J + 0.5)


def pow_parameter(params: ModelParams, I: int, J: int) -> float:
    M, N = params.M, params.N
    return params.alpha + params.eta * (M - I + 0.5) + params.theta * (N - J + 0.5)


def geo_parameter_matrix(params: ModelParams) -> np.ndarray:
    I = np.arange(1, params.M + 1)[:, None]
    J = np.arange(1, params.N + 1)[None, :]
    return params.a * params.Q ** (params.M - I + 0.5) * params.Qt ** (params.N - J + 0.5)


def pow_parameter_matrix(params: ModelParams) -> np.ndarray:
    I = np.arange(1, params.M + 1)[:, None]
    J = np.arange(1, params.N + 1)[None, :]
    return params.alpha + params.eta * (params.M - I + 0.5) + params.theta * (params.N - J + 0.5)


def sample_weights_geo(params: ModelParams, rng: RNGStream) -> np.ndarray:
    p = geo_parameter_matrix(params)
    u = rng.uniform_open(p.shape)
    w = np.zeros(p.shape, dtype=np.int64)
    nz = u < p
    w[nz] = np.floor(np.log(u[nz]) / np.log(p[nz])).astype(np.int64)
    return w


def sample_weights_pow(params: ModelParams, rng: RNGStream) -> np.ndarray:
    gam = pow_parameter_matrix(params)
    if np.any(gam <= 0):
        raise DomainError("power weights need positive parameters")
    u = rng.uniform_open(gam.shape)
    w = u ** (1.0 / gam)
    # a weight equal to 1 breaks the strict (0,1) range; redraw (probability zero)
    while np.any(w >= 1.0):
        bad = w >= 1.0
        w[bad] = rng.uniform_open(int(bad.sum())) ** (1.0 / gam[bad])
    return w


# ------------------------------------------------------------------ driver

def grow(params: ModelParams, rule: LocalRule, weights: np.ndarray, rng: RNGStream | None = None,
         return_grid: bool = False):
    """Fill the growth diagram row by row and read off the boundary slices."""
    M, N = params.M, params.N
    weights = np.asarray(weights)
    if weights.shape != (M, N):
        raise DomainError(f"weights shape {weights.shape} != {(M, N)}")
    discrete = rule.flavor == Flavor.GEO
    if rule.rule == Rule.PUSH and rng is None:
        raise DomainError("pushBlock needs an rng")
    empty = Partition() if discrete else RealVector()
    grid = [[empty] * (N + 1) for _ in range(M + 1)]
    for I in range(1, M + 1):
        for J in range(1, N + 1):
            al, be, ka = grid[I - 1][J], grid[I][J - 1], grid[I - 1][J - 1]
            w = weights[I - 1, J - 1]
            if discrete:
                w = int(w)
                if rule.rule == Rule.ROW:
                    nu = row_rsk_geo(al, be, ka, w)
                elif rule.rule == Rule.COL:
                    nu = col_rsk_geo(al, be, ka, w)
                else:
                    nu = push_block_geo(al, be, w, geo_parameter(params, I, J), rng)
            else:
                w = float(w)
                if rule.rule == Rule.ROW:
                    nu = RealVector(tuple(_row_rsk_pow_raw(al, be, ka, w)))
                elif rule.rule == Rule.COL:
                    nu = RealVector(tuple(_col_rsk_pow_raw(al, be, ka, w)))
                else:
                    nu = push_block_pow(al, be, w, pow_parameter(params, I, J), rng)
            grid[I][J] = nu
    slices = [grid[M + t][N] for t in range(-M, 1)] + [grid[M][N - t] for t in range(1, N + 1)]
    seq = InterlacingSequence("discrete" if discrete else "continuous", M, N, tuple(slices))
    return (seq, grid) if return_grid else seq


# ------------------------------------------------------- infinite geometry

def infinite_tail_bound(a: float, Q: float, Qt: float, M: int, N: int) -> float:
    """Upper bound on the expected total weight outside the M x N corner box.

    Cell (i, j) has parameter p = a Q^{i-1/2} Qt^{j-1/2}; the expected weight
    p/(1-p) is at most p/(1-p_max), and the two strips outside the box sum
    as geometric series.
    """
    if a == 0:
        return 0.0
    pmax = a * math.sqrt(Q * Qt)
    c = pmax / ((1 - Q) * (1 - Qt) * (1 - pmax))
    return c * (Q ** M + Qt ** N)


def truncate_infinite_base(a: float, Q: float, Qt: float, tol: float) -> tuple[int, int]:
    if tol <= 0:
        raise DomainError("tol must be positive")
    if a == 0:
        return 1, 1
    if Q >= 1 or Qt >= 1:
        raise DomainError("no finite truncation when Q or Qt equals 1")
    if a * math.sqrt(Q * Qt) >= 1:
        raise DomainError("need a*sqrt(Q*Qt) < 1")
    pmax = a * math.sqrt(Q * Qt)
    c = pmax / ((1 - Q) * (1 - Qt) * (1 - pmax))

    def need(r):
        if r == 0:
            return 1
        return max(1, math.ceil(math.log(tol / (2 * c)) / math.log(r)))

    M, N = need(Q), need(Qt)
    while infinite_tail_bound(a, Q, Qt, M, N) >= tol:
        M += 1
        N += 1
    return M, N


# ---------------------------------------------------------------- file I/O

def weights_to_csv(weights: np.ndarray) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["I", "J", "weight"])
    integral = np.issubdtype(np.asarray(weights).dtype, np.integer)
    for I in range(weights.shape[0]):
        for J in range(weights.shape[1]):
            v = weights[I, J]
            wr.writerow([I + 1, J + 1, int(v) if integral else f"{float(v):.17g}"])
    return buf.getvalue()


def weights_from_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    M = max(int(r["I"]) for r in rows)
    N = max(int(r["J"]) for r in rows)
    integral = all("." not in r["weight"] and "e" not in r["weight"].lower() for r in rows)
    w = np.zeros((M, N), dtype=np.int64 if integral else float)
    for r in rows:
        w[int(r["I"]) - 1, int(r["J"]) - 1] = int(r["weight"]) if integral else float(r["weight"])
    return w


def weights_to_json(weights: np.ndarray) -> str:
    return json.dumps({"shape": list(weights.shape), "values": np.asarray(weights).tolist()})


def weights_from_json(text: str) -> np.ndarray:
    d = json.loads(text)
    return np.asarray(d["values"]).reshape(d["shape"])
