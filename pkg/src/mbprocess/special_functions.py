"""Scalar special functions and random variate generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special as sps

from .core_types import DomainError


class PoleError(DomainError):
    pass


class ConvergenceError(RuntimeError):
    pass


# Lanczos coefficients for g = 607/128, 15 terms (Godfrey).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_right(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    zm = z - 1.0
    s = np.full_like(zm, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        s = s + _LANCZOS_C[k] / (zm + k)
    tt = zm + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * np.log(tt) - tt + np.log(s)


def log_gamma(z):
    """Principal branch of log Gamma(z), Lanczos with reflection for Re z < 0.5.

    Accepts scalars or arrays; real input returns real log|Gamma| when Gamma > 0
    and the complex principal value otherwise.
    """
    arr = np.asarray(z)
    scalar = arr.ndim == 0
    zc = np.atleast_1d(arr).astype(complex)
    bad = (zc.imag == 0) & (zc.real <= 0) & (zc.real == np.round(zc.real))
    if np.any(bad):
        raise PoleError(f"log_gamma pole at {zc[bad][0].real}")
    out = np.empty_like(zc)
    right = zc.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_right(zc[right])
    left = ~right
    if np.any(left):
        zl = zc[left]
        # log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        val = math.log(math.pi) - _log_sin_pi(zl) - _lanczos_right(1.0 - zl)
        out[left] = val
    if not np.iscomplexobj(arr):
        posgam = (zc.real > 0) | (np.floor(-zc.real) % 2 == 1)
        if np.all(posgam):
            return float(out.real[0]) if scalar else out.real
    return complex(out[0]) if scalar else out


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    far = np.abs(z.imag) > 20.0
    near = ~far
    out[near] = np.log(np.sin(np.pi * z[near]))
    if np.any(far):
        # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}) for Im z > 0; conjugate below
        zf = z[far]
        up = np.where(zf.imag > 0, zf, np.conj(zf))
        val = -1j * np.pi * up + np.log1p(-np.exp(2j * np.pi * up)) + np.log(0.5j)
        out[far] = np.where(zf.imag > 0, val, np.conj(val))
    return out


def gamma_sign_log(x):
    """(sign, log|Gamma(x)|) for real x (arrays allowed)."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) & (x == np.round(x))):
        raise PoleError("Gamma pole")
    lg = np.real(log_gamma(x.astype(complex)))
    sign = np.where((x > 0) | (np.floor(-x) % 2 == 1), 1.0, -1.0)
    return sign, lg


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n."""
    out = 1.0
    for i in range(int(n)):
        out *= x + i
    return out


def log_pochhammer(x, n):
    """log (x)_n for x > 0 via Gamma ratios (vectorized over x)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log_pochhammer needs x > 0")
    if np.isscalar(n) or np.ndim(n) == 0:
        if int(n) == 0:
            return np.zeros_like(x) if x.ndim else 0.0
    r = np.real(log_gamma((x + n).astype(complex))) - np.real(log_gamma(x.astype(complex)))
    return float(r) if np.ndim(r) == 0 else r


def q_pochhammer(x: float, q: float, n: int) -> float:
    """(x; q)_n = prod_{0<=i<n} (1 - x q^i)."""
    out = 1.0
    for i in range(int(n)):
        out *= 1.0 - x * q ** i
    return out


def log_q_pochhammer_exp(log_x: float, log_q: float, n: int) -> tuple[float, float]:
    """(sign, log|(x; q)_n|) with x = e^{log_x}, q = e^{log_q}.

    Each factor 1 - x q^i is formed with expm1, so precision is kept when
    x q^i is close to 1.
    """
    sign, acc = 1.0, 0.0
    for i in range(int(n)):
        f = -math.expm1(log_x + i * log_q)
        if f == 0.0:
            return 0.0, -math.inf
        if f < 0:
            sign = -sign
        acc += math.log(abs(f))
    return sign, acc


def wright_j(a: float, b: float, x: float, max_terms: int = 10 ** 6) -> float:
    """J_{a,b}(x) = sum_k (-x)^k / (k! Gamma(a + b k))."""
    if b <= 0:
        raise DomainError("wright_j needs b > 0")
    terms = []
    partial = 0.0
    quiet = 0
    k = 0
    lx = math.log(abs(x)) if x != 0 else -math.inf
    while True:
        arg = a + b * k
        if arg <= 0 and arg == round(arg):
            term = 0.0
        elif x == 0 and k > 0:
            term = 0.0
        else:
            if arg > 0:
                sg, lg = 1.0, math.lgamma(arg)
            else:
                sg, lg = gamma_sign_log(arg)
            lmag = (k * lx if k else 0.0) - math.lgamma(k + 1) - float(lg)
            term = float(sg) * math.exp(lmag) if lmag > -745 else 0.0
            if x > 0 and k % 2 == 1:
                term = -term
        terms.append(term)
        partial = math.fsum(terms) if k % 64 == 0 else partial + term
        if abs(term) < 1e-16 * abs(partial) or term == 0.0:
            quiet += 1
        else:
            quiet = 0
        k += 1
        if quiet >= 50:
            break
        if k > max_terms:
            raise ConvergenceError("wright_j did not converge")
    return math.fsum(terms)


def bessel_j(alpha: float, x: float) -> float:
    """J_alpha(x) for alpha, x >= 0."""
    if alpha < 0 or x < 0:
        raise DomainError("bessel_j needs alpha, x >= 0")
    return float(sps.jv(alpha, x))


def bessel_j_series(alpha: float, x: float) -> float:
    """Ascending series, accurate for moderate x; used to cross-check bessel_j."""
    if x == 0:
        return 1.0 if alpha == 0 else 0.0
    h = 0.5 * x
    terms = []
    for k in range(400):
        lt = (2 * k + alpha) * math.log(h) - math.lgamma(k + 1) - math.lgamma(k + alpha + 1)
        t = math.exp(lt) * (-1) ** k
        terms.append(t)
        if k > h and abs(t) < 1e-20:
            break
    return math.fsum(terms)


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise DomainError("need n >= 1")
    return np.polynomial.legendre.leggauss(n)


@dataclass
class RNGStream:
    """Counter-based stream keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(int(self.seed) & (2 ** 64 - 1), spawn_key=(int(self.stream_id),))
        self._gen = np.random.Generator(np.random.Philox(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def spawn(self, stream_id: int) -> "RNGStream":
        return RNGStream(self.seed, stream_id)

    def uniform_open(self, size=None):
        """Uniform on (0, 1]."""
        return 1.0 - self._gen.random(size)

    def random(self, size=None):
        return self._gen.random(size)


def sample_geom(q: float, rng: RNGStream, size=None):
    """P(k) = (1 - q) q^k by inversion."""
    if not 0.0 <= q < 1.0:
        raise DomainError("geometric parameter must lie in [0, 1)")
    u = rng.uniform_open(size)
    if q == 0.0:
        return np.zeros(size, dtype=np.int64) if size is not None else 0
    k = np.floor(np.log(u) / math.log(q)).astype(np.int64)
    return k if size is not None else int(k)


def sample_geom_trunc(q: float, n: int, rng: RNGStream) -> int:
    """P(k) = (1 - q) q^k / (1 - q^{n+1}) on {0, ..., n}."""
    if n < 0:
        raise DomainError("negative truncation ceiling")
    if not 0.0 <= q < 1.0:
        raise DomainError("geometric parameter must lie in [0, 1)")
    u = rng.uniform_open()
    if q == 0.0 or n == 0:
        return 0
    lq = math.log(q)
    # invert F(k) = (1 - q^{k+1}) / (1 - q^{n+1})
    tail = -math.expm1((n + 1) * lq)
    k = math.floor(math.log1p(-(1.0 - u) * tail) / lq) if u < 1.0 else 0
    return int(min(max(k, 0), n))


def sample_pow(beta: float, rng: RNGStream, size=None):
    """Density beta x^{beta-1} on (0, 1)."""
    if beta <= 0:
        raise DomainError("power parameter must be positive")
    u = rng.uniform_open(size)
    return u ** (1.0 / beta)


def sample_pow_trunc(beta: float, A: float, rng: RNGStream) -> float:
    """Density beta y^{beta-1} / (1 - A^beta) on [A, 1]."""
    if beta <= 0 or not 0.0 <= A < 1.0:
        raise DomainError("need beta > 0 and 0 <= A < 1")
    u = rng.random()
    Ab = A ** beta
    return (Ab + u * (1.0 - Ab)) ** (1.0 / beta)
