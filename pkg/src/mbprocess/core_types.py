"""Domain records for plane-partition slices and their continuous analogues."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class Partition:
    """Non-increasing sequence of non-negative integers, trailing zeros stripped."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        ps = [int(p) for p in self.parts]
        if any(p < 0 for p in ps):
            raise DomainError(f"negative part in {ps}")
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise DomainError(f"parts not non-increasing: {ps}")
        while ps and ps[-1] == 0:
            ps.pop()
        object.__setattr__(self, "parts", tuple(ps))

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    def part(self, i: int) -> int:
        """1-based accessor; zero past the length."""
        if i < 1:
            raise IndexError("parts are 1-indexed")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


@dataclass(frozen=True)
class RealVector:
    """Strictly increasing entries in (0, 1). entry(0) = 0 and entry(i) = 1 past the end."""

    entries: tuple[float, ...] = ()

    def __post_init__(self):
        es = tuple(float(e) for e in self.entries)
        for i, e in enumerate(es):
            if not (0.0 < e < 1.0):
                raise DomainError(f"entry {e} not in (0,1)")
            if i and es[i - 1] >= e:
                raise DomainError(f"entries not strictly increasing: {es}")
        object.__setattr__(self, "entries", es)

    @classmethod
    def of(cls, *entries: float) -> "RealVector":
        return cls(tuple(entries))

    def entry(self, i: int) -> float:
        if i < 0:
            raise IndexError("negative index")
        if i == 0:
            return 0.0
        return self.entries[i - 1] if i <= len(self.entries) else 1.0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def product(self) -> float:
        return float(np.prod(self.entries)) if self.entries else 1.0


@dataclass(frozen=True)
class ModelParams:
    q: float
    a: float
    eta: float
    theta: float
    M: int
    N: int
    alpha: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.q < 1.0 and 0.0 <= self.a < 1.0):
            raise DomainError("need 0 <= q, a < 1")
        if self.eta < 0 or self.theta < 0 or self.alpha < 0:
            raise DomainError("eta, theta, alpha must be non-negative")
        if int(self.M) != self.M or int(self.N) != self.N or self.M < 1 or self.N < 1:
            raise DomainError("M, N must be positive integers")
        if self.M > self.N:
            raise DomainError("need M <= N")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", int(self.N))
        if self.a * np.sqrt(self.Q * self.Qt) >= 1.0:
            raise DomainError("need a*sqrt(Q*Qt) < 1")

    @property
    def Q(self) -> float:
        return self.q ** self.eta

    @property
    def Qt(self) -> float:
        return self.q ** self.theta

    def as_dict(self) -> dict:
        return dict(q=self.q, a=self.a, eta=self.eta, theta=self.theta,
                    alpha=self.alpha, M=self.M, N=self.N)


@dataclass(frozen=True)
class TimeIndex:
    t: int

    @property
    def plus(self) -> int:
        return max(self.t, 0)

    @property
    def minus(self) -> int:
        return max(-self.t, 0)


def pm(t: int) -> tuple[int, int]:
    """(t+, t-) for an integer time."""
    return max(t, 0), max(-t, 0)


def slice_length_bound(t: int, M: int, N: int) -> int:
    t = int(getattr(t, "t", t))
    if t < -M or t > N:
        raise DomainError(f"time {t} outside [-{M}, {N}]")
    if t <= 0:
        return M + t
    return min(N - t, M)


def interlaces_discrete(mu: Partition, lam: Partition) -> bool:
    """mu < lam, i.e. lam_1 >= mu_1 >= lam_2 >= mu_2 >= ..."""
    n = max(len(mu), len(lam)) + 1
    for i in range(1, n + 1):
        if not (lam.part(i) >= mu.part(i) >= lam.part(i + 1)):
            return False
    return True


def interlaces_continuous(u: RealVector, x: RealVector, strict: bool = True) -> bool:
    """u < x in the continuous convention: x_1 <= u_1 <= x_2 <= u_2 <= ...

    With strict=True every comparison touching an actual entry is strict;
    only padding-versus-padding (1 against 1) may tie.
    """
    n = max(len(u), len(x)) + 1
    chain = []
    for i in range(1, n + 1):
        chain.append((x.entry(i), i <= len(x)))
        chain.append((u.entry(i), i <= len(u)))
    for (lo, real_lo), (hi, real_hi) in zip(chain, chain[1:]):
        if strict and (real_lo or real_hi):
            if not lo < hi:
                return False
        elif not lo <= hi:
            return False
    return True


def to_particle_positions(lam: Partition, t: int, M: int, N: int | None = None) -> tuple[int, ...]:
    """Shift l_i = lam_i + M - i for i = 1..L_t.

    Without N the bound min(N - t, M) is taken as M for t > 0.
    """
    t = int(getattr(t, "t", t))
    L = slice_length_bound(t, M, N) if N is not None else M - max(-t, 0)
    if L < 0:
        raise DomainError(f"time {t} outside range for M={M}")
    if len(lam) > L:
        raise DomainError(f"partition {lam} longer than L_t = {L}")
    return tuple(lam.part(i) + M - i for i in range(1, L + 1))


@dataclass(frozen=True)
class InterlacingSequence:
    """Slices indexed t = -M..N; stored as a tuple in that order."""

    kind: str
    M: int
    N: int
    slices: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("discrete", "continuous"):
            raise DomainError(f"unknown kind {self.kind}")
        if len(self.slices) != self.M + self.N + 1:
            raise DomainError("need M+N+1 slices")

    def slice(self, t: int):
        return self.slices[t + self.M]

    def times(self) -> range:
        return range(-self.M, self.N + 1)

    def is_valid(self) -> bool:
        check = interlaces_discrete if self.kind == "discrete" else interlaces_continuous
        for t in range(-self.M, self.N):
            lo, hi = self.slice(t), self.slice(t + 1)
            ok = check(lo, hi) if t < 0 else check(hi, lo)
            if not ok:
                return False
        for t in self.times():
            L = slice_length_bound(t, self.M, self.N)
            n = len(self.slice(t))
            if n > L or (self.kind == "continuous" and n != L):
                return False
        return True

    def to_json(self) -> str:
        if self.kind == "discrete":
            sl = [list(s.parts) for s in self.slices]
        else:
            sl = [list(s.entries) for s in self.slices]
        return json.dumps({"kind": self.kind, "M": self.M, "N": self.N, "slices": sl})

    @classmethod
    def from_json(cls, text: str | dict) -> "InterlacingSequence":
        d = json.loads(text) if isinstance(text, str) else text
        mk = Partition if d["kind"] == "discrete" else RealVector
        return cls(d["kind"], int(d["M"]), int(d["N"]), tuple(mk(tuple(s)) for s in d["slices"]))


def make_sequence(kind: str, M: int, N: int, slices: Iterable[Sequence]) -> InterlacingSequence:
    mk = Partition if kind == "discrete" else RealVector
    return InterlacingSequence(kind, M, N, tuple(s if isinstance(s, mk) else mk(tuple(s)) for s in slices))
