"""Verification suites behind `mbp verify`; each returns a list of failures.

A failure is (check, got, want, tol).
"""

from __future__ import annotations

import math

import numpy as np

from .core_types import ModelParams, slice_length_bound
from .special_functions import RNGStream


def suite_greene(seed: int, instances: int = 200) -> list:
    from .growth_sampler import LocalRule
    from .lpp import greene_check, GreeneReport
    gen = np.random.default_rng(seed)
    report = GreeneReport()
    for k in range(instances):
        M = int(gen.integers(1, 9))
        N = int(gen.integers(M, 9))
        q, a = (float(gen.choice([0.3, 0.5, 0.8])) for _ in range(2))
        eta, theta = (float(gen.choice([0.5, 1.0, 2.0])) for _ in range(2))
        alpha = float(gen.choice([0.0, 1.0]))
        try:
            params = ModelParams(q=q, a=a, eta=eta, theta=theta, M=M, N=N, alpha=alpha)
        except ValueError:
            continue
        rule = LocalRule.parse(str(gen.choice(["row", "col", "push"])), str(gen.choice(["geo", "pow"])))
        greene_check(params, rule, RNGStream(seed, k), 1, report)
    return [("greene", f["got"], f["want"], 0.0) for f in report.failures]


def suite_oracle(seed: int) -> list:
    from .kernels import kernel_d
    from .oracle import TransferOracle, choose_cap, exact_slice_marginal
    out = []
    for (q, a, eta, theta) in ((0.5, 0.5, 1.0, 1.0), (0.6, 0.4, 0.5, 2.0)):
        for (M, N) in ((2, 2), (2, 3)):
            params = ModelParams(q=q, a=a, eta=eta, theta=theta, M=M, N=N)
            for t in range(-M + 1, N):
                tv = exact_slice_marginal(params, t).total_variation()
                if not tv < 1e-8:
                    out.append((f"marginal M={M} N={N} t={t}", tv, 0.0, 1e-8))
        params = ModelParams(q=q, a=a, eta=eta, theta=theta, M=2, N=2)
        orc = TransferOracle.build(params, choose_cap(params).cap)
        for pts in ([(0, 1)], [(-1, 0)], [(0, 0), (0, 2)], [(1, 1), (-1, 2)], [(-1, 1), (1, 0)]):
            K = np.array([[kernel_d(params, s, k, t, l) for (t, l) in pts] for (s, k) in pts])
            got, want = float(np.linalg.det(K)), orc.correlation(pts)
            if not abs(got - want) < 1e-5:
                out.append((f"correlation {pts}", got, want, 1e-5))
    return out


def suite_bessel(seed: int) -> list:
    from .kernels import bessel_kernel, kernel_he_grid
    out = []
    g = np.linspace(1.0, 10.0, 10)
    for al in (0.0, 1.0, 2.5):
        K = kernel_he_grid(al, 1.0, 1.0, 0, g, 0, g)
        for i, x in enumerate(g):
            for j, y in enumerate(g):
                b = bessel_kernel(al, x, y)
                if not abs(K[i, j] - b) < 1e-8:
                    out.append((f"bessel alpha={al} x={x} y={y}", K[i, j], b, 1e-8))
    return out


def suite_gumbel(seed: int) -> list:
    from .fredholm import f_alpha
    out = []
    for s in (-1.0, 0.0, 1.0, 2.0):
        got, want = f_alpha(0.0, 1.0, 1.0, s), math.exp(-math.exp(-s))
        if not abs(got - want) < 5e-3:
            out.append((f"F_0({s})", got, want, 5e-3))
    return out


def suite_traces(seed: int) -> list:
    from .kernels import trace_c, trace_d
    out = []
    params = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.5, M=2, N=2)
    for t in range(-1, 2):
        got = trace_d(params, t)
        if not abs(got - params.M) < 1e-8:
            out.append((f"discrete trace t={t}", got, params.M, 1e-8))
    cparams = ModelParams(q=0.5, a=0.5, eta=1.0, theta=1.5, M=2, N=3, alpha=0.5)
    for t in range(-1, 3):
        got, want = trace_c(cparams, t), slice_length_bound(t, 2, 3)
        if not abs(got - want) < 1e-6:
            out.append((f"continuous trace t={t}", got, want, 1e-6))
    return out


SUITES = {"greene": suite_greene, "oracle": suite_oracle, "bessel": suite_bessel,
          "gumbel": suite_gumbel, "traces": suite_traces}
