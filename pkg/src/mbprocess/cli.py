"""Command-line front end: `mbp {sample,lpp,kernel,gapprob,falpha,verify}`."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .core_types import DomainError, ModelParams
from .special_functions import ConvergenceError, RNGStream

log = logging.getLogger("mbprocess")

DEFAULTS = dict(q=0.5, a=0.5, eta=1.0, theta=1.0, alpha=0.0, M=2, N=2, t=0, s=0.0, seed=0,
                threads=None, mode="geo", rule="row", samples=1000, which="d",
                r_min=0.1, r_max=3.0, steps=30, s_min=None, s_max=None,
                points=None, suite="greene", output=None, format="csv", lpp_mode=None,
                order=80, tol=1e-8)


def fmt(x) -> str:
    """17 significant digits for floats, plain ints otherwise."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


@dataclass
class RunConfig:
    subcommand: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name)

    def params(self) -> ModelParams:
        v = self.values
        return ModelParams(q=float(v["q"]), a=float(v["a"]), eta=float(v["eta"]),
                           theta=float(v["theta"]), M=int(v["M"]), N=int(v["N"]),
                           alpha=float(v["alpha"]))

    def header(self) -> str:
        return "# config: " + json.dumps({"subcommand": self.subcommand, **self.values}, sort_keys=True)


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse an mbp CSV: optional '# config:' line, header row, data rows."""
    lines = text.splitlines()
    config = {}
    body = []
    for ln in lines:
        if ln.startswith("# config: "):
            config = json.loads(ln[len("# config: "):])
        elif not ln.startswith("#"):
            body.append(ln)
    rows = list(csv.DictReader(body))
    return config, rows


def write_csv(cfg: RunConfig, header: list[str], rows) -> str:
    """CSV with the config comment line, or the same table as JSON with --format json."""
    if cfg.values.get("format") == "json":
        table = [[float(x) if isinstance(x, (float, np.floating)) else
                  int(x) if isinstance(x, (int, np.integer)) else x for x in r] for r in rows]
        return json.dumps({"config": {"subcommand": cfg.subcommand, **cfg.values},
                           "columns": header, "rows": table}, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(cfg.header() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (int, float, np.integer, np.floating)) else x for x in r])
    return buf.getvalue()


# -------------------------------------------------------------- commands

def cmd_sample(cfg: RunConfig) -> str:
    from .growth_sampler import LocalRule, grow, sample_weights_geo, sample_weights_pow
    params = cfg.params()
    rule = LocalRule.parse(cfg.rule, cfg.mode)
    rng = RNGStream(int(cfg.seed))
    w = sample_weights_geo(params, rng) if cfg.mode == "geo" else sample_weights_pow(params, rng)
    seq = grow(params, rule, w, rng)
    weights = w.astype(int).tolist() if cfg.mode == "geo" else [[float(f"{x:.17g}") for x in row] for row in w]
    out = {"config": {"subcommand": cfg.subcommand, **cfg.values},
           "sequence": json.loads(seq.to_json()), "weights": weights}
    return json.dumps(out, sort_keys=True) + "\n"


def cmd_lpp(cfg: RunConfig) -> str:
    from .lpp import monte_carlo_lpp
    mode = cfg.lpp_mode or ("geo_infinite" if cfg.mode == "geo" else "pow_square")
    res = monte_carlo_lpp(cfg.params(), mode, int(cfg.samples), int(cfg.seed))
    raw = res.raw.astype(int) if mode == "geo_infinite" else res.raw
    rows = ((i, r if mode != "geo_infinite" else int(r), s) for i, (r, s) in enumerate(zip(raw, res.scaled)))
    return write_csv(cfg, ["sample_index", "raw", "scaled"], rows)


def _grid(cfg: RunConfig, default):
    if cfg.points is None:
        return default
    return [float(x) for x in str(cfg.points).split(",")]


def cmd_kernel(cfg: RunConfig) -> str:
    from . import kernels as kr
    which = cfg.which
    s, t = int(float(cfg.s)), int(cfg.t)
    al, eta, th = float(cfg.alpha), float(cfg.eta), float(cfg.theta)
    rows = []
    if which == "d":
        pts = [int(x) for x in _grid(cfg, [0, 1, 2, 3])]
        params = cfg.params()
        for u in pts:
            for v in pts:
                rows.append((s, t, u, v, kr.kernel_d(params, s, u, t, v)))
    elif which == "c":
        pts = _grid(cfg, [0.2, 0.4, 0.6, 0.8])
        K = kr.kernel_c_grid(cfg.params(), s, pts, t, pts)
        rows = [(s, t, u, v, K[i, j]) for i, u in enumerate(pts) for j, v in enumerate(pts)]
    elif which == "he":
        pts = _grid(cfg, [0.5, 1.0, 2.0, 4.0])
        K = kr.kernel_he_grid(al, eta, th, s, pts, t, pts)
        rows = [(s, t, u, v, K[i, j]) for i, u in enumerate(pts) for j, v in enumerate(pts)]
    elif which == "he-exp":
        pts = _grid(cfg, [-1.0, 0.0, 1.0, 2.0])
        K = kr.kernel_he_exp_grid(al, eta, th, pts, pts)
        rows = [(0, 0, u, v, K[i, j]) for i, u in enumerate(pts) for j, v in enumerate(pts)]
    elif which == "bessel":
        pts = _grid(cfg, [0.5, 1.0, 2.0, 4.0])
        rows = [(0, 0, u, v, kr.bessel_kernel(al, u, v)) for u in pts for v in pts]
    else:
        raise DomainError(f"unknown kernel {which}")
    return write_csv(cfg, ["s", "t", "u", "v", "value"], rows)


def _fconfig(cfg: RunConfig, transform: str):
    from .fredholm import FredholmConfig
    return FredholmConfig(order=int(cfg.order), transform=transform, tol=float(cfg.tol),
                          max_order=max(320, 4 * int(cfg.order)))


def _linspace(lo, hi, n):
    n = int(n)
    if n < 1:
        raise DomainError("steps must be positive")
    return [float(lo)] if n == 1 else list(np.linspace(float(lo), float(hi), n))


def cmd_gapprob(cfg: RunConfig) -> str:
    from .fredholm import gap_prob_hard_edge_full
    conf = _fconfig(cfg, "square")
    rows = []
    for r in _linspace(cfg.r_min, cfg.r_max, cfg.steps):
        res = gap_prob_hard_edge_full(float(cfg.alpha), float(cfg.eta), float(cfg.theta), int(cfg.t), r, conf)
        rows.append(("r", r, res.value, res.order_used, res.est_error))
    return write_csv(cfg, ["param", "point", "value", "order_used", "est_error"], rows)


def cmd_falpha(cfg: RunConfig) -> str:
    from .fredholm import f_alpha_full
    conf = _fconfig(cfg, "log_tail")
    if cfg.s_min is not None and cfg.s_max is not None:
        pts = _linspace(cfg.s_min, cfg.s_max, cfg.steps)
    else:
        pts = [float(cfg.s)]
    rows = []
    for s in pts:
        res = f_alpha_full(float(cfg.alpha), float(cfg.eta), float(cfg.theta), s, conf)
        rows.append(("s", s, res.value, res.order_used, res.est_error))
    return write_csv(cfg, ["param", "point", "value", "order_used", "est_error"], rows)


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    from .verify import SUITES
    suite = cfg.suite
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite}; choose from {sorted(SUITES)}")
    failures = SUITES[suite](int(cfg.seed))
    header = ["suite", "check", "got", "want", "tol"]
    text = write_csv(cfg, header, [(suite, *f) for f in failures])
    return (0 if not failures else 1), text


COMMANDS = {"sample": cmd_sample, "lpp": cmd_lpp, "kernel": cmd_kernel,
            "gapprob": cmd_gapprob, "falpha": cmd_falpha}


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mbp", description="Muttalib-Borodin process sampler and kernels")
    sub = p.add_subparsers(dest="subcommand", required=True)
    common = argparse.ArgumentParser(add_help=False)
    for name in ("q", "a", "eta", "theta", "alpha"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--M", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--s", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--config", help="JSON file; explicit flags take precedence")
    common.add_argument("--output", "-o", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("sample", parents=[common], help="grow one interlacing sequence")
    sp.add_argument("--mode", choices=["geo", "pow"])
    sp.add_argument("--rule", choices=["row", "col", "push"])

    lp = sub.add_parser("lpp", parents=[common], help="Monte Carlo last-passage values")
    lp.add_argument("--mode", choices=["geo", "pow"])
    lp.add_argument("--lpp-mode", dest="lpp_mode", choices=["geo_infinite", "pow_square"])
    lp.add_argument("--samples", type=int)

    kp = sub.add_parser("kernel", parents=[common], help="kernel values on a grid")
    kp.add_argument("--which", choices=["d", "c", "he", "he-exp", "bessel"])
    kp.add_argument("--points", help="comma-separated positions used for both arguments")

    for name, extra, text in (("gapprob", ("--r-min", "--r-max"), "hard-edge gap probability over r"),
                              ("falpha", ("--s-min", "--s-max"), "limit distribution F_alpha over s")):
        fp = sub.add_parser(name, parents=[common], help=text)
        for flag in extra:
            fp.add_argument(flag, dest=flag[2:].replace("-", "_"), type=float)
        fp.add_argument("--steps", type=int)
        fp.add_argument("--order", type=int)
        fp.add_argument("--tol", type=float)

    vp = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vp.add_argument("--suite", choices=["greene", "oracle", "bessel", "gumbel", "traces"])
    return p


def resolve_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = dict(DEFAULTS)
    if getattr(ns, "config", None):
        with open(ns.config) as f:
            file_vals = json.load(f)
        unknown = set(file_vals) - set(DEFAULTS)
        if unknown:
            raise DomainError(f"unknown config keys {sorted(unknown)}")
        values.update(file_vals)
    if values.get("threads") is None and environ.get("MBP_THREADS"):
        values["threads"] = int(environ["MBP_THREADS"])
    for k, v in vars(ns).items():
        if k in ("subcommand", "config", "verbose") or v is None:
            continue
        values[k] = v
    if values["threads"] is not None and int(values["threads"]) < 1:
        raise DomainError("threads must be positive")
    return RunConfig(ns.subcommand, values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    code = 0
    try:
        cfg = resolve_config(ns)
        if cfg.threads:
            try:
                import numba
                numba.set_num_threads(min(int(cfg.threads), numba.config.NUMBA_NUM_THREADS))
            except Exception:  # threads flag is advisory
                pass
        if cfg.subcommand == "verify":
            code, text = cmd_verify(cfg)
        else:
            text = COMMANDS[cfg.subcommand](cfg)
    except (DomainError, ConvergenceError) as e:
        print(f"mbp: error: {e}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
