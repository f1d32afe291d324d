"""Command-line front end.

Exit status: 0 on success, 1 when an input or parameter is rejected, 2 on
usage errors.  Results go to stdout or ``--out``; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analytics as an
from . import engine
from .decomposition import EpisodeIncompleteError, decompose, decompose_one_sided, events_to_csv
from .paths import ParameterError, PathFormatError, SimulationParams, path_from_csv, path_to_csv, simulate_bm

QUANTITIES = {
    "m-tv": an.tv_limit_mean,
    "var-tv": an.tv_limit_var,
    "m-utv": an.utv_limit_mean,
    "var-utv": an.utv_limit_var,
    "m-dtv": an.dtv_limit_mean,
    "var-dtv": an.dtv_limit_var,
    "mean-td": an.mean_T_D,
    "m4-td": an.fourth_moment_T_D,
    "m4-zd": an.fourth_moment_Z_D,
    "laplace-tv": None,
    "laplace-utv": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="truncvar", description="Truncated variation of sampled paths.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="Brownian motion with drift as t,value CSV")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--dt", type=float, required=True)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--out")

    for name in ("tv", "utv", "dtv"):
        v = sub.add_parser(name, help=f"{name.upper()} of a path")
        v.add_argument("--input", required=True)
        v.add_argument("--c", type=float, required=True)
        v.add_argument("--curve", action="store_true")
        v.add_argument("--oracle", action="store_true", help="use the O(n^2) dynamic programme")
        v.add_argument("--emit", choices=["json"], default="json")

    d = sub.add_parser("decompose", help="stopping-time events as CSV")
    d.add_argument("--input", required=True)
    d.add_argument("--c", type=float, required=True)
    d.add_argument("--one-sided", choices=["down", "up"])
    d.add_argument("--out")

    a = sub.add_parser("analytics", help="closed-form constants and transforms")
    a.add_argument("--quantity", choices=sorted(QUANTITIES), required=True)
    a.add_argument("--c", type=float, required=True)
    a.add_argument("--mu", type=float, required=True)
    a.add_argument("--alpha", type=float)
    a.add_argument("--beta", type=float)
    a.add_argument("--lambda", dest="lam", type=float)
    a.add_argument("--nu", type=float)

    m = sub.add_parser("verify", help="run a Monte Carlo campaign from a JSON config")
    m.add_argument("--config", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--threads", type=int)
    return p


def _read(path) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data: bytes):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def _json(doc) -> bytes:
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _cmd_simulate(args):
    params = SimulationParams(drift_mu=args.mu, horizon_T=args.t, step_dt=args.dt, seed=args.seed)
    _write(args.out, path_to_csv(simulate_bm(params)))


def _cmd_variation(args):
    kind = args.command.upper()
    path = path_from_csv(_read(args.input))
    if args.oracle:
        if args.curve:
            fn = {"TV": engine.tv_oracle_curve, "UTV": engine.utv_oracle_curve, "DTV": engine.dtv_oracle_curve}[kind]
            curve = fn(path, args.c)
            res = engine.VariationResult(kind, float(args.c), float(curve[-1]), len(path), curve)
        else:
            fn = {"TV": engine.tv_oracle_dp, "UTV": engine.utv_oracle_dp, "DTV": engine.dtv_oracle_dp}[kind]
            res = engine.VariationResult(kind, float(args.c), fn(path, args.c), len(path))
    else:
        res = engine.variation(kind, path, args.c, curve=args.curve)
    doc = res.to_dict()
    doc["method"] = "oracle_dp" if args.oracle else "exact"
    _write(None, _json(doc))


def _cmd_decompose(args):
    path = path_from_csv(_read(args.input))
    if args.one_sided:
        events = decompose_one_sided(path, args.c, args.one_sided)
    else:
        events = decompose(path, args.c)
    _write(args.out, events_to_csv(path, events))


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            flag = "--lambda" if name == "lam" else f"--{name}"
            raise UsageError(f"truncvar analytics: {args.quantity} requires {flag}")


def _cmd_analytics(args):
    q = args.quantity
    extra = {}
    if q == "laplace-tv":
        _need(args, "alpha", "beta")
        extra = {"alpha": args.alpha, "beta": args.beta}
        value = an.laplace_tv_joint(args.alpha, args.beta, args.c, args.mu)
    elif q == "laplace-utv":
        _need(args, "lam", "nu")
        extra = {"lambda": args.lam, "nu": args.nu}
        value = an.laplace_utv_joint(args.lam, args.nu, args.c, args.mu)
    else:
        unused = [f for f in ("alpha", "beta", "lam", "nu") if getattr(args, f) is not None]
        if unused:
            raise UsageError(f"truncvar analytics: {q} takes no transform arguments")
        value = QUANTITIES[q](args.c, args.mu)
    doc = {"quantity": q, "c": args.c, "mu": args.mu, "extra_params": extra, "value": value}
    _write(None, _json(doc))


def _cmd_verify(args):
    from .montecarlo import load_config, run_experiment

    if args.threads is not None and args.threads < 1:
        raise ParameterError("threads", "must be >= 1")
    cfg = load_config(args.config)
    rep = run_experiment(cfg, threads=args.threads or os.cpu_count())
    _write(args.out, rep.to_json().encode("utf-8"))
    failed = [c.name for c in rep.checks if not c.passed]
    print(
        f"{cfg.experiment.value}: {'pass' if rep.passed else 'fail'}"
        + (f" (failed: {', '.join(failed)})" if failed else "")
        + f"; {rep.wall_clock_s:.1f} s",
        file=sys.stderr,
    )


_COMMANDS = {
    "simulate": _cmd_simulate,
    "tv": _cmd_variation,
    "utv": _cmd_variation,
    "dtv": _cmd_variation,
    "decompose": _cmd_decompose,
    "analytics": _cmd_analytics,
    "verify": _cmd_verify,
}

_DOMAIN_ERRORS = (
    ParameterError,
    PathFormatError,
    an.AnalyticsDomainError,
    engine.OracleSizeError,
    EpisodeIncompleteError,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as exc:
        print(f"truncvar {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
