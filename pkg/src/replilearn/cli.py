"""Command-line runner: ``replilearn <subcommand> --config FILE`` writes CSV rows.

Exit codes: 0 success, 2 configuration or usage error, 3 a ``selftest``
check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from typing import Sequence

from . import experiments as ex
from .harness import MIN_TRIALS, default_workers

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILED = 3

DEFAULT_TRIALS = 1000
QUICK_TRIALS = MIN_TRIALS
SEED_ENV = "REPLILEARN_SEED"

COMMON_KEYS = {"experiment_id": str, "n_trials": int}
KEYS: dict[str, dict[str, type]] = {
    "pointwise": {"d": int, "alpha": float, "beta": float, "rho": float, "c_T": float, "boost": int,
                  "base_m": int, "biases": list},
    "approx": {"mode": str, "d": int, "alpha": float, "beta": float, "rho": float, "gamma": float,
               "base_m": int, "biases": list},
    "threshold": {"alpha": float, "beta": float, "rho": float, "gamma": float, "threshold": float,
                  "noise": float},
    "realizable": {"hclass": str, "d": int, "alpha": float, "beta": float, "rho": float, "gamma": float,
                   "threshold": float, "noise": float, "biases": list},
    "semi": {"hclass": str, "d": int, "alpha": float, "beta": float, "rho": float, "threshold": float,
             "noise": float, "biases": list},
    "select": {"n": int, "alpha": float, "beta": float, "rho": float},
    "reduce-bias": {"d": int, "alpha": float, "rho": float, "base_m": int},
    "reduce-amplify": {"d": int, "alpha": float, "rho": float, "gamma": float, "base_alpha": float,
                       "base_beta": float},
    "sign-oneway": {"d": int, "alpha": float, "beta": float, "rho": float},
    "selftest": {},
}
CHOICES = {"mode": {"const_alpha", "const_gamma"}, "hclass": {"threshold", "finite"}}


class ConfigError(ValueError):
    pass


def _convert(key: str, raw: str, kind: type):
    try:
        if kind is list:
            return [float(v) for v in raw.split(",") if v.strip()]
        value = kind(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    if key in CHOICES and value not in CHOICES[key]:
        raise ConfigError(f"{key} must be one of {sorted(CHOICES[key])}")
    return value


def parse_lines(text: str) -> list[tuple[int, str, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out.append((lineno, key, value))
    return out


def parse_config(text: str, subcommand: str) -> dict:
    """Typed parameters for ``subcommand``; grid configs also carry ``subcommand`` and ``grid.*`` axes."""
    params: dict = {}
    axes: dict = {}
    lines = parse_lines(text)
    target = subcommand
    if subcommand == "grid":
        subs = [v for _, k, v in lines if k == "subcommand"]
        if len(subs) != 1 or subs[0] not in ex.EXPERIMENTS:
            raise ConfigError("grid config needs exactly one valid subcommand=<name> line")
        target = subs[0]
    allowed = {**COMMON_KEYS, **KEYS[target]}
    for lineno, key, value in lines:
        if subcommand == "grid" and key == "subcommand":
            continue
        if subcommand == "grid" and key.startswith("grid."):
            name = key[5:]
            if name not in allowed or name in COMMON_KEYS:
                raise ConfigError(f"line {lineno}: cannot sweep {name!r}")
            kind = allowed[name]
            if kind is list:
                raise ConfigError(f"line {lineno}: cannot sweep list-valued {name!r}")
            vals = [_convert(name, v.strip(), kind) for v in value.split(",") if v.strip()]
            if not vals:
                raise ConfigError(f"line {lineno}: empty axis {name!r}")
            axes[name] = vals
            continue
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in params or key in axes:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        params[key] = _convert(key, value, allowed[key])
    if subcommand == "grid":
        if not axes:
            raise ConfigError("grid config needs at least one grid.<key>=a,b,... line")
        params["subcommand"] = target
        params["axes"] = axes
    if params.get("n_trials", MIN_TRIALS) < MIN_TRIALS:
        raise ConfigError(f"n_trials must be at least {MIN_TRIALS}")
    return params


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render_csv(rows: Sequence[ex.Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ex.COLUMNS)
    for row in rows:
        w.writerow([format_value(v) for v in row.values()])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replilearn", description="Paired-run replicability experiments.")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    for name in [*ex.EXPERIMENTS, "grid", "selftest"]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="root seed (overridden by $%s)" % SEED_ENV)
        p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
        p.add_argument("--quick", action="store_true", help=f"run {QUICK_TRIALS} trials")
    return parser


def resolve_seed(flag: int) -> int:
    env = os.environ.get(SEED_ENV)
    seed = flag if env is None or env.strip() == "" else int(env)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return seed


def run(args: argparse.Namespace) -> tuple[list[ex.Row], int]:
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    elif args.command == "grid":
        raise ConfigError("grid needs --config")
    params = parse_config(text, args.command)
    seed = resolve_seed(args.seed)
    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        raise ConfigError("--workers must be positive")
    n_trials = QUICK_TRIALS if args.quick else int(params.pop("n_trials", DEFAULT_TRIALS))
    params.pop("n_trials", None)

    if args.command == "selftest":
        rows = ex.selftest_rows(seed, workers, quick=args.quick)
        return rows, EXIT_OK if all(ex.passed(r) for r in rows) else EXIT_FAILED
    if args.command == "grid":
        target, axes = params.pop("subcommand"), params.pop("axes")
        try:
            return ex.run_grid_rows(target, params, axes, seed, n_trials, workers), EXIT_OK
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return [ex.EXPERIMENTS[args.command](params, seed, n_trials, workers)], EXIT_OK
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        rows, code = run(args)
    except ConfigError as exc:
        print(f"replilearn: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = render_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
        sys.stdout.flush()
    if code == EXIT_FAILED:
        failed = [r.experiment_id for r in rows if not ex.passed(r)]
        print(f"replilearn: selftest failed: {', '.join(failed)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
