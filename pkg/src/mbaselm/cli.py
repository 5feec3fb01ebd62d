"""Command-line benchmark runner.

Settings come from an optional ``key = value`` config file, overridden by
flags. Exit status: 0 success, 2 configuration error, 3 data error,
4 numerical failure.
"""

import argparse
import logging
import sys

from . import benchmark
from .errors import ConfigError, DataError, DegenerateTargetError, FitnessError, NumericalError
from .mbas import SwarmConfig

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

# config-file key -> (RunConfig field, parser)
_LIST = lambda s: tuple(x for x in s.replace(",", " ").split() if x)  # noqa: E731
_FLOATS = lambda s: tuple(float(x) for x in _LIST(s))  # noqa: E731
_BOOL = lambda s: s.strip().lower() in ("1", "true", "yes", "on")  # noqa: E731

KEYS = {
    "data": ("data", str),
    "format": ("format", str),
    "target-col": ("target_col", int),
    "synthetic": ("synthetic", int),
    "noise": ("noise", float),
    "n-train": ("n_train", int),
    "algs": ("algorithms", _LIST),
    "repeats": ("repeats", int),
    "hidden": ("hidden", int),
    "seed": ("seed", int),
    "gamma-grid": ("gamma_grid", _FLOATS),
    "searchers": ("n_searchers", int),
    "followers": ("n_followers", int),
    "explorers": ("n_explorers", int),
    "iterations": ("iterations", int),
    "follower-step": ("follower_step", float),
    "explorer-step": ("explorer_step", float),
    "step0": ("step0", float),
    "eta": ("eta", float),
    "normalize": ("normalize", str),
    "activation": ("activation", str),
    "out": ("out", str),
    "emit": ("emit", _LIST),
    "jobs": ("jobs", int),
    "save-models": ("save_models", _BOOL),
}


def read_config_file(path):
    """Parse ``key = value`` lines. ``#`` starts a comment; ``_`` and ``-`` are interchangeable in keys."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, _, value = line.partition(" ")
        key = key.strip().replace("_", "-")
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        field, conv = KEYS[key]
        try:
            values[field] = conv(value.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def build_parser():
    p = argparse.ArgumentParser(
        prog="mbas-elm",
        description="Benchmark ELM, BAS-ELM and MBAS-ELM over repeated random splits.")
    p.add_argument("--config", help="key = value settings file (flags override it)")
    p.add_argument("--data", help="dataset file")
    p.add_argument("--synthetic", type=int, metavar="N",
                   help="use N generated sinc rows instead of a file")
    p.add_argument("--noise", type=float, help="noise sd for --synthetic (default 0.05)")
    p.add_argument("--format", choices=["auto", "libsvm", "csv", "whitespace"])
    p.add_argument("--target-col", type=int, help="target column for delimited files (default last)")
    p.add_argument("--n-train", type=int, help="training rows per repeat")
    p.add_argument("--algs", help="comma-separated subset of ELM,BAS-ELM,MBAS-ELM")
    p.add_argument("--repeats", type=int, help="number of random splits (default 30)")
    p.add_argument("--hidden", type=int, help="hidden nodes L (default 10)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--gamma-grid", help="comma-separated gamma candidates")
    p.add_argument("--population", type=int,
                   help="swarm size; split into searchers/followers/explorers automatically")
    p.add_argument("--searchers", type=int)
    p.add_argument("--followers", type=int)
    p.add_argument("--explorers", type=int)
    p.add_argument("--iterations", type=int, help="swarm iterations per fold")
    p.add_argument("--follower-step", type=float)
    p.add_argument("--explorer-step", type=float)
    p.add_argument("--step0", type=float, help="initial searcher step and antenna length")
    p.add_argument("--eta", type=float, help="searcher decay factor in (0, 1)")
    p.add_argument("--normalize", choices=benchmark.NORMALIZE_MODES,
                   help="min-max scale features and targets, targets only, or nothing")
    p.add_argument("--activation", choices=["sigmoid", "tanh", "sine"])
    p.add_argument("--out", help=f"output directory (default ${benchmark.OUT_ENV} or ./mbas_elm_out)")
    p.add_argument("--emit", action="append", choices=["table", "csv", "json"],
                   help="summary format; repeatable (default table)")
    p.add_argument("--jobs", type=int, help="worker processes for repeats")
    p.add_argument("--save-models", action="store_true", default=None)
    p.add_argument("-q", "--quiet", action="store_true", help="do not print the table")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    values = read_config_file(args.config) if args.config else {}
    for key, (field, conv) in KEYS.items():
        raw = getattr(args, key.replace("-", "_"), None)
        if raw is None:
            continue
        if isinstance(raw, list):
            values[field] = tuple(raw)
        elif conv in (_LIST, _FLOATS):
            try:
                values[field] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for --{key}: {exc}") from None
        else:
            values[field] = raw
    if args.population is not None:
        s, f, e = SwarmConfig.default_split(args.population)
        values.update(n_searchers=s, n_followers=f, n_explorers=e)
    return benchmark.RunConfig(**values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        models = {} if cfg.save_models else None
        result = benchmark.run_benchmark(cfg, models_out=models)
        benchmark.write_outputs(result, cfg.out, cfg.emit, models)
    except ConfigError as exc:
        print(f"mbas-elm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, DegenerateTargetError) as exc:
        print(f"mbas-elm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, FitnessError, ArithmeticError) as exc:
        print(f"mbas-elm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TypeError as exc:
        print(f"mbas-elm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print(benchmark.emit_table(result.summary, "table"), end="")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
