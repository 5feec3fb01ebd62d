"""Repeated-split benchmark of ELM, BAS-ELM and MBAS-ELM."""

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import data, elm, numerics, trainer
from .bas import BasConfig
from .errors import ConfigError
from .mbas import SwarmConfig

ALGORITHMS = ("ELM", "BAS-ELM", "MBAS-ELM")
METRICS = ("rmse", "r2", "cond", "norm")
NORMALIZE_MODES = ("both", "targets", "none")
OUT_ENV = "MBAS_ELM_OUT"

_ALG_SEED_KEY = {"ELM": 1, "BAS-ELM": 2, "MBAS-ELM": 3}
_ALIASES = {"elm": "ELM", "bas": "BAS-ELM", "bas-elm": "BAS-ELM",
            "mbas": "MBAS-ELM", "mbas-elm": "MBAS-ELM"}


def canonical_algorithm(name):
    key = name.strip().lower()
    if key not in _ALIASES:
        raise ConfigError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return _ALIASES[key]


def default_out_dir():
    return os.environ.get(OUT_ENV, "mbas_elm_out")


@dataclass(frozen=True)
class RunConfig:
    """Everything one benchmark invocation needs.

    Either ``data`` (a file path) or ``synthetic`` (row count of a generated
    sinc set) names the dataset.
    """

    data: str = None
    format: str = "auto"
    target_col: int = -1
    synthetic: int = None
    noise: float = 0.05
    n_train: int = None
    algorithms: tuple = ALGORITHMS
    repeats: int = 30
    hidden: int = 10
    seed: int = 0
    gamma_grid: tuple = trainer.DEFAULT_GAMMA_GRID
    n_searchers: int = 10
    n_followers: int = 5
    n_explorers: int = 5
    iterations: int = 100
    follower_step: float = 0.1
    explorer_step: float = 0.2
    step0: float = 0.5
    eta: float = 0.95
    normalize: str = "both"
    activation: str = "sigmoid"
    out: str = field(default_factory=default_out_dir)
    emit: tuple = ("table",)
    jobs: int = 1
    save_models: bool = False

    def __post_init__(self):
        algs = tuple(dict.fromkeys(canonical_algorithm(a) for a in self.algorithms))
        object.__setattr__(self, "algorithms", tuple(a for a in ALGORITHMS if a in algs))
        object.__setattr__(self, "gamma_grid", tuple(float(g) for g in self.gamma_grid))
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.hidden < 1:
            raise ConfigError("hidden must be >= 1")
        if (self.data is None) == (self.synthetic is None):
            raise ConfigError("give exactly one of a data file or a synthetic row count")
        if self.normalize not in NORMALIZE_MODES:
            raise ConfigError(f"normalize must be one of {NORMALIZE_MODES}")
        for fmt in self.emit:
            if fmt not in ("table", "csv", "json"):
                raise ConfigError(f"unknown emit format {fmt!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.gamma_grid:
            raise ConfigError("gamma grid must not be empty")
        self.train_config()

    def train_config(self):
        swarm = SwarmConfig(
            n_searchers=self.n_searchers, n_followers=self.n_followers,
            n_explorers=self.n_explorers, follower_step=self.follower_step,
            explorer_step=self.explorer_step,
            searcher=BasConfig(eta=self.eta, step0=self.step0),
            iterations=self.iterations, bounds=(-1.0, 1.0))
        spec = trainer.FitnessSpec(gamma=self.gamma_grid[0], hidden_count=self.hidden,
                                   activation=elm.Activation(self.activation))
        return trainer.TrainConfig(swarm=swarm, fitness=spec, gamma_grid=self.gamma_grid,
                                   seed=self.seed)

    @property
    def dataset_name(self):
        if self.synthetic is not None:
            return "sinc"
        return os.path.splitext(os.path.basename(self.data))[0]


@dataclass(frozen=True)
class RunRecord:
    repeat: int
    algorithm: str
    rmse: float
    r2: float
    cond: float
    cond_train: float
    norm: float
    gamma: float = None
    training: dict = None


@dataclass(frozen=True)
class AlgorithmSummary:
    algorithm: str
    runs: int
    mean_rmse: float
    std_rmse: float
    mean_r2: float
    mean_cond: float
    mean_norm: float
    mean_cond_train: float


@dataclass
class BenchmarkResult:
    summary: list
    records: list
    config: RunConfig = None

    def by_algorithm(self):
        return {s.algorithm: s for s in self.summary}


def load_benchmark_dataset(cfg):
    if cfg.synthetic is not None:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(2**31,)))
        return data.synthetic_sinc(cfg.synthetic, cfg.noise, rng)
    return data.load_dataset(cfg.data, cfg.format, cfg.target_col)


def _scale(cfg, train, test):
    if cfg.normalize == "none":
        return train, test
    scaler = data.fit_scaler(train)
    if cfg.normalize == "targets":
        scaler = replace(scaler, x_min=np.zeros_like(scaler.x_min),
                         x_max=np.ones_like(scaler.x_max))
    return data.apply_scaler(scaler, train), data.apply_scaler(scaler, test)


def split_for_repeat(cfg, ds, repeat):
    """The shared train/test split and scaling of one repeat."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(repeat, 0))
    train, test = data.random_split(ds, cfg.n_train, np.random.default_rng(ss))
    return _scale(cfg, train, test)


def _score(alg, repeat, model, train, test, gamma=None, training=None):
    rep = elm.evaluate(model, test.X, test.Y)
    cond_train = numerics.condition_number(elm.hidden_matrix(train.X, model.params))
    return RunRecord(repeat, alg, rep.rmse, rep.r_squared, rep.condition_number,
                     cond_train, rep.beta_norm, gamma, training)


def train_algorithm(alg, cfg, train, repeat):
    """Fit one algorithm on the training split of one repeat."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(repeat, _ALG_SEED_KEY[alg]))
    if alg == "ELM":
        model = trainer.train_plain_elm(train, cfg.hidden, elm.Activation(cfg.activation),
                                        np.random.default_rng(ss))
        return model, None
    report = trainer.train_with_gamma_selection(train, cfg.train_config(), seed=ss,
                                                bas=(alg == "BAS-ELM"))
    return report.model, report


def run_repeat(cfg, ds, repeat):
    train, test = split_for_repeat(cfg, ds, repeat)
    out = []
    for alg in cfg.algorithms:
        model, report = train_algorithm(alg, cfg, train, repeat)
        training = report.as_record() if report is not None else None
        gamma = report.gamma if report is not None else None
        out.append((_score(alg, repeat, model, train, test, gamma, training), model))
    return out


def _mean(values):
    return float(np.mean(values))


def summarize(records, algorithms=ALGORITHMS):
    """Per-algorithm means; RMSE spread is the sample standard deviation (0 for one run)."""
    out = []
    for alg in algorithms:
        rs = [r for r in records if r.algorithm == alg]
        if not rs:
            continue
        rmse = np.array([r.rmse for r in rs])
        std = float(np.std(rmse, ddof=1)) if len(rs) > 1 else 0.0
        out.append(AlgorithmSummary(
            alg, len(rs), _mean(rmse), std, _mean([r.r2 for r in rs]),
            _mean([r.cond for r in rs]), _mean([r.norm for r in rs]),
            _mean([r.cond_train for r in rs])))
    return out


def run_benchmark(cfg, dataset=None, models_out=None):
    """Run every repeat and aggregate.

    Within a repeat all algorithms share one split and one scaler. Repeats
    may run in worker processes (``cfg.jobs``); results are ordered by
    repeat index so the output does not depend on the worker count.
    """
    ds = dataset if dataset is not None else load_benchmark_dataset(cfg)
    if cfg.n_train is None:
        raise ConfigError("n_train is required")
    if not 1 <= cfg.n_train < len(ds):
        raise ConfigError(f"n_train must be in [1, {len(ds) - 1}] for {len(ds)} rows")
    if cfg.jobs > 1 and cfg.repeats > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_repeat = list(pool.map(run_repeat, [cfg] * cfg.repeats, [ds] * cfg.repeats,
                                       range(cfg.repeats)))
    else:
        per_repeat = [run_repeat(cfg, ds, r) for r in range(cfg.repeats)]
    records = [rec for rows in per_repeat for rec, _ in rows]
    if models_out is not None:
        for rows in per_repeat:
            for rec, model in rows:
                models_out[(rec.repeat, rec.algorithm)] = model
    return BenchmarkResult(summarize(records, cfg.algorithms), records, cfg)


# -- output ---------------------------------------------------------------

SUMMARY_FIELDS = ("algorithm", "runs", "mean_rmse", "std_rmse", "mean_r2", "mean_cond",
                  "mean_norm", "mean_cond_train")


def fmt6(v):
    """Six significant digits; the single number format shared by all outputs."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6g}"


def best_algorithm(summary):
    return min(summary, key=lambda s: s.mean_rmse).algorithm


def emit_table(summary, fmt="table"):
    """Render a summary as an aligned table, CSV, or JSON.

    The row with the lowest mean RMSE carries the best marker.
    """
    best = best_algorithm(summary)
    if fmt == "csv":
        lines = [",".join(SUMMARY_FIELDS + ("best",))]
        for s in summary:
            row = [s.algorithm] + [fmt6(getattr(s, f)) for f in SUMMARY_FIELDS[1:]]
            lines.append(",".join(row + ["1" if s.algorithm == best else "0"]))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        rows = []
        for s in summary:
            row = {"algorithm": s.algorithm, "runs": s.runs}
            for f in SUMMARY_FIELDS[2:]:
                text = fmt6(getattr(s, f))
                row[f] = text if "inf" in text else float(text)
            row["best"] = s.algorithm == best
            rows.append(row)
        return json.dumps({"summary": rows}, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")

    single = any(s.runs == 1 for s in summary)
    header = ["", "Algorithm", "RMSE", "Std", "R2", "K2(H)", "||beta||"]
    body = []
    for s in summary:
        std = fmt6(s.std_rmse) + (" [1]" if s.runs == 1 else "")
        body.append(["*" if s.algorithm == best else "", s.algorithm, fmt6(s.mean_rmse), std,
                     fmt6(s.mean_r2), fmt6(s.mean_cond), fmt6(s.mean_norm)])
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + body]
    lines.append("* lowest mean RMSE")
    if single:
        lines.append("[1] single run: standard deviation reported as 0")
    return "\n".join(lines) + "\n"


def trace_table(records, metric, algorithms=None):
    """Rows of ``(repeat, value per algorithm)`` for one metric."""
    algs = [a for a in ALGORITHMS if any(r.algorithm == a for r in records)]
    if algorithms is not None:
        algs = [a for a in algs if a in algorithms]
    by_key = {(r.repeat, r.algorithm): getattr(r, metric) for r in records}
    repeats = sorted({r.repeat for r in records})
    return algs, [(k, [by_key[(k, a)] for a in algs]) for k in repeats]


def emit_traces(records, out_dir, metrics=METRICS + ("cond_train",)):
    """Write ``trace_<metric>.csv`` files at full precision; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for metric in metrics:
        algs, rows = trace_table(records, metric)
        path = os.path.join(out_dir, f"trace_{metric}.csv")
        with open(path, "w") as fh:
            fh.write(",".join(["repeat"] + algs) + "\n")
            for k, vals in rows:
                fh.write(",".join([str(k)] + [repr(float(v)) for v in vals]) + "\n")
        paths.append(path)
    return paths


def read_trace(path):
    """Parse a trace CSV back into ``(algorithms, {algorithm: values})``."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        cols = {a: [] for a in header[1:]}
        for line in fh:
            cells = line.strip().split(",")
            for a, c in zip(header[1:], cells[1:]):
                cols[a].append(float(c))
    return header[1:], cols


def write_outputs(result, out_dir, emit=("table",), models=None):
    """Write the summary files, traces and per-run records under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    names = {"table": "summary.txt", "csv": "summary.csv", "json": "summary.json"}
    for fmt in emit:
        path = os.path.join(out_dir, names[fmt])
        with open(path, "w") as fh:
            fh.write(emit_table(result.summary, fmt))
        written.append(path)
    written += emit_traces(result.records, out_dir)
    path = os.path.join(out_dir, "runs.jsonl")
    with open(path, "w") as fh:
        for rec in result.records:
            row = asdict(rec)
            for k, v in row.items():
                if isinstance(v, float) and math.isinf(v):
                    row[k] = "inf"
            if models is not None and (rec.repeat, rec.algorithm) in models:
                name = f"model_{rec.algorithm}_r{rec.repeat:03d}.txt"
                elm.save_model(models[(rec.repeat, rec.algorithm)], os.path.join(out_dir, name))
                row["model_file"] = name
            fh.write(json.dumps(row) + "\n")
    written.append(path)
    return written
