"""Dataset parsing, min-max scaling, splitting and a synthetic sinc generator."""

import re
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParseError


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple = None

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.shape[0] != Y.shape[0]:
            raise DataError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        if X.shape[0] < 1:
            raise DataError("dataset is empty")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    def __len__(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.X[idx], self.Y[idx], self.feature_names)


def _number(token, lineno, what):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} {token!r} is not a number", lineno) from None
    if not np.isfinite(value):
        raise ParseError(f"{what} {token!r} is not finite", lineno)
    return value


def parse_libsvm(text):
    """Parse ``label idx:val ...`` lines into a dense dataset.

    Indices are 1-based and must increase within a line. Missing indices
    are zero; the feature count is the largest index seen.
    """
    labels, rows = [], []
    width = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_number(tokens[0], lineno, "label"))
        row = {}
        last = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"token {tok!r} is not idx:val", lineno)
            try:
                idx = int(idx_s)
            except ValueError:
                raise ParseError(f"index {idx_s!r} is not an integer", lineno) from None
            if idx <= last:
                raise ParseError(f"index {idx} does not increase (previous {last})", lineno)
            row[idx] = _number(val_s, lineno, "value")
            last = idx
        width = max(width, last)
        rows.append(row)
    if not rows:
        raise ParseError("no data lines")
    X = np.zeros((len(rows), width))
    for i, row in enumerate(rows):
        for idx, val in row.items():
            X[i, idx - 1] = val
    return Dataset(X, np.array(labels))


def parse_delimited(text, target_column=-1):
    """Parse comma- or whitespace-separated numeric rows.

    ``target_column`` (0-based, negative counts from the end) becomes ``Y``;
    the remaining columns keep their order in ``X``.
    """
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c for c in re.split(r"[,\s]+", line) if c]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"expected {width} columns, got {len(cells)}", lineno)
        rows.append([_number(c, lineno, f"cell {j + 1}") for j, c in enumerate(cells)])
    if not rows:
        raise ParseError("no data lines")
    table = np.array(rows)
    if width < 2:
        raise DataError("need at least one feature column besides the target")
    if not -width <= target_column < width:
        raise DataError(f"target column {target_column} out of range for {width} columns")
    t = target_column % width
    return Dataset(np.delete(table, t, axis=1), table[:, t])


def _fmt(v):
    return repr(float(v))


def to_libsvm(ds):
    """Write ``ds`` in LIBSVM format. Zero features are omitted; only ``Y[:, 0]`` is kept."""
    lines = []
    for x, y in zip(ds.X, ds.Y[:, 0]):
        feats = " ".join(f"{j + 1}:{_fmt(v)}" for j, v in enumerate(x) if v != 0.0)
        lines.append(f"{_fmt(y)} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def to_delimited(ds, sep=","):
    """Features then targets, one row per sample."""
    table = np.hstack([ds.X, ds.Y])
    return "\n".join(sep.join(_fmt(v) for v in row) for row in table) + "\n"


def load_dataset(path, fmt="auto", target_column=-1):
    """Read a dataset file. ``fmt`` is ``libsvm``, ``csv``, ``whitespace`` or ``auto``."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    if fmt == "auto":
        first = next((ln for ln in text.splitlines() if ln.strip()), "")
        fmt = "libsvm" if ":" in first else "csv"
    if fmt == "libsvm":
        return parse_libsvm(text)
    if fmt in ("csv", "whitespace", "delimited"):
        return parse_delimited(text, target_column)
    raise DataError(f"unknown dataset format {fmt!r}")


@dataclass(frozen=True)
class Scaler:
    """Per-column min/max learned from a training set."""

    x_min: np.ndarray
    x_max: np.ndarray
    y_min: np.ndarray
    y_max: np.ndarray

    @property
    def constant_features(self):
        return self.x_max == self.x_min

    @property
    def constant_targets(self):
        return self.y_max == self.y_min


def fit_scaler(train):
    return Scaler(train.X.min(axis=0), train.X.max(axis=0),
                  train.Y.min(axis=0), train.Y.max(axis=0))


def _scale(a, lo, hi):
    span = hi - lo
    safe = np.where(span == 0.0, 1.0, span)
    return np.where(span == 0.0, 0.0, (a - lo) / safe)


def apply_scaler(scaler, ds):
    """Map to ``(v - min) / (max - min)``. Constant columns become 0; no clipping."""
    return Dataset(_scale(ds.X, scaler.x_min, scaler.x_max),
                   _scale(ds.Y, scaler.y_min, scaler.y_max), ds.feature_names)


def random_split(ds, n_train, rng):
    """Uniform random train/test partition with ``n_train`` training rows."""
    n = len(ds)
    if not 1 <= n_train < n:
        raise DataError(f"n_train must be in [1, {n - 1}], got {n_train}")
    perm = rng.permutation(n)
    return ds.subset(np.sort(perm[:n_train])), ds.subset(np.sort(perm[n_train:]))


def kfold_indices(n, k, rng):
    if n < k:
        raise DataError(f"cannot split {n} rows into {k} folds")
    perm = rng.permutation(n)
    return [np.sort(part) for part in np.array_split(perm, k)]


def kfold(ds, k=3, rng=None):
    """Partition ``ds`` into ``k`` disjoint subsets whose sizes differ by at most one."""
    rng = rng if rng is not None else np.random.default_rng()
    return [ds.subset(idx) for idx in kfold_indices(len(ds), k, rng)]


def sinc(x):
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def synthetic_sinc(n, noise_sd, rng):
    """``y = sin(x)/x`` plus Gaussian noise, ``x`` uniform on [-10, 10]."""
    if n < 1 or noise_sd < 0:
        raise ValueError("need n >= 1 and noise_sd >= 0")
    x = rng.uniform(-10.0, 10.0, size=n)
    y = sinc(x) + (rng.normal(0.0, noise_sd, size=n) if noise_sd > 0 else 0.0)
    return Dataset(x[:, None], y, ("x",))
