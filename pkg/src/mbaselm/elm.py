"""Extreme learning machine: hidden layer, closed-form output weights, metrics."""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import numerics
from .errors import DegenerateTargetError, ParseError, ShapeError


class Activation(str, enum.Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    SINE = "sine"

    def __call__(self, z):
        if self is Activation.SIGMOID:
            return expit(z)
        if self is Activation.TANH:
            return np.tanh(z)
        return np.sin(z)


@dataclass(frozen=True)
class ElmParams:
    """Hidden-layer parameters.

    ``input_weights`` has one row per hidden node (shape ``L x d``), so
    row ``j`` is the weight vector feeding node ``j``.
    """

    input_weights: np.ndarray
    biases: np.ndarray
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        W = np.array(self.input_weights, dtype=float, ndmin=2)
        b = np.array(self.biases, dtype=float).reshape(-1)
        if W.shape[0] != b.shape[0]:
            raise ShapeError(f"input_weights {W.shape} and biases {b.shape} disagree on L")
        if W.shape[0] < 1 or W.shape[1] < 1:
            raise ShapeError(f"need L >= 1 and d >= 1, got input_weights {W.shape}")
        W.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "input_weights", W)
        object.__setattr__(self, "biases", b)
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def hidden_count(self):
        return self.input_weights.shape[0]

    @property
    def input_dim(self):
        return self.input_weights.shape[1]

    @classmethod
    def random(cls, input_dim, hidden_count, rng, activation=Activation.SIGMOID):
        """Weights and biases drawn uniformly from [-1, 1]."""
        W = rng.uniform(-1.0, 1.0, size=(hidden_count, input_dim))
        b = rng.uniform(-1.0, 1.0, size=hidden_count)
        return cls(W, b, activation)


@dataclass(frozen=True)
class ElmModel:
    params: ElmParams
    output_weights: np.ndarray

    def __post_init__(self):
        beta = np.array(self.output_weights, dtype=float)
        if beta.ndim == 1:
            beta = beta[:, None]
        if beta.shape[0] != self.params.hidden_count:
            raise ShapeError(
                f"output_weights {beta.shape} do not match L={self.params.hidden_count}")
        if not np.all(np.isfinite(beta)):
            raise ValueError("output_weights must be finite")
        beta.flags.writeable = False
        object.__setattr__(self, "output_weights", beta)

    @property
    def output_dim(self):
        return self.output_weights.shape[1]

    def predict(self, X):
        return predict(self, X)


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    r_squared: float
    condition_number: float
    beta_norm: float


def _as_2d(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def hidden_matrix(X, params):
    """Hidden-layer output ``H[i, j] = g(W_j . x_i + b_j)``, shape ``N x L``."""
    X = _as_2d(X, "X")
    if X.shape[1] != params.input_dim:
        raise ShapeError(
            f"X has shape {X.shape} but input_weights {params.input_weights.shape} "
            f"expect {params.input_dim} features")
    return params.activation(X @ params.input_weights.T + params.biases)


def solve_output_weights(H, Y, tol=numerics.DEFAULT_TOL):
    """Minimum-norm least-squares output weights ``pinv(H) @ Y``."""
    H = _as_2d(H, "H")
    Y = _as_2d(Y, "Y")
    if H.shape[0] != Y.shape[0]:
        raise ShapeError(f"H has shape {H.shape} but Y has shape {Y.shape}")
    return numerics.pseudoinverse(H, tol) @ Y


def fit(X, Y, params, tol=numerics.DEFAULT_TOL):
    """Solve the output weights for fixed hidden parameters."""
    return ElmModel(params, solve_output_weights(hidden_matrix(X, params), Y, tol))


def predict(model, X):
    return hidden_matrix(X, model.params) @ model.output_weights


def _paired(pred, truth):
    pred = _as_2d(pred, "pred")
    truth = _as_2d(truth, "truth")
    if pred.shape != truth.shape:
        raise ShapeError(f"pred shape {pred.shape} != truth shape {truth.shape}")
    return pred, truth


def rmse(pred, truth):
    """Root mean squared error.

    With several output columns the squared errors of a sample are summed
    before averaging over the ``N`` samples.
    """
    pred, truth = _paired(pred, truth)
    if pred.shape[0] < 1:
        raise ShapeError("rmse needs at least one row")
    return math.sqrt(float(np.sum((pred - truth) ** 2)) / pred.shape[0])


def r_squared(pred, truth):
    pred, truth = _paired(pred, truth)
    if pred.shape[0] < 2:
        raise ShapeError("r_squared needs at least two rows")
    sst = float(np.sum((truth - truth.mean(axis=0)) ** 2))
    if sst == 0.0:
        raise DegenerateTargetError("targets have zero variance")
    return 1.0 - float(np.sum((pred - truth) ** 2)) / sst


def evaluate(model, X, Y):
    H = hidden_matrix(X, model.params)
    pred = H @ model.output_weights
    return EvalReport(
        rmse=rmse(pred, Y),
        r_squared=r_squared(pred, Y),
        condition_number=numerics.condition_number(H),
        beta_norm=numerics.l2_norm(model.output_weights),
    )


# Plain-text model format:
#   L <int> / d <int> / m <int> / activation <tag>
#   W then L rows of d values, b then one row of L values, beta then L rows of m values

def _fmt_row(values):
    return " ".join(repr(float(v)) for v in values)


def dumps_model(model):
    p = model.params
    lines = [
        f"L {p.hidden_count}",
        f"d {p.input_dim}",
        f"m {model.output_dim}",
        f"activation {p.activation.value}",
        "W",
    ]
    lines += [_fmt_row(row) for row in p.input_weights]
    lines += ["b", _fmt_row(p.biases), "beta"]
    lines += [_fmt_row(row) for row in model.output_weights]
    return "\n".join(lines) + "\n"


def loads_model(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    header = {}
    pos = 0
    try:
        for key in ("L", "d", "m", "activation"):
            k, v = lines[pos].split(None, 1)
            if k != key:
                raise ParseError(f"expected key {key!r}, got {k!r}", pos + 1)
            header[key] = v.strip()
            pos += 1
        L, d, m = int(header["L"]), int(header["d"]), int(header["m"])

        def block(name, nrows, ncols):
            nonlocal pos
            if lines[pos] != name:
                raise ParseError(f"expected section {name!r}", pos + 1)
            pos += 1
            rows = []
            for _ in range(nrows):
                vals = [float(t) for t in lines[pos].split()]
                if len(vals) != ncols:
                    raise ParseError(f"expected {ncols} values, got {len(vals)}", pos + 1)
                rows.append(vals)
                pos += 1
            return np.array(rows)

        W = block("W", L, d)
        b = block("b", 1, L)[0]
        beta = block("beta", L, m)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed model file: {exc}", pos + 1) from exc
    return ElmModel(ElmParams(W, b, Activation(header["activation"])), beta)


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(dumps_model(model))


def load_model(path):
    with open(path) as fh:
        return loads_model(fh.read())
