"""Swarm-optimised ELM training.

Hidden weights and biases are flattened into a position vector in [-1, 1]
and scored by ``||beta|| * K2(H) + gamma * (1 - R^2)``. Each of three
training folds gets its own swarm run; the fold winners are re-scored on
the whole training set and the best one defines the final network.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import elm, numerics
from .data import kfold_indices
from .elm import Activation, ElmParams
from .errors import ConfigError, MbasElmError
from .mbas import SwarmConfig, mbas_search

log = logging.getLogger(__name__)

INFINITE = numerics.INFINITE
DEFAULT_GAMMA_GRID = (0.1, 1.0, 10.0, 100.0)
FOLDS = 3


@dataclass(frozen=True)
class FitnessSpec:
    gamma: float = 1.0
    hidden_count: int = 10
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.hidden_count < 1:
            raise ConfigError("hidden_count must be >= 1")
        object.__setattr__(self, "activation", Activation(self.activation))


@dataclass(frozen=True)
class BestRecord:
    position: np.ndarray
    fitness: float
    rmse: float


@dataclass(frozen=True)
class TrainConfig:
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    fitness: FitnessSpec = field(default_factory=FitnessSpec)
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    folds: int = FOLDS
    seed: int = 0

    def __post_init__(self):
        if self.folds != FOLDS:
            raise ConfigError("training uses exactly 3 folds")
        if len(self.gamma_grid) == 0:
            raise ConfigError("gamma_grid must not be empty")
        object.__setattr__(self, "gamma_grid", tuple(float(g) for g in self.gamma_grid))


@dataclass
class TrainReport:
    """What one training run produced."""

    model: elm.ElmModel
    fold_bests: list
    chosen_fold: int
    full_fitness: list
    gamma: float

    def as_record(self):
        return {
            "gamma": self.gamma,
            "chosen_fold": self.chosen_fold,
            "folds": [
                {"position_hash": position_hash(b.position), "fitness": b.fitness,
                 "rmse": b.rmse, "full_train_fitness": full}
                for b, full in zip(self.fold_bests, self.full_fitness)
            ],
            "model_hash": position_hash(encode_position(self.model.params)),
        }


def position_hash(position):
    return hashlib.sha256(np.ascontiguousarray(position, dtype="<f8").tobytes()).hexdigest()[:16]


def position_length(d, L):
    return (d + 1) * L


def encode_position(params):
    """Flatten to ``[w_11..w_1L, w_21..w_2L, ..., w_d1..w_dL, b_1..b_L]``.

    ``w_ij`` is the weight from input ``i`` to hidden node ``j``.
    """
    return np.concatenate([params.input_weights.T.ravel(), params.biases])


def decode_position(v, d, L, activation=Activation.SIGMOID):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != position_length(d, L):
        raise ValueError(f"position has length {v.size}, expected (d+1)*L = {(d + 1) * L}")
    W = v[: d * L].reshape(d, L).T
    return ElmParams(W, v[d * L:], activation)


def fitness(position, X, Y, spec):
    """Composite fitness and RMSE of a position on ``(X, Y)``.

    The output weights are solved on ``(X, Y)`` and the same data scores
    them. Numerical failures and singular hidden matrices give an infinite
    fitness.

    Returns
    -------
    value : float
    rmse : float
    """
    X = np.asarray(X, dtype=float)
    try:
        params = decode_position(position, X.shape[1], spec.hidden_count, spec.activation)
        H = elm.hidden_matrix(X, params)
        beta = elm.solve_output_weights(H, Y)
        pred = H @ beta
        err = elm.rmse(pred, Y)
        cond = numerics.condition_number(H)
        if cond == INFINITE:
            return INFINITE, err
        value = numerics.l2_norm(beta) * cond + spec.gamma * (1.0 - elm.r_squared(pred, Y))
    except (MbasElmError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        log.debug("fitness evaluation failed: %s", exc)
        return INFINITE, INFINITE
    if not math.isfinite(value):
        return INFINITE, err
    return value, err


def heldout_fitness(model, X, Y, gamma):
    """Score a fitted model on data it was not solved on."""
    try:
        rep = elm.evaluate(model, X, Y)
    except (MbasElmError, ArithmeticError, ValueError) as exc:
        log.debug("held-out evaluation failed: %s", exc)
        return INFINITE, INFINITE
    if rep.condition_number == INFINITE:
        return INFINITE, rep.rmse
    return rep.beta_norm * rep.condition_number + gamma * (1.0 - rep.r_squared), rep.rmse


def update_best(current, incumbent):
    """Adopt ``current`` only if both its fitness and RMSE are strictly lower.

    An incumbent with infinite fitness yields to any finite candidate, so an
    infeasible start can never block the search.
    """
    if incumbent.fitness == INFINITE and current.fitness < INFINITE:
        return current
    if current.fitness < incumbent.fitness and current.rmse < incumbent.rmse:
        return current
    return incumbent


class FoldObjective:
    """Fitness of positions on one data subset, with an RMSE-aware incumbent rule."""

    def __init__(self, X, Y, spec):
        self.X = np.asarray(X, dtype=float)
        self.Y = np.asarray(Y, dtype=float)
        self.spec = spec

    def evaluate(self, position):
        return fitness(position, self.X, self.Y, self.spec)

    def __call__(self, position):
        return self.evaluate(position)[0]

    def record(self, position):
        value, err = self.evaluate(position)
        return BestRecord(np.array(position, dtype=float), value, err)

    def incumbent_rule(self):
        cache = {}

        def rmse_of(pos, fit):
            key = pos.tobytes()
            if key not in cache:
                cache.clear()
                cache[key] = self.evaluate(pos)[1]
            return cache[key]

        def rule(cand_pos, cand_fit, best_pos, best_fit):
            incumbent = BestRecord(best_pos, best_fit, rmse_of(best_pos, best_fit))
            current = BestRecord(cand_pos, cand_fit, self.evaluate(cand_pos)[1])
            adopted = update_best(current, incumbent) is current
            if adopted:
                cache.clear()
                cache[cand_pos.tobytes()] = current.rmse
            return adopted

        return rule


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def _child(ss, *key):
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + key,
                                  pool_size=ss.pool_size)


def _check_train(train, L):
    if len(train) < FOLDS * L:
        raise ConfigError(
            f"training set has {len(train)} rows; need at least {FOLDS * L} (3 folds x L={L})")


def _fold_runs(train, config, ss, executor=None):
    """Run one swarm per fold. Returns fold index arrays and their winners."""
    spec = config.fitness
    L = spec.hidden_count
    d = train.n_features
    folds = kfold_indices(len(train), FOLDS, np.random.default_rng(_child(ss, 0)))
    bests = []
    for r, idx in enumerate(folds):
        obj = FoldObjective(train.X[idx], train.Y[idx], spec)
        res = mbas_search(config.swarm, obj, _child(ss, 1, r), position_length(d, L),
                          incumbent_rule=obj.incumbent_rule(), executor=executor)
        bests.append(obj.record(res.best_position))
    return folds, bests


def _finish(train, config, bests, gamma):
    spec = config.fitness
    full = FoldObjective(train.X, train.Y, spec)
    full_fit = [full(b.position) for b in bests]
    chosen = int(np.argmin(full_fit))
    params = decode_position(bests[chosen].position, train.n_features, spec.hidden_count,
                             spec.activation)
    model = elm.fit(train.X, train.Y, params)
    return TrainReport(model, bests, chosen, full_fit, gamma)


def train_mbas_elm(train, config, seed=None, executor=None):
    """Three-fold swarm training on ``train``; returns a :class:`TrainReport`.

    ``seed`` defaults to ``config.seed``. Only the training split is ever
    seen here.
    """
    _check_train(train, config.fitness.hidden_count)
    ss = _seed_sequence(config.seed if seed is None else seed)
    _, bests = _fold_runs(train, config, ss, executor)
    return _finish(train, config, bests, config.fitness.gamma)


def as_bas_config(config):
    """Collapse the swarm to a single searcher."""
    swarm = replace(config.swarm, n_searchers=1, n_followers=0, n_explorers=0)
    return replace(config, swarm=swarm)


def train_bas_elm(train, config, seed=None, executor=None):
    return train_mbas_elm(train, as_bas_config(config), seed, executor)


def train_plain_elm(train, L=10, activation=Activation.SIGMOID, rng=None):
    """Random hidden layer in [-1, 1], output weights by pseudoinverse."""
    rng = rng if rng is not None else np.random.default_rng()
    params = ElmParams.random(train.n_features, L, rng, activation)
    return elm.fit(train.X, train.Y, params)


@dataclass(frozen=True)
class GammaScore:
    gamma: float
    fitness: float
    rmse: float


def score_gamma(train, config, gamma, seed=None, executor=None):
    """Fold-averaged held-out (fitness, rmse) for one gamma, plus the trained report.

    Each fold winner is solved on its own fold and scored on the other two.
    """
    _check_train(train, config.fitness.hidden_count)
    cfg = replace(config, fitness=replace(config.fitness, gamma=gamma))
    ss = _seed_sequence(cfg.seed if seed is None else seed)
    folds, bests = _fold_runs(train, cfg, ss, executor)
    fits, errs = [], []
    spec = cfg.fitness
    for r, (idx, best) in enumerate(zip(folds, bests)):
        rest = np.concatenate([folds[j] for j in range(FOLDS) if j != r])
        params = decode_position(best.position, train.n_features, spec.hidden_count,
                                 spec.activation)
        model = elm.fit(train.X[idx], train.Y[idx], params)
        fit_r, err_r = heldout_fitness(model, train.X[rest], train.Y[rest], gamma)
        fits.append(fit_r)
        errs.append(err_r)
    score = GammaScore(gamma, float(np.mean(fits)), float(np.mean(errs)))
    return score, _finish(train, cfg, bests, gamma)


def pick_gamma(scores):
    """Choose among :class:`GammaScore` values.

    A gamma wins outright if it is strictly better than every other one in
    both fitness and RMSE; otherwise the smallest RMSE wins (ties to the
    earlier grid entry).
    """
    for s in scores:
        if all(s is o or (s.fitness < o.fitness and s.rmse < o.rmse) for o in scores):
            return s
    return min(scores, key=lambda s: s.rmse)


def gamma_search(train, grid, config, seed=None, executor=None):
    """Score every gamma in ``grid``; returns ``(gamma, scores, report)``.

    ``report`` is the training run for the chosen gamma, so callers need not
    train again. Test data never enters: scores come from the training folds.
    """
    grid = tuple(grid)
    if not grid:
        raise ConfigError("gamma grid must not be empty")
    results = [score_gamma(train, config, g, seed, executor) for g in grid]
    scores = [s for s, _ in results]
    best = pick_gamma(scores)
    report = results[scores.index(best)][1]
    return best.gamma, scores, report


def train_with_gamma_selection(train, config, seed=None, executor=None, bas=False):
    cfg = as_bas_config(config) if bas else config
    if len(cfg.gamma_grid) == 1:
        g = cfg.gamma_grid[0]
        return train_mbas_elm(train, replace(cfg, fitness=replace(cfg.fitness, gamma=g)),
                              seed, executor)
    return gamma_search(train, cfg.gamma_grid, cfg, seed, executor)[2]


def select_gamma(train, grid, config, seed=None, executor=None):
    return gamma_search(train, grid, config, seed, executor)[0]

