"""Beetle antennae search (BAS) for box-bounded minimisation."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, FitnessError


@dataclass(frozen=True)
class BasConfig:
    """Parameters of a single-beetle search.

    ``antenna0`` defaults to ``step0``. ``target_fitness`` is an optional
    early-stop threshold; the iteration budget is the only stop rule otherwise.
    """

    eta: float = 0.95
    step0: float = 1.0
    step_min: float = 0.0
    antenna0: float = None
    antenna_min: float = 0.0
    max_iters: int = 100
    bounds: tuple = (-1.0, 1.0)
    target_fitness: float = None

    def __post_init__(self):
        if self.antenna0 is None:
            object.__setattr__(self, "antenna0", self.step0)
        object.__setattr__(self, "bounds", (float(self.bounds[0]), float(self.bounds[1])))
        if not 0.0 < self.eta < 1.0:
            raise ConfigError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.step0 > self.step_min >= 0.0:
            raise ConfigError(f"need step0 > step_min >= 0, got {self.step0}, {self.step_min}")
        if not self.antenna0 > self.antenna_min >= 0.0:
            raise ConfigError(
                f"need antenna0 > antenna_min >= 0, got {self.antenna0}, {self.antenna_min}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters}")
        lo, hi = self.bounds
        if not lo < hi:
            raise ConfigError(f"bounds must satisfy lo < hi, got {self.bounds}")

    def step_at(self, moves):
        return max(self.eta ** moves * self.step0, self.step_min)

    def antenna_at(self, moves):
        return max(self.eta ** moves * self.antenna0, self.antenna_min)


@dataclass(frozen=True)
class BeetleState:
    """One beetle.

    ``fitness`` caches ``f(position)``; ``moves`` counts completed steps and
    fixes the current step and antenna lengths.
    """

    position: np.ndarray
    fitness: float
    step: float
    antenna: float
    best_position: np.ndarray
    best_fitness: float
    moves: int = 0

    @classmethod
    def start(cls, config, position, fitness):
        position = np.array(position, dtype=float)
        return cls(position, fitness, config.step0, config.antenna0,
                   position.copy(), fitness, 0)


@dataclass(frozen=True)
class BasTraceRecord:
    iteration: int
    position: np.ndarray
    fitness: float
    step: float
    antenna: float


def evaluate(f, x):
    """Call ``f(x)`` and check the value.

    ``+inf`` is a legal "maximally bad" value; NaN and ``-inf`` are not.
    """
    value = float(f(x))
    if math.isnan(value) or value == -math.inf:
        raise FitnessError(f"objective returned {value}", position=np.array(x, copy=True))
    return value


def clamp(x, bounds):
    return np.clip(x, bounds[0], bounds[1])


def initial_position(rng, dim, bounds):
    return rng.uniform(bounds[0], bounds[1], size=dim)


def random_direction(k, rng):
    """Unit vector from a uniform draw on [-1, 1]^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    while True:
        v = rng.uniform(-1.0, 1.0, size=k)
        n = np.linalg.norm(v)
        if n > 0.0:
            return v / n


def _sign(diff):
    # inf - inf gives nan: neither antenna is better
    if math.isnan(diff):
        return 0.0
    return float(np.sign(diff))


def bas_step(state, f, rng, config):
    """Move the beetle once and decay its step and antenna lengths."""
    bounds = config.bounds
    direction = random_direction(state.position.size, rng)
    right = clamp(state.position + state.antenna * direction, bounds)
    left = clamp(state.position - state.antenna * direction, bounds)
    s = _sign(evaluate(f, right) - evaluate(f, left))
    if s == 0.0:
        new_pos = state.position.copy()
        new_fit = state.fitness
    else:
        new_pos = clamp(state.position - state.step * s * direction, bounds)
        new_fit = evaluate(f, new_pos)
    moves = state.moves + 1
    best_pos, best_fit = state.best_position, state.best_fitness
    if new_fit < best_fit:
        best_pos, best_fit = new_pos.copy(), new_fit
    return replace(state, position=new_pos, fitness=new_fit,
                   step=config.step_at(moves), antenna=config.antenna_at(moves),
                   best_position=best_pos, best_fitness=best_fit, moves=moves)


def bas_search(config, f, x0, rng, trace=None):
    """Minimise ``f`` from ``x0`` with a single beetle.

    Parameters
    ----------
    config : BasConfig
    f : callable
        Maps a position vector to a float.
    x0 : array_like
        Start point; must lie inside ``config.bounds``.
    rng : numpy.random.Generator
    trace : callable, optional
        Receives a :class:`BasTraceRecord` after each iteration.

    Returns
    -------
    best_position : ndarray
    best_fitness : float
    """
    x0 = np.array(x0, dtype=float).reshape(-1)
    lo, hi = config.bounds
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValueError(f"x0 lies outside bounds {config.bounds}")
    state = BeetleState.start(config, x0, evaluate(f, x0))
    for t in range(1, config.max_iters + 1):
        state = bas_step(state, f, rng, config)
        if trace is not None:
            trace(BasTraceRecord(t, state.position.copy(), state.fitness,
                                 state.step, state.antenna))
        if config.target_fitness is not None and state.best_fitness <= config.target_fitness:
            break
    return state.best_position, state.best_fitness
