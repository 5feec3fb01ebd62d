"""Multitask beetle antennae swarm (MBAS).

A fixed population is ranked by fitness every iteration. The best ``N_S``
particles act as searchers and take one BAS step each, the next ``N_F`` are
followers that walk toward the best searcher, and the rest are explorers
taking fixed-length random steps.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bas import BasConfig, BeetleState, bas_step, clamp, evaluate, initial_position, random_direction
from .errors import ConfigError


class Role(str, enum.Enum):
    SEARCHER = "searcher"
    FOLLOWER = "follower"
    EXPLORER = "explorer"


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm sizes, step lengths and iteration budget.

    The searcher step schedule comes from ``searcher`` (its ``max_iters`` is
    ignored). Its ``bounds`` are overridden by the swarm bounds.
    """

    n_searchers: int = 10
    n_followers: int = 5
    n_explorers: int = 5
    follower_step: float = 0.1
    explorer_step: float = 0.1
    searcher: BasConfig = field(default_factory=BasConfig)
    iterations: int = 50
    bounds: tuple = (-1.0, 1.0)

    def __post_init__(self):
        bounds = (float(self.bounds[0]), float(self.bounds[1]))
        object.__setattr__(self, "bounds", bounds)
        if self.searcher.bounds != bounds:
            object.__setattr__(self, "searcher", replace(self.searcher, bounds=bounds))
        if self.n_searchers < 1 or self.n_followers < 0 or self.n_explorers < 0:
            raise ConfigError("need n_searchers >= 1 and n_followers, n_explorers >= 0")
        if not (self.follower_step > 0 and self.explorer_step > 0):
            raise ConfigError("follower_step and explorer_step must be positive")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")

    @property
    def population(self):
        return self.n_searchers + self.n_followers + self.n_explorers

    @property
    def counts(self):
        return (self.n_searchers, self.n_followers, self.n_explorers)

    @staticmethod
    def default_split(n):
        """Searchers ceil(N/2), followers ceil(N/4), explorers the rest."""
        if n < 1:
            raise ConfigError("population must be >= 1")
        n_s = math.ceil(n / 2)
        n_f = min(math.ceil(n / 4), n - n_s)
        return n_s, n_f, n - n_s - n_f

    @classmethod
    def with_population(cls, n, **kwargs):
        n_s, n_f, n_e = cls.default_split(n)
        return cls(n_searchers=n_s, n_followers=n_f, n_explorers=n_e, **kwargs)


@dataclass
class Particle:
    index: int
    position: np.ndarray
    fitness: float
    role: Role = None
    moves: int = 0  # BAS steps taken as a searcher; fixes step and antenna


@dataclass(frozen=True)
class MbasTraceRecord:
    iteration: int
    best_fitness: float
    best_particle_index: int
    role_histogram: tuple
    roles: tuple = field(default=(), compare=False)


@dataclass
class MbasResult:
    best_position: np.ndarray
    best_fitness: float
    trace: list
    particles: list


def particle_rng(seed, index):
    """Independent generator for particle ``index`` under a master seed.

    Each particle gets a child of the master ``SeedSequence`` keyed by its
    index, so changing the population size leaves the streams of the other
    particles untouched.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    child = np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (index,),
                                   pool_size=ss.pool_size)
    return np.random.default_rng(child)


def assign_roles(fitness, counts):
    """Roles by ascending fitness; ties go to the lower particle index."""
    n_s, n_f, n_e = counts
    fitness = np.asarray(fitness, dtype=float)
    if fitness.size != n_s + n_f + n_e:
        raise ConfigError(f"{fitness.size} particles but role counts {counts}")
    order = np.argsort(fitness, kind="stable")
    roles = [None] * fitness.size
    for rank, i in enumerate(order):
        if rank < n_s:
            roles[i] = Role.SEARCHER
        elif rank < n_s + n_f:
            roles[i] = Role.FOLLOWER
        else:
            roles[i] = Role.EXPLORER
    return roles


def follower_step(position, target, step, bounds):
    """Walk ``step`` toward ``target``, landing on it when closer than that."""
    position = np.asarray(position, dtype=float)
    d = np.asarray(target, dtype=float) - position
    dist = np.linalg.norm(d)
    if dist == 0.0:
        return position.copy()
    if dist <= step:
        return clamp(np.array(target, dtype=float), bounds)
    return clamp(position + step * d / dist, bounds)


def explorer_step(position, step, rng, bounds):
    position = np.asarray(position, dtype=float)
    return clamp(position + step * random_direction(position.size, rng), bounds)


def _strictly_better(cand_pos, cand_fit, best_pos, best_fit):
    return cand_fit < best_fit


def _map(executor, fn, items):
    if executor is None:
        return [fn(x) for x in items]
    return list(executor.map(fn, items))


def _best_searcher(particles):
    searchers = [p for p in particles if p.role is Role.SEARCHER]
    return min(searchers, key=lambda p: (p.fitness, p.index))


def mbas_search(config, f, seed, dim, incumbent_rule=None, trace=None, executor=None):
    """Minimise ``f`` over the box ``config.bounds ** dim`` with an MBAS swarm.

    Parameters
    ----------
    config : SwarmConfig
    f : callable
        Objective on position vectors. ``+inf`` marks an infeasible point.
    seed : int or numpy.random.SeedSequence
        Master seed; particle ``i`` draws from :func:`particle_rng` ``(seed, i)``.
    dim : int
        Dimension of the search space.
    incumbent_rule : callable, optional
        ``rule(cand_pos, cand_fit, best_pos, best_fit) -> bool`` deciding
        whether the best particle of an iteration replaces the incumbent.
        Defaults to a strict fitness improvement.
    trace : callable, optional
        Receives an :class:`MbasTraceRecord` for the initial population
        (iteration 0) and after every iteration.
    executor : concurrent.futures.Executor, optional
        Used to run the per-particle moves of one iteration concurrently.
        Results do not depend on it.

    Returns
    -------
    MbasResult
    """
    rule = incumbent_rule or _strictly_better
    bounds = config.bounds
    bas_cfg = config.searcher
    n = config.population
    rngs = [particle_rng(seed, i) for i in range(n)]

    positions = [initial_position(rng, dim, bounds) for rng in rngs]
    fits = _map(executor, lambda x: evaluate(f, x), positions)
    particles = [Particle(i, x, fit) for i, (x, fit) in enumerate(zip(positions, fits))]
    history = []

    def reassign():
        for p, role in zip(particles, assign_roles([p.fitness for p in particles], config.counts)):
            p.role = role

    def best_now():
        return min(particles, key=lambda p: (p.fitness, p.index))

    def record(t, best_idx, best_fit):
        roles = tuple(p.role for p in particles)
        hist = (roles.count(Role.SEARCHER), roles.count(Role.FOLLOWER), roles.count(Role.EXPLORER))
        rec = MbasTraceRecord(t, best_fit, best_idx, hist, roles)
        history.append(rec)
        if trace is not None:
            trace(rec)

    reassign()
    first = best_now()
    best_pos, best_fit, best_idx = first.position.copy(), first.fitness, first.index
    record(0, best_idx, best_fit)

    for t in range(1, config.iterations + 1):
        leader = _best_searcher(particles).position.copy()

        def move(p):
            if p.role is Role.FOLLOWER:
                x = follower_step(p.position, leader, config.follower_step, bounds)
                return x, evaluate(f, x), p.moves
            if p.role is Role.EXPLORER:
                x = explorer_step(p.position, config.explorer_step, rngs[p.index], bounds)
                return x, evaluate(f, x), p.moves
            state = BeetleState(p.position, p.fitness, bas_cfg.step_at(p.moves),
                                bas_cfg.antenna_at(p.moves), p.position, p.fitness, p.moves)
            state = bas_step(state, f, rngs[p.index], bas_cfg)
            return state.position, state.fitness, state.moves

        for p, (x, fit, moves) in zip(particles, _map(executor, move, particles)):
            p.position, p.fitness, p.moves = x, fit, moves

        cand = best_now()
        if rule(cand.position, cand.fitness, best_pos, best_fit):
            best_pos, best_fit, best_idx = cand.position.copy(), cand.fitness, cand.index
        reassign()
        record(t, best_idx, best_fit)

    return MbasResult(best_pos, best_fit, history, particles)


TRACE_COLUMNS = ("iteration", "best_fitness", "best_particle_index", "role_histogram")
