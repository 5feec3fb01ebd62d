import concurrent.futures

import numpy as np
import pytest

from mbaselm.bas import BasConfig, bas_search, initial_position
from mbaselm.errors import ConfigError
from mbaselm.mbas import (TRACE_COLUMNS, Role, SwarmConfig, assign_roles, explorer_step,
                          follower_step, mbas_search, particle_rng)
from mbaselm.tracing import ListSink, write_csv

S, F, E = Role.SEARCHER, Role.FOLLOWER, Role.EXPLORER


def rastrigin(x):
    x = np.asarray(x)
    return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


def test_assign_roles_rank_readout():
    assert assign_roles([3.0, 1.0, 2.0], (1, 1, 1)) == [E, S, F]


def test_assign_roles_ties_by_index():
    assert assign_roles([1.0] * 5, (2, 2, 1)) == [S, S, F, F, E]


def test_assign_roles_all_searchers():
    assert assign_roles([5.0, 2.0, 9.0], (3, 0, 0)) == [S, S, S]


def test_assign_roles_infinite_last():
    assert assign_roles([np.inf, 0.5, 1.0], (1, 1, 1)) == [E, S, F]


def test_assign_roles_count_mismatch():
    with pytest.raises(ConfigError):
        assign_roles([1.0, 2.0], (1, 1, 1))


def test_follower_full_step():
    np.testing.assert_allclose(follower_step([0.0, 0.0], [3.0, 4.0], 1.0, (-10, 10)), [0.6, 0.8])


def test_follower_at_target_unchanged():
    np.testing.assert_array_equal(follower_step([1.0, 2.0], [1.0, 2.0], 0.5, (-10, 10)),
                                  [1.0, 2.0])


def test_follower_no_overshoot():
    new = follower_step([0.0], [0.5], 2.0, (-10, 10))
    np.testing.assert_array_equal(new, [0.5])
    assert np.linalg.norm(new - 0.5) <= np.linalg.norm(np.array([0.0]) - 0.5)


def test_explorer_step_length(rng):
    x = np.zeros(6)
    new = explorer_step(x, 0.3, rng, (-10, 10))
    assert np.linalg.norm(new - x) == pytest.approx(0.3, abs=1e-12)


def test_explorer_deterministic():
    a = explorer_step(np.zeros(4), 0.3, np.random.default_rng(8), (-1, 1))
    b = explorer_step(np.zeros(4), 0.3, np.random.default_rng(8), (-1, 1))
    np.testing.assert_array_equal(a, b)


def test_explorer_clamped_at_corner():
    class Outward:
        def uniform(self, lo, hi, size):
            return np.ones(size)

    new = explorer_step(np.array([1.0, 1.0]), 0.5, Outward(), (-1, 1))
    np.testing.assert_array_equal(new, [1.0, 1.0])


def test_default_split():
    assert SwarmConfig.default_split(20) == (10, 5, 5)
    assert SwarmConfig.default_split(7) == (4, 2, 1)
    assert SwarmConfig.default_split(1) == (1, 0, 0)
    assert SwarmConfig.with_population(8).counts == (4, 2, 2)


def test_config_validation():
    with pytest.raises(ConfigError):
        SwarmConfig(n_searchers=0)
    with pytest.raises(ConfigError):
        SwarmConfig(follower_step=0.0)
    with pytest.raises(ConfigError):
        SwarmConfig(iterations=0)


def test_searcher_bounds_follow_swarm():
    cfg = SwarmConfig(bounds=(-3, 3), searcher=BasConfig(bounds=(-1, 1)))
    assert cfg.searcher.bounds == (-3.0, 3.0)


def test_particle_streams_independent_of_population():
    a = particle_rng(99, 3).uniform(size=4)
    b = particle_rng(99, 3).uniform(size=4)
    c = particle_rng(99, 4).uniform(size=4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def _cfg(split=(4, 3, 3), iters=40, bounds=(-5.12, 5.12)):
    return SwarmConfig(*split, follower_step=0.3, explorer_step=0.5,
                       searcher=BasConfig(eta=0.95, step0=1.0), iterations=iters, bounds=bounds)


def _tracked(f, cfg, dim):
    evaluated = []

    def g(x):
        v = f(x)
        evaluated.append((np.array(x), v))
        return v

    return g, evaluated


@pytest.mark.parametrize("split", [(4, 3, 3), (1, 5, 2), (3, 0, 4), (2, 2, 0)])
def test_structural_invariants(split):
    cfg = _cfg(split)
    g, evaluated = _tracked(rastrigin, cfg, 3)
    res = mbas_search(cfg, g, 5, 3)
    assert len(res.trace) == cfg.iterations + 1
    prev = np.inf
    for rec in res.trace:
        assert rec.role_histogram == split
        assert rec.best_fitness <= prev
        prev = rec.best_fitness
    assert all(np.all(np.abs(x) <= 5.12) for x, _ in evaluated)
    # incumbent = minimum over every evaluated point
    assert res.best_fitness == min(v for _, v in evaluated)
    assert rastrigin(res.best_position) == res.best_fitness


def test_decay_only_while_searcher():
    cfg = _cfg((3, 3, 3), iters=30)
    res = mbas_search(cfg, rastrigin, 2, 4)
    searcher_turns = np.zeros(cfg.population, dtype=int)
    for rec in res.trace[:-1]:
        for i, role in enumerate(rec.roles):
            searcher_turns[i] += role is Role.SEARCHER
    assert [p.moves for p in res.particles] == searcher_turns.tolist()
    assert searcher_turns.sum() == 3 * cfg.iterations
    assert len(set(searcher_turns.tolist())) > 1


def test_degenerate_swarm_matches_bas():
    bas_cfg = BasConfig(eta=0.95, step0=1.0, max_iters=60, bounds=(-5.12, 5.12))
    swarm = SwarmConfig(1, 0, 0, searcher=bas_cfg, iterations=60, bounds=bas_cfg.bounds)
    res = mbas_search(swarm, rastrigin, 17, 4)
    rng = particle_rng(17, 0)
    x0 = initial_position(rng, 4, bas_cfg.bounds)
    bx, bf = bas_search(bas_cfg, rastrigin, x0, rng)
    assert res.best_fitness == bf
    assert res.best_position.tobytes() == bx.tobytes()


def test_deterministic_trace():
    a = mbas_search(_cfg(), rastrigin, 123, 3)
    b = mbas_search(_cfg(), rastrigin, 123, 3)
    assert a.trace == b.trace
    assert a.best_position.tobytes() == b.best_position.tobytes()


def test_executor_does_not_change_result():
    a = mbas_search(_cfg(), rastrigin, 7, 3)
    with concurrent.futures.ThreadPoolExecutor(4) as ex:
        b = mbas_search(_cfg(), rastrigin, 7, 3, executor=ex)
    assert a.trace == b.trace


def test_non_searchers_can_seed_incumbent():
    cfg = _cfg((1, 4, 4), iters=40)
    res = mbas_search(cfg, rastrigin, 1, 2)
    movers = [res.trace[t - 1].roles[rec.best_particle_index]
              for t, rec in enumerate(res.trace) if t and rec.best_fitness < res.trace[t - 1].best_fitness]
    assert any(role is not Role.SEARCHER for role in movers)


def test_custom_incumbent_rule():
    calls = []

    def never(cand_pos, cand_fit, best_pos, best_fit):
        calls.append(cand_fit)
        return False

    res = mbas_search(_cfg(iters=10), rastrigin, 3, 2, incumbent_rule=never)
    assert len(calls) == 10
    assert res.best_fitness == res.trace[0].best_fitness


def test_trace_sink_and_csv(tmp_path):
    sink = ListSink()
    res = mbas_search(_cfg(iters=5), rastrigin, 0, 2, trace=sink)
    assert sink.records == res.trace
    write_csv(res.trace, tmp_path / "t.csv", TRACE_COLUMNS)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "iteration,best_fitness,best_particle_index,role_histogram"
    assert lines[1].endswith("4 3 3")
    assert len(lines) == 7
