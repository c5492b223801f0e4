# tests/test_mc_oracle.py
import numpy as np
import pytest

from symchain.exceptions import StartIsCenter, StartIsTarget, TimeBeyondHorizon
from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import TimeGrid
from symchain.models.simulation import PathSample, SimulationConfig
from symchain.services.bdjump import avoiding_closed_form, fpt_density_closed_form, transition_probability
from symchain.services.chain_core import truncate_bdjump
from symchain.services.mc_oracle import (
    estimate_avoiding,
    estimate_fpt_histogram,
    estimate_transition,
    first_passage_times,
    simulate_paths,
    states_at,
)

MODEL = BDJumpModel(lam=1.0, mu=1.0, alpha=0.5)


@pytest.fixture(scope="module")
def paths():
    Q = truncate_bdjump(MODEL, (-15, 15))
    return simulate_paths(Q, SimulationConfig(n_paths=20_000, t_max=2.0, seed=11, start=3))


def test_path_sample_lookup():
    path = PathSample(jump_times=(0.5, 1.2), states=(3, 2, 0))
    assert path.start == 3
    assert path.state_at(0.0) == 3
    assert path.state_at(0.5) == 2
    assert path.state_at(1.9) == 0
    assert path.first_visit(0) == 1.2
    assert path.first_visit(5) == float("inf")
    with pytest.raises(ValueError):
        PathSample(jump_times=(0.5,), states=(3,))


def test_paths_are_reproducible_across_workers(bdjump_chain):
    Q = bdjump_chain(alpha=0.5, window=(-6, 6))
    config = SimulationConfig(n_paths=3000, t_max=1.0, seed=5, start=2)
    serial = simulate_paths(Q, config, n_jobs=1)
    parallel = simulate_paths(Q, config, n_jobs=2)
    assert serial.paths == parallel.paths
    other = simulate_paths(Q, config.model_copy(update={"seed": 6}), n_jobs=1)
    assert other.paths != serial.paths


def test_absorbing_state_ends_path(example1):
    paths = simulate_paths(example1, SimulationConfig(n_paths=200, t_max=50.0, seed=1, start=1))
    final = states_at(paths, 50.0)
    assert set(final.tolist()) <= {0, 3}


def test_transition_estimates_within_four_errors(paths):
    for n in (1, 2):
        for t in (0.5, 1.0, 2.0):
            est = estimate_transition(paths, n, t)
            exact = transition_probability(MODEL, 3, n, t)
            assert abs(est.estimate - exact) <= 4 * est.std_error


def test_avoiding_estimates_within_four_errors(paths):
    for t in (0.5, 1.0, 2.0):
        est = estimate_avoiding(paths, 0, 1, t)
        assert abs(est.estimate - avoiding_closed_form(MODEL, 3, 1, t)) <= 4 * est.std_error


def test_fpt_histogram(paths):
    bins = TimeGrid(t_max=2.0, steps=20)
    hist = estimate_fpt_histogram(paths, 0, bins)
    exact = fpt_density_closed_form(MODEL, 3, bins.points)
    inner = slice(1, -1)
    diff = np.abs(hist.density.values[inner] - exact[inner])
    within = diff <= 4 * hist.std_errors[inner] + 1e-3
    assert within.mean() >= 0.9
    times = first_passage_times(paths, 0)
    assert hist.hit_fraction == pytest.approx(np.mean(~np.isnan(times)))


def test_estimator_preconditions(paths):
    with pytest.raises(StartIsTarget):
        estimate_fpt_histogram(paths, 3, TimeGrid(t_max=2.0, steps=10))
    with pytest.raises(TimeBeyondHorizon):
        estimate_transition(paths, 1, 3.0)
    with pytest.raises(StartIsCenter):
        estimate_avoiding(paths, 3, 1, 1.0)


def test_mean_holding_time_at_start(paths):
    # first holding time is Exp(lambda + mu + alpha), censored at the horizon
    rate, horizon = 2.5, paths.config.t_max
    first = np.array([p.jump_times[0] if p.jump_times else horizon for p in paths.paths])
    expected = (1.0 - np.exp(-rate * horizon)) / rate
    assert abs(first.mean() - expected) <= 4 * first.std(ddof=1) / np.sqrt(first.size)


def test_standard_error_shrinks_with_more_paths(paths):
    half = paths.model_copy(update={"paths": paths.paths[: paths.n_paths // 2]})
    for t in (0.5, 1.0):
        full_se = estimate_transition(paths, 2, t).std_error
        half_se = estimate_transition(half, 2, t).std_error
        assert full_se / half_se == pytest.approx(1.0 / np.sqrt(2.0), rel=0.05)


def test_estimates_are_distributions(paths):
    labels = paths.space.labels
    for t in (0.5, 2.0):
        total = sum(estimate_transition(paths, n, t).estimate for n in labels)
        assert total == pytest.approx(1.0, abs=1e-12)
        passed = first_passage_times(paths, 0)
        hit = np.mean(~np.isnan(passed) & (passed <= t))
        avoiding = sum(estimate_avoiding(paths, 0, n, t).estimate for n in labels)
        assert avoiding + hit == pytest.approx(1.0, abs=1e-12)
