# symchain/services/mc_oracle.py
import logging
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from symchain.config import MC_N_JOBS
from symchain.exceptions import StartIsCenter, StartIsTarget, TimeBeyondHorizon
from symchain.models.chain import DensityTrace, GeneratorMatrix, TimeGrid
from symchain.models.simulation import (
    Estimate,
    FptHistogram,
    PathCollection,
    PathSample,
    SimulationConfig,
)

logger = logging.getLogger("symchain.mc_oracle")

CHUNK_SIZE = 2000


# ---------------- SIMULATION ----------------

def path_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream of path `index`; independent of how paths are scheduled."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _jump_tables(q: np.ndarray):
    """Cumulative off-diagonal rates per row; the last column is the exit rate."""
    off = q.copy()
    np.fill_diagonal(off, 0.0)
    cum = np.cumsum(off, axis=1)
    last = np.array([np.flatnonzero(row)[-1] if row.any() else 0 for row in off > 0])
    return cum, last


def _simulate_one(cum, last, labels, start_idx: int, t_max: float, rg: np.random.Generator) -> PathSample:
    t = 0.0
    state = start_idx
    times: List[float] = []
    states = [labels[start_idx]]
    while cum[state, -1] > 0:
        rate = cum[state, -1]
        # holding time first, then the jump
        t += rg.exponential(1.0 / rate)
        if t > t_max:
            break
        state = min(int(np.searchsorted(cum[state], rg.random() * rate, side="right")), int(last[state]))
        times.append(t)
        states.append(labels[state])
    return PathSample(jump_times=tuple(times), states=tuple(states))


def _simulate_chunk(q: np.ndarray, labels, start_idx: int, t_max: float, seed: int, lo: int, hi: int) -> List[PathSample]:
    cum, last = _jump_tables(q)
    return [_simulate_one(cum, last, labels, start_idx, t_max, path_generator(seed, i)) for i in range(lo, hi)]


def simulate_paths(Q: GeneratorMatrix, config: SimulationConfig, n_jobs: Optional[int] = None) -> PathCollection:
    """
    Exact-event simulation: an exponential holding time with rate -q_{n,n}
    followed by a jump drawn from the off-diagonal row. Absorbing states end
    the path. Chunks run under joblib and are merged in path order.
    """
    start_idx = Q.space.index_of(config.start)
    labels = list(Q.space.labels)
    bounds = list(range(0, config.n_paths, CHUNK_SIZE)) + [config.n_paths]
    n_jobs = n_jobs or MC_N_JOBS
    logger.info("Simulating %d paths to t=%g with %d job(s)", config.n_paths, config.t_max, n_jobs)
    chunks = Parallel(n_jobs=n_jobs)(
        delayed(_simulate_chunk)(Q.entries, labels, start_idx, config.t_max, config.seed, lo, hi)
        for lo, hi in zip(bounds[:-1], bounds[1:])
    )
    paths = [path for chunk in chunks for path in chunk]
    return PathCollection(space=Q.space, config=config, paths=paths)


# ---------------- ESTIMATORS ----------------

def _check_horizon(paths: PathCollection, t: float) -> None:
    if t > paths.config.t_max:
        raise TimeBeyondHorizon(t, paths.config.t_max)


def _binomial(hits: np.ndarray) -> Estimate:
    p = float(hits.mean())
    return Estimate(estimate=p, std_error=float(np.sqrt(p * (1.0 - p) / hits.size)))


def states_at(paths: PathCollection, t: float) -> np.ndarray:
    _check_horizon(paths, t)
    return np.array([path.state_at(t) for path in paths.paths])


def first_passage_times(paths: PathCollection, target: int) -> np.ndarray:
    """First visit time to target per path; NaN when the path never gets there before the horizon."""
    paths.space.index_of(target)
    times = np.array([path.first_visit(target) for path in paths.paths])
    times[np.isinf(times)] = np.nan
    return times


def estimate_transition(paths: PathCollection, n: int, t: float) -> Estimate:
    """Fraction of paths at n at time t with its binomial standard error."""
    paths.space.index_of(n)
    return _binomial(states_at(paths, t) == n)


def estimate_fpt_histogram(paths: PathCollection, target: int, bins: TimeGrid) -> FptHistogram:
    """
    First-passage density on bins centered at the grid points: the bin of t_m
    is [t_m - h/2, t_m + h/2) clipped to [0, t_max].
    """
    paths.space.index_of(target)
    if paths.config.start == target:
        raise StartIsTarget(target)
    _check_horizon(paths, bins.t_max)

    times = first_passage_times(paths, target)
    h = bins.h
    edges = np.concatenate(([0.0], bins.points[:-1] + 0.5 * h, [bins.t_max]))
    hit = times[~np.isnan(times)]
    counts, _ = np.histogram(hit, bins=edges)
    widths = np.diff(edges)
    n_paths = paths.n_paths
    p = counts / n_paths
    density = p / widths
    std_errors = np.sqrt(p * (1.0 - p) / n_paths) / widths
    if np.any((counts == 0)):
        logger.warning("%d histogram bins are empty (zero standard error)", int(np.sum(counts == 0)))
    return FptHistogram(
        density=DensityTrace(grid=bins, values=density, label=f"mc_g_{paths.config.start},{target}"),
        std_errors=std_errors,
        hit_fraction=float(np.sum(hit <= bins.t_max) / n_paths),
    )


def estimate_avoiding(paths: PathCollection, s: int, n: int, t: float) -> Estimate:
    """Fraction of paths at n at time t that have not visited s in (0, t]."""
    paths.space.index_of(n)
    if paths.config.start == s:
        raise StartIsCenter(s)
    at_n = states_at(paths, t) == n
    passage = first_passage_times(paths, s)
    avoided = np.isnan(passage) | (passage > t)
    return _binomial(at_n & avoided)
