# symchain/services/transient.py
import logging

import numpy as np
from scipy import linalg
from scipy.stats import poisson

from symchain.config import UNIFORMIZATION_HEADROOM, UNIFORMIZATION_TOL
from symchain.exceptions import InvalidConfig, Reducible, ZeroStationaryMass
from symchain.models.chain import (
    GeneratorMatrix,
    StationaryDistribution,
    TimeGrid,
    TransitionMatrixSequence,
)
from symchain.services.chain_core import validate_generator
from symchain.utils.graphs import communicating_classes, is_irreducible

logger = logging.getLogger("symchain.transient")


# ---------------- UNIFORMIZATION ----------------

def _uniformization_rate(q: np.ndarray) -> float:
    return UNIFORMIZATION_HEADROOM * float(np.max(np.abs(np.diag(q)), initial=0.0))


def _poisson_weights(rate_times: np.ndarray, tol: float) -> np.ndarray:
    """w[j, m] = Poisson(m; rate_times[j]) for m up to the tol-tail of the largest mean."""
    m_max = int(poisson.isf(tol, float(rate_times.max()))) + 1 if rate_times.max() > 0 else 0
    m = np.arange(m_max + 1)
    weights = poisson.pmf(m[None, :], rate_times[:, None])
    weights[rate_times == 0] = 0.0
    weights[rate_times == 0, 0] = 1.0
    logger.debug("Uniformization truncated at m_max=%d", m_max)
    return weights


def _check_tol(tol: float) -> None:
    if not 0 < tol <= 1e-3:
        raise InvalidConfig(f"Uniformization tolerance {tol} must lie in (0, 1e-3].", {"tol": tol})


def _uniformize(q: np.ndarray, times: np.ndarray, tol: float) -> np.ndarray:
    size = q.shape[0]
    rate = _uniformization_rate(q)
    if rate == 0.0:
        return np.broadcast_to(np.eye(size), (len(times), size, size)).copy()

    m_step = np.eye(size) + q / rate
    weights = _poisson_weights(rate * times, tol)
    result = np.zeros((len(times), size, size))
    power = np.eye(size)
    for m in range(weights.shape[1]):
        if m:
            power = power @ m_step
        result += weights[:, m, None, None] * power
    return result


def transition_matrices(Q: GeneratorMatrix, grid: TimeGrid, tol: float = UNIFORMIZATION_TOL) -> TransitionMatrixSequence:
    """
    P(t) = exp(Qt) at every grid point by uniformization:
    P(t) = sum_m Poisson(m; Lt) M^m with M = I + Q/L, L = 1.05 max|q_nn|.
    The series stops once the Poisson tail at t_max is below tol, which
    bounds the entrywise error at every grid point by tol.
    """
    _check_tol(tol)
    logger.info("Uniformizing %d states over %d grid points", Q.size, grid.steps + 1)
    matrices = _uniformize(Q.entries, grid.points, tol)
    return TransitionMatrixSequence(space=Q.space, grid=grid, matrices=matrices)


def transition_matrix(Q: GeneratorMatrix, t: float, tol: float = UNIFORMIZATION_TOL) -> np.ndarray:
    """P(t) at a single time."""
    _check_tol(tol)
    return _uniformize(Q.entries, np.array([float(t)]), tol)[0]


# ---------------- STATIONARY LAW ----------------

def _require_irreducible(Q: GeneratorMatrix) -> None:
    if not is_irreducible(Q.entries):
        classes = communicating_classes(Q.entries)
        raise Reducible([[Q.space.label_of(i) for i in c] for c in classes])


def stationary(Q: GeneratorMatrix) -> StationaryDistribution:
    """
    Solve pi Q = 0, sum(pi) = 1. The last equation of Q^T pi = 0 is replaced
    by the normalization row.
    """
    _require_irreducible(Q)
    a = Q.entries.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(Q.size)
    b[-1] = 1.0
    pi = linalg.solve(a, b)
    # roundoff can leave -1e-17 on tiny masses
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return StationaryDistribution(space=Q.space, probs=pi)


# ---------------- DEVIATION MATRIX AND REVERSAL ----------------

def deviation_matrix(Q: GeneratorMatrix, pi: StationaryDistribution) -> np.ndarray:
    """
    d_{k,n} = int_0^inf [p_{k,n}(t) - pi_n] dt, from D = (Pi - Q)^{-1} - Pi,
    the unique solution of Q D = Pi - I with pi D = 0.
    """
    _require_irreducible(Q)
    big_pi = pi.matrix
    return linalg.solve(big_pi - Q.entries, np.eye(Q.size)) - big_pi


def reversed_chain(Q: GeneratorMatrix, pi: StationaryDistribution) -> GeneratorMatrix:
    """Time-reversed generator q*_{k,n} = (pi_n / pi_k) q_{n,k}."""
    p = pi.probs
    zero = np.flatnonzero(p <= 0)
    if zero.size:
        raise ZeroStationaryMass(int(zero[0]))
    q_star = (Q.entries.T * p[None, :]) / p[:, None]
    # diagonal is untouched by the similarity; re-close against roundoff in the off-diagonal
    np.fill_diagonal(q_star, 0.0)
    np.fill_diagonal(q_star, -q_star.sum(axis=1))
    return validate_generator(q_star, Q.space, tol=1e-9)


def reversed_transition(P: TransitionMatrixSequence, pi: StationaryDistribution) -> np.ndarray:
    """p*_{k,n}(t) = (pi_n / pi_k) p_{n,k}(t) for every grid point."""
    p = pi.probs
    return np.transpose(P.matrices, (0, 2, 1)) * p[None, None, :] / p[None, :, None]
