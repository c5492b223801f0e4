# symchain/services/symmetry.py
import logging
import math
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from symchain.config import STRUCTURAL_ZERO, SYMMETRY_TOL
from symchain.exceptions import (
    DiagonalMismatch,
    DimensionMismatch,
    DisconnectedRatioGraph,
    GridMismatch,
    InconsistentRatios,
    NoSymmetry,
    StructuralZeroMismatch,
)
from symchain.models.chain import GeneratorMatrix, StateSpace, StationaryDistribution, TransitionMatrixSequence
from symchain.models.symmetry import Remark1Report, SymmetryCertificate, SymmetryReport
from symchain.services.chain_core import require_reflectable
from symchain.services.transient import deviation_matrix, reversed_chain, reversed_transition, stationary

logger = logging.getLogger("symchain.symmetry")


# ---------------- HELPERS ----------------

def reflect_matrix(a: np.ndarray, space: Optional[StateSpace] = None) -> np.ndarray:
    """B with B[k, n] = A[N-k, N-n] (index reflection about the center)."""
    if space is not None:
        require_reflectable(space)
    return np.asarray(a)[::-1, ::-1]


def _check_size(cert: SymmetryCertificate, space: StateSpace) -> None:
    if len(cert.weights) != space.size:
        raise DimensionMismatch((len(cert.weights),), space.size)


def _worst(residual: np.ndarray, tol: float, space: StateSpace) -> SymmetryReport:
    k, n = np.unravel_index(int(np.argmax(residual)), residual.shape)
    worst = float(residual[k, n])
    return SymmetryReport(
        passed=worst <= tol,
        max_residual=worst,
        worst_k=space.label_of(int(k)),
        worst_n=space.label_of(int(n)),
    )


# ---------------- GENERATOR LEVEL ----------------

def verify_generator_symmetry(
    Q: GeneratorMatrix,
    cert: SymmetryCertificate,
    tol: float = SYMMETRY_TOL,
) -> SymmetryReport:
    """
    Check q_{N-k,N-n} = (x_n/x_k) q_{k,n} for every pair, diagonal included.
    The residual at (k,n) is scaled by max(1, |q_{k,n}|).
    """
    require_reflectable(Q.space)
    _check_size(cert, Q.space)
    q = Q.entries
    x = cert.x
    ratio = x[None, :] / x[:, None]
    residual = np.abs(reflect_matrix(q) - ratio * q) / np.maximum(1.0, np.abs(q))
    report = _worst(residual, tol, Q.space)
    logger.info("Generator symmetry check: passed=%s max_residual=%.3e", report.passed, report.max_residual)
    return report


def _ratio_constraints(q: np.ndarray, space: StateSpace) -> Dict[Tuple[int, int], float]:
    """log x_n - log x_k for every off-diagonal pair with both rates nonzero."""
    mirrored = reflect_matrix(q)
    size = q.shape[0]
    constraints = {}
    for k in range(size):
        for n in range(size):
            if k == n:
                continue
            zero_here = abs(q[k, n]) < STRUCTURAL_ZERO
            zero_there = abs(mirrored[k, n]) < STRUCTURAL_ZERO
            if zero_here != zero_there:
                raise StructuralZeroMismatch(space.label_of(k), space.label_of(n))
            if not zero_here:
                constraints[(k, n)] = math.log(mirrored[k, n] / q[k, n])
    return constraints


def _propagate(size: int, constraints: Dict[Tuple[int, int], float]) -> Tuple[np.ndarray, nx.Graph, List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(range(size))
    for (k, n), w in constraints.items():
        if not graph.has_edge(k, n):
            graph.add_edge(k, n, source=k, log_ratio=w)

    log_x = np.zeros(size)
    tree = nx.Graph()
    tree.add_nodes_from(range(size))
    unreached: List[int] = []
    for component in sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0]):
        root = component[0]
        if root != 0:
            unreached.extend(component)
        for u, v in nx.bfs_edges(graph, root):
            edge = graph.edges[u, v]
            step = edge["log_ratio"] if edge["source"] == u else -edge["log_ratio"]
            log_x[v] = log_x[u] + step
            tree.add_edge(u, v)
    return log_x, tree, unreached


def detect_symmetry(
    Q: GeneratorMatrix,
    tol: float = SYMMETRY_TOL,
    allow_disconnected: bool = False,
) -> SymmetryCertificate:
    """
    Solve the ratio constraints log x_n - log x_k = log(q_{N-k,N-n}/q_{k,n})
    by BFS from the leftmost state (x = 1), then check every constraint,
    every diagonal pair and every structural zero.

    States in components of the ratio graph not containing the leftmost state
    get weight 1 and are listed as unconstrained; unless `allow_disconnected`,
    that raises DisconnectedRatioGraph after the global check.
    """
    require_reflectable(Q.space)
    space = Q.space
    q = Q.entries
    constraints = _ratio_constraints(q, space)
    log_x, tree, unreached = _propagate(Q.size, constraints)
    weights = np.exp(log_x).tolist()

    for (k, n), w in constraints.items():
        residual = abs(log_x[n] - log_x[k] - w)
        if residual > tol:
            path = nx.shortest_path(tree, k, n) if nx.has_path(tree, k, n) else [k, n]
            cycle = [space.label_of(i) for i in path] + [space.label_of(k)]
            raise InconsistentRatios(cycle, float(residual))

    mirrored = reflect_matrix(q)
    diag_residual = np.abs(np.diag(mirrored) - np.diag(q)) / np.maximum(1.0, np.abs(np.diag(q)))
    worst = int(np.argmax(diag_residual))
    if diag_residual[worst] > tol:
        raise DiagonalMismatch(space.label_of(worst), float(diag_residual[worst]), weights)

    labels = [space.label_of(i) for i in unreached]
    if unreached:
        logger.warning("Ratio graph leaves states %s unconstrained", labels)
        if not allow_disconnected:
            raise DisconnectedRatioGraph(labels, weights)

    cert = SymmetryCertificate(center=space.center_label, weights=tuple(weights), unconstrained=tuple(labels))
    logger.info("Detected central symmetry about %s", cert.center_s)
    return cert


# ---------------- PROBABILITY LEVEL ----------------

def verify_probability_symmetry(
    P: TransitionMatrixSequence,
    cert: SymmetryCertificate,
    tol: float = SYMMETRY_TOL,
) -> SymmetryReport:
    """p_{N-k,N-n}(t) = (x_n/x_k) p_{k,n}(t) at every grid point."""
    require_reflectable(P.space)
    if len(cert.weights) != P.space.size:
        raise GridMismatch(f"Certificate has {len(cert.weights)} weights for {P.space.size} states.")
    x = cert.x
    ratio = x[None, None, :] / x[None, :, None]
    mats = P.matrices
    residual = np.abs(mats[:, ::-1, ::-1] - ratio * mats) / np.maximum(1.0, np.abs(mats))
    m, k, n = np.unravel_index(int(np.argmax(residual)), residual.shape)
    worst = float(residual[m, k, n])
    return SymmetryReport(
        passed=worst <= tol,
        max_residual=worst,
        worst_k=P.space.label_of(int(k)),
        worst_n=P.space.label_of(int(n)),
        worst_t=float(P.grid.points[m]),
    )


# ---------------- STRUCTURAL CONSEQUENCES ----------------

def check_remark1(
    Q: GeneratorMatrix,
    P: Optional[TransitionMatrixSequence],
    pi: Optional[StationaryDistribution],
    cert: SymmetryCertificate,
    tol: float = 1e-8,
) -> Remark1Report:
    """
    For an irreducible chain with a central symmetry: constant weights,
    pi_{N-n} = pi_n, a reversed chain that is symmetric with constant weights
    (generator and, when P is given, probability level), and d_{N-k,N-n} = d_{k,n}.
    """
    require_reflectable(Q.space)
    pi = pi or stationary(Q)
    probs = pi.probs
    stationary_residual = float(np.max(np.abs(probs[::-1] - probs)))

    try:
        reversed_cert = detect_symmetry(reversed_chain(Q, pi), tol=SYMMETRY_TOL)
        reversed_ok = reversed_cert.is_constant(tol)
    except NoSymmetry as exc:
        logger.warning("Reversed chain has no central symmetry: %s", exc.detail)
        reversed_ok = False
    if reversed_ok and P is not None:
        p_star = reversed_transition(P, pi)
        reversed_ok = bool(np.max(np.abs(p_star[:, ::-1, ::-1] - p_star)) <= tol)

    d = deviation_matrix(Q, pi)
    deviation_residual = float(np.max(np.abs(reflect_matrix(d) - d)))

    return Remark1Report(
        constant_weights=cert.is_constant(tol),
        symmetric_stationary=stationary_residual <= tol,
        reversed_chain_symmetric=reversed_ok,
        deviation_symmetric=deviation_residual <= tol,
        max_stationary_residual=stationary_residual,
        max_deviation_residual=deviation_residual,
    )
