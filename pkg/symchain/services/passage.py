# symchain/services/passage.py
import logging
from typing import Optional, Tuple

import numpy as np

from symchain.config import FORMS_TOL, SYMMETRY_TOL
from symchain.exceptions import (
    CenterState,
    CrossJump,
    FormsDisagree,
    GridMismatch,
    NoCertificate,
    NoFluxAtS,
    OddN,
    ReducibleSubchain,
    StartIsCenter,
    SymmetryCheckFailed,
)
from symchain.models.chain import DensityTrace, GeneratorMatrix, TransitionMatrixSequence
from symchain.models.passage import AvoidingRow, PassageProblem
from symchain.models.symmetry import SymmetryCertificate
from symchain.services.chain_core import require_reflectable
from symchain.services.symmetry import verify_generator_symmetry
from symchain.utils.graphs import is_irreducible
from symchain.utils.quadrature import cumulative, trapezoid_convolution, volterra_march

logger = logging.getLogger("symchain.passage")


# ---------------- PROBLEM SETUP ----------------

def build_passage_problem(Q: GeneratorMatrix, cert: Optional[SymmetryCertificate] = None) -> PassageProblem:
    """
    Check that the central state s splits the chain: N = 2s, no rate between
    the two sides, flux into and out of s from both sides, and irreducible
    subchains below and above s. A supplied certificate is verified on Q.
    """
    space = Q.space
    require_reflectable(space)
    center = space.center_index
    if center is None:
        raise OddN(space.size)

    q = Q.entries
    minus = tuple(range(center))
    plus = tuple(range(center + 1, space.size))

    for i in minus:
        for j in plus:
            if q[i, j] > 0 or q[j, i] > 0:
                raise CrossJump(space.label_of(i), space.label_of(j))

    fluxes = {
        "into the center from below": q[list(minus), center].sum() if minus else 0.0,
        "into the center from above": q[list(plus), center].sum() if plus else 0.0,
        "out of the center downward": q[center, list(minus)].sum() if minus else 0.0,
        "out of the center upward": q[center, list(plus)].sum() if plus else 0.0,
    }
    for direction, flux in fluxes.items():
        if not flux > 0:
            raise NoFluxAtS(direction)

    if not is_irreducible(q, minus):
        raise ReducibleSubchain("minus")
    if not is_irreducible(q, plus):
        raise ReducibleSubchain("plus")

    if cert is not None:
        report = verify_generator_symmetry(Q, cert, tol=SYMMETRY_TOL)
        if not report.passed:
            raise SymmetryCheckFailed(report.worst_k, report.worst_n, report.max_residual)

    s = space.label_of(center)
    logger.info("Passage problem about s=%d with %d states on each side", s, len(minus))
    return PassageProblem(Q=Q, s=s, center=center, minus=minus, plus=plus, cert=cert)


def _require_same_space(prob: PassageProblem, P: TransitionMatrixSequence) -> None:
    if P.space != prob.space:
        raise GridMismatch("Transition matrices and passage problem live on different state spaces.")


def _require_cert(prob: PassageProblem) -> SymmetryCertificate:
    if prob.cert is None:
        raise NoCertificate()
    return prob.cert


def _start_index(prob: PassageProblem, start: int) -> int:
    idx = prob.space.index_of(start)
    if idx == prob.center:
        raise StartIsCenter(start)
    return idx


# ---------------- PROBABILITY CURRENTS ----------------

def _current_matrix(prob: PassageProblem, P: TransitionMatrixSequence, side: Tuple[int, ...]) -> np.ndarray:
    """sum over i in side of p_{k,i}(t) q_{i,s}, for every start k: shape (steps+1, size)."""
    rates = prob.Q.entries[list(side), prob.center]
    return P.matrices[:, :, list(side)] @ rates


def currents(prob: PassageProblem, P: TransitionMatrixSequence, k: int) -> Tuple[DensityTrace, DensityTrace]:
    """
    Upward and downward entrance fluxes into s from k:
    h+_{k,s}(t) = sum_{i<s} p_{k,i}(t) q_{i,s},  h-_{k,s}(t) = sum_{j>s} p_{k,j}(t) q_{j,s}.
    """
    _require_same_space(prob, P)
    idx = prob.space.index_of(k)
    row = P.matrices[:, idx, :]
    q = prob.Q.entries
    h_plus = row[:, list(prob.minus)] @ q[list(prob.minus), prob.center]
    h_minus = row[:, list(prob.plus)] @ q[list(prob.plus), prob.center]
    return (
        DensityTrace(grid=P.grid, values=h_plus, label=f"h+_{k},{prob.s}"),
        DensityTrace(grid=P.grid, values=h_minus, label=f"h-_{k},{prob.s}"),
    )


def current_reflection_residual(prob: PassageProblem, P: TransitionMatrixSequence) -> float:
    """max over k and t of |h-_{2s-k,s}(t) - (x_s/x_k) h+_{k,s}(t)|."""
    cert = _require_cert(prob)
    _require_same_space(prob, P)
    x = cert.x
    h_plus = _current_matrix(prob, P, prob.minus)
    h_minus = _current_matrix(prob, P, prob.plus)
    scaled = h_plus * (x[prob.center] / x)[None, :]
    return float(np.max(np.abs(h_minus[:, ::-1] - scaled)))


# ---------------- FIRST-PASSAGE DENSITIES ----------------

def fpt_density_volterra(prob: PassageProblem, P: TransitionMatrixSequence, start: int) -> DensityTrace:
    """
    First-passage density into s from `start` by the renewal-type Volterra equation
    g(t) = h_start(t) - int_0^t g(u) h_{s,s}(t-u) du, using the upward currents for
    a start below s and the downward currents for a start above s.
    """
    _require_same_space(prob, P)
    idx = _start_index(prob, start)
    side = prob.minus if idx < prob.center else prob.plus
    flux = _current_matrix(prob, P, side)
    g = volterra_march(flux[:, idx], flux[:, prob.center], P.grid.h)
    sign = "+" if idx < prob.center else "-"
    logger.info("Volterra first-passage density from %d over %d steps", start, P.grid.steps)
    return DensityTrace(grid=P.grid, values=g, label=f"g{sign}_{start},{prob.s}")


def fpt_density_symmetric(prob: PassageProblem, P: TransitionMatrixSequence, start: int) -> DensityTrace:
    """g+ = h+ - h- below s and g- = h- - h+ above s. Needs a central symmetry."""
    _require_cert(prob)
    idx = _start_index(prob, start)
    h_plus, h_minus = currents(prob, P, start)
    if idx < prob.center:
        values, sign = h_plus.values - h_minus.values, "+"
    else:
        values, sign = h_minus.values - h_plus.values, "-"
    return DensityTrace(grid=P.grid, values=values, label=f"g{sign}_{start},{prob.s}")


def fpt_cdf(g: DensityTrace) -> DensityTrace:
    """P(T <= t) by the cumulative trapezoid rule."""
    return DensityTrace(grid=g.grid, values=cumulative(g.values, g.grid.h), label=f"cdf_{g.label}")


def reflect_density(
    g: DensityTrace,
    start: int,
    cert: SymmetryCertificate,
    space,
) -> DensityTrace:
    """
    The density from the mirrored start 2s-start: g+_{i,s} = (x_i/x_s) g-_{2s-i,s}
    and g-_{j,s} = (x_j/x_s) g+_{2s-j,s}.
    """
    require_reflectable(space)
    center = space.center_index
    if center is None:
        raise OddN(space.size)
    source = space.index_of(start)
    if source == center:
        raise StartIsCenter(start)
    target = space.mirror_index(source)
    factor = cert.weights[target] / cert.weights[center]
    label = space.label_of(target)
    sign = "+" if target < center else "-"
    return DensityTrace(grid=g.grid, values=factor * g.values, label=f"g{sign}_{label},{space.label_of(center)}")


def fpt_reflection(prob: PassageProblem, g: DensityTrace, start: int) -> DensityTrace:
    cert = _require_cert(prob)
    return reflect_density(g, start, cert, prob.space)


def volterra_consistency(prob: PassageProblem, P: TransitionMatrixSequence, g: DensityTrace, start: int) -> float:
    """
    Residual of the cross-current identity: below s,
    h-_{i,s}(t) = int_0^t g+_{i,s}(u) h-_{s,s}(t-u) du; above s the roles swap.
    """
    _require_same_space(prob, P)
    idx = _start_index(prob, start)
    other = prob.plus if idx < prob.center else prob.minus
    flux = _current_matrix(prob, P, other)
    rebuilt = trapezoid_convolution(g.values, flux[:, prob.center], P.grid.h)
    return float(np.max(np.abs(flux[:, idx] - rebuilt)))


def renewal_residual(prob: PassageProblem, P: TransitionMatrixSequence, g: DensityTrace, start: int) -> float:
    """
    Residual of p_{i,j}(t) = int_0^t g_{i,s}(u) p_{s,j}(t-u) du over s and every
    j on the far side of s.
    """
    _require_same_space(prob, P)
    idx = _start_index(prob, start)
    far = prob.plus if idx < prob.center else prob.minus
    targets = [prob.center, *far]
    rebuilt = trapezoid_convolution(g.values, P.matrices[:, prob.center, targets], P.grid.h)
    return float(np.max(np.abs(P.matrices[:, idx, targets] - rebuilt)))


# ---------------- AVOIDING PROBABILITIES ----------------

def avoiding_probabilities_renewal(
    prob: PassageProblem,
    P: TransitionMatrixSequence,
    g: DensityTrace,
    k: int,
) -> AvoidingRow:
    """
    p^<s>_{k,n}(t) = p_{k,n}(t) - int_0^t g(u) p_{s,n}(t-u) du for every n.
    Values on the far side of s are computed like the rest; they should vanish.
    """
    _require_same_space(prob, P)
    if g.grid != P.grid:
        raise GridMismatch()
    idx = _start_index(prob, k)
    through_s = trapezoid_convolution(g.values, P.matrices[:, prob.center, :], P.grid.h)
    return AvoidingRow(space=prob.space, grid=P.grid, start=k, values=P.matrices[:, idx, :] - through_s)


def avoiding_probabilities_symmetric(
    prob: PassageProblem,
    P: TransitionMatrixSequence,
    k: int,
    n: int,
    tol: float = FORMS_TOL,
) -> DensityTrace:
    """
    p^<s>_{k,n}(t) = p_{k,n}(t) - (x_k/x_s) p_{2s-k,n}(t), checked against the
    second expression p_{k,n}(t) - (x_s/x_n) p_{k,2s-n}(t).
    """
    cert = _require_cert(prob)
    _require_same_space(prob, P)
    space = prob.space
    ki = _start_index(prob, k)
    ni = space.index_of(n)
    if ni == prob.center:
        raise CenterState()

    x = cert.weights
    c = prob.center
    mats = P.matrices
    first = mats[:, ki, ni] - (x[ki] / x[c]) * mats[:, space.mirror_index(ki), ni]
    second = mats[:, ki, ni] - (x[c] / x[ni]) * mats[:, ki, space.mirror_index(ni)]
    residual = float(np.max(np.abs(first - second)))
    if residual > tol:
        raise FormsDisagree(residual)
    return DensityTrace(grid=P.grid, values=first, label=f"pav_{k},{n}")
