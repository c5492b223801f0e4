# symchain/services/similarity.py
import logging
from typing import Iterable, Literal, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from scipy import linalg

from symchain.config import HARMONIC_TOL, ROW_SUM_TOL
from symchain.exceptions import InvalidConfig, NonHarmonic, TheoremViolation
from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import GeneratorMatrix, StateSpace
from symchain.models.similarity import (
    HARMONIC_FORM,
    Example2Family,
    Example2Realization,
    SimilarityWeights,
)
from symchain.models.symmetry import SymmetryCertificate
from symchain.services.chain_core import truncate_bdjump, validate_generator
from symchain.services.symmetry import verify_generator_symmetry
from symchain.utils.graphs import closed_classes

logger = logging.getLogger("symchain.similarity")

Weights = Union[SimilarityWeights, Sequence[float], np.ndarray]


def _as_weights(beta: Weights) -> SimilarityWeights:
    if isinstance(beta, SimilarityWeights):
        return beta
    return SimilarityWeights(beta=tuple(np.asarray(beta, dtype=float).tolist()))


# ---------------- HARMONIC VECTORS ----------------

def harmonic_residuals(Q: GeneratorMatrix, beta: Weights) -> np.ndarray:
    """(Q beta)_k scaled by max(1, sum_n |q_{k,n}| beta_n)."""
    b = _as_weights(beta).values
    q = Q.entries
    return np.abs(q @ b) / np.maximum(1.0, np.abs(q) @ b)


def check_harmonic(Q: GeneratorMatrix, beta: Weights, tol: float = HARMONIC_TOL, exempt: Iterable[int] = ()) -> None:
    """Raise NonHarmonic at the first row (label) outside `exempt` where Q beta != 0."""
    residual = harmonic_residuals(Q, beta)
    skip = {Q.space.index_of(k) for k in exempt}
    for k in range(Q.size):
        if k not in skip and residual[k] > tol:
            raise NonHarmonic(Q.space.label_of(k), float(residual[k]))


def harmonic_basis(Q: GeneratorMatrix) -> np.ndarray:
    """
    Columns are the probabilities of ending in each closed class, shape
    (size, number of closed classes). Every harmonic vector of a chain whose
    states all lead to a closed class is a combination of these columns.
    """
    q = Q.entries
    classes = closed_classes(q)
    recurrent = sorted(i for c in classes for i in c)
    transient = [i for i in range(Q.size) if i not in set(recurrent)]
    basis = np.zeros((Q.size, len(classes)))
    for col, members in enumerate(classes):
        basis[members, col] = 1.0
        if transient:
            rhs = -q[np.ix_(transient, members)].sum(axis=1)
            basis[transient, col] = linalg.solve(q[np.ix_(transient, transient)], rhs)
    logger.debug("Harmonic basis with %d closed classes", len(classes))
    return basis


def invert_weights(beta: Weights) -> SimilarityWeights:
    return SimilarityWeights(beta=tuple(1.0 / _as_weights(beta).values))


# ---------------- TRANSFORM ----------------

def apply_similarity(
    Q: GeneratorMatrix,
    beta: Weights,
    tol: float = HARMONIC_TOL,
    exempt: Iterable[int] = (),
) -> GeneratorMatrix:
    """
    q~_{k,n} = (beta_n / beta_k) q_{k,n}. The diagonal is kept as is; rows
    listed (by label) in `exempt` skip the harmonic check and get their
    diagonal re-closed.
    """
    weights = _as_weights(beta)
    if len(weights.beta) != Q.size:
        raise InvalidConfig(f"Got {len(weights.beta)} similarity weights for {Q.size} states.")
    exempt = tuple(exempt)
    check_harmonic(Q, weights, tol, exempt)

    b = weights.values
    q_tilde = Q.entries * (b[None, :] / b[:, None])
    np.fill_diagonal(q_tilde, np.diag(Q.entries))
    for label in exempt:
        k = Q.space.index_of(label)
        q_tilde[k, k] = 0.0
        q_tilde[k, k] = -q_tilde[k].sum()
    if exempt:
        logger.warning("Re-closed transformed rows %s", list(exempt))

    scale = float(np.max(np.abs(Q.entries))) if Q.size else 1.0
    return validate_generator(q_tilde, Q.space, tol=max(ROW_SUM_TOL, tol * max(1.0, scale)))


def transformed_certificate(cert: SymmetryCertificate, beta: Weights) -> SymmetryCertificate:
    """x~_n = (beta_{N-n} / beta_n) x_n, normalized to 1 at the leftmost state."""
    b = _as_weights(beta).values
    x_tilde = b[::-1] / b * cert.x
    return SymmetryCertificate(center=cert.center_s, weights=tuple(x_tilde / x_tilde[0]))


def verify_theorem5(
    Q: GeneratorMatrix,
    cert: SymmetryCertificate,
    beta: Weights,
    tol: float = 1e-9,
) -> SymmetryCertificate:
    """
    Transform Q by beta and check that x~ certifies the central symmetry of
    the transformed chain. A failure means the transform or the certificate is wrong.
    """
    q_tilde = apply_similarity(Q, beta)
    cert_tilde = transformed_certificate(cert, beta)
    report = verify_generator_symmetry(q_tilde, cert_tilde, tol=tol)
    if not report.passed:
        raise TheoremViolation(
            f"Transformed chain fails its certificate at ({report.worst_k},{report.worst_n}).",
            {"k": report.worst_k, "n": report.worst_n, "residual": report.max_residual},
        )
    return cert_tilde


# ---------------- BIRTH-DEATH FAMILY ----------------

_N, _LAM, _MU, _ETA = sp.symbols("n lam mu eta", positive=True)
_LOCALS = {"n": _N, "lam": _LAM, "mu": _MU, "eta": _ETA}
_SAMPLES = (("1", "2", "1/3"), ("3", "1/2", "2"), ("1", "1", "5"))


def verify_harmonic_form(form: str) -> bool:
    """
    Symbolic check that beta_n = form(n, lam, mu, eta) solves
    lam beta_{n+1} + mu beta_{n-1} = (lam + mu) beta_n. When simplification is
    inconclusive the residual is evaluated exactly at rational sample points.
    """
    beta = sp.sympify(form, locals=_LOCALS)
    residual = _LAM * beta.subs(_N, _N + 1) + _MU * beta.subs(_N, _N - 1) - (_LAM + _MU) * beta
    if sp.simplify(sp.powsimp(sp.expand(residual), force=True)) == 0:
        return True
    for lam, mu, eta in _SAMPLES:
        for n in range(-3, 4):
            value = residual.subs({_LAM: sp.Rational(lam), _MU: sp.Rational(mu), _ETA: sp.Rational(eta), _N: n})
            if sp.nsimplify(value) != 0:
                logger.info("Form %s is not harmonic (residual %s at n=%d)", form, value, n)
                return False
    return True


def example2_family(lam: float, mu: float, eta: float, form: str = HARMONIC_FORM) -> Example2Family:
    """
    The family of birth-death chains similar to constant rates (lam, mu).
    A form that fails the symbolic check is refused unless it happens to be
    harmonic for these particular rates.
    """
    if eta < 0:
        raise InvalidConfig(f"eta must be nonnegative, got {eta}.", {"eta": eta})
    family = Example2Family(lam=lam, mu=mu, eta=eta, form=form)
    if form != HARMONIC_FORM and not verify_harmonic_form(form):
        expr = sp.sympify(form, locals=_LOCALS).subs({_LAM: lam, _MU: mu, _ETA: eta})
        ns = np.arange(-5, 6)
        b = np.array([float(expr.subs(_N, int(n))) for n in ns])
        residual = np.abs(lam * b[2:] + mu * b[:-2] - (lam + mu) * b[1:-1]) / np.maximum(1.0, (lam + mu) * b[1:-1])
        worst = int(np.argmax(residual))
        if residual[worst] > HARMONIC_TOL:
            raise NonHarmonic(int(ns[1 + worst]), float(residual[worst]))
        logger.warning("Form %s is not harmonic in general but is for lambda=%g, mu=%g", form, lam, mu)
    return family


def realize_example2(
    family: Example2Family,
    window: Union[StateSpace, Tuple[int, int]],
    boundary: Literal["reflecting", "absorbing"] = "absorbing",
    tol: float = HARMONIC_TOL,
) -> Example2Realization:
    """
    Put the family member on a lattice window. With absorbing ends the
    boundary rows vanish and the transform is exact; with reflecting ends the
    two boundary rows are exempt from the harmonic check and re-closed.
    """
    original = truncate_bdjump(BDJumpModel(lam=family.lam, mu=family.mu, alpha=0.0), window, boundary=boundary)
    space = original.space
    weights = SimilarityWeights(beta=tuple(family.beta(np.asarray(space.labels)).tolist()))
    exempt: Tuple[int, ...] = ()
    if boundary == "reflecting":
        exempt = tuple(k for k in (space.lo, space.hi) if harmonic_residuals(original, weights)[space.index_of(k)] > tol)
    transformed = apply_similarity(original, weights, tol=tol, exempt=exempt)
    return Example2Realization(
        family=family, original=original, transformed=transformed, weights=weights, reclosed=exempt
    )
