# tests/test_symmetry.py
import numpy as np
import pytest

from symchain.exceptions import (
    AsymmetricWindow,
    DiagonalMismatch,
    DisconnectedRatioGraph,
    GridMismatch,
    InconsistentRatios,
    NoSymmetry,
    StructuralZeroMismatch,
)
from symchain.models.chain import StateSpace, TimeGrid
from symchain.models.symmetry import SymmetryCertificate
from symchain.services.chain_core import validate_generator
from symchain.services.symmetry import (
    check_remark1,
    detect_symmetry,
    reflect_matrix,
    verify_generator_symmetry,
    verify_probability_symmetry,
)
from symchain.services.transient import transition_matrices
from tests.conftest import random_symmetric_chain


def test_reflect_matrix():
    a = np.arange(9.0).reshape(3, 3)
    assert reflect_matrix(a)[0, 1] == a[2, 1]
    assert reflect_matrix(a)[0, 0] == a[2, 2]
    with pytest.raises(AsymmetricWindow):
        reflect_matrix(a, StateSpace.window(-1, 3))


def test_example1_weights(example1):
    cert = detect_symmetry(example1)
    assert np.allclose(cert.x, [1.0, 2.0, 4.0, 8.0], rtol=1e-12)
    assert cert.center_s == 1.5
    assert cert.ratio_identity_residual() < 1e-12
    assert verify_generator_symmetry(example1, cert).passed


def test_constant_weights_for_symmetric_bdjump(bdjump_chain):
    cert = detect_symmetry(bdjump_chain(alpha=0.3, window=(-10, 10)))
    assert cert.is_constant()
    assert cert.center_s == 0


def test_geometric_weights_for_absorbing_birth_death(bdjump_chain):
    Q = bdjump_chain(lam=1.0, mu=2.0, alpha=0.0, window=(-5, 5), boundary="absorbing")
    cert = detect_symmetry(Q)
    assert np.allclose(cert.x, 2.0 ** np.arange(11), rtol=1e-12)


def test_reflecting_asymmetric_rates_break_the_diagonal(bdjump_chain):
    with pytest.raises(DiagonalMismatch):
        detect_symmetry(bdjump_chain(lam=1.0, mu=2.0, alpha=0.0, window=(-5, 5)))


def test_two_state_chain_reports_candidate_weights():
    Q = validate_generator([[-1.0, 1.0], [2.0, -2.0]], StateSpace.finite(1))
    with pytest.raises(DiagonalMismatch) as info:
        detect_symmetry(Q)
    assert info.value.context["weights"] == pytest.approx([1.0, 2.0])
    assert info.value.exit_code == 2


def test_inconsistent_ratios_carry_a_cycle():
    Q = validate_generator([[-2, 1, 1], [1, -2, 1], [2, 1, -3]], StateSpace.finite(2))
    with pytest.raises(InconsistentRatios) as info:
        detect_symmetry(Q)
    cycle = info.value.context["cycle"]
    assert cycle[0] == cycle[-1]
    assert len(cycle) >= 3


def test_structural_zero_mismatch():
    Q = validate_generator([[-1, 1, 0], [1, -2, 1], [0, 0, 0]], StateSpace.finite(2))
    with pytest.raises(StructuralZeroMismatch):
        detect_symmetry(Q)


def test_disconnected_ratio_graph():
    Q = validate_generator(np.zeros((3, 3)), StateSpace.finite(2))
    with pytest.raises(DisconnectedRatioGraph) as info:
        detect_symmetry(Q)
    assert isinstance(info.value, NoSymmetry)
    cert = detect_symmetry(Q, allow_disconnected=True)
    assert cert.unconstrained == (1, 2)
    assert cert.to_json_dict()["unconstrained"] == [1, 2]


def test_certificate_scale_does_not_matter(example1):
    cert = SymmetryCertificate(center=1.5, weights=(3.0, 6.0, 12.0, 24.0))
    assert verify_generator_symmetry(example1, cert).passed
    assert cert.normalized().weights == (1.0, 2.0, 4.0, 8.0)


def test_wrong_certificate_reports_worst_pair(example1):
    report = verify_generator_symmetry(example1, SymmetryCertificate.constant(1.5, 4))
    assert not report.passed
    assert report.worst_k in (1, 2)


def test_probability_symmetry_example1(example1):
    grid = TimeGrid(t_max=5.0, steps=500)
    P = transition_matrices(example1, grid)
    report = verify_probability_symmetry(P, detect_symmetry(example1), tol=1e-8)
    assert report.passed
    assert report.worst_t is not None
    with pytest.raises(GridMismatch):
        verify_probability_symmetry(P, SymmetryCertificate.constant(1.5, 3))


def test_random_symmetric_chains_detected(rng):
    for size in (3, 5, 8, 11):
        Q = random_symmetric_chain(rng, size, absorbing_ends=False, density=0.5)
        cert = detect_symmetry(Q)
        assert cert.is_constant()
        P = transition_matrices(Q, TimeGrid(t_max=1.0, steps=10))
        assert verify_probability_symmetry(P, cert, tol=1e-9).passed


def test_remark1_on_ehrenfest(ehrenfest):
    cert = detect_symmetry(ehrenfest)
    P = transition_matrices(ehrenfest, TimeGrid(t_max=2.0, steps=40))
    report = check_remark1(ehrenfest, P, None, cert)
    assert report.passed
    assert report.max_deviation_residual < 1e-8


def test_random_asymmetric_chain_fails_both_levels(rng):
    q = rng.uniform(0.2, 2.0, size=(5, 5))
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    Q = validate_generator(q, StateSpace.finite(4))
    with pytest.raises(NoSymmetry):
        detect_symmetry(Q)

    P = transition_matrices(Q, TimeGrid(t_max=2.0, steps=20))
    candidates = [SymmetryCertificate.constant(2.0, 5)]
    candidates += [SymmetryCertificate(center=2.0, weights=tuple(rng.uniform(0.5, 2.0, size=5))) for _ in range(3)]
    for cert in candidates:
        assert not verify_generator_symmetry(Q, cert).passed
        assert not verify_probability_symmetry(P, cert, tol=1e-6).passed
