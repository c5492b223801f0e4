# tests/test_passage.py
import numpy as np
import pytest

from symchain.exceptions import (
    CenterState,
    CrossJump,
    FormsDisagree,
    NoCertificate,
    NoFluxAtS,
    OddN,
    ReducibleSubchain,
    StartIsCenter,
    SymmetryCheckFailed,
)
from symchain.models.chain import StateSpace, TimeGrid
from symchain.models.symmetry import SymmetryCertificate
from symchain.services.chain_core import close_rows, validate_generator
from symchain.services.passage import (
    avoiding_probabilities_renewal,
    avoiding_probabilities_symmetric,
    build_passage_problem,
    current_reflection_residual,
    currents,
    fpt_cdf,
    fpt_density_symmetric,
    fpt_density_volterra,
    fpt_reflection,
    renewal_residual,
    volterra_consistency,
)
from symchain.services.symmetry import detect_symmetry
from symchain.services.transient import transition_matrices


@pytest.fixture
def symmetric_problem(bdjump_chain):
    Q = bdjump_chain(alpha=0.3, window=(-15, 15))
    prob = build_passage_problem(Q, detect_symmetry(Q))
    P = transition_matrices(Q, TimeGrid(t_max=3.0, steps=300))
    return prob, P


def _chain(rates, n):
    return validate_generator(close_rows(np.asarray(rates, dtype=float)), StateSpace.finite(n))


def test_problem_layout(symmetric_problem):
    prob, _ = symmetric_problem
    assert prob.s == 0
    assert prob.center == 15
    assert prob.minus == tuple(range(15))
    assert prob.side_of(3) == "minus"
    assert prob.side_of(15) == "center"


def test_problem_preconditions(example1, bdjump_chain):
    with pytest.raises(OddN):
        build_passage_problem(example1)

    jump_over = np.zeros((3, 3))
    jump_over[0, 1] = jump_over[1, 0] = jump_over[1, 2] = jump_over[2, 1] = 1.0
    jump_over[0, 2] = 0.5
    with pytest.raises(CrossJump):
        build_passage_problem(_chain(jump_over, 2))

    one_way = np.zeros((3, 3))
    one_way[0, 1] = one_way[2, 1] = 1.0
    one_way[1, 2] = 1.0
    with pytest.raises(NoFluxAtS):
        build_passage_problem(_chain(one_way, 2))

    broken = np.zeros((5, 5))
    for i, j in ((0, 2), (1, 2), (2, 1), (2, 0), (2, 3), (3, 2), (3, 4), (4, 3)):
        broken[i, j] = 1.0
    with pytest.raises(ReducibleSubchain):
        build_passage_problem(_chain(broken, 4))

    with pytest.raises(SymmetryCheckFailed):
        Q = bdjump_chain(window=(-3, 3))
        build_passage_problem(Q, SymmetryCertificate(center=0, weights=tuple(2.0 ** np.arange(7))))


def test_currents_at_time_zero(symmetric_problem):
    prob, P = symmetric_problem
    h_plus, h_minus = currents(prob, P, -1)
    assert h_plus.values[0] == pytest.approx(1.0 + 0.3)
    assert h_minus.values[0] == 0.0
    assert current_reflection_residual(prob, P) < 1e-10


def test_volterra_and_symmetric_densities_agree(symmetric_problem):
    prob, P = symmetric_problem
    h = P.grid.h
    for start in (-2, 1, 3):
        g_v = fpt_density_volterra(prob, P, start)
        g_s = fpt_density_symmetric(prob, P, start)
        assert np.max(np.abs(g_v.values - g_s.values)) <= 5 * h**2
        assert g_s.is_density(1e-10)
    assert fpt_density_volterra(prob, P, 2).label == "g-_2,0"
    assert fpt_density_symmetric(prob, P, -2).label == "g+_-2,0"


def test_cdf_is_monotone_and_below_one(symmetric_problem):
    prob, P = symmetric_problem
    cdf = fpt_cdf(fpt_density_symmetric(prob, P, 2))
    assert cdf.values[0] == 0.0
    assert np.all(np.diff(cdf.values) >= -1e-12)
    assert cdf.values[-1] <= 1.0


def test_reflection_of_densities(symmetric_problem):
    prob, P = symmetric_problem
    g_minus = fpt_density_symmetric(prob, P, 3)
    g_plus = fpt_density_symmetric(prob, P, -3)
    mirrored = fpt_reflection(prob, g_minus, 3)
    assert mirrored.label == "g+_-3,0"
    assert np.max(np.abs(mirrored.values - g_plus.values)) < 1e-10


def test_renewal_identities(symmetric_problem):
    prob, P = symmetric_problem
    h = P.grid.h
    g = fpt_density_volterra(prob, P, 2)
    assert volterra_consistency(prob, P, g, 2) < 10 * h**2
    assert renewal_residual(prob, P, g, 2) < 10 * h**2


def test_avoiding_probabilities(symmetric_problem):
    prob, P = symmetric_problem
    h = P.grid.h
    g = fpt_density_volterra(prob, P, 3)
    row = avoiding_probabilities_renewal(prob, P, g, 3)
    symmetric = avoiding_probabilities_symmetric(prob, P, 3, 1, tol=1e-12)
    assert np.max(np.abs(row.trace(1).values - symmetric.values)) <= 5 * h**2
    # paths to the other side must cross the center
    assert np.max(np.abs(row.trace(-1).values)) <= 5 * h**2
    mirrored = avoiding_probabilities_symmetric(prob, P, -3, -1, tol=1e-12)
    assert np.max(np.abs(mirrored.values - symmetric.values)) < 1e-10
    swapped = avoiding_probabilities_symmetric(prob, P, 1, 3, tol=1e-12)
    assert np.max(np.abs(swapped.values - symmetric.values)) < 1e-10
    assert symmetric.values[0] == 0.0
    assert avoiding_probabilities_symmetric(prob, P, 3, 3).values[0] == pytest.approx(1.0)

def test_avoiding_mass_plus_passage_mass_is_one(symmetric_problem):
    prob, P = symmetric_problem
    h = P.grid.h
    g = fpt_density_volterra(prob, P, 3)
    row = avoiding_probabilities_renewal(prob, P, g, 3)
    cdf = fpt_cdf(g).values
    assert np.max(np.abs(row.values.sum(axis=1) + cdf - 1.0)) < 1e-9
    near = list(prob.plus)
    assert np.max(np.abs(row.values[:, near].sum(axis=1) + cdf - 1.0)) < 20 * h**2



def test_avoiding_rejections(symmetric_problem):
    prob, P = symmetric_problem
    with pytest.raises(CenterState):
        avoiding_probabilities_symmetric(prob, P, 3, 0)
    with pytest.raises(StartIsCenter):
        fpt_density_volterra(prob, P, 0)
    with pytest.raises(NoCertificate):
        fpt_density_symmetric(prob.model_copy(update={"cert": None}), P, 3)


def test_forms_disagree_on_a_wrong_certificate(bdjump_chain):
    Q = bdjump_chain(alpha=0.3, window=(-6, 6))
    prob = build_passage_problem(Q)
    weights = tuple(1.0 + 0.1 * np.abs(np.arange(-6, 7)))
    forged = prob.with_cert(SymmetryCertificate(center=0, weights=weights))
    P = transition_matrices(Q, TimeGrid(t_max=1.0, steps=20))
    with pytest.raises(FormsDisagree) as info:
        avoiding_probabilities_symmetric(forged, P, 2, 1)
    assert info.value.exit_code == 3
