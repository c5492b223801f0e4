# tests/test_acceptance.py
"""End-to-end numerical checks: cross-method agreement on the reference chains."""
import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.linalg import expm

from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import TimeGrid
from symchain.models.simulation import SimulationConfig
from symchain.services.bdjump import (
    avoiding_closed_form,
    figure1_traces,
    fpt_density_closed_form,
    stationary_law,
    transition_probabilities,
    transition_probability,
    transition_probability_decomposed,
)
from symchain.services.chain_core import ehrenfest_generator, truncate_bdjump
from symchain.services.mc_oracle import estimate_avoiding, estimate_fpt_histogram, estimate_transition, simulate_paths
from symchain.services.passage import (
    avoiding_probabilities_renewal,
    avoiding_probabilities_symmetric,
    build_passage_problem,
    fpt_density_symmetric,
    fpt_density_volterra,
)
from symchain.services.similarity import harmonic_basis, verify_theorem5
from symchain.services.symmetry import check_remark1, detect_symmetry, verify_probability_symmetry
from symchain.services.transient import deviation_matrix, stationary, transition_matrices, transition_matrix
from tests.conftest import random_symmetric_chain

GRID = TimeGrid(t_max=5.0, steps=500)


def test_example1_probability_symmetry(example1):
    cert = detect_symmetry(example1)
    assert np.allclose(cert.x / cert.x[0], [1.0, 2.0, 4.0, 8.0], rtol=1e-12)
    assert verify_probability_symmetry(transition_matrices(example1, GRID), cert, tol=1e-8).passed


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.1, 0.3])
def test_current_difference_matches_renewal(alpha):
    Q = truncate_bdjump(BDJumpModel(lam=1.0, mu=1.0, alpha=alpha), (-40, 40))
    prob = build_passage_problem(Q, detect_symmetry(Q))
    P = transition_matrices(Q, GRID)
    for start in (1, 3):
        diff = fpt_density_symmetric(prob, P, start).values - fpt_density_volterra(prob, P, start).values
        assert np.max(np.abs(diff[1:])) <= 5 * GRID.h**2


@pytest.mark.slow
def test_closed_form_matches_wide_window():
    model = BDJumpModel(lam=1.0, mu=1.0, alpha=0.5)
    Q = truncate_bdjump(model, (-80, 80))
    ns = np.arange(-5, 6)
    for t in (0.5, 1.0, 2.0, 5.0):
        P = transition_matrix(Q, t)
        for k in range(-5, 6):
            closed = transition_probabilities(model, k, ns, t)
            assert np.max(np.abs(closed - P[k + 80, ns + 80])) <= 1e-8


def test_decomposition_identity_and_avoiding_against_taboo_block():
    model = BDJumpModel(lam=1.0, mu=1.0, alpha=0.5)
    quad_tol = 1e-10
    for t in (0.5, 1.0, 2.0, 5.0):
        for k in range(-2, 3):
            for n in range(-2, 3):
                gap = transition_probability_decomposed(model, k, n, t, quad_tol) - transition_probability(model, k, n, t, quad_tol)
                assert abs(gap) <= 2 * quad_tol

    # paths leave one side of 0 only through 0, so the taboo law is the exponential of that block
    Q = truncate_bdjump(model, (-30, 30)).entries
    upper, lower = Q[31:, 31:], Q[:30, :30]
    states = np.arange(1, 6)
    for t in (0.5, 1.0, 2.0, 5.0):
        above, below = expm(upper * t), expm(lower * t)
        for k in states:
            closed = np.array([avoiding_closed_form(model, k, n, t) for n in states])
            assert np.max(np.abs(closed - above[k - 1, states - 1])) <= 1e-10
            mirrored = np.array([avoiding_closed_form(model, -k, -n, t) for n in states])
            assert np.max(np.abs(mirrored - below[30 - k, 30 - states])) <= 1e-10


def test_stationary_law_three_ways():
    model = BDJumpModel(lam=1.0, mu=1.0, alpha=0.5)
    pi = stationary(truncate_bdjump(model, (-40, 40)))
    for n in range(-10, 11):
        exact = 2.0 ** (-abs(n)) / 3.0
        assert stationary_law(model, n) == pytest.approx(exact, rel=1e-15)
        assert abs(pi.of(n) - exact) <= 1e-6
        assert abs(stationary_law(model, n) - stationary_law(model, -n)) <= 1e-12


@pytest.mark.slow
def test_figure1_properties():
    fpt, avoiding = figure1_traces(1.0, 3, 1, TimeGrid(t_max=10.0, steps=1000))
    early = fpt[(fpt.t > 0) & (fpt.t <= 0.5)]
    assert (early["g_alpha_0.1"] < early["g_alpha_0.2"]).all()
    assert (early["g_alpha_0.2"] < early["g_alpha_0.3"]).all()

    window = avoiding[avoiding.t >= 0.5]
    columns = ["pav_alpha_0.1", "pav_alpha_0.2", "pav_alpha_0.5", "pav_alpha_1.0"]
    for upper, lower in zip(columns, columns[1:]):
        assert (window[upper] > window[lower]).all()

    long = TimeGrid(t_max=200.0, steps=20_000)
    for alpha in (0.1, 0.2, 0.3):
        g = fpt_density_closed_form(BDJumpModel(lam=1.0, mu=1.0, alpha=alpha), 3, long.points)
        assert trapezoid(g, dx=long.h) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.slow
def test_monte_carlo_concordance():
    model = BDJumpModel(lam=1.0, mu=1.0, alpha=0.5)
    Q = truncate_bdjump(model, (-20, 20))
    paths = simulate_paths(Q, SimulationConfig(n_paths=100_000, t_max=2.0, seed=2024, start=3))
    bins = TimeGrid(t_max=2.0, steps=20)
    hist = estimate_fpt_histogram(paths, 0, bins)

    checks = []
    for t in (0.5, 1.0, 2.0):
        for n in (1, 2):
            est = estimate_transition(paths, n, t)
            checks.append(abs(est.estimate - transition_probability(model, 3, n, t)) <= 4 * est.std_error)
            est = estimate_avoiding(paths, 0, n, t)
            checks.append(abs(est.estimate - avoiding_closed_form(model, 3, n, t)) <= 4 * est.std_error)
        m = bins.index_of(t)
        exact = fpt_density_closed_form(model, 3, t)
        checks.append(abs(hist.density.values[m] - exact) <= 4 * hist.std_errors[m])
    assert np.mean(checks) >= 0.95


def _passage_suite(Q, h):
    prob = build_passage_problem(Q, detect_symmetry(Q))
    P = transition_matrices(Q, TimeGrid(t_max=2.0, steps=int(round(2.0 / h))))
    cert, space, s = prob.cert, Q.space, prob.s
    for k in (s + 1, s + 2):
        for n in (s + 1, s + 2):
            pav = avoiding_probabilities_symmetric(prob, P, k, n, tol=1e-12)
            mirrored = avoiding_probabilities_symmetric(prob, P, 2 * s - k, 2 * s - n, tol=1e-12)
            ratio = cert.weights[space.index_of(n)] / cert.weights[space.index_of(k)]
            assert np.max(np.abs(mirrored.values - ratio * pav.values)) <= 1e-10
        g = fpt_density_volterra(prob, P, k)
        row = avoiding_probabilities_renewal(prob, P, g, k)
        assert np.max(np.abs(row.trace(s - 1).values)) <= 5 * h**2


def test_avoiding_forms_and_reflection():
    _passage_suite(truncate_bdjump(BDJumpModel(lam=1.0, mu=1.0, alpha=0.5), (-10, 10)), 0.01)
    _passage_suite(ehrenfest_generator(4, alpha=0.5), 0.01)


def test_similarity_keeps_symmetry_on_random_chains(rng):
    for trial in range(100):
        size = 5 + trial % 7
        Q = random_symmetric_chain(rng, size)
        beta = harmonic_basis(Q) @ rng.uniform(0.05, 5.0, size=2)
        verify_theorem5(Q, detect_symmetry(Q), beta, tol=1e-9)


def test_ehrenfest_structure():
    Q = ehrenfest_generator(4, alpha=1.0)
    cert = detect_symmetry(Q)
    report = check_remark1(Q, None, None, cert)
    assert report.passed
    pi = stationary(Q)
    assert np.allclose(pi.probs, np.array([1, 4, 6, 4, 1]) / 16.0, atol=1e-14)
    d = deviation_matrix(Q, pi)
    assert np.max(np.abs(d[::-1, ::-1] - d)) <= 1e-8
    assert np.max(np.abs(Q.entries @ d - (pi.matrix - np.eye(5)))) <= 1e-9
