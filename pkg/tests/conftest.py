# tests/conftest.py
import json

import numpy as np
import pytest

from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import StateSpace, TimeGrid
from symchain.services.chain_core import close_rows, ehrenfest_generator, example1_generator, truncate_bdjump, validate_generator


def random_symmetric_chain(rng: np.random.Generator, size: int, absorbing_ends: bool = True, density: float = 0.6):
    """
    Centrally symmetric chain with constant weights: every rate equals its
    reflection. Neighbour rates are always present so interior states reach the ends.
    """
    n_top = size - 1
    q = np.zeros((size, size))
    rows = range(1, n_top) if absorbing_ends else range(size)
    for k in rows:
        for n in range(size):
            if n == k or (k, n) > (n_top - k, n_top - n):
                continue
            neighbour = abs(k - n) == 1
            if neighbour or rng.random() < density:
                rate = rng.uniform(0.2, 2.0)
                q[k, n] = rate
                q[n_top - k, n_top - n] = rate
    return validate_generator(close_rows(q), StateSpace.finite(n_top))


def rk4_transition(q: np.ndarray, t: float, steps: int = 2000) -> np.ndarray:
    """P(t) from dP/dt = P Q by classical Runge-Kutta."""
    h = t / steps
    p = np.eye(q.shape[0])
    for _ in range(steps):
        k1 = p @ q
        k2 = (p + 0.5 * h * k1) @ q
        k3 = (p + 0.5 * h * k2) @ q
        k4 = (p + h * k3) @ q
        p = p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


@pytest.fixture
def example1():
    return example1_generator(alpha=1.0, beta=2.0, rho=0.5)


@pytest.fixture
def ehrenfest():
    return ehrenfest_generator(4, alpha=1.0)


@pytest.fixture
def bdjump_chain():
    def build(lam=1.0, mu=1.0, alpha=0.3, window=(-40, 40), boundary="reflecting"):
        return truncate_bdjump(BDJumpModel(lam=lam, mu=mu, alpha=alpha), window, boundary=boundary)

    return build


@pytest.fixture
def grid():
    return TimeGrid(t_max=5.0, steps=500)


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write
