# symchain/services/bdjump.py
import logging
import math
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from symchain.config import QUAD_TOL, SERIES_TOL
from symchain.exceptions import AlphaZero, AsymmetricRates, CenterState, InvalidConfig, NegativeTime
from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import TimeGrid
from symchain.utils.bessel import miller_start_order, bessel_i_scaled, scaled_bessel_table
from symchain.utils.quadrature import adaptive_simpson

logger = logging.getLogger("symchain.bdjump")

Times = Union[float, np.ndarray]

__all__ = [
    "bessel_i_scaled",
    "scaled_bessel_table",
    "hat_transition_probability",
    "transition_probabilities",
    "transition_probability",
    "transition_trace",
    "transition_probability_decomposed",
    "stationary_roots",
    "stationary_law",
    "stationary_pgf",
    "pgf_residual",
    "fpt_density_closed_form",
    "fpt_density_telescoped",
    "avoiding_closed_form",
    "figure1_traces",
]


def _check_time(t: Times) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(arr < 0):
        raise NegativeTime(float(arr.min()))
    return arr


def _shape_like(t: Times, values: np.ndarray) -> Times:
    return float(values[0]) if np.ndim(t) == 0 else values


def _require_symmetric(model: BDJumpModel) -> None:
    if not model.is_symmetric:
        raise AsymmetricRates(model.lam, model.mu)


# ---------------- TRANSITION PROBABILITIES ----------------

def hat_transition_probability(model: BDJumpModel, k: int, n: int, t: Times) -> Times:
    """
    Poisson bilateral birth-death probability (no jumps to 0):
    (lambda/mu)^{(n-k)/2} I_{n-k}(gamma t) e^{-(lambda+mu) t}, gamma = 2 sqrt(lambda mu).
    """
    ts = _check_time(t)
    gamma = model.gamma
    order = abs(n - k)
    ive = scaled_bessel_table(order, gamma * ts)[:, order]
    log_scale = 0.5 * (n - k) * math.log(model.lam / model.mu) - (model.lam + model.mu - gamma) * ts
    return _shape_like(t, ive * np.exp(log_scale))


def _jump_integrals(model: BDJumpModel, ns: np.ndarray, t: float, quad_tol: float) -> np.ndarray:
    """alpha (lambda/mu)^{n/2} int_0^t e^{-(lambda+mu+alpha) u} I_n(gamma u) du for each n."""
    return _jump_integrals_between(model, ns, 0.0, t, quad_tol)


def _jump_integrals_between(model: BDJumpModel, ns: np.ndarray, a: float, t: float, quad_tol: float) -> np.ndarray:
    if model.alpha == 0.0 or t <= a:
        return np.zeros(len(ns))
    gamma = model.gamma
    orders = np.abs(ns)
    n_max = int(orders.max())
    decay = model.lam + model.mu + model.alpha - gamma
    prefactor = model.alpha * np.exp(0.5 * ns * math.log(model.lam / model.mu))

    def integrand(u: float) -> np.ndarray:
        table = scaled_bessel_table(n_max, [gamma * u])[0]
        return prefactor * table[orders] * math.exp(-decay * u)

    return np.asarray(adaptive_simpson(integrand, float(a), float(t), quad_tol), dtype=float)


def transition_probabilities(
    model: BDJumpModel,
    k: int,
    ns: Iterable[int],
    t: float,
    quad_tol: float = QUAD_TOL,
) -> np.ndarray:
    """
    p_{k,n}(t) for every n in `ns`:
    (lambda/mu)^{(n-k)/2} I_{n-k}(gamma t) e^{-(lambda+mu+alpha) t}
    + alpha (lambda/mu)^{n/2} int_0^t e^{-(lambda+mu+alpha) u} I_n(gamma u) du.
    The time integral is shared across all targets and done by adaptive Simpson.
    """
    _check_time(t)
    ns = np.asarray(list(ns), dtype=int)
    t = float(t)
    gamma = model.gamma
    orders = np.abs(ns - k)
    table = scaled_bessel_table(int(orders.max()), [gamma * t])[0]
    log_scale = 0.5 * (ns - k) * math.log(model.lam / model.mu) - (model.lam + model.mu + model.alpha - gamma) * t
    direct = table[orders] * np.exp(log_scale)
    return direct + _jump_integrals(model, ns, t, quad_tol)


def transition_probability(model: BDJumpModel, k: int, n: int, t: float, quad_tol: float = QUAD_TOL) -> float:
    return float(transition_probabilities(model, k, [n], t, quad_tol)[0])


def transition_trace(
    model: BDJumpModel,
    k: int,
    n: int,
    grid: TimeGrid,
    quad_tol: float = QUAD_TOL,
) -> np.ndarray:
    """
    p_{k,n}(t) at every grid point. The jump integral is accumulated panel by
    panel, each panel to quad_tol / steps.
    """
    ts = grid.points
    gamma = model.gamma
    order = abs(n - k)
    direct = scaled_bessel_table(order, gamma * ts)[:, order] * np.exp(
        0.5 * (n - k) * math.log(model.lam / model.mu) - (model.lam + model.mu + model.alpha - gamma) * ts
    )
    if model.alpha == 0.0:
        return direct
    ns = np.array([n])
    pieces = [
        _jump_integrals_between(model, ns, float(a), float(b), quad_tol / grid.steps)[0]
        for a, b in zip(ts[:-1], ts[1:])
    ]
    return direct + np.concatenate(([0.0], np.cumsum(pieces)))


def transition_probability_decomposed(
    model: BDJumpModel,
    k: int,
    n: int,
    t: float,
    quad_tol: float = QUAD_TOL,
) -> float:
    """e^{-alpha t} phat_{k,n}(t) + alpha int_0^t e^{-alpha u} phat_{0,n}(u) du."""
    _check_time(t)
    t = float(t)
    free = model.with_alpha(0.0)
    first = math.exp(-model.alpha * t) * hat_transition_probability(free, k, n, t)
    if model.alpha == 0.0 or t == 0.0:
        return first

    def integrand(u: float) -> float:
        return model.alpha * math.exp(-model.alpha * u) * hat_transition_probability(free, 0, n, u)

    return first + float(adaptive_simpson(integrand, 0.0, t, quad_tol))


# ---------------- STATIONARY LAW ----------------

def stationary_roots(model: BDJumpModel) -> Tuple[float, float]:
    """Roots 0 < z1 < 1 < z2 of lambda z^2 - (lambda+mu+alpha) z + mu."""
    total = model.lam + model.mu + model.alpha
    root = math.sqrt(total * total - 4.0 * model.lam * model.mu)
    return (total - root) / (2.0 * model.lam), (total + root) / (2.0 * model.lam)


def stationary_law(model: BDJumpModel, n: int) -> float:
    """pi_n = alpha z1^{-n} / (lambda (z2 - z1)) for n <= -1 and alpha z2^{-n} / (lambda (z2 - z1)) for n >= 0."""
    if model.alpha <= 0.0:
        raise AlphaZero()
    z1, z2 = stationary_roots(model)
    scale = model.alpha / (model.lam * (z2 - z1))
    return scale * (z1 ** (-n) if n < 0 else z2 ** (-n))


def _u(model: BDJumpModel, z: float) -> float:
    return model.lam * z + model.mu / z - (model.lam + model.mu + model.alpha)


def stationary_pgf(model: BDJumpModel, z: float) -> float:
    """sum_n pi_n z^n = -alpha / u(z) for z1 < z < z2."""
    if model.alpha <= 0.0:
        raise AlphaZero()
    z1, z2 = stationary_roots(model)
    if not z1 < z < z2:
        raise InvalidConfig(f"Stationary generating function diverges at z={z}.", {"z": z, "z1": z1, "z2": z2})
    return -model.alpha / _u(model, z)


def _summation_window(model: BDJumpModel, k: int, t: float) -> int:
    return int(max(60, abs(k) + math.ceil(20.0 * math.sqrt(model.lam * model.mu * t))))


def pgf_residual(
    model: BDJumpModel,
    k: int,
    z: float,
    t: float,
    delta: float = 1e-3,
    quad_tol: float = 1e-13,
) -> float:
    """
    |dH/dt - u(z) H - alpha| with H(z,t) = sum_n p_{k,n}(t) z^n summed over
    the normalization window and dH/dt by a central difference of width 2 delta.
    """
    if t - delta < 0:
        raise NegativeTime(t - delta)
    width = _summation_window(model, k, t + delta)
    ns = np.arange(-width, width + 1)
    powers = np.power(float(z), ns)

    def pgf(time: float) -> float:
        return float(np.dot(transition_probabilities(model, k, ns, time, quad_tol), powers))

    derivative = (pgf(t + delta) - pgf(t - delta)) / (2.0 * delta)
    return abs(derivative - _u(model, z) * pgf(t) - model.alpha)


# ---------------- FIRST PASSAGE AND AVOIDING (lambda == mu) ----------------

def _passage_start(k: int) -> int:
    if k == 0:
        raise CenterState()
    return abs(int(k))


def fpt_density_closed_form(
    model: BDJumpModel,
    k: int,
    t: Times,
    series_tol: float = SERIES_TOL,
) -> Times:
    """
    g-_{k,0}(t) = e^{-alpha t} { lambda [e^{-x}I_{k-1}(x) - e^{-x}I_{k+1}(x)]
                  + alpha sum_{j>=1} [e^{-x}I_{k-j}(x) - e^{-x}I_{k+j}(x)] },  x = 2 lambda t.
    The series is cut at the first J whose remaining scaled-Bessel tail,
    times alpha, is below series_tol. By reflection g+_{-k,0} is the same function.
    """
    _require_symmetric(model)
    k = _passage_start(k)
    ts = _check_time(t)
    x = 2.0 * model.lam * ts
    n_top = miller_start_order(2 * k, float(x.max()))
    table = scaled_bessel_table(n_top, x)

    # tail[m] = sum_{i>=m} ive(i); the j-th series term is bounded by ive(|k-j|)
    tail = np.cumsum(table[:, ::-1], axis=1)[:, ::-1]
    worst_tail = tail.max(axis=0)
    j_max = k
    while j_max < n_top - k and model.alpha * 2.0 * worst_tail[j_max - k + 1] >= series_tol:
        j_max += 1
    logger.debug("Passage series for k=%d truncated at J=%d", k, j_max)

    js = np.arange(1, j_max + 1)
    series = (table[:, np.abs(k - js)] - table[:, k + js]).sum(axis=1)
    values = np.exp(-model.alpha * ts) * (model.lam * (table[:, k - 1] - table[:, k + 1]) + model.alpha * series)
    return _shape_like(t, values)


def fpt_density_telescoped(model: BDJumpModel, k: int, t: Times) -> Times:
    """
    Finite form of the passage density: the series collapses to
    e^{-x}[I_0 + 2 sum_{m=1}^{k-1} I_m + I_k](x).
    """
    _require_symmetric(model)
    k = _passage_start(k)
    ts = _check_time(t)
    table = scaled_bessel_table(k + 1, 2.0 * model.lam * ts)
    series = table[:, 0] + 2.0 * table[:, 1:k].sum(axis=1) + table[:, k]
    values = np.exp(-model.alpha * ts) * (model.lam * (table[:, k - 1] - table[:, k + 1]) + model.alpha * series)
    return _shape_like(t, values)


def avoiding_closed_form(model: BDJumpModel, k: int, n: int, t: Times) -> Times:
    """p^<0>_{k,n}(t) = e^{-alpha t} e^{-x}[I_{n-k}(x) - I_{n+k}(x)], x = 2 lambda t, for k, n of one sign."""
    _require_symmetric(model)
    if k == 0 or n == 0:
        raise CenterState()
    if (k > 0) != (n > 0):
        raise InvalidConfig("Avoiding closed form needs k and n on the same side of 0.", {"k": k, "n": n})
    ts = _check_time(t)
    near, far = abs(n - k), abs(n) + abs(k)
    table = scaled_bessel_table(far, 2.0 * model.lam * ts)
    values = np.exp(-model.alpha * ts) * (table[:, near] - table[:, far])
    return _shape_like(t, values)


# ---------------- FIGURE DATA ----------------

FPT_ALPHAS = (0.1, 0.2, 0.3)
AVOIDING_ALPHAS = (0.1, 0.2, 0.5, 1.0)


def _alpha_tag(alpha: float) -> str:
    tag = f"{alpha:g}"
    return tag if "." in tag or "e" in tag else f"{tag}.0"


def figure1_traces(
    lam: float,
    k: int,
    n: int,
    grid: TimeGrid,
    mu: Optional[float] = None,
    fpt_alphas: Sequence[float] = FPT_ALPHAS,
    avoiding_alphas: Sequence[float] = AVOIDING_ALPHAS,
    series_tol: float = SERIES_TOL,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Passage densities g-_{k,0} per alpha in fpt_alphas and avoiding
    probabilities p^<0>_{k,n} per alpha in avoiding_alphas. mu defaults to
    lambda; any other value is refused by the closed forms.
    """
    mu = lam if mu is None else mu
    t = grid.points
    fpt = pd.DataFrame({"t": t})
    for alpha in fpt_alphas:
        model = BDJumpModel(lam=lam, mu=mu, alpha=alpha)
        fpt[f"g_alpha_{_alpha_tag(alpha)}"] = fpt_density_closed_form(model, k, t, series_tol)
    avoiding = pd.DataFrame({"t": t})
    for alpha in avoiding_alphas:
        model = BDJumpModel(lam=lam, mu=mu, alpha=alpha)
        avoiding[f"pav_alpha_{_alpha_tag(alpha)}"] = avoiding_closed_form(model, k, n, t)
    logger.info("Figure traces for k=%d, n=%d over %d points", k, n, len(t))
    return fpt, avoiding
