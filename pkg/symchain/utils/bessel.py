# symchain/utils/bessel.py
import logging
import math

import numpy as np

logger = logging.getLogger("symchain.bessel")

BIGNO = 1.0e200
BIGNI = 1.0e-200
SMALL_X = 1.0e-6


def miller_start_order(n_max: int, x_max: float) -> int:
    """
    Downward-recurrence start. e^{-x} I_m(x) falls off like exp(-m^2 / 2x),
    so sqrt(80 x) orders past the largest requested one reach roundoff.
    """
    start = n_max + int(math.ceil(math.sqrt(80.0 * x_max))) + 30
    return start + (start % 2)


def _small_x_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """Two leading power-series terms, exact to roundoff for x < 1e-6."""
    orders = np.arange(n_max + 1)
    half = x[:, None] / 2.0
    log_fact = np.array([math.lgamma(m + 1) for m in orders])
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(orders[None, :] * np.log(half) - log_fact[None, :])
    lead = np.where(half == 0.0, (orders[None, :] == 0).astype(float), lead)
    correction = 1.0 + half**2 / (orders[None, :] + 1.0)
    return lead * correction * np.exp(-x)[:, None]


def scaled_bessel_table(n_max: int, x) -> np.ndarray:
    """
    e^{-x} I_m(x) for m = 0..n_max and every argument in x, shape (len(x), n_max+1).

    Miller's algorithm: run I_{m-1} = I_{m+1} + (2m/x) I_m downward from a
    high start order seeded with (0, 1), rescaling whenever values grow past
    1e200, then normalize with e^{-x}(I_0 + 2 sum_{m>=1} I_m) = 1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("scaled Bessel functions need x >= 0")
    n_max = int(n_max)
    table = np.zeros((x.size, n_max + 1))

    small = x < SMALL_X
    if small.any():
        table[small] = _small_x_table(n_max, x[small])
    big = ~small
    if not big.any():
        return table

    xb = x[big]
    start = miller_start_order(n_max, float(xb.max()))
    logger.debug("Miller recurrence from order %d for x_max=%.3g", start, float(xb.max()))
    tox = 2.0 / xb
    upper = np.zeros_like(xb)       # b_{m+1}
    current = np.ones_like(xb)      # b_m
    norm = np.zeros_like(xb)        # sum over m >= 1 of b_m, accumulated as we go
    out = np.zeros((xb.size, n_max + 1))
    if start <= n_max:
        out[:, start] = current
    for m in range(start, 0, -1):
        lower = upper + m * tox * current
        norm += current
        upper, current = current, lower
        if m - 1 <= n_max:
            out[:, m - 1] = current
        overflow = np.abs(current) > BIGNO
        if overflow.any():
            upper[overflow] *= BIGNI
            current[overflow] *= BIGNI
            norm[overflow] *= BIGNI
            out[overflow] *= BIGNI
    total = current + 2.0 * norm
    table[big] = out / total[:, None]
    return table


def bessel_i_scaled(n: int, x: float) -> float:
    """e^{-x} I_n(x) for integer n (I_{-n} = I_n) and x >= 0."""
    order = abs(int(n))
    return float(scaled_bessel_table(order, [x])[0, order])
