# symchain/utils/quadrature.py
import logging
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import fftconvolve

logger = logging.getLogger("symchain.quadrature")

Value = Union[float, np.ndarray]


# ---------------- ADAPTIVE SIMPSON ----------------

def _simpson(fa: Value, fm: Value, fb: Value, width: float) -> Value:
    return width / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], Value],
    a: float,
    b: float,
    tol: float,
    max_depth: int = 50,
) -> Value:
    """
    Integral of f over [a, b] to absolute tolerance tol. f may return an array;
    the error test then uses the largest component. Intervals are refined with
    an explicit stack and the accepted panels carry the Richardson correction.
    """
    if b <= a:
        return 0.0 * np.asarray(f(a))

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    stack = [(a, b, fa, fm, fb, _simpson(fa, fm, fb, b - a), tol, 0)]
    total = 0.0
    evaluations = 3
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
        evaluations += 2
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - whole
        if depth >= max_depth or np.max(np.abs(delta)) <= 15.0 * eps:
            total = total + left + right + delta / 15.0
            continue
        stack.append((mid, hi, fmid, fr, fhi, right, eps / 2.0, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, eps / 2.0, depth + 1))
    logger.debug("Adaptive Simpson on [%.3g, %.3g] used %d evaluations", a, b, evaluations)
    return total


# ---------------- GRID INTEGRALS ----------------

def trapezoid_convolution(a: np.ndarray, b: np.ndarray, h: float) -> np.ndarray:
    """
    c(t_m) = int_0^{t_m} a(u) b(t_m - u) du by the trapezoid rule on a uniform grid.
    `a` is 1-D; `b` is 1-D or 2-D with time along axis 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    steps = a.shape[0]
    if b.ndim == 1:
        full = fftconvolve(a, b)[:steps]
        ends = a[0] * b + a * b[0]
    else:
        full = fftconvolve(a[:, None], b, axes=0)[:steps]
        ends = a[0] * b + a[:, None] * b[0][None, :]
    out = h * (full - 0.5 * ends)
    out[0] = 0.0
    return out


def cumulative(values: np.ndarray, h: float) -> np.ndarray:
    """Running trapezoid integral starting at 0."""
    return cumulative_trapezoid(values, dx=h, initial=0.0)


def volterra_march(forcing: np.ndarray, kernel: np.ndarray, h: float) -> np.ndarray:
    """
    Solve g(t) = f(t) - int_0^t g(u) K(t - u) du on the grid by the product
    trapezoid rule, marching forward from g(0) = f(0).
    """
    forcing = np.asarray(forcing, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    steps = forcing.shape[0]
    g = np.zeros(steps)
    g[0] = forcing[0]
    denom = 1.0 + 0.5 * h * kernel[0]
    for m in range(1, steps):
        # sum_{j=1}^{m-1} g_j K_{m-j}
        inner = np.dot(g[1:m], kernel[m - 1:0:-1]) if m > 1 else 0.0
        g[m] = (forcing[m] - h * (0.5 * g[0] * kernel[m] + inner)) / denom
    return g
