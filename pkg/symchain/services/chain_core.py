# symchain/services/chain_core.py
import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

import numpy as np

from symchain.config import ROW_SUM_TOL
from symchain.exceptions import (
    AsymmetricWindow,
    DimensionMismatch,
    InvalidConfig,
    NegativeOffDiagonal,
    PositiveDiagonal,
    RowSumNonzero,
    WindowTooSmall,
)
from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import GeneratorMatrix, StateSpace

logger = logging.getLogger("symchain.chain_core")

DEFAULT_WINDOW = (-40, 40)


# ---------------- VALIDATION ----------------

def validate_generator(entries: Any, space: StateSpace, tol: float = ROW_SUM_TOL) -> GeneratorMatrix:
    """
    Check the generator relations: nonnegative off-diagonal rates,
    nonpositive diagonal, zero row sums. Entries are never repaired.
    """
    q = np.asarray(entries, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] != space.size:
        raise DimensionMismatch(q.shape, space.size)

    off = q.copy()
    np.fill_diagonal(off, 0.0)
    bad = np.argwhere(off < 0)
    if bad.size:
        k, n = (int(v) for v in bad[0])
        raise NegativeOffDiagonal(k, n, float(q[k, n]))

    diag = np.diag(q)
    bad = np.flatnonzero(diag > 0)
    if bad.size:
        n = int(bad[0])
        raise PositiveDiagonal(n, float(diag[n]))

    sums = q.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums) > tol)
    if bad.size:
        k = int(bad[0])
        raise RowSumNonzero(k, float(sums[k]))

    return GeneratorMatrix(space=space, entries=q)


def close_rows(rates: np.ndarray) -> np.ndarray:
    """Set each diagonal entry to minus the sum of the off-diagonal rates of its row."""
    q = np.array(rates, dtype=float)
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


# ---------------- CONSTRUCTORS ----------------

def truncate_bdjump(
    model: BDJumpModel,
    window: Union[StateSpace, Tuple[int, int]],
    boundary: Literal["reflecting", "absorbing"] = "reflecting",
) -> GeneratorMatrix:
    """
    Restrict the bilateral birth-death chain with jumps to 0 to a lattice
    window. Reflecting: outward birth/death rates at the two boundary states
    are dropped and the diagonal re-closed. Absorbing: the boundary rows are zero.
    """
    space = window if isinstance(window, StateSpace) else StateSpace.window(*window)
    if space.kind != "window" or not (space.lo < 0 < space.hi) or space.hi - space.lo < 2:
        raise WindowTooSmall(space.lo if space.lo is not None else 0, space.hi if space.hi is not None else 0)

    size = space.size
    zero = space.index_of(0)
    q = np.zeros((size, size))
    for i in range(size):
        if i + 1 < size:
            q[i, i + 1] += model.lam
        if i - 1 >= 0:
            q[i, i - 1] += model.mu
        if i != zero:
            q[i, zero] += model.alpha
    if boundary == "absorbing":
        q[0, :] = 0.0
        q[-1, :] = 0.0
    elif boundary != "reflecting":
        raise InvalidConfig(f"Unknown boundary policy {boundary!r}.")

    logger.debug("Truncated bdjump %s to [%d,%d] (%s)", model.model_dump(), space.lo, space.hi, boundary)
    return validate_generator(close_rows(q), space)


def ehrenfest_generator(n: int, alpha: float = 1.0) -> GeneratorMatrix:
    """Birth-death chain on 0..N with lambda_k = alpha(N-k), mu_k = alpha k."""
    q = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        if k < n:
            q[k, k + 1] = alpha * (n - k)
        if k > 0:
            q[k, k - 1] = alpha * k
    return validate_generator(close_rows(q), StateSpace.finite(n))


def example1_generator(alpha: float, beta: float, rho: float) -> GeneratorMatrix:
    """Four-state chain with absorbing ends 0 and 3 and central symmetry x_n = rho^-n."""
    rho0 = 1.0 + rho
    diag = -alpha * (rho0 + rho**2) - beta * rho0
    q = [
        [0.0, 0.0, 0.0, 0.0],
        [alpha * rho0 + beta, diag, beta * rho, alpha * rho**2],
        [alpha, beta, diag, (alpha * rho0 + beta) * rho],
        [0.0, 0.0, 0.0, 0.0],
    ]
    return validate_generator(q, StateSpace.finite(3))


# ---------------- REFLECTION ----------------

def reflect_index(space: StateSpace, n: int) -> int:
    """Image of state label n under n -> N-n (finite) or n -> -n (symmetric window)."""
    space.index_of(n)
    if space.kind == "finite":
        return space.n - n
    if space.lo != -space.hi:
        raise AsymmetricWindow(space.lo, space.hi)
    return -n


def require_reflectable(space: StateSpace) -> None:
    if space.kind == "window" and space.lo != -space.hi:
        raise AsymmetricWindow(space.lo, space.hi)


# ---------------- CHAIN DEFINITION FILES ----------------

def load_chain_definition(
    source: Union[str, Path, Dict[str, Any]],
    window: Optional[Tuple[int, int]] = None,
    boundary: Literal["reflecting", "absorbing"] = "reflecting",
) -> GeneratorMatrix:
    """
    Parse {"space": {...}, "q": [[...]]} or {"model": {"type": "bdjump", ...}}.
    A model definition is truncated to `window`, to its own "window" entry,
    or to DEFAULT_WINDOW, in that order of preference.
    """
    payload = source if isinstance(source, dict) else json.loads(Path(source).read_text())

    if "model" in payload:
        spec = dict(payload["model"])
        kind = spec.pop("type", "bdjump")
        if kind != "bdjump":
            raise InvalidConfig(f"Unknown model type {kind!r}.")
        own_window = spec.pop("window", None)
        model = BDJumpModel.model_validate(spec)
        if window is None and own_window is not None:
            window = (int(own_window["lo"]), int(own_window["hi"]))
        lo, hi = window or DEFAULT_WINDOW
        return truncate_bdjump(model, (lo, hi), boundary=payload.get("boundary", boundary))

    if "space" not in payload or "q" not in payload:
        raise InvalidConfig("Chain definition needs either 'model' or both 'space' and 'q'.")
    space = StateSpace.model_validate(payload["space"])
    return validate_generator(payload["q"], space)


def model_from_definition(source: Union[str, Path, Dict[str, Any]]) -> Optional[BDJumpModel]:
    """The BDJumpModel of a model definition, None for an explicit matrix."""
    payload = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    if "model" not in payload:
        return None
    spec = {k: v for k, v in payload["model"].items() if k not in ("type", "window")}
    return BDJumpModel.model_validate(spec)
