# symchain/exceptions.py
from typing import Any, Dict, Optional


class SymchainError(Exception):
    """
    Base error. Carries a human-readable detail, a machine-readable context
    and the process exit code the CLI maps it to.
    """

    exit_code: int = 2

    def __init__(self, detail: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "context": self.context,
            "exit_code": self.exit_code,
        }


class ValidationFailure(SymchainError):
    """Input is wrong (exit code 2)."""

    exit_code = 2


class InvariantFailure(SymchainError):
    """A mathematical check failed where the theory says it cannot (exit code 3)."""

    exit_code = 3


# ---------------- CHAIN CORE ----------------

class NegativeOffDiagonal(ValidationFailure):
    def __init__(self, k: int, n: int, value: float):
        super().__init__(f"Off-diagonal rate q[{k},{n}] = {value} is negative.", {"k": k, "n": n, "value": value})


class PositiveDiagonal(ValidationFailure):
    def __init__(self, n: int, value: float):
        super().__init__(f"Diagonal rate q[{n},{n}] = {value} is positive.", {"n": n, "value": value})


class RowSumNonzero(ValidationFailure):
    def __init__(self, k: int, residual: float):
        super().__init__(f"Row {k} sums to {residual}, not 0.", {"k": k, "residual": residual})


class DimensionMismatch(ValidationFailure):
    def __init__(self, shape: Any, size: int):
        super().__init__(
            f"Matrix of shape {tuple(shape)} does not match a state space of {size} states.",
            {"shape": list(shape), "size": size},
        )


class WindowTooSmall(ValidationFailure):
    def __init__(self, lo: int, hi: int):
        super().__init__(f"Window [{lo},{hi}] is too small or does not straddle 0.", {"lo": lo, "hi": hi})


class AsymmetricWindow(ValidationFailure):
    def __init__(self, lo: int, hi: int):
        super().__init__(f"Window [{lo},{hi}] is not symmetric about 0.", {"lo": lo, "hi": hi})


class StateNotInSpace(ValidationFailure):
    def __init__(self, state: int):
        super().__init__(f"State {state} is not in the state space.", {"state": state})


class InvalidConfig(ValidationFailure):
    pass


# ---------------- TRANSIENT ----------------

class EmptyGrid(ValidationFailure):
    def __init__(self):
        super().__init__("Time grid has no steps.")


class Reducible(ValidationFailure):
    def __init__(self, components: list):
        super().__init__(
            f"Chain is not irreducible ({len(components)} communicating classes).",
            {"components": components},
        )


class ZeroStationaryMass(ValidationFailure):
    def __init__(self, n: int):
        super().__init__(f"Stationary mass at state index {n} is zero.", {"n": n})


class GridMismatch(ValidationFailure):
    def __init__(self, detail: str = "Traces or sequences do not share a time grid."):
        super().__init__(detail)


# ---------------- SYMMETRY ----------------

class NoSymmetry(ValidationFailure):
    """Detection found no central symmetry; `context` holds the witness."""


class InconsistentRatios(NoSymmetry):
    def __init__(self, cycle: list, residual: float):
        super().__init__(
            f"Ratio constraints are inconsistent around {cycle} (log residual {residual:.3e}).",
            {"cycle": cycle, "residual": residual},
        )


class StructuralZeroMismatch(NoSymmetry):
    def __init__(self, k: int, n: int):
        super().__init__(
            f"q[{k},{n}] and its reflection disagree on being zero.", {"k": k, "n": n}
        )


class DiagonalMismatch(NoSymmetry):
    def __init__(self, n: int, residual: float, weights: list):
        super().__init__(
            f"q[{n},{n}] differs from its reflected diagonal entry by {residual:.3e}.",
            {"n": n, "residual": residual, "weights": weights},
        )


class DisconnectedRatioGraph(NoSymmetry):
    def __init__(self, unreached: list, weights: list):
        super().__init__(
            f"Weights of states {unreached} are not constrained by any rate.",
            {"unreached": unreached, "weights": weights},
        )


class SymmetryCheckFailed(NoSymmetry):
    def __init__(self, k: int, n: int, residual: float):
        super().__init__(
            f"Certificate fails at (k,n)=({k},{n}) with residual {residual:.3e}.",
            {"k": k, "n": n, "residual": residual},
        )


# ---------------- PASSAGE ----------------

class OddN(ValidationFailure):
    def __init__(self, size: int):
        super().__init__(f"A state space of {size} states has no central state.", {"size": size})


class CrossJump(ValidationFailure):
    def __init__(self, i: int, j: int):
        super().__init__(f"Rate between {i} and {j} jumps over the central state.", {"i": i, "j": j})


class NoFluxAtS(ValidationFailure):
    def __init__(self, direction: str):
        super().__init__(f"No probability flux {direction} the central state.", {"direction": direction})


class ReducibleSubchain(ValidationFailure):
    def __init__(self, side: str):
        super().__init__(f"The subchain below/above the center ({side}) is not irreducible.", {"side": side})


class StartIsCenter(ValidationFailure):
    def __init__(self, state: int):
        super().__init__(f"Start state {state} is the central state.", {"state": state})


class NoCertificate(ValidationFailure):
    def __init__(self):
        super().__init__("Operation needs a symmetry certificate and none was supplied.")


class FormsDisagree(InvariantFailure):
    def __init__(self, residual: float):
        super().__init__(
            f"The two avoiding-probability expressions differ by {residual:.3e}.", {"residual": residual}
        )


class TheoremViolation(InvariantFailure):
    pass


class CheckFailed(InvariantFailure):
    """Two methods or two sides of an identity differ beyond the tolerance."""

    def __init__(self, check: str, residual: float, tol: float):
        super().__init__(
            f"{check} check failed: residual {residual:.3e} exceeds {tol:.3e}.",
            {"check": check, "residual": residual, "tol": tol},
        )


# ---------------- BDJUMP ----------------

class NegativeTime(ValidationFailure):
    def __init__(self, t: float):
        super().__init__(f"Time {t} is negative.", {"t": t})


class AlphaZero(ValidationFailure):
    def __init__(self):
        super().__init__("A stationary law needs alpha > 0.")


class AsymmetricRates(ValidationFailure):
    def __init__(self, lam: float, mu: float):
        super().__init__(f"Closed form needs lambda == mu (got {lam}, {mu}).", {"lambda": lam, "mu": mu})


class CenterState(ValidationFailure):
    def __init__(self):
        super().__init__("Avoiding probabilities are defined for states other than the central state.")


# ---------------- SIMILARITY ----------------

class NonHarmonic(ValidationFailure):
    def __init__(self, k: int, residual: float):
        super().__init__(f"Row {k} of Q·beta is {residual:.3e}, not 0.", {"k": k, "residual": residual})


# ---------------- MONTE CARLO ----------------

class TimeBeyondHorizon(ValidationFailure):
    def __init__(self, t: float, t_max: float):
        super().__init__(f"Time {t} exceeds the simulated horizon {t_max}.", {"t": t, "t_max": t_max})


class StartIsTarget(ValidationFailure):
    def __init__(self, state: int):
        super().__init__(f"Start state {state} is the passage target.", {"state": state})
