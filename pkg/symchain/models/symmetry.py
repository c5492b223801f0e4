# symchain/models/symmetry.py
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class SymmetryCertificate(BaseModel):
    """
    Center s and positive weights {x_n} witnessing
    p_{N-k,N-n}(t) = (x_n/x_k) p_{k,n}(t). Weights are indexed like the
    matrix (index 0 is the leftmost state) and are defined up to a common
    factor; emitted certificates put x = 1 at the leftmost state.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    center_s: float = Field(alias="center")
    weights: Tuple[float, ...]
    unconstrained: Tuple[int, ...] = ()

    @field_validator("weights")
    @classmethod
    def _positive(cls, value):
        if not value or min(value) <= 0:
            raise ValueError("symmetry weights must be strictly positive")
        return tuple(float(w) for w in value)

    @classmethod
    def constant(cls, center: float, size: int) -> "SymmetryCertificate":
        return cls(center=center, weights=(1.0,) * size)

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def normalized(self) -> "SymmetryCertificate":
        x = self.x / self.weights[0]
        return SymmetryCertificate(center=self.center_s, weights=tuple(x), unconstrained=self.unconstrained)

    def ratio(self, k: int, n: int) -> float:
        """x_n / x_k by matrix index."""
        return self.weights[n] / self.weights[k]

    def ratio_identity_residual(self) -> float:
        """max |log(x_n/x_k) - log(x_{N-k}/x_{N-n})|; zero for a true certificate."""
        logx = np.log(self.x)
        mirrored = logx[::-1]
        # x_n x_{N-n} must be constant in n
        prod = logx + mirrored
        return float(np.max(prod) - np.min(prod))

    def is_constant(self, tol: float = 1e-9) -> bool:
        x = self.x / self.weights[0]
        return bool(np.max(np.abs(x - 1.0)) <= tol)

    def to_json_dict(self) -> Dict:
        center = int(self.center_s) if float(self.center_s).is_integer() else self.center_s
        payload = {"center": center, "weights": list(self.weights)}
        if self.unconstrained:
            payload["unconstrained"] = list(self.unconstrained)
        return payload


class SymmetryReport(BaseModel):
    """Outcome of a generator- or probability-level symmetry check."""

    passed: bool
    max_residual: float
    worst_k: Optional[int] = None
    worst_n: Optional[int] = None
    worst_t: Optional[float] = None


class Remark1Report(BaseModel):
    """Per-statement outcome of the structural consequences of central symmetry."""

    constant_weights: bool
    symmetric_stationary: bool
    reversed_chain_symmetric: bool
    deviation_symmetric: bool
    max_stationary_residual: float
    max_deviation_residual: float

    @property
    def passed(self) -> bool:
        return (
            self.constant_weights
            and self.symmetric_stationary
            and self.reversed_chain_symmetric
            and self.deviation_symmetric
        )
