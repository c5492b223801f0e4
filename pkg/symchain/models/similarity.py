# symchain/models/similarity.py
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict, Field, field_validator

from symchain.models.chain import GeneratorMatrix

# harmonic for lambda b_{n+1} + mu b_{n-1} = (lambda + mu) b_n
HARMONIC_FORM = "1 + eta*(mu/lam)**n"
# the form as usually quoted; harmonic only when lambda == mu
PUBLISHED_FORM = "1 + eta*(lam/mu)**n"


@lru_cache(maxsize=32)
def _compiled(form: str) -> Callable:
    n, lam, mu, eta = sp.symbols("n lam mu eta")
    expr = sp.sympify(form, locals={"n": n, "lam": lam, "mu": mu, "eta": eta})
    return sp.lambdify((n, lam, mu, eta), expr, modules="numpy")


class SimilarityWeights(BaseModel):
    """Positive weights beta_n (by matrix index) of a strong-similarity transform."""

    model_config = ConfigDict(frozen=True)

    beta: Tuple[float, ...]

    @field_validator("beta")
    @classmethod
    def _positive(cls, value):
        if not value or min(value) <= 0:
            raise ValueError("similarity weights must be strictly positive")
        return tuple(float(b) for b in value)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float)

    def to_json_dict(self) -> Dict:
        return {"beta": list(self.beta)}


class Example2Family(BaseModel):
    """
    Bilateral birth-death chains strongly similar to the one with constant
    rates (lambda, mu): lambda~_n = (beta_{n+1}/beta_n) lambda,
    mu~_n = (beta_{n-1}/beta_n) mu with beta_n = 1 + eta (mu/lambda)^n.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0)
    mu: float = Field(gt=0)
    eta: float = Field(default=0.0, ge=0)
    form: str = HARMONIC_FORM

    def beta(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if self.form == HARMONIC_FORM:
            return 1.0 + self.eta * np.power(self.mu / self.lam, n)
        values = _compiled(self.form)(n, self.lam, self.mu, self.eta)
        return np.broadcast_to(np.asarray(values, dtype=float), n.shape).copy()

    def lambda_tilde(self, n) -> np.ndarray:
        return self.beta(np.asarray(n) + 1) / self.beta(n) * self.lam

    def mu_tilde(self, n) -> np.ndarray:
        return self.beta(np.asarray(n) - 1) / self.beta(n) * self.mu


class Example2Realization(BaseModel):
    """A family member on a lattice window, with the rows that were re-closed."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: Example2Family
    original: GeneratorMatrix
    transformed: GeneratorMatrix
    weights: SimilarityWeights
    reclosed: Tuple[int, ...] = ()
