# symchain/models/bdjump.py
import math

from pydantic import BaseModel, ConfigDict, Field


class BDJumpModel(BaseModel):
    """
    Bilateral birth-death process on the integers: n -> n+1 at rate lambda,
    n -> n-1 at rate mu, n -> 0 (n != 0) at rate alpha. alpha = 0 is the
    plain bilateral birth-death process.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0)
    mu: float = Field(gt=0)
    alpha: float = Field(default=0.0, ge=0)

    @property
    def gamma(self) -> float:
        """Bessel argument rate 2*sqrt(lambda*mu)."""
        return 2.0 * math.sqrt(self.lam * self.mu)

    @property
    def is_symmetric(self) -> bool:
        return self.lam == self.mu

    def with_alpha(self, alpha: float) -> "BDJumpModel":
        return BDJumpModel(lam=self.lam, mu=self.mu, alpha=alpha)
