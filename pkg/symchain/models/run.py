# symchain/models/run.py
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from symchain import config
from symchain.models.chain import TimeGrid

Command = Literal["validate", "symmetry", "transient", "passage", "bdjump", "similarity", "simulate", "figure1"]


class RunSpec(BaseModel):
    """One CLI invocation. Unset tolerances fall back to the environment defaults."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    command: Command
    input: Optional[str] = None
    output_dir: str = "symchain-out"
    t_max: float = Field(default=5.0, gt=0)
    steps: int = Field(default=500, ge=2)
    tol: Optional[float] = Field(default=None, gt=0)
    quad_tol: Optional[float] = Field(default=None, gt=0)
    series_tol: Optional[float] = Field(default=None, gt=0)
    paths: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    lam: Optional[float] = Field(default=None, alias="lambda", gt=0)
    mu: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, ge=0)
    eta: Optional[float] = Field(default=None, ge=0)
    k: Optional[int] = None
    n: Optional[int] = None
    window: Optional[Tuple[int, int]] = None
    boundary: Optional[Literal["reflecting", "absorbing"]] = None
    form: Optional[str] = None

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(t_max=self.t_max, steps=self.steps)

    @property
    def compare_tol(self) -> float:
        """Allowed gap between two trapezoid-based methods on this grid."""
        return 5.0 * self.grid.h ** 2

    def tolerances(self) -> Dict[str, float]:
        """Every tolerance the run uses, flags first, then the environment settings."""
        tolerances = {
            "uniformization": self.tol if self.tol is not None else config.UNIFORMIZATION_TOL,
            "symmetry": self.tol if self.tol is not None else config.SYMMETRY_TOL,
            "quadrature": self.quad_tol if self.quad_tol is not None else config.QUAD_TOL,
            "series": self.series_tol if self.series_tol is not None else config.SERIES_TOL,
            "row_sum": config.ROW_SUM_TOL,
            "harmonic": config.HARMONIC_TOL,
            "forms": config.FORMS_TOL,
        }
        if self.command == "passage":
            tolerances["compare"] = self.compare_tol
        return tolerances

    def overrides(self) -> List[str]:
        return [name for name in ("tol", "quad_tol", "series_tol") if getattr(self, name) is not None]


class CompareReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    max_abs_diff: float
    argmax_t: float
    passed: bool = Field(alias="pass")


class Manifest(BaseModel):
    command: str
    version: str
    inputs: Dict[str, Any]
    tolerances: Dict[str, float]
    overrides: List[str] = []
    seed: Optional[int] = None
    outputs: List[str] = []
