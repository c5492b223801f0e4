# symchain/models/passage.py
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from symchain.models.chain import DensityTrace, GeneratorMatrix, StateSpace, TimeGrid, _frozen_array
from symchain.models.symmetry import SymmetryCertificate


class PassageProblem(BaseModel):
    """
    A chain whose central state s separates the states below it from the
    states above it. Index tuples are matrix indices; `s` is the label.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    Q: GeneratorMatrix
    s: int
    center: int
    minus: Tuple[int, ...]
    plus: Tuple[int, ...]
    cert: Optional[SymmetryCertificate] = None

    @property
    def space(self) -> StateSpace:
        return self.Q.space

    def side_of(self, index: int) -> str:
        if index < self.center:
            return "minus"
        if index > self.center:
            return "plus"
        return "center"

    def with_cert(self, cert: SymmetryCertificate) -> "PassageProblem":
        return self.model_copy(update={"cert": cert})


class AvoidingRow(BaseModel):
    """p^<s>_{k,n}(t) for one start k and every target n; values has shape (steps+1, size)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    grid: TimeGrid
    start: int
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    def trace(self, n: int) -> DensityTrace:
        return DensityTrace(
            grid=self.grid,
            values=self.values[:, self.space.index_of(n)],
            label=f"pav_{self.start},{n}",
        )
