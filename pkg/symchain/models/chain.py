# symchain/models/chain.py
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from symchain.exceptions import EmptyGrid, GridMismatch, StateNotInSpace


def _frozen_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------- STATE SPACE ----------------

class StateSpace(BaseModel):
    """
    Indexed state space. Matrix index i (0-based) carries the semantic label
    `labels[i]`: 0..N for Finite(N), lo..hi for a lattice window.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["finite", "window"]
    n: Optional[int] = Field(default=None, ge=0)
    lo: Optional[int] = None
    hi: Optional[int] = None

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.kind == "finite":
            if self.n is None:
                raise ValueError("finite state space needs 'n'")
        else:
            if self.lo is None or self.hi is None:
                raise ValueError("window state space needs 'lo' and 'hi'")
            if self.lo > self.hi:
                raise ValueError("window needs lo <= hi")
        return self

    @classmethod
    def finite(cls, n: int) -> "StateSpace":
        return cls(kind="finite", n=n)

    @classmethod
    def window(cls, lo: int, hi: int) -> "StateSpace":
        return cls(kind="window", lo=lo, hi=hi)

    @property
    def first_label(self) -> int:
        return 0 if self.kind == "finite" else self.lo

    @property
    def size(self) -> int:
        if self.kind == "finite":
            return self.n + 1
        return self.hi - self.lo + 1

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(range(self.first_label, self.first_label + self.size))

    @property
    def center_label(self) -> float:
        """The reflection point N/2 (or (lo+hi)/2); 0 for symmetric windows."""
        if self.kind == "finite":
            return self.n / 2
        return (self.lo + self.hi) / 2

    @property
    def center_index(self) -> Optional[int]:
        """Matrix index of the central state, None when the center is not a state."""
        if self.size % 2 == 0:
            return None
        return (self.size - 1) // 2

    def index_of(self, label: int) -> int:
        idx = int(label) - self.first_label
        if not 0 <= idx < self.size:
            raise StateNotInSpace(int(label))
        return idx

    def label_of(self, index: int) -> int:
        if not 0 <= index < self.size:
            raise StateNotInSpace(index)
        return self.first_label + int(index)

    def mirror_index(self, index: int) -> int:
        return self.size - 1 - int(index)


# ---------------- GENERATOR ----------------

class GeneratorMatrix(BaseModel):
    """Dense rate matrix over a state space. Built through chain_core.validate_generator."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @property
    def size(self) -> int:
        return self.space.size

    def rate(self, k: int, n: int) -> float:
        """Rate between two state labels."""
        return float(self.entries[self.space.index_of(k), self.space.index_of(n)])

    def to_dict(self) -> dict:
        return {"space": self.space.model_dump(exclude_none=True), "q": self.entries.tolist()}


# ---------------- TIME GRID AND TRACES ----------------

class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_max: float = Field(gt=0)
    steps: int

    @field_validator("steps")
    @classmethod
    def _positive_steps(cls, value: int) -> int:
        # not a ValueError, so it leaves validation unwrapped
        if value < 1:
            raise EmptyGrid()
        return value

    @property
    def h(self) -> float:
        return self.t_max / self.steps

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def index_of(self, t: float) -> int:
        """Grid index of a grid-aligned time."""
        idx = int(round(t / self.h))
        if not 0 <= idx <= self.steps or abs(idx * self.h - t) > 1e-9 * max(1.0, t):
            raise GridMismatch(f"Time {t} is not a point of the grid.")
        return idx


class DensityTrace(BaseModel):
    """A sampled function of t on a TimeGrid (probability, current or density)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_length(self):
        if self.values.shape != (self.grid.steps + 1,):
            raise ValueError(f"trace needs {self.grid.steps + 1} values, got shape {self.values.shape}")
        return self

    def at(self, t: float) -> float:
        return float(self.values[self.grid.index_of(t)])

    def is_probability(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.values >= -tol) and np.all(self.values <= 1 + tol))

    def is_density(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.values >= -tol))


class TransitionMatrixSequence(BaseModel):
    """P(t) at every grid point; matrices[m] is P(m*h)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    grid: TimeGrid
    matrices: np.ndarray

    @field_validator("matrices", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_shape(self):
        expected = (self.grid.steps + 1, self.space.size, self.space.size)
        if self.matrices.shape != expected:
            raise ValueError(f"expected matrices of shape {expected}, got {self.matrices.shape}")
        return self

    def entry(self, k: int, n: int) -> np.ndarray:
        """p_{k,n}(t) over the grid, by state labels."""
        return self.matrices[:, self.space.index_of(k), self.space.index_of(n)]

    def row(self, k: int) -> np.ndarray:
        """p_{k,.}(t) over the grid, shape (steps+1, size)."""
        return self.matrices[:, self.space.index_of(k), :]

    def trace(self, k: int, n: int) -> DensityTrace:
        return DensityTrace(grid=self.grid, values=self.entry(k, n), label=f"p_{k},{n}")


class StationaryDistribution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    probs: np.ndarray

    @field_validator("probs", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    def of(self, n: int) -> float:
        return float(self.probs[self.space.index_of(n)])

    @property
    def matrix(self) -> np.ndarray:
        """Pi: every row equal to pi."""
        return np.tile(self.probs, (self.space.size, 1))
