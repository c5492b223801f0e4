# symchain/models/simulation.py
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from symchain.models.chain import DensityTrace, StateSpace, _frozen_array


class SimulationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_paths: int = Field(ge=1)
    t_max: float = Field(gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    start: int


class PathSample(BaseModel):
    """
    One trajectory up to the horizon. states[0] is the start and states[i]
    is occupied from jump_times[i-1] on.
    """

    model_config = ConfigDict(frozen=True)

    jump_times: Tuple[float, ...]
    states: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_shape(self):
        if len(self.states) != len(self.jump_times) + 1:
            raise ValueError("a path needs exactly one more state than jump times")
        return self

    @property
    def start(self) -> int:
        return self.states[0]

    def state_at(self, t: float) -> int:
        return self.states[int(np.searchsorted(self.jump_times, t, side="right"))]

    def first_visit(self, target: int) -> float:
        """Time of the first visit to target after time 0, inf if none."""
        for i, state in enumerate(self.states[1:]):
            if state == target:
                return self.jump_times[i]
        return float("inf")


class PathCollection(BaseModel):
    model_config = ConfigDict(frozen=True)

    space: StateSpace
    config: SimulationConfig
    paths: List[PathSample]

    @property
    def n_paths(self) -> int:
        return len(self.paths)


class Estimate(BaseModel):
    estimate: float
    std_error: float


class FptHistogram(BaseModel):
    """
    Per-bin first-passage density centered on the grid points; the first and
    last bins are half as wide.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    density: DensityTrace
    std_errors: np.ndarray
    hit_fraction: float

    @field_validator("std_errors", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)
