from __future__ import annotations

import hashlib
import math
import os
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

from born_series_lab.lab.constants import CACHE_DIR_ENV, DEFAULT_CACHE_DIR, TIER_GRID_SIZES, WORKERS_ENV
from born_series_lab.scattering.constants import (
    DEFAULT_CUTOFF_INNER,
    DEFAULT_CUTOFF_OUTER,
    DEFAULT_FINE_FACTOR,
    DEFAULT_HALF_WIDTH,
    DEFAULT_SOLVER_TOL,
    DEFAULT_THETA0,
)


class Algorithm(str, Enum):
    NEW = "new"
    BCR = "bcr"
    BORN = "born"


class Tier(str, Enum):
    """Experiment size presets"""

    QUICK = "quick"
    FULL = "full"
    PAPER = "paper"

    @property
    def grid_sizes(self) -> list[int]:
        return list(TIER_GRID_SIZES[self.value])


class ReportRow(BaseModel):
    """One error measurement of an experiment sweep.

    Rows of the fixed point recovery carry its depth m; baseline and Born rows use m = 0, and Born rows l = 1.
    """

    model_config = ConfigDict(frozen=True)

    example: Literal[1, 2]
    algorithm: Algorithm
    n: int
    m: int = Field(ge=0)
    l: int = Field(ge=1)  # noqa: E741
    l2_error: float = Field(ge=0.0)
    wall_seconds: float = 0.0
    """Time spent up to this iterate, 0 unless timings were requested"""

    @computed_field
    @property
    def log10_error(self) -> float:
        return math.log10(self.l2_error) if self.l2_error > 0 else -math.inf

    @property
    def sort_key(self) -> tuple:
        return self.example, self.algorithm.value, self.n, self.m, self.l


def _int_list(value):
    if isinstance(value, str):
        return [int(v) for v in value.split(",") if v.strip()]
    if isinstance(value, int):
        return [value]
    return value


class LabConfig(BaseModel):
    """Settings of a lab run; a JSON config file holds the same keys, and command line flags override it"""

    example: Literal[1, 2] = Field(default=1)
    """Which test potential to simulate"""

    amplitude: float | None = Field(default=None)
    """Scale the example potential by this factor"""

    n: list[int] | None = Field(default=None)
    """Inverse grid sizes; defaults to the tier's list"""

    m: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    """Born series depths"""

    l: int = Field(default=6, ge=1)  # noqa: E741
    """Iterates per recovery"""

    tier: Tier = Field(default=Tier.QUICK)

    algorithms: list[Algorithm] = Field(default_factory=lambda: [Algorithm.NEW])

    half_width: float = Field(default=DEFAULT_HALF_WIDTH, gt=0.0)

    theta0: tuple[float, float] = Field(default=DEFAULT_THETA0)
    """Unit incident direction"""

    fine_factor: int = Field(default=DEFAULT_FINE_FACTOR, ge=1)
    """Refinement of the simulation grid relative to the inverse grid"""

    k_max: float | None = Field(default=None)
    """Wavenumber cap, None for the radial Nyquist of the inverse grid"""

    eps_deg: float | None = Field(default=None)

    tol: float = Field(default=DEFAULT_SOLVER_TOL, gt=0.0)
    """Relative residual of the Lippmann-Schwinger solves"""

    r_inner: float = Field(default=DEFAULT_CUTOFF_INNER, gt=0.0)
    r_outer: float = Field(default=DEFAULT_CUTOFF_OUTER, gt=0.0)

    stop_tol: float = Field(default=0.0, ge=0.0)

    workers: int = Field(default_factory=lambda: int(os.getenv(WORKERS_ENV, "1")), ge=1)
    """Threads for the per-record sweeps"""

    cache_dir: Path = Field(default_factory=lambda: Path(os.getenv(CACHE_DIR_ENV, DEFAULT_CACHE_DIR)))
    """Where generated datasets are kept"""

    regenerate: bool = Field(default=False)
    """Ignore cached datasets and simulate again"""

    timings: bool = Field(default=False)
    """Record wall time in reports, which makes them non-reproducible"""

    @field_validator("n", "m", mode="before")
    @classmethod
    def validate_int_list(cls, value):
        return _int_list(value)

    @field_validator("theta0", mode="before")
    @classmethod
    def validate_theta0(cls, value):
        if isinstance(value, str):
            value = tuple(float(v) for v in value.split(","))
        if len(value) != 2 or abs(math.hypot(*value) - 1.0) > 1e-12:
            error_msg = f"theta0 must be a unit 2-vector, got {value}"
            raise ValueError(error_msg)
        return value

    @property
    def grid_sizes(self) -> list[int]:
        return self.n if self.n else self.tier.grid_sizes


class DatasetRequest(BaseModel):
    """Everything that determines a generated dataset; its digest names the cache entry"""

    n: int
    L: float
    theta0: tuple[float, float]
    fine_factor: int
    k_max: float
    eps_deg: float
    potential_id: str
    tol: float

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()


class SpeedComparison(BaseModel):
    """Mean wall time per iteration of both recovery algorithms on the same data"""

    n: int
    m: int
    iterations: int
    new_seconds: float
    bcr_seconds: float

    @computed_field
    @property
    def ratio(self) -> float:
        return self.bcr_seconds / self.new_seconds if self.new_seconds > 0 else math.inf


class RecoveryMetadata(BaseModel):
    """Sidecar JSON of a recovery output"""

    algorithm: str
    m: int | None
    l_max: int
    iterates: int
    iteration_seconds: list[float]
    total_seconds: float
    cauchy_norms: list[float]
    imag_norms: list[float]
    omitted_fraction: float
    solver_failures: int
    final_sobolev_norm: float
