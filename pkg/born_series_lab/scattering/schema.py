from __future__ import annotations

import hashlib
import math
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from pydantic import Field as ModelField

from born_series_lab.scattering.constants import DEFAULT_HALF_WIDTH, MIN_GRID_POINTS, RECORD_RTOL


class Space(str, Enum):
    """Which representation a Field holds"""

    PHYSICAL = "physical"
    FREQUENCY = "frequency"


class GridSpec(BaseModel):
    """Periodic N x N lattice on the square [-L, L]^2.

    Point (i, j) sits at x = (-L + i*h, -L + j*h); frequency bin (i, j) is xi = (pi/L) * (wrap(i), wrap(j)) with
    wrap mapping {0..n-1} onto {-n/2..n/2-1}.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    """Points per axis, even and at least 8"""

    half_width: float = ModelField(default=DEFAULT_HALF_WIDTH)
    """Half width L of the computational box"""

    @field_validator("n")
    @classmethod
    def validate_n(cls, value: int) -> int:
        if value < MIN_GRID_POINTS or value % 2:
            error_msg = f"n must be an even integer >= {MIN_GRID_POINTS}, got {value}"
            raise ValueError(error_msg)
        return value

    @field_validator("half_width")
    @classmethod
    def validate_half_width(cls, value: float) -> float:
        if not value > 0 or not math.isfinite(value):
            error_msg = f"half width must be positive, got {value}"
            raise ValueError(error_msg)
        return value

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def freq_step(self) -> float:
        return math.pi / self.half_width

    @property
    def cell_area(self) -> float:
        return self.spacing**2

    def frequency(self, i: int, j: int) -> tuple[float, float]:
        """Frequency xi of bin (i, j), the same value `frequency_axes` holds there"""
        half = self.n // 2
        return (self.freq_step * (i - self.n if i >= half else i), self.freq_step * (j - self.n if j >= half else j))


class Field(BaseModel):
    """Complex samples on a grid, in physical or frequency space.

    Instances are immutable: the sample array is copied on construction and flagged read-only.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: GridSpec
    space: Space = Space.PHYSICAL
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def validate_data(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=np.complex128)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_shape(self) -> Field:
        if self.data.shape != (self.spec.n, self.spec.n):
            error_msg = f"data shape {self.data.shape} does not match grid {self.spec.n}x{self.spec.n}"
            raise ValueError(error_msg)
        return self

    @classmethod
    def zeros(cls, spec: GridSpec, space: Space = Space.PHYSICAL) -> Field:
        return cls(spec=spec, space=space, data=np.zeros((spec.n, spec.n), dtype=np.complex128))

    def with_data(self, data: np.ndarray) -> Field:
        return Field(spec=self.spec, space=self.space, data=data)


class PotentialKind(str, Enum):
    """Test potentials known to the lab"""

    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    SCALED = "scaled"
    RASTER = "raster"


class PotentialSpec(BaseModel):
    """Symbolic description of a potential q"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: PotentialKind

    base: PotentialSpec | None = None
    """Potential being scaled (SCALED only)"""

    amplitude: float = 1.0
    """Dimensionless amplitude epsilon (SCALED only)"""

    raster: Field | None = None
    """Samples of a custom potential (RASTER only)"""

    @model_validator(mode="after")
    def validate_kind(self) -> PotentialSpec:
        if self.kind == PotentialKind.SCALED and self.base is None:
            error_msg = "scaled potential requires a base potential"
            raise ValueError(error_msg)
        if self.kind == PotentialKind.RASTER:
            if self.raster is None:
                error_msg = "raster potential requires a raster field"
                raise ValueError(error_msg)
            if self.raster.space != Space.PHYSICAL:
                error_msg = "raster potential must be sampled in physical space"
                raise ValueError(error_msg)
        return self

    @classmethod
    def example1(cls) -> PotentialSpec:
        return cls(kind=PotentialKind.EXAMPLE1)

    @classmethod
    def example2(cls) -> PotentialSpec:
        return cls(kind=PotentialKind.EXAMPLE2)

    @classmethod
    def scaled(cls, base: PotentialSpec, amplitude: float) -> PotentialSpec:
        return cls(kind=PotentialKind.SCALED, base=base, amplitude=amplitude)

    @classmethod
    def from_raster(cls, raster: Field) -> PotentialSpec:
        return cls(kind=PotentialKind.RASTER, raster=raster)

    @property
    def identifier(self) -> str:
        """Stable text id, written into dataset manifests and cache keys"""
        if self.kind == PotentialKind.SCALED:
            return f"scaled({self.base.identifier},{self.amplitude!r})"
        if self.kind == PotentialKind.RASTER:
            digest = hashlib.sha256(self.raster.data.tobytes()).hexdigest()[:16]
            return f"raster(n={self.raster.spec.n},sha256={digest})"
        return self.kind.value


class Cutoff(BaseModel):
    """Smooth radial cutoff phi: 1 inside r_inner, 0 outside r_outer"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_inner: float
    r_outer: float
    raster: Field


class EwaldPoint(BaseModel):
    """Wavenumber, scattered direction and incident sign realizing a frequency xi = k (theta - sign theta0)"""

    model_config = ConfigDict(frozen=True)

    k: float
    theta: tuple[float, float]
    sign: Literal[1, -1]


class OmitReason(str, Enum):
    """Why an inverse-grid frequency carries no measurement"""

    ZERO = "zero"
    DEGENERATE = "degenerate"
    CAPPED = "capped"
    SOLVER = "solver"


class OmittedIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    reason: OmitReason


class ScatterRecord(BaseModel):
    """One far-field measurement and the Ewald parameters of its frequency bin"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    idx: tuple[int, int]
    """Frequency index (i, j) on the inverse grid"""

    xi: tuple[float, float]
    k: float
    theta: tuple[float, float]
    """Scattered direction"""

    sign: Literal[1, -1]
    """Incident direction is sign * theta0"""

    u_inf: complex
    """Far-field value u_inf(theta, sign * theta0, k)"""


class ScatteringDataSet(BaseModel):
    """Fixed angle scattering data on the Ewald parameterization of an inverse grid.

    Every frequency index of the inverse grid appears exactly once, either as a record or as an omitted index.
    """

    model_config = ConfigDict(frozen=True)

    inverse_spec: GridSpec
    theta0: tuple[float, float]
    fine_factor: int = ModelField(ge=1)
    k_max: float
    eps_deg: float
    potential_id: str = "unknown"
    tol: float = 0.0
    records: list[ScatterRecord] = ModelField(default_factory=list)
    omitted: list[OmittedIndex] = ModelField(default_factory=list)

    @model_validator(mode="after")
    def validate_coverage(self) -> ScatteringDataSet:
        n = self.inverse_spec.n
        seen: set[tuple[int, int]] = set()
        for idx in [r.idx for r in self.records] + [(o.i, o.j) for o in self.omitted]:
            if not (0 <= idx[0] < n and 0 <= idx[1] < n):
                error_msg = f"frequency index {idx} outside the {n}x{n} grid"
                raise ValueError(error_msg)
            if idx in seen:
                error_msg = f"duplicate frequency index {idx}"
                raise ValueError(error_msg)
            seen.add(idx)
        if len(seen) != n * n:
            error_msg = f"records and omitted indices cover {len(seen)} of {n * n} frequencies"
            raise ValueError(error_msg)
        return self

    @model_validator(mode="after")
    def validate_records(self) -> ScatteringDataSet:
        t1, t2 = self.theta0
        for r in self.records:
            scale = max(1.0, math.hypot(*r.xi))
            grid_xi = self.inverse_spec.frequency(*r.idx)
            if math.hypot(r.xi[0] - grid_xi[0], r.xi[1] - grid_xi[1]) > RECORD_RTOL * scale:
                error_msg = f"record {r.idx} carries xi={r.xi}, the grid frequency there is {grid_xi}"
                raise ValueError(error_msg)
            if not r.k > 0:
                error_msg = f"record {r.idx} has a non-positive wavenumber k={r.k}"
                raise ValueError(error_msg)
            if abs(math.hypot(*r.theta) - 1.0) > RECORD_RTOL:
                error_msg = f"record {r.idx} has a non-unit direction theta={r.theta}"
                raise ValueError(error_msg)
            expected_sign = 1 if r.xi[0] * t1 + r.xi[1] * t2 < 0 else -1
            if r.sign != expected_sign:
                error_msg = f"record {r.idx} has sign {r.sign}, xi . theta0 requires {expected_sign}"
                raise ValueError(error_msg)
            rebuilt = (r.k * (r.theta[0] - r.sign * t1), r.k * (r.theta[1] - r.sign * t2))
            if math.hypot(rebuilt[0] - r.xi[0], rebuilt[1] - r.xi[1]) > RECORD_RTOL * scale:
                error_msg = f"record {r.idx}: k (theta - sign theta0) = {rebuilt} differs from xi={r.xi}"
                raise ValueError(error_msg)
        return self

    @property
    def inverse_crime(self) -> bool:
        return self.fine_factor == 1

    @property
    def omitted_fraction(self) -> float:
        return len(self.omitted) / self.inverse_spec.n**2


class DatasetManifest(BaseModel):
    """JSON sidecar of a dataset CSV"""

    n: int
    L: float
    theta0: tuple[float, float]
    fine_factor: int
    k_max: float
    eps_deg: float
    potential_id: str
    tol: float
    omitted: list[OmittedIndex]
    inverse_crime: bool


class RecoveryParams(BaseModel):
    """Knobs of the fixed point recovery q_{m,l+1} = T_m(q_{m,l})"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int = ModelField(ge=1)
    """Born series depth"""

    l_max: int = ModelField(ge=1)
    """Number of iterates produced, q_{m,1} = 0 included"""

    stop_tol: float = ModelField(default=0.0, ge=0.0)
    """Relative Cauchy tolerance for early stop, 0 disables"""

    cutoff: Cutoff

    workers: int = ModelField(default=1, ge=1)
    """Threads used for the per-record sweep"""


class RecoveryTrace(BaseModel):
    """Iterates of a recovery run and their diagnostics"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    algorithm: str
    iterates: list[Field]
    cauchy_norms: list[float] = ModelField(default_factory=list)
    """||q_{l+1} - q_l||_2 for consecutive iterates"""

    imag_norms: list[float] = ModelField(default_factory=list)
    """||Im q_l||_2 per iterate"""

    iteration_seconds: list[float] = ModelField(default_factory=list)
    """Wall time spent producing each iterate after the first"""

    solver_failures: int = 0
    omitted_fraction: float = 0.0
    final_sobolev_norm: float = 0.0
    """Diagnostic W^{1/2,2} norm of the last iterate"""

    @model_validator(mode="after")
    def validate_lengths(self) -> RecoveryTrace:
        count = len(self.iterates)
        if len(self.imag_norms) != count or len(self.cauchy_norms) != max(count - 1, 0):
            error_msg = "trace diagnostics do not match the number of iterates"
            raise ValueError(error_msg)
        if len(self.iteration_seconds) != max(count - 1, 0):
            error_msg = "trace timings do not match the number of iterates"
            raise ValueError(error_msg)
        return self

    @property
    def final(self) -> Field:
        return self.iterates[-1]

    @property
    def seconds_per_iteration(self) -> float:
        return sum(self.iteration_seconds) / len(self.iteration_seconds) if self.iteration_seconds else 0.0
