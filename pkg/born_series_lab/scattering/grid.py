"""Periodic grid, complex fields and the scaled DFT pair.

`to_freq` carries the quadrature weight h^2, so frequency samples approximate the continuous transform
F(xi) = int f(x) exp(-i xi.x) dx; `to_phys` carries (pi/L)^2 / (2 pi)^2 per sample. Because the lattice starts
at -L, both transforms pick up the checkerboard phase (-1)^(i+j).
"""

from __future__ import annotations

import functools
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError
from scipy import fft

from born_series_lab.scattering.constants import CSV_FLOAT_FORMAT, FIELD_CSV_COLUMNS
from born_series_lab.scattering.excs import FieldSpaceError, GridSpecError, ParameterError
from born_series_lab.scattering.schema import Field, GridSpec, Space


def make_grid(n: int, half_width: float) -> GridSpec:
    """Build a grid specification.

    Args:
        n: Points per axis, even and at least 8
        half_width: Half width L of the box [-L, L]^2

    Returns:
        GridSpec: Grid with spacing 2L/n

    Raises:
        GridSpecError: If n is odd or too small, or L is not positive
    """
    try:
        return GridSpec(n=n, half_width=half_width)
    except ValidationError as e:
        error_msg = f"Invalid grid (n={n}, L={half_width}): {e}"
        raise GridSpecError(error_msg) from e


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def wrap_indices(n: int) -> np.ndarray:
    """Signed frequency numbers of the bins 0..n-1, i.e. {0..n/2-1, -n/2..-1}"""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


@functools.lru_cache(maxsize=32)
def physical_axes(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates x1, x2 of every node, shaped n x n with index (i, j)"""
    axis = -spec.half_width + spec.spacing * np.arange(spec.n)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return _readonly(x1), _readonly(x2)


@functools.lru_cache(maxsize=32)
def frequency_axes(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies xi1, xi2 of every bin, shaped n x n with index (i, j)"""
    axis = spec.freq_step * wrap_indices(spec.n)
    xi1, xi2 = np.meshgrid(axis, axis, indexing="ij")
    return _readonly(xi1), _readonly(xi2)


@functools.lru_cache(maxsize=32)
def frequency_magnitude(spec: GridSpec) -> np.ndarray:
    xi1, xi2 = frequency_axes(spec)
    return _readonly(np.hypot(xi1, xi2))


@functools.lru_cache(maxsize=32)
def _checkerboard(spec: GridSpec) -> np.ndarray:
    idx = np.arange(spec.n)
    return _readonly(np.where((idx[:, None] + idx[None, :]) % 2 == 0, 1.0, -1.0))


def _require(f: Field, space: Space) -> None:
    if f.space != space:
        error_msg = f"expected a {space.value} field, got a {f.space.value} field"
        raise FieldSpaceError(error_msg)


def forward_transform(spec: GridSpec, data: np.ndarray) -> np.ndarray:
    """Array version of `to_freq`"""
    return spec.cell_area * _checkerboard(spec) * fft.fft2(data)


def inverse_transform(spec: GridSpec, data: np.ndarray) -> np.ndarray:
    """Array version of `to_phys`"""
    return fft.ifft2(_checkerboard(spec) * data) / spec.cell_area


def to_freq(f: Field) -> Field:
    """Physical samples to approximate continuous Fourier transform samples.

    Raises:
        FieldSpaceError: If `f` is not a physical field
    """
    _require(f, Space.PHYSICAL)
    return Field(spec=f.spec, space=Space.FREQUENCY, data=forward_transform(f.spec, f.data))


def to_phys(f: Field) -> Field:
    """Frequency samples back to physical samples, exact inverse of `to_freq`.

    Raises:
        FieldSpaceError: If `f` is not a frequency field
    """
    _require(f, Space.FREQUENCY)
    return Field(spec=f.spec, space=Space.PHYSICAL, data=inverse_transform(f.spec, f.data))


def check_same_grid(*fields: Field) -> None:
    specs = {f.spec for f in fields}
    if len(specs) > 1:
        error_msg = f"fields live on different grids: {sorted(s.n for s in specs)}"
        raise FieldSpaceError(error_msg)


def l2_norm(f: Field) -> float:
    """Discrete L2 norm h * sqrt(sum |f|^2) of a physical field"""
    _require(f, Space.PHYSICAL)
    return float(f.spec.spacing * np.linalg.norm(f.data))


def sobolev_norm(f: Field, alpha: float) -> float:
    """Discrete W^{alpha,2} norm: sqrt(sum <xi>^{2 alpha} |F(xi)|^2) weighted by the frequency cell area.

    Physical fields are transformed first. At alpha = 0 this equals `l2_norm` (Parseval).

    Raises:
        ParameterError: If alpha is negative
    """
    if alpha < 0:
        error_msg = f"Sobolev order must be non-negative, got {alpha}"
        raise ParameterError(error_msg)
    freq = to_freq(f) if f.space == Space.PHYSICAL else f
    spec = f.spec
    weight = (1.0 + frequency_magnitude(spec) ** 2) ** alpha
    cell = (spec.freq_step / (2.0 * np.pi)) ** 2
    return float(np.sqrt(cell * np.sum(weight * np.abs(freq.data) ** 2)))


def resample(f: Field, spec: GridSpec) -> Field:
    """Trigonometric interpolation of a physical field onto another grid of the same box"""
    _require(f, Space.PHYSICAL)
    if f.spec == spec:
        return f
    if f.spec.half_width != spec.half_width:
        error_msg = "resampling requires grids over the same box"
        raise FieldSpaceError(error_msg)
    source = forward_transform(f.spec, f.data)
    target = np.zeros((spec.n, spec.n), dtype=np.complex128)
    keep = min(f.spec.n, spec.n) // 2
    src_rows = np.r_[0:keep, f.spec.n - keep : f.spec.n]
    dst_rows = np.r_[0:keep, spec.n - keep : spec.n]
    target[np.ix_(dst_rows, dst_rows)] = source[np.ix_(src_rows, src_rows)]
    return Field(spec=spec, space=Space.PHYSICAL, data=inverse_transform(spec, target))


def write_field(f: Field, path: str | Path) -> Path:
    """Write a field as CSV `i,j,x1,x2,re,im`, 17 significant digits, row-major.

    Frequency fields store their frequencies in the x1, x2 columns.
    """
    path = Path(path)
    axes = physical_axes(f.spec) if f.space == Space.PHYSICAL else frequency_axes(f.spec)
    ii, jj = np.meshgrid(np.arange(f.spec.n), np.arange(f.spec.n), indexing="ij")
    frame = pd.DataFrame(
        {
            "i": ii.ravel(),
            "j": jj.ravel(),
            "x1": axes[0].ravel(),
            "x2": axes[1].ravel(),
            "re": f.data.real.ravel(),
            "im": f.data.imag.ravel(),
        },
        columns=FIELD_CSV_COLUMNS,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def read_field(path: str | Path, space: Space = Space.PHYSICAL) -> Field:
    """Read a field written by `write_field`; the grid is recovered from the coordinates.

    Raises:
        FieldSpaceError: If the file is not a complete square raster
    """
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != FIELD_CSV_COLUMNS:
        error_msg = f"unexpected raster header {list(frame.columns)} in {path}"
        raise FieldSpaceError(error_msg)
    n = int(round(np.sqrt(len(frame))))
    if n * n != len(frame):
        error_msg = f"raster {path} has {len(frame)} rows, not a square grid"
        raise FieldSpaceError(error_msg)
    frame = frame.sort_values(["i", "j"], kind="stable")
    if space == Space.PHYSICAL:
        half_width = -float(frame["x1"].iloc[0])
    else:
        half_width = float(np.pi / frame["x1"].iloc[n])
    spec = make_grid(n, half_width)
    data = (frame["re"].to_numpy() + 1j * frame["im"].to_numpy()).reshape(n, n)
    return Field(spec=spec, space=space, data=data)
