"""Test potentials and the smooth cutoff phi."""

from __future__ import annotations

import numpy as np
from pydantic import ValidationError

from born_series_lab.scattering.excs import CutoffError
from born_series_lab.scattering.grid import physical_axes, resample
from born_series_lab.scattering.schema import Cutoff, Field, GridSpec, PotentialKind, PotentialSpec, Space


def _example1(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    # strict inequalities: the region boundaries take the value 0
    r = np.hypot(x1, x2)
    diamond = np.abs(x1) + np.abs(x2) < 0.3
    annulus = (r > 0.7) & (r < 1.0)
    return np.where(diamond, 1.2, np.where(annulus, 1.0, 0.0))


def _example2(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    ridge = np.maximum(0.0, np.exp(-5.0 * (x1 - 0.5) ** 2))
    bump = 1.5 * np.exp(-4.0 * ((x1 + 0.5) ** 2 + (x2 - 0.4) ** 2))
    shifted = 2.0 * np.exp(-7.0 * ((x1 + 0.4) ** 2 + (x2 + 0.4) ** 2) - 0.4)
    return ridge + bump + shifted


def _raster_lookup(raster: Field, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    spec = raster.spec
    i = np.rint((x1 + spec.half_width) / spec.spacing).astype(np.int64) % spec.n
    j = np.rint((x2 + spec.half_width) / spec.spacing).astype(np.int64) % spec.n
    return raster.data[i, j]


def eval_potential(p: PotentialSpec, x1, x2):
    """Evaluate q at points (x1, x2); scalars or broadcastable arrays.

    Raster potentials are read at the nearest node of their grid.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if p.kind == PotentialKind.EXAMPLE1:
        value = _example1(x1, x2)
    elif p.kind == PotentialKind.EXAMPLE2:
        value = _example2(x1, x2)
    elif p.kind == PotentialKind.SCALED:
        value = p.amplitude * np.asarray(eval_potential(p.base, x1, x2))
    else:
        value = _raster_lookup(p.raster, x1, x2)
    return value.item() if value.ndim == 0 else value


def rasterize(p: PotentialSpec, spec: GridSpec) -> Field:
    """Sample a potential at the grid nodes.

    Raster potentials come back unchanged on their own grid and are resampled by trigonometric interpolation
    onto other grids of the same box.
    """
    if p.kind == PotentialKind.RASTER:
        return resample(p.raster, spec)
    if p.kind == PotentialKind.SCALED:
        base = rasterize(p.base, spec)
        return base.with_data(p.amplitude * base.data)
    x1, x2 = physical_axes(spec)
    return Field(spec=spec, space=Space.PHYSICAL, data=eval_potential(p, x1, x2))


def smooth_step(t):
    """psi(t) = g(1-t) / (g(t) + g(1-t)) with g(t) = exp(-1/t) for t > 0, else 0"""
    t = np.asarray(t, dtype=float)

    def g(u):
        safe = np.where(u > 0, u, 1.0)
        return np.where(u > 0, np.exp(-1.0 / safe), 0.0)

    return g(1.0 - t) / (g(t) + g(1.0 - t))


def make_cutoff(spec: GridSpec, r_inner: float, r_outer: float) -> Cutoff:
    """Radial cutoff phi(x) = psi((|x| - r_inner) / (r_outer - r_inner)).

    Raises:
        CutoffError: Unless 0 < r_inner < r_outer <= L
    """
    if not 0 < r_inner < r_outer <= spec.half_width:
        error_msg = f"cutoff radii must satisfy 0 < r_inner < r_outer <= {spec.half_width}, got {r_inner}, {r_outer}"
        raise CutoffError(error_msg)
    x1, x2 = physical_axes(spec)
    phi = smooth_step((np.hypot(x1, x2) - r_inner) / (r_outer - r_inner))
    try:
        return Cutoff(r_inner=r_inner, r_outer=r_outer, raster=Field(spec=spec, data=phi))
    except ValidationError as e:
        raise CutoffError(str(e)) from e
