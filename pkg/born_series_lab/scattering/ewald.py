"""Ewald parameterization of fixed angle data.

Every frequency xi off the line xi . theta0 = 0 is reached by exactly one pair (k, theta) with
xi = k (theta - sign theta0): sign = +1 for xi . theta0 < 0, k = |xi|^2 / (2 |xi . theta0|) and
theta = xi / k + sign theta0.
"""

from __future__ import annotations

import math

import numpy as np

from born_series_lab.scattering.constants import DEGENERATE_CELL_FRACTION
from born_series_lab.scattering.excs import DegenerateFrequencyError, IncidentDirectionError
from born_series_lab.scattering.grid import frequency_axes
from born_series_lab.scattering.schema import EwaldPoint, GridSpec, OmitReason, OmittedIndex


def check_direction(theta0: tuple[float, float]) -> tuple[float, float]:
    norm = math.hypot(*theta0)
    if abs(norm - 1.0) > 1e-12:
        error_msg = f"incident direction must be a unit vector, got {theta0} with norm {norm}"
        raise IncidentDirectionError(error_msg)
    return float(theta0[0]), float(theta0[1])


def default_eps_deg(spec: GridSpec) -> float:
    """Half a frequency cell"""
    return DEGENERATE_CELL_FRACTION * spec.freq_step


def default_k_max(spec: GridSpec) -> float:
    """Radial Nyquist wavenumber pi n / (2L) of the grid"""
    return math.pi * spec.n / (2.0 * spec.half_width)


def ewald_map(xi: tuple[float, float], theta0: tuple[float, float], eps_deg: float) -> EwaldPoint:
    """Wavenumber, scattered direction and incident sign that realize frequency xi.

    Args:
        xi: Frequency vector
        theta0: Unit incident direction
        eps_deg: Frequencies with |xi . theta0| below this are degenerate

    Returns:
        EwaldPoint: (k, theta, sign) with xi = k (theta - sign theta0)

    Raises:
        DegenerateFrequencyError: If xi = 0 or |xi . theta0| < eps_deg
    """
    xi1, xi2 = float(xi[0]), float(xi[1])
    t1, t2 = float(theta0[0]), float(theta0[1])
    dot = xi1 * t1 + xi2 * t2
    if xi1 == 0.0 and xi2 == 0.0:
        error_msg = "the zero frequency has no Ewald parameterization"
        raise DegenerateFrequencyError(error_msg)
    if abs(dot) < eps_deg:
        error_msg = f"frequency {(xi1, xi2)} is within {eps_deg} of the line xi . theta0 = 0"
        raise DegenerateFrequencyError(error_msg)

    sign = 1 if dot < 0 else -1
    k = (xi1 * xi1 + xi2 * xi2) / (2.0 * abs(dot))
    return EwaldPoint(k=k, theta=(xi1 / k + sign * t1, xi2 / k + sign * t2), sign=sign)


def plan_frequencies(
    spec: GridSpec, theta0: tuple[float, float], k_max: float, eps_deg: float
) -> tuple[list[tuple[tuple[int, int], tuple[float, float], EwaldPoint]], list[OmittedIndex]]:
    """Split the frequency bins of a grid into measurable ones and omitted ones.

    Returns:
        tuple: Row-major list of (idx, xi, EwaldPoint) for bins with k <= k_max, and the omitted bins with reasons
    """
    xi1, xi2 = frequency_axes(spec)
    planned = []
    omitted = []
    for i in range(spec.n):
        for j in range(spec.n):
            xi = (float(xi1[i, j]), float(xi2[i, j]))
            try:
                point = ewald_map(xi, theta0, eps_deg)
            except DegenerateFrequencyError:
                reason = OmitReason.ZERO if xi == (0.0, 0.0) else OmitReason.DEGENERATE
                omitted.append(OmittedIndex(i=i, j=j, reason=reason))
                continue
            if point.k > k_max:
                omitted.append(OmittedIndex(i=i, j=j, reason=OmitReason.CAPPED))
                continue
            planned.append(((i, j), xi, point))
    return planned, omitted


def reconstruct_frequency(point: EwaldPoint, theta0: tuple[float, float]) -> np.ndarray:
    """xi = k (theta - sign theta0)"""
    return point.k * (np.asarray(point.theta) - point.sign * np.asarray(theta0))
