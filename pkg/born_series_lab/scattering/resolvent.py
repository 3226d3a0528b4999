"""Outgoing resolvent R_k = (Delta + k^2)^{-1} as an FFT-diagonal convolution.

The kernel is the outgoing fundamental solution truncated at radius rho,
G(x) = -(i/4) H0(k|x|) 1{|x| <= rho}, whose Fourier transform has the closed form

    sigma(s) = -[1 + (i pi rho / 2) (s H0(k rho) J1(s rho) - k H1(k rho) J0(s rho))] / (s^2 - k^2),   s = |xi|

with a removable singularity on the circle s = k, where

    sigma(k) = -(i pi rho^2 / 4) [H0(k rho) J0(k rho) + H1(k rho) J1(k rho)].

Convolution against G is exact for densities supported in B(0, R) evaluated on B(0, rho - R).
"""

from __future__ import annotations

import functools
import math
import threading
from collections import OrderedDict

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import fft

from born_series_lab.scattering.constants import (
    DEFAULT_TRUNCATION_RADIUS,
    RESONANCE_RTOL,
    SYMBOL_CACHE_BYTES,
    SYMBOL_CACHE_RTOL,
)
from born_series_lab.scattering.excs import ResolventError
from born_series_lab.scattering.grid import frequency_magnitude
from born_series_lab.scattering.log import solver_logger
from born_series_lab.scattering.schema import Field, GridSpec, Space
from born_series_lab.scattering.specfun import bessel_j, hankel1


class ResolventSymbol(BaseModel):
    """Multiplier samples sigma(xi) aligned with frequency-field indexing"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: GridSpec
    k: float
    radius: float
    values: np.ndarray

    def convolve(self, data: np.ndarray) -> np.ndarray:
        """Apply the resolvent to raw physical samples.

        The quadrature weights and lattice phases of `to_freq`/`to_phys` cancel, leaving a circular convolution.
        """
        return fft.ifft2(self.values * fft.fft2(data))


def _check_parameters(spec: GridSpec, k: float, radius: float) -> None:
    if not k > 0 or not math.isfinite(k):
        error_msg = f"wavenumber must be positive, got {k}"
        raise ResolventError(error_msg)
    if not 0 < radius <= 2 * spec.half_width:
        error_msg = f"truncation radius must lie in (0, {2 * spec.half_width}], got {radius}"
        raise ResolventError(error_msg)


@functools.lru_cache(maxsize=16)
def _radial_table(spec: GridSpec, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = frequency_magnitude(spec)
    return s, bessel_j(0, s * radius), bessel_j(1, s * radius)


def generic_symbol(s, k: float, radius: float):
    """Closed-form symbol away from the resonance circle (0/0 at s = k)"""
    s = np.asarray(s, dtype=float)
    kr = k * radius
    h0, h1 = hankel1(0, kr), hankel1(1, kr)
    bracket = s * h0 * bessel_j(1, s * radius) - k * h1 * bessel_j(0, s * radius)
    return -(1.0 + 0.5j * np.pi * radius * bracket) / (s**2 - k**2)


def resonant_limit(k: float, radius: float) -> complex:
    """Value of the symbol on the circle |xi| = k"""
    kr = k * radius
    return complex(
        -0.25j * np.pi * radius**2 * (hankel1(0, kr) * bessel_j(0, kr) + hankel1(1, kr) * bessel_j(1, kr))
    )


def kernel_symbol(spec: GridSpec, k: float, radius: float = DEFAULT_TRUNCATION_RADIUS) -> ResolventSymbol:
    """Fourier symbol of the truncated outgoing kernel on the grid frequencies.

    Args:
        spec: Grid whose frequency bins are sampled
        k: Wavenumber
        radius: Truncation radius rho of the kernel support

    Returns:
        ResolventSymbol: Radial multiplier, finite at every bin

    Raises:
        ResolventError: If k <= 0 or rho is outside (0, 2L]
    """
    _check_parameters(spec, k, radius)
    s, j0s, j1s = _radial_table(spec, radius)
    kr = k * radius
    h0, h1 = hankel1(0, kr), hankel1(1, kr)
    near = np.abs(s - k) < RESONANCE_RTOL * max(k, 1.0)
    denom = np.where(near, 1.0, s**2 - k**2)
    values = -(1.0 + 0.5j * np.pi * radius * (s * h0 * j1s - k * h1 * j0s)) / denom
    if np.any(near):
        values = np.where(near, resonant_limit(k, radius), values)
    values.setflags(write=False)
    return ResolventSymbol(spec=spec, k=k, radius=radius, values=values)


def apply_resolvent(symbol: ResolventSymbol, f: Field) -> Field:
    """R_k f = to_phys(sigma * to_freq(f)).

    Raises:
        ResolventError: If `f` is not a physical field on the symbol's grid
    """
    if f.space != Space.PHYSICAL or f.spec != symbol.spec:
        error_msg = "resolvent applies to physical fields on the symbol's grid"
        raise ResolventError(error_msg)
    return f.with_data(symbol.convolve(f.data))


class SymbolCache:
    """Thread-safe insert-or-get store of symbols keyed by (grid, rho, k).

    k is quantized to a relative step of 1e-12. The store is bounded by a byte budget and evicts the least
    recently used symbol.
    """

    def __init__(self, max_bytes: int = SYMBOL_CACHE_BYTES) -> None:
        self.max_bytes = max_bytes
        self._store: OrderedDict[tuple, ResolventSymbol] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(spec: GridSpec, k: float, radius: float) -> tuple:
        if k > 0:
            exponent = math.floor(math.log10(k))
            step = 10.0 ** (exponent - round(-math.log10(SYMBOL_CACHE_RTOL)))
            k = round(k / step) * step
        return spec, radius, k

    def _capacity(self, spec: GridSpec) -> int:
        return max(1, self.max_bytes // (16 * spec.n * spec.n))

    def get(self, spec: GridSpec, k: float, radius: float = DEFAULT_TRUNCATION_RADIUS) -> ResolventSymbol:
        key = self._key(spec, k, radius)
        with self._lock:
            symbol = self._store.get(key)
            if symbol is not None:
                self._store.move_to_end(key)
                self.hits += 1
                return symbol
            self.misses += 1

        symbol = kernel_symbol(spec, k, radius)

        with self._lock:
            symbol = self._store.setdefault(key, symbol)
            self._store.move_to_end(key)
            while len(self._store) > self._capacity(spec):
                self._store.popitem(last=False)
        return symbol

    def __len__(self) -> int:
        return len(self._store)

    def log_stats(self) -> None:
        solver_logger.debug("symbol cache: %d entries, %d hits, %d misses", len(self), self.hits, self.misses)
