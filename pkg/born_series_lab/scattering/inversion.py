"""Inverse problem: the Born approximation, partial Born series operators, the fixed point recovery
q_{m,l+1} = T_m(q_{m,l}) and the baseline that re-solves the direct problem at every iteration.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from born_series_lab.scattering.constants import DEFAULT_SOLVER_TOL, DEFAULT_TRUNCATION_RADIUS
from born_series_lab.scattering.ewald import ewald_map
from born_series_lab.scattering.excs import FieldSpaceError, ParameterError, SolverConvergenceError
from born_series_lab.scattering.forward import plane_wave, solve_lippmann_schwinger
from born_series_lab.scattering.grid import inverse_transform, l2_norm, sobolev_norm, to_phys
from born_series_lab.scattering.log import solver_logger
from born_series_lab.scattering.resolvent import SymbolCache
from born_series_lab.scattering.schema import (
    Cutoff,
    Field,
    RecoveryParams,
    RecoveryTrace,
    ScatteringDataSet,
    ScatterRecord,
    Space,
)
from born_series_lab.scattering.utils import timer

__all__ = [
    "apply_T_m",
    "bcr_recover",
    "born_from_data",
    "ewald_map",
    "q_hat_operator",
    "q_hat_orders",
    "q_hat_series",
    "recover",
]

T = TypeVar("T")


def _sweep(func: Callable[[ScatterRecord], T], records: list[ScatterRecord], workers: int) -> list[T]:
    # executor.map keeps record order, so reductions are identical to the serial run
    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(func, records))
    return [func(r) for r in records]


def _check_grid(q: Field, d: ScatteringDataSet) -> None:
    if q.space != Space.PHYSICAL or q.spec != d.inverse_spec:
        error_msg = f"potential must be a physical field on the inverse grid (n={d.inverse_spec.n})"
        raise FieldSpaceError(error_msg)


def _spectrum(d: ScatteringDataSet, values: list[complex]) -> np.ndarray:
    spectrum = np.zeros((d.inverse_spec.n, d.inverse_spec.n), dtype=np.complex128)
    for record, value in zip(d.records, values):
        spectrum[record.idx] = value
    return spectrum


def born_from_data(d: ScatteringDataSet) -> Field:
    """Born approximation q_theta0: the data read as Fourier samples, zero on omitted bins, brought to physical space.

    The result is kept complex.
    """
    spectrum = _spectrum(d, [r.u_inf for r in d.records])
    return to_phys(Field(spec=d.inverse_spec, space=Space.FREQUENCY, data=spectrum))


def _incident_sign(record: ScatterRecord, theta0: tuple[float, float]) -> tuple[float, float]:
    return record.sign * theta0[0], record.sign * theta0[1]


def q_hat_orders(
    q: Field,
    m: int,
    d: ScatteringDataSet,
    cache: SymbolCache | None = None,
    workers: int = 1,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> list[Field]:
    """Q_1(q)^, ..., Q_m(q)^ on the frequency bins of the dataset, in one sweep per record.

    For a record (k, theta, sign): v_0 = q exp(ik sign theta0 . x), v_r = q R_k v_{r-1}, and
    Q_r(q)^(xi) = h^2 sum exp(-ik theta . y) v_r(y). Omitted bins are zero for every order.

    Args:
        q: Potential on the inverse grid, real or complex
        m: Highest order
        d: Dataset supplying the Ewald parameters
        cache: Resolvent symbols shared across calls
        workers: Threads sweeping the records
        radius: Kernel truncation radius

    Returns:
        list[Field]: m frequency fields, entry r-1 holding Q_r(q)^
    """
    if m < 1:
        error_msg = f"series order must be >= 1, got {m}"
        raise ParameterError(error_msg)
    _check_grid(q, d)
    spec = d.inverse_spec
    if not np.any(q.data):
        return [Field.zeros(spec, Space.FREQUENCY) for _ in range(m)]

    cache = cache or SymbolCache()
    qd = q.data

    def orders(record: ScatterRecord) -> list[complex]:
        symbol = cache.get(spec, record.k, radius)
        v = qd * plane_wave(spec, record.k, _incident_sign(record, d.theta0))
        outgoing = plane_wave(spec, record.k, record.theta, sign=-1.0)
        values = []
        for _ in range(m):
            v = qd * symbol.convolve(v)
            values.append(complex(spec.cell_area * np.sum(outgoing * v)))
        return values

    per_record = _sweep(orders, d.records, workers)
    return [
        Field(spec=spec, space=Space.FREQUENCY, data=_spectrum(d, [values[r] for values in per_record]))
        for r in range(m)
    ]


def q_hat_operator(
    q: Field,
    j: int,
    d: ScatteringDataSet,
    cache: SymbolCache | None = None,
    workers: int = 1,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> Field:
    """Q_j(q)^ alone, a field of degree j + 1 in q"""
    return q_hat_orders(q, j, d, cache, workers, radius)[j - 1]


def q_hat_series(
    q: Field,
    m: int,
    d: ScatteringDataSet,
    cache: SymbolCache | None = None,
    workers: int = 1,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> Field:
    """Fused sum Q_1(q)^ + ... + Q_m(q)^"""
    orders = q_hat_orders(q, m, d, cache, workers, radius)
    total = np.zeros_like(orders[0].data)
    for order in orders:
        total = total + order.data
    return orders[0].with_data(total)


def apply_T_m(
    q: Field,
    born: Field,
    params: RecoveryParams,
    d: ScatteringDataSet,
    cache: SymbolCache | None = None,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> Field:
    """T_m(q) = phi (q_theta0 - sum_{j<=m} Q_j(q))"""
    series = q_hat_series(q, params.m, d, cache, params.workers, radius)
    return born.with_data(params.cutoff.raster.data * (born.data - to_phys(series).data))


def _trace(
    algorithm: str, d: ScatteringDataSet, iterates: list[Field], seconds: list[float], failures: int = 0
) -> RecoveryTrace:
    return RecoveryTrace(
        algorithm=algorithm,
        iterates=iterates,
        cauchy_norms=[l2_norm(b.with_data(b.data - a.data)) for a, b in zip(iterates, iterates[1:])],
        imag_norms=[l2_norm(q.with_data(q.data.imag)) for q in iterates],
        iteration_seconds=seconds,
        solver_failures=failures,
        omitted_fraction=d.omitted_fraction,
        final_sobolev_norm=sobolev_norm(iterates[-1], 0.5),
    )


def _converged(previous: Field, current: Field, stop_tol: float) -> bool:
    if stop_tol <= 0:
        return False
    size = l2_norm(current)
    return size > 0 and l2_norm(current.with_data(current.data - previous.data)) < stop_tol * size


@timer(logger=solver_logger)
def recover(
    d: ScatteringDataSet,
    params: RecoveryParams,
    cache: SymbolCache | None = None,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> RecoveryTrace:
    """Fixed point sequence q_{m,1} = 0, q_{m,l+1} = T_m(q_{m,l}).

    Stops after l_max iterates, or earlier once the relative Cauchy difference drops below stop_tol. Resolvent
    symbols are cached by wavenumber, so every iteration after the second reuses them.

    Returns:
        RecoveryTrace: Iterates q_{m,1..l} with their diagnostics
    """
    if params.cutoff.raster.spec != d.inverse_spec:
        error_msg = "cutoff raster must live on the inverse grid"
        raise FieldSpaceError(error_msg)
    cache = cache or SymbolCache()
    born = born_from_data(d)
    iterates = [Field.zeros(d.inverse_spec)]
    seconds = []
    for ell in range(2, params.l_max + 1):
        start = time.perf_counter()
        iterates.append(apply_T_m(iterates[-1], born, params, d, cache, radius))
        seconds.append(time.perf_counter() - start)
        solver_logger.debug("q_{%d,%d} computed in %.3f s", params.m, ell, seconds[-1])
        if _converged(iterates[-2], iterates[-1], params.stop_tol):
            solver_logger.info("recovery stopped at l=%d, Cauchy difference below %g", ell, params.stop_tol)
            break
    cache.log_stats()
    return _trace("new", d, iterates, seconds)


@timer(logger=solver_logger)
def bcr_recover(
    d: ScatteringDataSet,
    iterations: int,
    cutoff: Cutoff,
    tol: float = DEFAULT_SOLVER_TOL,
    workers: int = 1,
    cache: SymbolCache | None = None,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> RecoveryTrace:
    """Baseline iteration q_1 = phi q_theta0,
    q_{n+1}^(xi) = u_inf(xi) - h^2 sum exp(-ik theta . y) q_n(y) u_s^n(y), then q_{n+1} = phi q_{n+1}.

    u_s^n is a full Lippmann-Schwinger solve for q_n at every record and every iteration. A record whose solve fails
    contributes 0 to that iteration's spectrum, like an omitted bin, and is counted in `solver_failures`.
    """
    if iterations < 1:
        error_msg = f"iterations must be >= 1, got {iterations}"
        raise ParameterError(error_msg)
    if cutoff.raster.spec != d.inverse_spec:
        error_msg = "cutoff raster must live on the inverse grid"
        raise FieldSpaceError(error_msg)
    cache = cache or SymbolCache()
    spec = d.inverse_spec
    phi = cutoff.raster.data
    born = born_from_data(d)
    iterates = [born.with_data(phi * born.data)]
    seconds = []
    failures = 0

    for step in range(2, iterations + 1):
        q = iterates[-1]
        start = time.perf_counter()

        def corrected(record: ScatterRecord) -> complex | None:
            symbol = cache.get(spec, record.k, radius)
            try:
                u_s = solve_lippmann_schwinger(q, record.k, _incident_sign(record, d.theta0), tol=tol, symbol=symbol)
            except SolverConvergenceError as e:
                solver_logger.warning("baseline record %s dropped: %s", record.idx, e)
                return None
            outgoing = plane_wave(spec, record.k, record.theta, sign=-1.0)
            return record.u_inf - complex(spec.cell_area * np.sum(outgoing * q.data * u_s.data))

        values = _sweep(corrected, d.records, workers)
        failures += sum(v is None for v in values)
        spectrum = _spectrum(d, [0j if v is None else v for v in values])
        iterates.append(q.with_data(phi * inverse_transform(spec, spectrum)))
        seconds.append(time.perf_counter() - start)
        solver_logger.debug("baseline iterate %d computed in %.3f s", step, seconds[-1])

    cache.log_stats()
    return _trace("bcr", d, iterates, seconds, failures)
