"""Direct problem: Lippmann-Schwinger solves, far-field patterns and dataset generation."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from born_series_lab.scattering.constants import (
    DEFAULT_FINE_FACTOR,
    DEFAULT_SOLVER_TOL,
    DEFAULT_THETA0,
    DEFAULT_TRUNCATION_RADIUS,
    GMRES_MAX_ITERATIONS,
    GMRES_RESTART,
)
from born_series_lab.scattering.ewald import check_direction, default_eps_deg, default_k_max, plan_frequencies
from born_series_lab.scattering.excs import ParameterError, ResolventError, SolverConvergenceError
from born_series_lab.scattering.grid import make_grid, physical_axes
from born_series_lab.scattering.log import solver_logger
from born_series_lab.scattering.resolvent import ResolventSymbol, SymbolCache, kernel_symbol
from born_series_lab.scattering.scene import rasterize
from born_series_lab.scattering.schema import (
    EwaldPoint,
    Field,
    GridSpec,
    OmitReason,
    OmittedIndex,
    PotentialSpec,
    ScatterRecord,
    ScatteringDataSet,
    Space,
)
from born_series_lab.scattering.utils import timer


def plane_wave(spec: GridSpec, k: float, direction: tuple[float, float], sign: float = 1.0) -> np.ndarray:
    """Samples of exp(sign * i k direction . x) at the grid nodes"""
    x1, x2 = physical_axes(spec)
    return np.exp(sign * 1j * k * (direction[0] * x1 + direction[1] * x2))


def incident_wave(spec: GridSpec, k: float, theta_inc: tuple[float, float]) -> Field:
    """u_i(x) = exp(i k theta_inc . x)"""
    return Field(spec=spec, space=Space.PHYSICAL, data=plane_wave(spec, k, theta_inc))


def _relative_residual(symbol: ResolventSymbol, q: np.ndarray, u: np.ndarray, rhs: np.ndarray) -> float:
    residual = u - rhs - symbol.convolve(q * u)
    return float(np.linalg.norm(residual) / np.linalg.norm(rhs))


def solve_lippmann_schwinger(
    q: Field,
    k: float,
    theta_inc: tuple[float, float],
    tol: float = DEFAULT_SOLVER_TOL,
    symbol: ResolventSymbol | None = None,
    method: Literal["gmres", "neumann"] = "gmres",
    max_iterations: int = GMRES_MAX_ITERATIONS,
    restart: int = GMRES_RESTART,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> Field:
    """Solve u_s = R_k(q u_i) + R_k(q u_s) for the scattered field.

    The Born term R_k(q u_i) is the right-hand side of (I - R_k M_q) u_s = R_k(q u_i), solved by restarted GMRES
    or, with method="neumann", by the plain fixed point iteration. The returned field satisfies the equation with
    relative residual <= tol, checked after the solve. Complex potentials are accepted.

    Args:
        q: Potential samples in physical space
        k: Wavenumber
        theta_inc: Unit incident direction
        tol: Relative residual target
        symbol: Resolvent symbol for (q's grid, k); built when omitted
        method: "gmres" or "neumann"
        max_iterations: Total inner iteration budget
        restart: GMRES restart length
        radius: Kernel truncation radius, used only when the symbol is built here

    Returns:
        Field: Scattered field u_s

    Raises:
        SolverConvergenceError: If the residual target is not met within the iteration budget
        ResolventError: If the symbol belongs to another grid or wavenumber
    """
    if not tol > 0:
        error_msg = f"solver tolerance must be positive, got {tol}"
        raise ParameterError(error_msg)
    if symbol is None:
        symbol = kernel_symbol(q.spec, k, radius)
    elif symbol.spec != q.spec or not math.isclose(symbol.k, k, rel_tol=1e-11):
        error_msg = f"symbol for (n={symbol.spec.n}, k={symbol.k}) used on (n={q.spec.n}, k={k})"
        raise ResolventError(error_msg)

    if not np.any(q.data):
        return Field.zeros(q.spec)

    n = q.spec.n
    qd = q.data
    rhs = symbol.convolve(qd * plane_wave(q.spec, k, theta_inc))

    if method == "neumann":
        u = rhs.copy()
        for iteration in range(1, max_iterations + 1):
            residual = _relative_residual(symbol, qd, u, rhs)
            if residual <= tol:
                break
            u = rhs + symbol.convolve(qd * u)
        else:
            residual = _relative_residual(symbol, qd, u, rhs)
    else:
        iteration = 0

        def matvec(x: np.ndarray) -> np.ndarray:
            v = x.reshape(n, n)
            return (v - symbol.convolve(qd * v)).ravel()

        def progress(pr_norm: float) -> None:
            nonlocal iteration
            iteration += 1
            solver_logger.debug("gmres k=%.6g iteration %d residual %.3e", k, iteration, pr_norm)

        operator = LinearOperator((n * n, n * n), matvec=matvec, dtype=np.complex128)
        solution, _ = gmres(
            operator,
            rhs.ravel(),
            rtol=0.5 * tol,
            atol=0.0,
            restart=restart,
            maxiter=math.ceil(max_iterations / restart),
            callback=progress,
            callback_type="pr_norm",
        )
        u = solution.reshape(n, n)
        residual = _relative_residual(symbol, qd, u, rhs)

    if not residual <= tol:
        error_msg = f"{method} stopped at relative residual {residual:.3e} > {tol:.1e} (k={k})"
        raise SolverConvergenceError(error_msg, residual=residual, iterations=iteration)
    return Field(spec=q.spec, space=Space.PHYSICAL, data=u)


def far_field(
    q: Field, u_s: Field, k: float, theta: tuple[float, float], theta_inc: tuple[float, float]
) -> complex:
    """u_inf(theta) = int exp(-ik (theta - theta_inc) . y) q dy + int exp(-ik theta . y) q u_s dy by h^2 quadrature"""
    spec = q.spec
    outgoing = plane_wave(spec, k, theta, sign=-1.0)
    born_phase = outgoing * plane_wave(spec, k, theta_inc)
    return complex(spec.cell_area * np.sum(born_phase * q.data + outgoing * q.data * u_s.data))


def _measure(
    q: Field,
    xi: tuple[float, float],
    idx: tuple[int, int],
    point: EwaldPoint,
    theta0: tuple[float, float],
    tol: float,
    cache: SymbolCache,
    radius: float,
    method: str,
) -> ScatterRecord | OmittedIndex:
    theta_inc = (point.sign * theta0[0], point.sign * theta0[1])
    symbol = cache.get(q.spec, point.k, radius)
    try:
        u_s = solve_lippmann_schwinger(q, point.k, theta_inc, tol=tol, symbol=symbol, method=method)
    except SolverConvergenceError as e:
        solver_logger.warning("frequency %s omitted: %s", idx, e)
        return OmittedIndex(i=idx[0], j=idx[1], reason=OmitReason.SOLVER)
    return ScatterRecord(
        idx=idx,
        xi=xi,
        k=point.k,
        theta=point.theta,
        sign=point.sign,
        u_inf=far_field(q, u_s, point.k, point.theta, theta_inc),
    )


@timer(logger=solver_logger)
def generate_dataset(
    potential: PotentialSpec,
    inverse_spec: GridSpec,
    theta0: tuple[float, float] = DEFAULT_THETA0,
    fine_factor: int = DEFAULT_FINE_FACTOR,
    k_max: float | None = None,
    tol: float = DEFAULT_SOLVER_TOL,
    eps_deg: float | None = None,
    radius: float = DEFAULT_TRUNCATION_RADIUS,
    workers: int = 1,
    method: Literal["gmres", "neumann"] = "gmres",
    cache: SymbolCache | None = None,
) -> ScatteringDataSet:
    """Simulate fixed angle far-field data on the Ewald parameterization of an inverse grid.

    The potential is rasterized and the direct problem solved on a grid `fine_factor` times finer over the same box.
    Bins at xi = 0, near the line xi . theta0 = 0, beyond k_max, or whose solve failed, are listed as omitted.
    Records come out sorted by index whatever the number of workers.

    Args:
        potential: Potential to simulate
        inverse_spec: Grid the data will be inverted on
        theta0: Unit incident direction
        fine_factor: Refinement of the simulation grid, 1 commits the inverse crime
        k_max: Wavenumber cap, defaults to the radial Nyquist of the inverse grid
        tol: Relative residual of each Lippmann-Schwinger solve
        eps_deg: Degeneracy threshold on |xi . theta0|, defaults to half a frequency cell
        radius: Kernel truncation radius
        workers: Threads solving records concurrently
        method: Lippmann-Schwinger solver
        cache: Symbol cache shared by the workers

    Returns:
        ScatteringDataSet: Records and omitted bins covering the inverse grid
    """
    if fine_factor < 1:
        error_msg = f"fine_factor must be >= 1, got {fine_factor}"
        raise ParameterError(error_msg)
    theta0 = check_direction(theta0)
    k_max = default_k_max(inverse_spec) if k_max is None else float(k_max)
    eps_deg = default_eps_deg(inverse_spec) if eps_deg is None else float(eps_deg)
    cache = cache or SymbolCache()

    fine_spec = make_grid(inverse_spec.n * fine_factor, inverse_spec.half_width)
    q = rasterize(potential, fine_spec)
    planned, omitted = plan_frequencies(inverse_spec, theta0, k_max, eps_deg)
    solver_logger.info(
        "generating %d records for %s on n=%d (fine n=%d), %d bins omitted",
        len(planned),
        potential.identifier,
        inverse_spec.n,
        fine_spec.n,
        len(omitted),
    )

    def measure(item) -> ScatterRecord | OmittedIndex:
        idx, xi, point = item
        return _measure(q, xi, idx, point, theta0, tol, cache, radius, method)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(measure, planned))
    else:
        results = [measure(item) for item in planned]

    records = sorted((r for r in results if isinstance(r, ScatterRecord)), key=lambda r: r.idx)
    failed = [r for r in results if isinstance(r, OmittedIndex)]
    if failed:
        solver_logger.warning("%d records failed to converge and were omitted", len(failed))
    cache.log_stats()

    return ScatteringDataSet(
        inverse_spec=inverse_spec,
        theta0=theta0,
        fine_factor=fine_factor,
        k_max=k_max,
        eps_deg=eps_deg,
        potential_id=potential.identifier,
        tol=tol,
        records=records,
        omitted=sorted(omitted + failed, key=lambda o: (o.i, o.j)),
    )
