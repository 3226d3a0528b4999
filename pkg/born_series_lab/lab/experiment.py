"""Experiment sweeps over (n, m, l), their CSV reports and the speed comparison."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
from tornado.log import app_log

from born_series_lab.lab.constants import RECOVERY_META_SUFFIX, REPORT_COLUMNS
from born_series_lab.lab.schema import (
    Algorithm,
    DatasetRequest,
    LabConfig,
    RecoveryMetadata,
    ReportRow,
    SpeedComparison,
)
from born_series_lab.scattering.constants import CSV_FLOAT_FORMAT, DEFAULT_SOLVER_TOL
from born_series_lab.scattering.dataset_io import read_dataset, write_dataset
from born_series_lab.scattering.ewald import default_eps_deg, default_k_max
from born_series_lab.scattering.excs import DatasetCacheError, DatasetFormatError, ParameterError, ReportError
from born_series_lab.scattering.forward import generate_dataset
from born_series_lab.scattering.grid import make_grid, write_field
from born_series_lab.scattering.inversion import bcr_recover, born_from_data, recover
from born_series_lab.scattering.resolvent import SymbolCache
from born_series_lab.scattering.scene import make_cutoff, rasterize
from born_series_lab.scattering.schema import (
    Cutoff,
    Field,
    GridSpec,
    PotentialSpec,
    RecoveryParams,
    RecoveryTrace,
    ScatteringDataSet,
)
from born_series_lab.scattering.utils import timer


def example_potential(example: int, amplitude: float | None = None) -> PotentialSpec:
    base = PotentialSpec.example1() if example == 1 else PotentialSpec.example2()
    return base if amplitude is None else PotentialSpec.scaled(base, amplitude)


def l2_error(approx: Field, truth: PotentialSpec) -> float:
    """h * sqrt(sum |Re(approx) - q|^2) against the potential sampled on the same grid"""
    reference = rasterize(truth, approx.spec).data.real
    return float(approx.spec.spacing * np.linalg.norm(approx.data.real - reference))


class DatasetCache:
    """Generated datasets on disk, named by the digest of their generation request"""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def request(self, potential: PotentialSpec, spec: GridSpec, config: LabConfig) -> DatasetRequest:
        return DatasetRequest(
            n=spec.n,
            L=spec.half_width,
            theta0=config.theta0,
            fine_factor=config.fine_factor,
            k_max=default_k_max(spec) if config.k_max is None else config.k_max,
            eps_deg=default_eps_deg(spec) if config.eps_deg is None else config.eps_deg,
            potential_id=potential.identifier,
            tol=config.tol,
        )

    def path_for(self, request: DatasetRequest) -> Path:
        return self.root / f"n{request.n}-{request.digest[:16]}.csv"

    def load_or_generate(self, potential: PotentialSpec, spec: GridSpec, config: LabConfig) -> ScatteringDataSet:
        """Read the cached dataset for this request, simulating and storing it first when absent.

        Raises:
            DatasetCacheError: If a cached entry exists but cannot be read
        """
        request = self.request(potential, spec, config)
        path = self.path_for(request)
        if path.exists() and not config.regenerate:
            try:
                d = read_dataset(path)
            except DatasetFormatError as e:
                error_msg = f"cached dataset {path} is unreadable ({e}); delete it or pass --regenerate"
                raise DatasetCacheError(error_msg) from e
            app_log.info("Using cached dataset %s", path)
            return d

        app_log.info("Simulating dataset for %s on n=%d into %s", request.potential_id, spec.n, path)
        d = generate_dataset(
            potential,
            spec,
            theta0=request.theta0,
            fine_factor=request.fine_factor,
            k_max=request.k_max,
            tol=request.tol,
            eps_deg=request.eps_deg,
            workers=config.workers,
        )
        write_dataset(d, path)
        return d


def _trace_rows(
    trace: RecoveryTrace, example: int, algorithm: Algorithm, n: int, m: int, truth: PotentialSpec, timings: bool
) -> list[ReportRow]:
    elapsed = np.concatenate([[0.0], np.cumsum(trace.iteration_seconds)])
    return [
        ReportRow(
            example=example,
            algorithm=algorithm,
            n=n,
            m=m,
            l=ell,
            l2_error=l2_error(iterate, truth),
            wall_seconds=float(elapsed[ell - 1]) if timings else 0.0,
        )
        for ell, iterate in enumerate(trace.iterates, start=1)
    ]


def _log_imaginary_part(trace: RecoveryTrace, label: str) -> None:
    final = trace.final
    size = float(np.linalg.norm(final.data))
    if size > 0:
        app_log.info("%s: |Im q| / |q| = %.3g on the last iterate", label, np.linalg.norm(final.data.imag) / size)


@timer(logger=app_log)
def run_experiment(
    example: int,
    n_list: list[int],
    m_list: list[int],
    l_max: int,
    config: LabConfig,
    cache: SymbolCache | None = None,
) -> list[ReportRow]:
    """Error sweep of one example over grid sizes, series depths and iterations.

    Data come from the dataset cache of `config`, simulated on first use. One row is produced per
    (n, m, l, algorithm) requested in `config.algorithms`; rows are sorted so the report does not depend on
    scheduling.

    Raises:
        DatasetCacheError: If a cached dataset is corrupt
    """
    truth = example_potential(example, config.amplitude)
    datasets = DatasetCache(config.cache_dir)
    cache = cache or SymbolCache()
    rows: list[ReportRow] = []

    for n in n_list:
        spec = make_grid(n, config.half_width)
        d = datasets.load_or_generate(truth, spec, config)
        cutoff = make_cutoff(spec, config.r_inner, config.r_outer)
        app_log.info("n=%d: %d records, %.1f%% of bins omitted", n, len(d.records), 100 * d.omitted_fraction)

        if Algorithm.BORN in config.algorithms:
            born_error = l2_error(born_from_data(d), truth)
            rows.append(ReportRow(example=example, algorithm=Algorithm.BORN, n=n, m=0, l=1, l2_error=born_error))
        if Algorithm.NEW in config.algorithms:
            for m in m_list:
                params = RecoveryParams(
                    m=m, l_max=l_max, stop_tol=config.stop_tol, cutoff=cutoff, workers=config.workers
                )
                trace = recover(d, params, cache)
                _log_imaginary_part(trace, f"n={n} m={m}")
                rows.extend(_trace_rows(trace, example, Algorithm.NEW, n, m, truth, config.timings))
        if Algorithm.BCR in config.algorithms:
            trace = bcr_recover(d, l_max, cutoff, tol=config.tol, workers=config.workers, cache=cache)
            rows.extend(_trace_rows(trace, example, Algorithm.BCR, n, 0, truth, config.timings))

    return sorted(rows, key=lambda r: r.sort_key)


def write_report(rows: list[ReportRow], path: str | Path) -> Path:
    """CSV `example,algorithm,n,m,l,l2_error,log10_error,wall_seconds` with 17 significant digits"""
    path = Path(path)
    frame = pd.DataFrame([r.model_dump(mode="python") for r in rows], columns=REPORT_COLUMNS)
    frame["algorithm"] = frame["algorithm"].map(lambda a: Algorithm(a).value)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def read_report(path: str | Path) -> list[ReportRow]:
    """Read a report written by `write_report`.

    Raises:
        ReportError: If the file is missing or is not a report
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError) as e:
        error_msg = f"cannot read report {path}: {e}"
        raise ReportError(error_msg) from e
    if list(frame.columns) != REPORT_COLUMNS:
        error_msg = f"unexpected report header {list(frame.columns)} in {path}"
        raise ReportError(error_msg)
    try:
        return [
            ReportRow(
                example=int(row.example),
                algorithm=row.algorithm,
                n=int(row.n),
                m=int(row.m),
                l=int(row.l),
                l2_error=float(row.l2_error),
                wall_seconds=float(row.wall_seconds),
            )
            for row in frame.itertuples(index=False)
        ]
    except ValueError as e:
        error_msg = f"malformed report row in {path}: {e}"
        raise ReportError(error_msg) from e


def compare_speed(
    d: ScatteringDataSet,
    m: int,
    iterations: int,
    cutoff: Cutoff,
    tol: float | None = None,
    workers: int = 1,
) -> SpeedComparison:
    """Mean per-iteration wall time of `recover` and `bcr_recover` on the same data, each with a fresh symbol cache"""
    if iterations < 2:
        error_msg = f"timing needs at least 2 iterates, got {iterations}"
        raise ParameterError(error_msg)
    params = RecoveryParams(m=m, l_max=iterations, cutoff=cutoff, workers=workers)
    new = recover(d, params, SymbolCache())
    tol = tol if tol is not None else (d.tol or DEFAULT_SOLVER_TOL)
    baseline = bcr_recover(d, iterations, cutoff, tol=tol, workers=workers, cache=SymbolCache())
    comparison = SpeedComparison(
        n=d.inverse_spec.n,
        m=m,
        iterations=iterations,
        new_seconds=new.seconds_per_iteration,
        bcr_seconds=baseline.seconds_per_iteration,
    )
    app_log.info(
        "per iteration: new %.3f s, baseline %.3f s (x%.1f)",
        comparison.new_seconds,
        comparison.bcr_seconds,
        comparison.ratio,
    )
    return comparison


def write_recovery(
    trace: RecoveryTrace, path: str | Path, m: int | None = None, l_max: int | None = None, include_trace: bool = False
) -> Path:
    """Write the final iterate as a Field CSV next to its run metadata JSON.

    With `include_trace`, every iterate l also goes to `<stem>.l<l>.csv`.
    """
    path = Path(path)
    write_field(trace.final, path)
    if include_trace:
        for ell, iterate in enumerate(trace.iterates, start=1):
            write_field(iterate, path.with_name(f"{path.stem}.l{ell}.csv"))
    metadata = RecoveryMetadata(
        algorithm=trace.algorithm,
        m=m,
        l_max=l_max or len(trace.iterates),
        iterates=len(trace.iterates),
        iteration_seconds=trace.iteration_seconds,
        total_seconds=float(sum(trace.iteration_seconds)),
        cauchy_norms=trace.cauchy_norms,
        imag_norms=trace.imag_norms,
        omitted_fraction=trace.omitted_fraction,
        solver_failures=trace.solver_failures,
        final_sobolev_norm=trace.final_sobolev_norm,
    )
    path.with_name(path.stem + RECOVERY_META_SUFFIX).write_text(metadata.model_dump_json(indent=2) + "\n")
    return path

