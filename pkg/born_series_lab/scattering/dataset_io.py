"""Dataset files: `<name>.csv` with one row per record plus a `<name>.manifest.json` sidecar."""

from __future__ import annotations

from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from born_series_lab.scattering.constants import CSV_FLOAT_FORMAT, DATASET_CSV_COLUMNS, MANIFEST_SUFFIX
from born_series_lab.scattering.excs import DatasetFormatError, GridSpecError
from born_series_lab.scattering.grid import make_grid
from born_series_lab.scattering.log import solver_logger
from born_series_lab.scattering.schema import DatasetManifest, ScatteringDataSet, ScatterRecord


def manifest_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + MANIFEST_SUFFIX)


def write_dataset(d: ScatteringDataSet, path: str | Path) -> Path:
    """Write the record table and its manifest; floats carry 17 significant digits so reads are bit-exact"""
    path = Path(path)
    frame = pd.DataFrame(
        [
            (
                r.idx[0],
                r.idx[1],
                r.xi[0],
                r.xi[1],
                r.k,
                r.theta[0],
                r.theta[1],
                r.sign,
                r.u_inf.real,
                r.u_inf.imag,
            )
            for r in d.records
        ],
        columns=DATASET_CSV_COLUMNS,
    )
    manifest = DatasetManifest(
        n=d.inverse_spec.n,
        L=d.inverse_spec.half_width,
        theta0=d.theta0,
        fine_factor=d.fine_factor,
        k_max=d.k_max,
        eps_deg=d.eps_deg,
        potential_id=d.potential_id,
        tol=d.tol,
        omitted=d.omitted,
        inverse_crime=d.inverse_crime,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    manifest_path(path).write_text(manifest.model_dump_json(indent=2) + "\n")
    solver_logger.debug("wrote %d records to %s", len(d.records), path)
    return path


def _read_manifest(path: Path) -> DatasetManifest:
    sidecar = manifest_path(path)
    if not sidecar.is_file():
        error_msg = f"dataset {path} has no manifest {sidecar.name}"
        raise DatasetFormatError(error_msg)
    try:
        return DatasetManifest.model_validate_json(sidecar.read_text())
    except ValidationError as e:
        error_msg = f"malformed manifest {sidecar}: {e}"
        raise DatasetFormatError(error_msg) from e


def read_dataset(path: str | Path) -> ScatteringDataSet:
    """Read a dataset written by `write_dataset`.

    Raises:
        DatasetFormatError: If the table or manifest is missing or malformed, an index repeats, or the two files
            disagree
    """
    path = Path(path)
    manifest = _read_manifest(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError) as e:
        error_msg = f"cannot read dataset table {path}: {e}"
        raise DatasetFormatError(error_msg) from e

    if list(frame.columns) != DATASET_CSV_COLUMNS:
        error_msg = f"unexpected dataset header {list(frame.columns)} in {path}"
        raise DatasetFormatError(error_msg)
    duplicated = frame.duplicated(subset=["i", "j"])
    if duplicated.any():
        first = frame.loc[duplicated, ["i", "j"]].iloc[0]
        error_msg = f"duplicate frequency index ({first['i']}, {first['j']}) in {path}"
        raise DatasetFormatError(error_msg)
    if manifest.inverse_crime != (manifest.fine_factor == 1):
        error_msg = (
            f"manifest of {path} flags inverse_crime={manifest.inverse_crime} with fine_factor={manifest.fine_factor}"
        )
        raise DatasetFormatError(error_msg)

    try:
        records = [
            ScatterRecord(
                idx=(int(row.i), int(row.j)),
                xi=(float(row.xi1), float(row.xi2)),
                k=float(row.k),
                theta=(float(row.theta1), float(row.theta2)),
                sign=int(row.sign),
                u_inf=complex(float(row.uinf_re), float(row.uinf_im)),
            )
            for row in frame.itertuples(index=False)
        ]
        return ScatteringDataSet(
            inverse_spec=make_grid(manifest.n, manifest.L),
            theta0=manifest.theta0,
            fine_factor=manifest.fine_factor,
            k_max=manifest.k_max,
            eps_deg=manifest.eps_deg,
            potential_id=manifest.potential_id,
            tol=manifest.tol,
            records=records,
            omitted=manifest.omitted,
        )
    except (ValidationError, GridSpecError, ValueError) as e:
        error_msg = f"dataset {path} is inconsistent with its manifest: {e}"
        raise DatasetFormatError(error_msg) from e
