from .dataset_io import read_dataset, write_dataset  # noqa: TID252
from .forward import far_field, generate_dataset, solve_lippmann_schwinger  # noqa: TID252
from .grid import make_grid, sobolev_norm, to_freq, to_phys  # noqa: TID252
from .inversion import (  # noqa: TID252
    apply_T_m,
    bcr_recover,
    born_from_data,
    ewald_map,
    q_hat_operator,
    q_hat_series,
    recover,
)
from .resolvent import SymbolCache, apply_resolvent, kernel_symbol  # noqa: TID252
from .scene import eval_potential, make_cutoff, rasterize  # noqa: TID252
from .schema import Field, GridSpec, PotentialSpec, RecoveryParams, RecoveryTrace, ScatteringDataSet  # noqa: TID252

__all__ = [
    "Field",
    "GridSpec",
    "PotentialSpec",
    "RecoveryParams",
    "RecoveryTrace",
    "ScatteringDataSet",
    "SymbolCache",
    "apply_T_m",
    "apply_resolvent",
    "bcr_recover",
    "born_from_data",
    "eval_potential",
    "ewald_map",
    "far_field",
    "generate_dataset",
    "kernel_symbol",
    "make_cutoff",
    "make_grid",
    "q_hat_operator",
    "q_hat_series",
    "rasterize",
    "read_dataset",
    "recover",
    "sobolev_norm",
    "solve_lippmann_schwinger",
    "to_freq",
    "to_phys",
    "write_dataset",
]
