"""Static SVG figures of experiment reports and reconstructions."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Literal

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from born_series_lab.lab.schema import Algorithm, ReportRow  # noqa: E402
from born_series_lab.scattering.excs import ReportError  # noqa: E402
from born_series_lab.scattering.grid import check_same_grid, physical_axes  # noqa: E402
from born_series_lab.scattering.schema import Field  # noqa: E402

# labels as <text> elements, deterministic element ids
SVG_RC = {"svg.fonttype": "none", "svg.hashsalt": "born-series-lab"}


def series_from_rows(rows: list[ReportRow], x: Literal["l", "n"]) -> dict[str, list[tuple[int, float]]]:
    """Group rows into labelled (x, log10 error) series.

    Against l there is one series per (algorithm, n, m). Against n each (algorithm, m) series takes the last
    iterate reported at every grid size.
    """
    series: dict[str, list[tuple[int, float]]] = defaultdict(list)
    if x == "l":
        for row in rows:
            label = f"{row.algorithm.value}-n{row.n}" + (f"-m{row.m}" if row.algorithm == Algorithm.NEW else "")
            series[label].append((row.l, row.log10_error))
    else:
        last: dict[tuple[str, int, int], ReportRow] = {}
        for row in rows:
            key = (row.algorithm.value, row.m, row.n)
            if key not in last or row.l > last[key].l:
                last[key] = row
        for (algorithm, m, n), row in last.items():
            label = algorithm + (f"-m{m}" if row.algorithm == Algorithm.NEW else "")
            series[label].append((n, row.log10_error))
    return {label: sorted(points) for label, points in sorted(series.items())}


def emit_plot(rows: list[ReportRow], path: str | Path, x: Literal["l", "n"] = "l") -> Path:
    """Plot log10 error against the iteration l or the grid size n as a standalone SVG.

    Each series is one line whose SVG group id is `series-<label>`; a single-point series is drawn as a marker
    only.

    Raises:
        ReportError: If there are no rows
    """
    if not rows:
        error_msg = "cannot plot an empty report"
        raise ReportError(error_msg)
    if x not in ("l", "n"):
        error_msg = f"x axis must be 'l' or 'n', got {x!r}"
        raise ReportError(error_msg)

    path = Path(path)
    series = series_from_rows(rows, x)
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, points in series.items():
            xs, ys = zip(*points)
            (line,) = ax.plot(xs, ys, marker="o", linestyle="-" if len(points) > 1 else "none", label=label)
            line.set_gid(f"series-{label}")

        if x == "n":
            sizes = sorted({row.n for row in rows})
            ax.set_xticks(sizes, [str(n) for n in sizes])
            ax.set_xlabel("grid points per axis N")
        else:
            ax.set_xticks(sorted({row.l for row in rows}))
            ax.set_xlabel("iteration l")
        ax.set_ylabel("log10 L2 error")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")

        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def emit_section_plot(truth: Field, approx: Field, path: str | Path, label: str = "reconstruction") -> Path:
    """Profile of the potential and the real part of a reconstruction along x2 = 0"""
    check_same_grid(truth, approx)
    path = Path(path)
    spec = truth.spec
    x1, _ = physical_axes(spec)
    row = spec.n // 2
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        (reference,) = ax.plot(x1[:, row], truth.data.real[:, row], color="black", label="potential")
        reference.set_gid("series-potential")
        (recovered,) = ax.plot(x1[:, row], np.real(approx.data[:, row]), linestyle="--", label=label)
        recovered.set_gid(f"series-{label}")
        ax.set_xlabel("x1")
        ax.set_ylabel("q(x1, 0)")
        ax.legend(fontsize="small")
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
