"""Rendering: trace CSVs in, one deterministic SVG per figure out.

The CSV reader here is intentionally independent of the simulator package;
the column schema is the interface.  All inputs are read and validated
before any output file is touched, so a bad CSV never leaves a partial
image behind.  SVG output carries no date metadata and uses a fixed hash
salt, so identical inputs produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure

from .recipes import LINE_STYLES, FigureRecipe

CSV_HEADER = "t,P,g,j_a,norm,energy_re,energy_im"
CSV_COLUMNS = CSV_HEADER.split(",")

Y_AXIS_LABEL = {"P": "P(a, t)", "g": "g(a, t)"}
MARGIN = 0.05


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read one trace CSV into column arrays; empty fields become NaN."""
    path = Path(path)
    if not path.exists():
        raise ValueError(f"no such CSV file: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file, expected header {CSV_HEADER!r}")
    header = lines[0].strip()
    if header != CSV_HEADER:
        got = header.split(",")
        for want in CSV_COLUMNS:
            if want not in got:
                raise ValueError(f"{path}: missing column {want!r} in header {header!r}")
        raise ValueError(f"{path}: header {header!r} does not match {CSV_HEADER!r}")
    rows = [line.split(",") for line in lines[1:] if line.strip()]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if any(len(r) != len(CSV_COLUMNS) for r in rows):
        raise ValueError(f"{path}: rows must have {len(CSV_COLUMNS)} fields")
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(CSV_COLUMNS):
        cols[name] = np.array(
            [float(r[j]) if r[j] != "" else np.nan for r in rows], dtype=float
        )
    return cols


@dataclass(frozen=True)
class CurveReport:
    label: str
    style: str
    points: int
    finite_points: int


@dataclass(frozen=True)
class RenderReport:
    path: Path
    figure_id: str
    curves: tuple[CurveReport, ...]
    xlim: tuple[float, float]
    ylim: tuple[float, float]


def _limits(values: list[np.ndarray], explicit: tuple[float, float] | None) -> tuple[float, float]:
    if explicit is not None:
        return explicit
    finite = np.concatenate([v[np.isfinite(v)] for v in values])
    if finite.size == 0:
        raise ValueError("no finite samples to scale an axis from")
    lo, hi = float(finite.min()), float(finite.max())
    pad = MARGIN * (hi - lo) if hi > lo else MARGIN * max(abs(hi), 1.0)
    return lo - pad, hi + pad


def render(recipe: FigureRecipe, out_path: str | Path) -> RenderReport:
    """Draw every curve of the recipe and write one SVG.

    Empty rate fields (NaN after parsing) break the line into gaps rather
    than plotting as zeros.  Curves are black; dash patterns follow the
    recipe's style mapping.
    """
    out_path = Path(out_path)
    loaded = [(curve, read_trace_csv(curve.csv)) for curve in recipe.curves]

    xlim = _limits([cols["t"] for _, cols in loaded], recipe.xlim)
    ylim = _limits([cols[recipe.y_quantity] for _, cols in loaded], recipe.ylim)

    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot()
    reports = []
    for curve, cols in loaded:
        y = cols[recipe.y_quantity]
        ax.plot(
            cols["t"], y, LINE_STYLES[curve.style], color="black", label=curve.label
        )
        reports.append(
            CurveReport(
                label=curve.label,
                style=curve.style,
                points=len(y),
                finite_points=int(np.count_nonzero(np.isfinite(y))),
            )
        )
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_xlabel("t")
    ax.set_ylabel(Y_AXIS_LABEL[recipe.y_quantity])
    ax.legend(loc="best")

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with mpl.rc_context({"svg.hashsalt": recipe.figure_id}):
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    return RenderReport(
        path=out_path,
        figure_id=recipe.figure_id,
        curves=tuple(reports),
        xlim=xlim,
        ylim=ylim,
    )
