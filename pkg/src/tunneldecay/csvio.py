"""CSV and manifest serialization for decay traces.

Schema: header ``t,P,g,j_a,norm,energy_re,energy_im``, one row per sample.
Numbers carry 17 significant digits so a read-back reproduces the exact
doubles that were written.  A g value that could not be computed (probability
under the floor, or fewer than three samples) is written as an empty field,
never as 0: an empty cell means "no rate available", 0 means "rate is zero".
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .observables import DecayTrace

CSV_HEADER = "t,P,g,j_a,norm,energy_re,energy_im"
CSV_COLUMNS = CSV_HEADER.split(",")


def _fmt(value: float) -> str:
    return "%.17g" % value


def write_trace_csv(path: str | Path, trace: DecayTrace) -> None:
    lines = [CSV_HEADER]
    for i in range(len(trace)):
        g = "" if np.isnan(trace.g[i]) else _fmt(trace.g[i])
        lines.append(
            ",".join(
                (
                    _fmt(trace.t[i]),
                    _fmt(trace.P[i]),
                    g,
                    _fmt(trace.j_a[i]),
                    _fmt(trace.norm[i]),
                    _fmt(trace.energy[i].real),
                    _fmt(trace.energy[i].imag),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace_csv(path: str | Path) -> dict[str, NDArray[np.float64]]:
    """Read a trace CSV into column arrays; empty g fields become NaN."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty file, expected header {CSV_HEADER!r}")
    header = text[0].strip()
    if header != CSV_HEADER:
        got = header.split(",")
        for want in CSV_COLUMNS:
            if want not in got:
                raise ValueError(f"{path}: missing column {want!r} in header {header!r}")
        raise ValueError(f"{path}: header {header!r} does not match {CSV_HEADER!r}")
    rows = [line.split(",") for line in text[1:] if line.strip()]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if any(len(r) != len(CSV_COLUMNS) for r in rows):
        raise ValueError(f"{path}: rows must have {len(CSV_COLUMNS)} fields")
    cols: dict[str, NDArray[np.float64]] = {}
    for j, name in enumerate(CSV_COLUMNS):
        cols[name] = np.array(
            [float(r[j]) if r[j] != "" else np.nan for r in rows], dtype=float
        )
    return cols


def write_manifest(path: str | Path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
