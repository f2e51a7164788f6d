"""Structured output files: trajectory CSV, geometric-phase CSV, and
heatmap files with a ``#``-prefixed metadata header.

Floats are rendered in scientific notation with 12 significant digits so
repeated runs produce byte-identical files. The column headers are frozen
and asserted by the test suite.
"""

from __future__ import annotations

import numpy as np

from .observables import GeometricPhaseSeries, ObservableSeries

__all__ = [
    "TRAJECTORY_HEADER",
    "GP_HEADER",
    "HEATMAP_HEADER",
    "format_float",
    "write_trajectory_csv",
    "write_gp_csv",
    "write_heatmap",
    "read_trajectory_csv",
    "read_heatmap",
]

TRAJECTORY_HEADER = ("tau,cycle,rho11,rho22,rho33,rho44,"
                     "re_rho23,im_rho23,re_rho14,im_rho14,purity,concurrence")
GP_HEADER = "cycle,phi_wrapped,phi_cumulative"
HEATMAP_HEADER = "axis_a,axis_b,concurrence,purity,status"


def format_float(x: float) -> str:
    """Scientific notation with 12 significant digits."""
    return f"{x:.11e}"


def write_trajectory_csv(path, series: ObservableSeries) -> None:
    rows = [TRAJECTORY_HEADER]
    for i in range(len(series.tau)):
        cols = (series.tau[i], series.cycle[i],
                series.rho11[i], series.rho22[i], series.rho33[i], series.rho44[i],
                series.rho23[i].real, series.rho23[i].imag,
                series.rho14[i].real, series.rho14[i].imag,
                series.purity[i], series.concurrence[i])
        rows.append(",".join(format_float(c) for c in cols))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def write_gp_csv(path, gp: GeometricPhaseSeries) -> None:
    rows = [GP_HEADER]
    for n, w, c in zip(gp.cycles, gp.phi_cycle, gp.phi_cumulative):
        rows.append(f"{int(n)},{format_float(w)},{format_float(c)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def write_heatmap(path, values_a, values_b, concurrence, purity, status,
                  metadata: dict) -> None:
    """Heatmap file: '# key=value' metadata lines, a frozen column header,
    then one row per grid cell, row-major in axis_a then axis_b."""
    lines = [f"# {k}={v}" for k, v in metadata.items()]
    lines.append(HEATMAP_HEADER)
    for i, va in enumerate(values_a):
        for j, vb in enumerate(values_b):
            st = str(status[i][j]).replace(",", ";")
            lines.append(",".join((format_float(va), format_float(vb),
                                   format_float(concurrence[i, j]),
                                   format_float(purity[i, j]), st)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header: {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, k] for k, name in enumerate(TRAJECTORY_HEADER.split(","))}


def read_heatmap(path) -> tuple[dict[str, str], dict[str, np.ndarray], list[str]]:
    """Returns (metadata, numeric columns, status column)."""
    meta: dict[str, str] = {}
    rows = []
    status: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    meta[k.strip()] = v.strip()
                continue
            if line == HEATMAP_HEADER:
                continue
            if not line:
                continue
            parts = line.split(",")
            rows.append([float(p) for p in parts[:4]])
            status.append(parts[4])
    arr = np.asarray(rows)
    names = HEATMAP_HEADER.split(",")[:4]
    return meta, {name: arr[:, k] for k, name in enumerate(names)}, status
