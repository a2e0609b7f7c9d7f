"""CSV files for plotting a sweep."""

from __future__ import annotations

import csv
from pathlib import Path

from .sweep import SweepResult

CELL_COLUMNS = ["label", "N", "rep", "informative", "gamma_sq", "status", "bound_ok"]


def _fmt(value) -> str:
    return "" if value is None else f"{value:.10g}"


def emit_plot_data(result: SweepResult, outdir: Path | str) -> dict[str, Path]:
    """Write fractions.csv, gamma.csv and cells.csv under ``outdir``.

    fractions.csv has one ``fraction_<label>`` column per label. gamma.csv
    holds the γ² median and quartiles for ``result.gamma_label`` at every N
    with at least one informative cell. An empty sweep gives header-only files.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {name: outdir / f"{name}.csv" for name in ("fractions", "gamma", "cells")}

    fractions = result.fractions()
    with paths["fractions"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", *(f"fraction_{label}" for label in result.labels)])
        for N in result.N_grid:
            row = [fractions[label][N] for label in result.labels]
            if all(v is None for v in row):
                continue
            w.writerow([N, *(_fmt(v) for v in row)])

    with paths["gamma"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "median", "p25", "p75"])
        if result.gamma_label is not None:
            for N, (med, p25, p75) in sorted(result.gamma_stats().items()):
                w.writerow([N, _fmt(med), _fmt(p25), _fmt(p75)])

    with paths["cells"].open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CELL_COLUMNS)
        w.writeheader()
        for c in result.cells:
            w.writerow(
                {
                    "label": c.label,
                    "N": c.N,
                    "rep": c.rep,
                    "informative": int(c.informative),
                    "gamma_sq": _fmt(c.gamma_sq),
                    "status": c.status,
                    "bound_ok": int(c.bound_ok),
                }
            )
    return paths
