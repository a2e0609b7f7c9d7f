"""Informativity sweeps over data length N."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..data_model import Trajectory
from ..errors import InformaError, PreconditionError
from ..informativity import BoundKind, Objective, prepare_form, synthesize
from ..log import log_event
from ..sdp.contract import SolverContract
from ..ui.progress import ProgressTracker
from .benchmark import benchmark_system
from .config import BoundConfig, ExperimentConfig, NormBoundConfig, output_label
from .generate import generate_dataset, instrument_spec, io_model


class CellResult(BaseModel):
    label: str
    N: int
    rep: int
    informative: bool
    gamma_sq: Optional[float] = None
    status: str
    bound_ok: bool = True


class SweepResult(BaseModel):
    """Raw cells plus the aggregates derived from them."""

    study: str
    objective: str
    labels: list[str]
    N_grid: list[int]
    gamma_label: Optional[str] = None
    cells: list[CellResult] = Field(default_factory=list)

    def _cells(self, label: str, N: int) -> list[CellResult]:
        return [c for c in self.cells if c.label == label and c.N == N]

    def fraction(self, label: str, N: int) -> Optional[float]:
        cells = self._cells(label, N)
        if not cells:
            return None
        return sum(c.informative for c in cells) / len(cells)

    def fractions(self) -> dict[str, dict[int, Optional[float]]]:
        return {label: {N: self.fraction(label, N) for N in self.N_grid} for label in self.labels}

    def gamma_stats(self, label: Optional[str] = None) -> dict[int, tuple[float, float, float]]:
        """N -> (median, 25th, 75th percentile) of γ² over informative cells."""
        label = label or self.gamma_label
        stats: dict[int, tuple[float, float, float]] = {}
        for N in self.N_grid:
            values = [c.gamma_sq for c in self._cells(label, N) if c.informative and c.gamma_sq is not None]
            if values:
                p25, med, p75 = np.percentile(values, [25, 50, 75])
                stats[N] = (float(med), float(p25), float(p75))
        return stats

    @property
    def flagged(self) -> int:
        """Cells whose data set violates its own noise bound."""
        return sum(not c.bound_ok for c in self.cells)


def _evaluate(
    traj: Trajectory,
    bound: BoundConfig,
    label: str,
    N: int,
    rep: int,
    bound_ok: bool,
    objective: Objective,
    contract: SolverContract,
    l: Optional[int],
) -> CellResult:
    A0, B0, Cz_state = benchmark_system()
    kind = BoundKind.NORM if isinstance(bound, NormBoundConfig) else BoundKind.CROSSCOV
    Cz = Dz = None
    truth = None
    if l is None:
        Cz, Dz = Cz_state, np.zeros((Cz_state.shape[0], B0.shape[1]))
        truth = (A0, B0)
    try:
        f, s = prepare_form(traj, instrument_spec(bound), bound.hu_matrix(traj.p), l=l, bound=kind)
        result = synthesize(f, objective, s, Cz=Cz, Dz=Dz, contract=contract, truth=truth)
    except InformaError as e:
        cell = CellResult(label=label, N=N, rep=rep, informative=False, status=type(e).__name__, bound_ok=bound_ok)
    else:
        gamma_sq = result.gamma**2 if result.feasible and result.gamma is not None and objective is not Objective.STAB else None
        cell = CellResult(
            label=label,
            N=N,
            rep=rep,
            informative=result.feasible,
            gamma_sq=gamma_sq,
            status=result.status,
            bound_ok=bound_ok,
        )
    log_event(
        "experiment_cell",
        {"label": label, "N": N, "rep": rep, "informative": cell.informative, "status": cell.status},
    )
    return cell


def run_cell(config: ExperimentConfig, N: int, rep: int) -> list[CellResult]:
    """Every label of one (N, rep) cell, sharing one generated data set per label."""
    contract = SolverContract.resolve(**config.solver.as_kwargs())
    cells: list[CellResult] = []
    if config.study == "state":
        data = generate_dataset(config, N, rep)
        for bound in config.bounds:
            cells.append(
                _evaluate(
                    data.traj, bound, bound.label, N, rep, data.bound_ok[bound.label],
                    config.objective, contract, None,
                )
            )
        return cells

    bound = config.bounds[0]
    for C0 in config.output_matrices:
        data = generate_dataset(config, N, rep, C0=np.asarray(C0))
        l = io_model(C0).l
        cells.append(
            _evaluate(
                data.traj, bound, output_label(C0), N, rep, data.bound_ok[bound.label],
                config.objective, contract, l,
            )
        )
    return cells


def _labels(config: ExperimentConfig) -> list[str]:
    if config.study == "state":
        return [b.label for b in config.bounds]
    return [output_label(C0) for C0 in config.output_matrices]


def run_sweep(
    config: ExperimentConfig,
    progress: Optional[ProgressTracker] = None,
    workers: Optional[int] = None,
) -> SweepResult:
    """Run every (N, rep) cell of ``config``, in a process pool when ``workers`` > 1.

    Solver failures are recorded per cell; they never abort the sweep.
    """
    workers = config.workers if workers is None else workers
    labels = _labels(config)
    gamma_label = config.gamma_from or labels[-1 if config.study == "state" else 0]
    if gamma_label not in labels:
        raise PreconditionError(f"gamma_from '{gamma_label}' is not one of {labels}")

    grid = [(N, rep) for N in config.N_grid for rep in range(config.reps)]
    if progress is not None:
        progress.start(f"{config.study} sweep", total=len(grid))

    started = time.monotonic()
    cells: list[CellResult] = []
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_cell, config, N, rep) for N, rep in grid]
            for future in as_completed(futures):
                cells.extend(future.result())
                if progress is not None:
                    progress.advance()
    else:
        for N, rep in grid:
            cells.extend(run_cell(config, N, rep))
            if progress is not None:
                progress.advance()

    order = {label: i for i, label in enumerate(labels)}
    cells.sort(key=lambda c: (c.N, order[c.label], c.rep))
    result = SweepResult(
        study=config.study,
        objective=config.objective.value,
        labels=labels,
        N_grid=list(config.N_grid),
        gamma_label=gamma_label,
        cells=cells,
    )
    log_event(
        "experiment_done",
        {
            "study": config.study,
            "cells": len(cells),
            "flagged": result.flagged,
            "duration_s": round(time.monotonic() - started, 3),
        },
    )
    return result


def run_state_sweep(config: ExperimentConfig, **kwargs) -> SweepResult:
    """Input-state sweep over ``config.bounds``.

    Raises:
        PreconditionError: ``config.study`` is not "state"
    """
    if config.study != "state":
        raise PreconditionError("run_state_sweep needs study='state'")
    return run_sweep(config, **kwargs)


def run_io_sweep(config: ExperimentConfig, **kwargs) -> SweepResult:
    """Input-output sweep over ``config.output_matrices`` with the first bound.

    Raises:
        PreconditionError: ``config.study`` is not "io"
    """
    if config.study != "io":
        raise PreconditionError("run_io_sweep needs study='io'")
    return run_sweep(config, **kwargs)
