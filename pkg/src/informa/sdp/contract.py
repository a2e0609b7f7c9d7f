"""Solver configuration and solve outcomes."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..shared.config import Config

SUPPORTED_SOLVERS = ("CLARABEL", "SCS")


class SolverContract(BaseModel):
    """Immutable solver settings shared by every solve.

    A conforming backend, given a problem that is strictly feasible with
    margin at least ``10 * eps_abs``, returns a Feasible outcome whose
    blocks all have minimum eigenvalue >= ``-eps_abs``.
    """

    model_config = ConfigDict(frozen=True)

    solver: str = "CLARABEL"
    eps_abs: float = Field(default=1e-8, gt=0)
    eps_rel: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=100_000, ge=1)
    polish: bool = True

    @field_validator("solver")
    @classmethod
    def _known_solver(cls, v: str) -> str:
        v = v.upper()
        if v not in SUPPORTED_SOLVERS:
            raise ValueError(f"solver must be one of {', '.join(SUPPORTED_SOLVERS)}")
        return v

    @property
    def capabilities(self) -> frozenset[str]:
        return frozenset({"feasibility", "linear_objective"})

    @property
    def replay_tol(self) -> float:
        return 10.0 * self.eps_abs

    def solver_options(self) -> dict[str, Any]:
        """Keyword arguments for ``cvxpy.Problem.solve``."""
        if self.solver == "SCS":
            return {"eps_abs": self.eps_abs, "eps_rel": self.eps_rel, "max_iters": self.max_iter}
        return {
            "tol_gap_abs": self.eps_abs,
            "tol_gap_rel": self.eps_rel,
            "tol_feas": self.eps_abs,
            "max_iter": self.max_iter,
        }

    @classmethod
    def resolve(cls, project_root: Optional[Path] = None, **overrides: Any) -> "SolverContract":
        """Explicit arguments > INFORMA_SDP_* environment > [tool.informa.solver] > defaults."""
        table = Config(project_root).get_solver_config()
        settings: dict[str, Any] = {}
        if "name" in table:
            settings["solver"] = table["name"]
        for key in ("eps_abs", "eps_rel", "max_iter", "polish"):
            if key in table:
                settings[key] = table[key]

        if tol := os.getenv("INFORMA_SDP_TOL"):
            settings["eps_abs"] = float(tol)
        if solver := os.getenv("INFORMA_SDP_SOLVER"):
            settings["solver"] = solver

        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)


class SolveStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    INACCURATE = "inaccurate"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class SolveOutcome:
    """What a solve produced.

    ``weak`` marks an infeasibility claim without a dual certificate.
    ``replay`` holds the minimum eigenvalue of every block at ``x``.
    """

    status: SolveStatus
    x: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    weak: bool = False
    solver_status: str = ""
    replay: dict[str, float] = field(default_factory=dict)
    solve_time: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.FEASIBLE

    @property
    def numerical_failure(self) -> bool:
        return self.status in (SolveStatus.INACCURATE, SolveStatus.ITERATION_LIMIT)

    @property
    def replay_min(self) -> Optional[float]:
        return min(self.replay.values()) if self.replay else None
