"""Controller extraction and the serialized synthesis result."""

from __future__ import annotations

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ExtractionError, PreconditionError
from ..sdp.contract import SolveOutcome
from ..sdp.problem import SdpProblem
from .problems import SynthesisSettings


class MatrixJson(BaseModel):
    """Row-major matrix with explicit dimensions."""

    rows: int
    cols: int
    data: list[float]

    @classmethod
    def from_array(cls, a) -> "MatrixJson":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return cls(rows=a.shape[0], cols=a.shape[1], data=[float(v) for v in a.ravel()])

    def to_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=float).reshape(self.rows, self.cols)


class SynthesisSetup(BaseModel):
    """How the feasible set was built; enough to rebuild it from the data file."""

    kind: str
    bound: str = "crosscov"
    instrument: str = "identity"
    l: Optional[int] = None
    Hu: Optional[MatrixJson] = None
    Cz: Optional[MatrixJson] = None
    Dz: Optional[MatrixJson] = None


class SynthesisResult(BaseModel):
    """Verdict and certificate of one informativity query."""

    feasible: bool
    objective: str
    status: str
    weak: bool = False
    K: Optional[MatrixJson] = None
    P: Optional[MatrixJson] = None
    L: Optional[MatrixJson] = None
    Z: Optional[MatrixJson] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    setup: Optional[SynthesisSetup] = None
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    def gain(self) -> np.ndarray:
        if self.K is None:
            raise PreconditionError("result carries no controller gain")
        return self.K.to_array()

    def certificate(self, lambda_scale: float) -> dict[str, np.ndarray]:
        """Decision values in the solver's (normalized-Λ) units."""
        if not self.feasible or self.P is None or self.L is None:
            raise PreconditionError("only feasible results carry a certificate")
        values = {
            "P": self.P.to_array(),
            "L": self.L.to_array(),
            "alpha": np.array([[(self.alpha or 0.0) * lambda_scale]]),
            "beta": np.array([[self.beta or 0.0]]),
        }
        if self.Z is not None:
            values["Z"] = self.Z.to_array()
        if self.gamma is not None:
            values["gamma"] = np.array([[self.gamma]])
        return values


def gain_from_certificate(P: np.ndarray, L: np.ndarray, cond_max: float = 1e12) -> np.ndarray:
    """K = L P⁻¹ through a linear solve.

    Raises:
        ExtractionError: P is numerically singular
    """
    cond = float(np.linalg.cond(P))
    if not np.isfinite(cond) or cond > cond_max:
        raise ExtractionError(f"P is numerically singular (condition number {cond:.3g})")
    return np.linalg.solve(P.T, L.T).T


def extract_result(
    outcome: SolveOutcome,
    problem: SdpProblem,
    settings: Optional[SynthesisSettings] = None,
) -> SynthesisResult:
    """Turn a Feasible outcome into a SynthesisResult with K = L P⁻¹.

    Raises:
        PreconditionError: outcome is not Feasible
        ExtractionError: P is numerically singular
    """
    settings = settings or SynthesisSettings()
    if not outcome.feasible or outcome.x is None:
        raise PreconditionError(f"cannot extract a controller from a {outcome.status.value} outcome")

    values = problem.layout.unpack(outcome.x)
    P, L = values["P"], values["L"]
    K = gain_from_certificate(P, L, settings.cond_max)
    scale = float(problem.meta.get("lambda_scale", 1.0))
    objective = problem.meta.get("objective", "stab")

    gamma: Optional[float] = problem.meta.get("gamma")
    Z = values.get("Z")
    if objective == "h2" and Z is not None:
        gamma = float(np.sqrt(max(np.trace(Z), 0.0)))
    elif "gamma" in values:
        gamma = float(values["gamma"].item())

    return SynthesisResult(
        feasible=True,
        objective=objective,
        status=outcome.status.value,
        K=MatrixJson.from_array(K),
        P=MatrixJson.from_array(P),
        L=MatrixJson.from_array(L),
        Z=None if Z is None else MatrixJson.from_array(Z),
        alpha=float(values["alpha"].item()) / scale,
        beta=float(values["beta"].item()),
        gamma=gamma,
        diagnostics={
            "residual_eigs": problem.block_min_eigs(outcome.x),
            "condition_P": float(np.linalg.cond(P)),
            "lambda_scale": scale,
            "solver_status": outcome.solver_status,
        },
    )


def infeasible_result(outcome: SolveOutcome, problem: SdpProblem) -> SynthesisResult:
    """Result for a solve that produced no certificate."""
    return SynthesisResult(
        feasible=False,
        objective=problem.meta.get("objective", "stab"),
        status=outcome.status.value,
        weak=outcome.weak,
        diagnostics={"solver_status": outcome.solver_status},
    )
