"""Independent audit of a synthesized controller against sampled members."""

from __future__ import annotations

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import PreconditionError, UnstableSystemError
from ..informativity.extract import MatrixJson, SynthesisResult
from ..informativity.forms import FeasibleSetForm, default_slater_candidates
from ..lifting import LiftingStructure
from ..log import log_event
from .membership import membership, sample_members
from .norms import h2_norm, hinf_norm, spectral_radius


class BoundType(str, Enum):
    CROSSCOV = "crosscov"
    NORM = "norm"
    SINGLETON = "singleton"


class Violation(BaseModel):
    index: int
    reason: str
    spectral_radius: float
    norm: Optional[float] = None
    A: MatrixJson
    B: MatrixJson


class AuditReport(BaseModel):
    """Outcome of checking one controller on ``samples_tested`` members."""

    objective: str
    bound_type: str
    seed: int
    samples_tested: int
    max_spectral_radius: float
    max_h2: Optional[float] = None
    max_hinf: Optional[float] = None
    gamma: Optional[float] = None
    rtol: float = 1e-6
    violations: list[Violation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def audit_base(
    f: FeasibleSetForm, truth: Optional[tuple[np.ndarray, np.ndarray]] = None
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """First Slater candidate that is a member, as (A, B)."""
    for _, Z in default_slater_candidates(f, truth):
        AB = Z.T
        A, B = AB[:, : f.n], AB[:, f.n :]
        if membership(A, B, f):
            return A, B
    return None


def audit(
    result: SynthesisResult,
    f: FeasibleSetForm,
    s: Optional[LiftingStructure] = None,
    Cz: Optional[np.ndarray] = None,
    Dz: Optional[np.ndarray] = None,
    samples: int = 50,
    seed: int = 0,
    base: Optional[tuple[np.ndarray, np.ndarray]] = None,
    bound_type: BoundType = BoundType.CROSSCOV,
    rtol: float = 1e-6,
) -> AuditReport:
    """Close the loop with ``result``'s gain on sampled members and check the claim.

    Every sample must be Schur stable; for H2 and H∞ results the
    closed-loop norm must also stay within γ(1 + rtol). Input-output
    members are lifted by adding the shift structure J1, J2.

    Raises:
        PreconditionError: ``result`` is not feasible, or no member of the
            feasible set is known to sample around
    """
    if not result.feasible:
        raise PreconditionError("only feasible results can be audited")
    objective = result.objective
    if objective != "stab" and (Cz is None or Dz is None):
        raise PreconditionError(f"{objective} audit needs the performance output Cz, Dz")
    K = result.gain()
    gamma = result.gamma

    base = base or audit_base(f)
    if base is None:
        raise PreconditionError("no member of the feasible set found; pass base= explicitly")
    members = sample_members(f, base, samples, seed=seed)

    rhos: list[float] = []
    h2s: list[float] = []
    hinfs: list[float] = []
    violations: list[Violation] = []
    for i, (A, B) in enumerate(members):
        Az, Bz = (A + s.J1, B + s.J2) if s is not None else (A, B)
        A_K = Az + Bz @ K
        rho = spectral_radius(A_K)
        rhos.append(rho)

        def _violate(reason: str, value: Optional[float] = None) -> None:
            violations.append(
                Violation(
                    index=i,
                    reason=reason,
                    spectral_radius=rho,
                    norm=value,
                    A=MatrixJson.from_array(A),
                    B=MatrixJson.from_array(B),
                )
            )

        if rho >= 1.0:
            _violate("unstable")
            continue
        if objective == "stab" or gamma is None:
            continue
        C_K = Cz + Dz @ K
        try:
            value = h2_norm(A_K, f.Hz, C_K) if objective == "h2" else hinf_norm(A_K, f.Hz, C_K)
        except UnstableSystemError:
            _violate("unstable")
            continue
        (h2s if objective == "h2" else hinfs).append(value)
        if value > gamma * (1.0 + rtol):
            _violate("performance", value)

    report = AuditReport(
        objective=objective,
        bound_type=BoundType(bound_type).value,
        seed=seed,
        samples_tested=len(members),
        max_spectral_radius=max(rhos, default=0.0),
        max_h2=max(h2s) if h2s else None,
        max_hinf=max(hinfs) if hinfs else None,
        gamma=gamma,
        rtol=rtol,
        violations=violations,
    )
    log_event(
        "audit",
        {
            "objective": objective,
            "samples": report.samples_tested,
            "violations": len(violations),
            "max_spectral_radius": report.max_spectral_radius,
        },
    )
    return report
