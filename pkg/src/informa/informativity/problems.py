"""Informativity LMIs as SdpProblems.

All templates share the decision variables P (symmetric n x n), L (m x n),
α and β, and the data term α·Λ placed on the first 2n+m rows of the main
block. Λ enters normalized to unit spectral norm; ``meta["lambda_scale"]``
converts α back.

For input-state data J1 = 0, J2 = 0 and H_z = I.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DimensionError, PreconditionError
from ..lifting import LiftingStructure
from ..sdp.problem import SdpProblem, VarLayout, build_problem
from .forms import FeasibleSetForm

# Data border of the H∞ and H2 main blocks: the same noisy-signal matrix as
# in stabilization, Y- for input-output data and X+ for input-state data.
# FeasibleSetForm already carries it.
DATA_BORDER_SIGNAL = {"io": "Y-", "state": "X+"}


class SynthesisSettings(BaseModel):
    """Strictness margins and extraction limits."""

    model_config = ConfigDict(frozen=True)

    eps_pd: float = Field(default=1e-6, gt=0)
    eps_strict: float = Field(default=1e-8, gt=0)
    cond_max: float = Field(default=1e12, gt=1)
    slater_tol: Optional[float] = None


def _channels(f: FeasibleSetForm, s: Optional[LiftingStructure]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J1, J2, Hz) for the form's data kind."""
    if s is None:
        return np.zeros((f.n, f.n)), np.zeros((f.n, f.m)), f.Hz
    if s.n != f.n or s.m != f.m:
        raise DimensionError(f"lifting (n={s.n}, m={s.m}) does not match the form (n={f.n}, m={f.m})")
    return s.J1, s.J2, s.Hz


def _base_layout(n: int, m: int) -> VarLayout:
    return VarLayout().symmetric("P", n).matrix("L", m, n).scalar("alpha").scalar("beta")


def _padded_lambda(f: FeasibleSetForm, size: int) -> np.ndarray:
    k = 2 * f.n + f.m
    out = np.zeros((size, size))
    out[:k, :k] = f.normalized
    return out


def _margin_builders(n: int, settings: SynthesisSettings) -> list:
    return [
        ("P_margin", lambda v: v["P"] - settings.eps_pd * np.eye(n)),
        ("beta", lambda v: v["beta"] - settings.eps_strict),
        ("alpha", lambda v: v["alpha"]),
    ]


def _performance_matrices(f: FeasibleSetForm, Cz, Dz) -> tuple[np.ndarray, np.ndarray]:
    Cz = np.atleast_2d(np.asarray(Cz, dtype=float))
    Dz = np.atleast_2d(np.asarray(Dz, dtype=float))
    if Cz.shape[1] != f.n or Dz.shape != (Cz.shape[0], f.m):
        raise DimensionError(f"Cz {Cz.shape} and Dz {Dz.shape} do not match n={f.n}, m={f.m}")
    return Cz, Dz


def _meta(f: FeasibleSetForm, objective: str, **extra) -> dict:
    return {
        "objective": objective,
        "n": f.n,
        "m": f.m,
        "kind": f.kind.value,
        "lambda_scale": f.scale,
        "data_border": DATA_BORDER_SIGNAL[f.kind.value],
        **extra,
    }


def _stab_problem(f: FeasibleSetForm, s: Optional[LiftingStructure], settings: SynthesisSettings) -> SdpProblem:
    n, m = f.n, f.m
    J1, J2, _ = _channels(f, s)
    size = 3 * n + m
    Lam = _padded_lambda(f, size)

    def main(v):
        P, L, a, b = v["P"], v["L"], v["alpha"].item(), v["beta"].item()
        V = J1 @ P + J2 @ L
        Onm, Omn, Omm = np.zeros((n, m)), np.zeros((m, n)), np.zeros((m, m))
        On = np.zeros((n, n))
        M = np.block(
            [
                [P - b * np.eye(n), -V, Onm, V],
                [-V.T, -P, -L.T, On],
                [Omn, -L, Omm, L],
                [V.T, On, L.T, P],
            ]
        )
        return M - a * Lam

    name = "stab_io" if s is not None else "stab_state"
    return build_problem(
        name, _base_layout(n, m), [("main", main)] + _margin_builders(n, settings), meta=_meta(f, "stab")
    )


def stab_problem_io(
    f: FeasibleSetForm, s: LiftingStructure, settings: Optional[SynthesisSettings] = None
) -> SdpProblem:
    """Quadratic stabilization by output feedback: one main block of size 3n+m."""
    return _stab_problem(f, s, settings or SynthesisSettings())


def stab_problem_state(f: FeasibleSetForm, settings: Optional[SynthesisSettings] = None) -> SdpProblem:
    """Quadratic stabilization by state feedback (J1 = 0, J2 = 0)."""
    return _stab_problem(f, None, settings or SynthesisSettings())


def _performance_main(
    f: FeasibleSetForm,
    J1: np.ndarray,
    J2: np.ndarray,
    Cz: np.ndarray,
    Dz: np.ndarray,
    top_left,
    bottom_right,
    extra_rows: Optional[np.ndarray] = None,
):
    """Main block shared by H∞ and H2, rows n, n, m, n, p_z (plus optional extra rows).

    ``top_left(v)`` and ``bottom_right(v)`` give the (1,1) and (5,5) entries.
    ``extra_rows`` (k x n) couples a trailing γI_k block to the first row.
    """
    n, m, pz = f.n, f.m, Cz.shape[0]
    size = 3 * n + m + pz + (0 if extra_rows is None else extra_rows.shape[0])
    Lam = _padded_lambda(f, size)

    def main(v):
        P, L, a = v["P"], v["L"], v["alpha"].item()
        V = J1 @ P + J2 @ L
        F = Cz @ P + Dz @ L
        O = np.zeros
        rows = [
            [top_left(v), O((n, n)), O((n, m)), V, O((n, pz))],
            [O((n, n)), O((n, n)), O((n, m)), P, O((n, pz))],
            [O((m, n)), O((m, n)), O((m, m)), L, O((m, pz))],
            [V.T, P, L.T, P, F.T],
            [O((pz, n)), O((pz, n)), O((pz, m)), F, bottom_right(v)],
        ]
        if extra_rows is not None:
            k = extra_rows.shape[0]
            g = v["gamma"].item()
            rows = [r + [extra_rows.T if i == 0 else O((r[0].shape[0], k))] for i, r in enumerate(rows)]
            rows.append(
                [extra_rows, O((k, n)), O((k, m)), O((k, n)), O((k, pz)), g * np.eye(k)]
            )
        return np.block(rows) - a * Lam

    return main


def hinf_problem(
    f: FeasibleSetForm,
    s: Optional[LiftingStructure],
    Cz,
    Dz,
    gamma: Optional[float] = None,
    settings: Optional[SynthesisSettings] = None,
    linear_in_gamma: bool = False,
) -> SdpProblem:
    """Common H∞ control with performance γ.

    With ``linear_in_gamma`` γ becomes a decision variable (the γ⁻¹H_zH_zᵀ
    term is Schur-complemented into extra rows) and is minimized.

    Raises:
        PreconditionError: fixed γ <= 0, or no γ without ``linear_in_gamma``
    """
    settings = settings or SynthesisSettings()
    if not linear_in_gamma and (gamma is None or gamma <= 0):
        raise PreconditionError(f"gamma must be > 0, got {gamma}")
    n, m = f.n, f.m
    J1, J2, Hz = _channels(f, s)
    Cz, Dz = _performance_matrices(f, Cz, Dz)
    pz = Cz.shape[0]

    layout = _base_layout(n, m)
    if linear_in_gamma:
        layout = layout.scalar("gamma")

        def g_of(v):
            return v["gamma"].item()

        main = _performance_main(
            f, J1, J2, Cz, Dz,
            top_left=lambda v: v["P"] - v["beta"].item() * np.eye(n),
            bottom_right=lambda v: g_of(v) * np.eye(pz),
            extra_rows=Hz.T,
        )
    else:
        g = float(gamma)

        def g_of(v):
            return g

        main = _performance_main(
            f, J1, J2, Cz, Dz,
            top_left=lambda v: v["P"] - (Hz @ Hz.T) / g - v["beta"].item() * np.eye(n),
            bottom_right=lambda v: g * np.eye(pz),
        )

    def performance(v):
        F = Cz @ v["P"] + Dz @ v["L"]
        M = np.block([[v["P"], F.T], [F, g_of(v) * np.eye(pz)]])
        return M - settings.eps_pd * np.eye(n + pz)

    builders = [("main", main)] + _margin_builders(n, settings) + [("performance", performance)]
    objective = layout.linear({"gamma": 1.0}) if linear_in_gamma else None
    name = f"hinf_{'io' if s is not None else 'state'}"
    return build_problem(
        name,
        layout,
        builders,
        objective=objective,
        meta=_meta(f, "hinf", gamma=None if linear_in_gamma else float(gamma), linear_in_gamma=linear_in_gamma),
    )


def h2_problem(
    f: FeasibleSetForm,
    s: Optional[LiftingStructure],
    Cz,
    Dz,
    settings: Optional[SynthesisSettings] = None,
) -> SdpProblem:
    """Common H2 control, minimizing trace Z (the squared performance level)."""
    settings = settings or SynthesisSettings()
    n, m = f.n, f.m
    J1, J2, Hz = _channels(f, s)
    Cz, Dz = _performance_matrices(f, Cz, Dz)
    pz, pw = Cz.shape[0], Hz.shape[1]

    layout = _base_layout(n, m).symmetric("Z", pw)
    main = _performance_main(
        f, J1, J2, Cz, Dz,
        top_left=lambda v: v["P"] - v["beta"].item() * np.eye(n),
        bottom_right=lambda v: np.eye(pz),
    )

    def performance(v):
        F = Cz @ v["P"] + Dz @ v["L"]
        return np.block([[v["P"], F.T], [F, np.eye(pz)]]) - settings.eps_pd * np.eye(n + pz)

    def noise_gain(v):
        return np.block([[v["Z"], Hz.T], [Hz, v["P"]]])

    builders = (
        [("main", main)]
        + _margin_builders(n, settings)
        + [("performance", performance), ("noise_gain", noise_gain)]
    )
    name = f"h2_{'io' if s is not None else 'state'}"
    return build_problem(
        name,
        layout,
        builders,
        objective=layout.linear({"Z": np.eye(pw)}),
        meta=_meta(f, "h2"),
    )
