"""Quadratic forms describing every system consistent with the data.

A pair (A, B) of n x n and n x m matrices belongs to the feasible set iff

    [I A B] Λ [I A B]ᵀ ⪰ 0

with Λ symmetric of size 2n+m. For input-output data (A, B) are the
parameter parts (Λ_e, B_e) of the lifted realization.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from ..data_model import (
    Instrument,
    InstrumentSpec,
    IoDataMatrices,
    NoiseBound,
    StateDataMatrices,
    TrajectoryKind,
    frozen_array,
    psd_tolerance,
)
from ..errors import DimensionError
from ..lifting import LiftingStructure

DataMatrices = Union[IoDataMatrices, StateDataMatrices]


def rank_guideline(l: int, p: int, m: int) -> int:
    """Instrument count pl + m(l+1) below which R-[Z-ᵀ U-ᵀ] cannot have full column rank."""
    return p * l + m * (l + 1)


@dataclass(frozen=True)
class FeasibleSetForm:
    """Λ with its block sizes and the data it came from."""

    Lambda: np.ndarray
    n: int
    m: int
    kind: TrajectoryKind
    rank_flag: bool
    Hz: np.ndarray
    ls_estimate: Optional[np.ndarray] = None
    data: Optional[DataMatrices] = field(default=None, compare=False, repr=False)
    instrument: Optional[Instrument] = field(default=None, compare=False, repr=False)
    bound: Optional[NoiseBound] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        L = np.asarray(self.Lambda, dtype=float)
        size = 2 * self.n + self.m
        if L.shape != (size, size):
            raise DimensionError(f"Λ has shape {L.shape}, expected ({size}, {size})")
        object.__setattr__(self, "Lambda", frozen_array(0.5 * (L + L.T)))
        object.__setattr__(self, "Hz", frozen_array(self.Hz))
        if self.ls_estimate is not None:
            object.__setattr__(self, "ls_estimate", frozen_array(self.ls_estimate))

    @property
    def Lambda11(self) -> np.ndarray:
        return self.Lambda[: self.n, : self.n]

    @property
    def Lambda12(self) -> np.ndarray:
        return self.Lambda[: self.n, self.n :]

    @property
    def Lambda22(self) -> np.ndarray:
        return self.Lambda[self.n :, self.n :]

    @property
    def scale(self) -> float:
        """Spectral norm of Λ (1.0 for the zero matrix)."""
        s = float(np.linalg.norm(self.Lambda, 2))
        return s if s > 0 else 1.0

    @property
    def normalized(self) -> np.ndarray:
        return self.Lambda / self.scale

    @property
    def tol_psd(self) -> float:
        return psd_tolerance(self.Lambda)

    def quadratic(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """[I A B] Λ [I A B]ᵀ."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape != (self.n, self.n) or B.shape != (self.n, self.m):
            raise DimensionError(f"(A, B) shapes {A.shape}, {B.shape} do not match n={self.n}, m={self.m}")
        G = np.hstack([np.eye(self.n), A, B])
        S = G @ self.Lambda @ G.T
        return 0.5 * (S + S.T)

    def positive_inertia(self, tol: Optional[float] = None) -> int:
        tol = self.tol_psd if tol is None else tol
        return int(np.sum(np.linalg.eigvalsh(self.Lambda) > tol))


def _border(top: np.ndarray, Zm: np.ndarray, Um: np.ndarray, R: np.ndarray) -> np.ndarray:
    """W = [[I, top·R-ᵀ], [0, -Z-R-ᵀ], [0, -U-R-ᵀ]]."""
    n, m = Zm.shape[0], Um.shape[0]
    return np.block(
        [
            [np.eye(n), top @ R.T],
            [np.zeros((n, n)), -Zm @ R.T],
            [np.zeros((m, n)), -Um @ R.T],
        ]
    )


def _noise_weight(Q: NoiseBound, Hz: np.ndarray) -> np.ndarray:
    """Q_e = [[Hz Q11 Hzᵀ, Hz Q12], [Q12ᵀ Hzᵀ, Q22]]."""
    return np.block([[Hz @ Q.Q11 @ Hz.T, Hz @ Q.Q12], [Q.Q12.T @ Hz.T, Q.Q22]])


def _full_column_rank(M: np.ndarray) -> bool:
    return bool(M.shape[0] >= M.shape[1] and np.linalg.matrix_rank(M) == M.shape[1])


def _check_window(N: int, R: Instrument, Q: NoiseBound, p: int) -> None:
    if R.N != N:
        raise DimensionError(f"instrument has {R.N} columns, data window has {N}")
    if Q.M != R.M or Q.p != p:
        raise DimensionError(f"bound (p={Q.p}, M={Q.M}) does not match noise rows {p} and instrument rows {R.M}")


def build_feasible_form_io(
    d: IoDataMatrices, R: Instrument, Q: NoiseBound, s: LiftingStructure
) -> FeasibleSetForm:
    """Λ for input-output data: W Q_e Wᵀ with top border H_z Y- R-ᵀ.

    Raises:
        DimensionError: data, instrument, bound and lifting disagree
    """
    if (s.l, s.p, s.m) != (d.l, d.p, d.m):
        raise DimensionError(f"lifting (l={s.l}, p={s.p}, m={s.m}) does not match the data")
    _check_window(d.N, R, Q, d.p)
    W = _border(s.Hz @ d.Ym, d.Zm, d.Um, R.Rm)
    Lam = W @ _noise_weight(Q, s.Hz) @ W.T
    regressors = np.vstack([d.Zm, d.Um])
    ls = s.Hz @ d.Ym @ np.linalg.pinv(regressors)
    return FeasibleSetForm(
        Lambda=Lam,
        n=d.n,
        m=d.m,
        kind=TrajectoryKind.INPUT_OUTPUT,
        rank_flag=_full_column_rank(R.Rm @ regressors.T),
        Hz=s.Hz,
        ls_estimate=ls,
        data=d,
        instrument=R,
        bound=Q,
    )


def build_feasible_form_state(d: StateDataMatrices, R: Instrument, Q: NoiseBound) -> FeasibleSetForm:
    """Λ_X for input-state data: H_z = I, X+ on the border, X- as regressor.

    Raises:
        DimensionError: data, instrument and bound disagree
    """
    _check_window(d.N, R, Q, d.n)
    W = _border(d.Xp, d.Xm, d.Um, R.Rm)
    Lam = W @ _noise_weight(Q, np.eye(d.n)) @ W.T
    regressors = np.vstack([d.Xm, d.Um])
    return FeasibleSetForm(
        Lambda=Lam,
        n=d.n,
        m=d.m,
        kind=TrajectoryKind.INPUT_STATE,
        rank_flag=_full_column_rank(R.Rm @ regressors.T),
        Hz=np.eye(d.n),
        ls_estimate=d.Xp @ np.linalg.pinv(regressors),
        data=d,
        instrument=R,
        bound=Q,
    )


def feasible_form_from_norm_bound(d: StateDataMatrices, Hu) -> FeasibleSetForm:
    """Norm-bound set {(A, B) : (X+ - AX- - BU-)(·)ᵀ ⪯ N·Hu} written out block by block."""
    Hu = np.atleast_2d(np.asarray(Hu, dtype=float))
    Xp, Xm, Um, N = d.Xp, d.Xm, d.Um, d.N
    Lam = np.block(
        [
            [N * Hu - Xp @ Xp.T, Xp @ Xm.T, Xp @ Um.T],
            [Xm @ Xp.T, -Xm @ Xm.T, -Xm @ Um.T],
            [Um @ Xp.T, -Um @ Xm.T, -Um @ Um.T],
        ]
    )
    regressors = np.vstack([Xm, Um])
    return FeasibleSetForm(
        Lambda=Lam,
        n=d.n,
        m=d.m,
        kind=TrajectoryKind.INPUT_STATE,
        rank_flag=_full_column_rank(regressors.T),
        Hz=np.eye(d.n),
        ls_estimate=Xp @ np.linalg.pinv(regressors),
        data=d,
    )


def singleton_form(A: np.ndarray, B: np.ndarray, Hz: Optional[np.ndarray] = None) -> FeasibleSetForm:
    """Zero-noise form whose feasible set is exactly {(A, B)}.

    Built as noiseless input-state data X- = [I 0], U- = [0 I], X+ = [A B]
    with R- = I and Q = (0, 0, -I).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n, m = B.shape
    d = StateDataMatrices(
        Xm=np.hstack([np.eye(n), np.zeros((n, m))]),
        Xp=np.hstack([A, B]),
        Um=np.hstack([np.zeros((m, n)), np.eye(m)]),
    )
    R = Instrument(Rm=np.eye(n + m), spec=InstrumentSpec.identity())
    Q = NoiseBound(Q11=np.zeros((n, n)), Q12=np.zeros((n, n + m)), Q22=-np.eye(n + m))
    form = build_feasible_form_state(d, R, Q)
    return form if Hz is None else replace(form, Hz=Hz)


@dataclass(frozen=True)
class SlaterReport:
    """Outcome of the generalized Slater check."""

    holds: bool
    positive_inertia: int
    required_inertia: int
    witness: Optional[np.ndarray] = None
    witness_source: Optional[str] = None
    best_margin: float = float("-inf")

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "positive_inertia": self.positive_inertia,
            "required_inertia": self.required_inertia,
            "witness": None if self.witness is None else self.witness.tolist(),
            "witness_source": self.witness_source,
            "best_margin": None if not np.isfinite(self.best_margin) else self.best_margin,
        }


def default_slater_candidates(
    f: FeasibleSetForm, truth: Optional[tuple[np.ndarray, np.ndarray]] = None
) -> list[tuple[str, np.ndarray]]:
    """Weighted center -Λ22⁺Λ21, least squares, optional truth, and zero."""
    candidates: list[tuple[str, np.ndarray]] = []
    center = -np.linalg.pinv(f.Lambda22) @ f.Lambda12.T
    candidates.append(("weighted_center", center))
    if f.ls_estimate is not None:
        candidates.append(("least_squares", f.ls_estimate.T))
    if truth is not None:
        A, B = truth
        candidates.append(("truth", np.hstack([np.atleast_2d(A), np.atleast_2d(B)]).T))
    candidates.append(("zero", np.zeros((f.n + f.m, f.n))))
    return candidates


def slater_diagnostics(
    f: FeasibleSetForm,
    candidates: Optional[Sequence[tuple[str, np.ndarray] | np.ndarray]] = None,
    tol: Optional[float] = None,
) -> SlaterReport:
    """Look for Z with [I; Z]ᵀ Λ [I; Z] ≻ 0 among ``candidates``.

    At least n positive eigenvalues of Λ are necessary; the inertia is
    always reported.
    """
    tol = f.tol_psd if tol is None else tol
    if candidates is None:
        candidates = default_slater_candidates(f)
    inertia = f.positive_inertia(tol)

    best_margin, best, best_source = float("-inf"), None, None
    for i, item in enumerate(candidates):
        source, Z = item if isinstance(item, tuple) else (f"candidate_{i}", item)
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if Z.shape != (f.n + f.m, f.n):
            raise DimensionError(f"Slater candidate '{source}' has shape {Z.shape}")
        G = np.vstack([np.eye(f.n), Z])
        S = G.T @ f.Lambda @ G
        margin = float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])
        if margin > best_margin:
            best_margin, best, best_source = margin, Z, source

    holds = inertia >= f.n and best_margin > tol
    return SlaterReport(
        holds=holds,
        positive_inertia=inertia,
        required_inertia=f.n,
        witness=best if holds else None,
        witness_source=best_source if holds else None,
        best_margin=best_margin,
    )
