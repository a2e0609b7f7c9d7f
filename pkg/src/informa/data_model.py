"""Trajectories, data matrices, instruments and noise bounds.

Everything here is immutable after construction: arrays are copied and
flagged read-only, so objects can be shared between worker threads.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DataFormatError,
    DimensionError,
    NonContiguousError,
    NotPositiveSemidefiniteError,
    PreconditionError,
)


def frozen_array(a, ndim: int = 2) -> np.ndarray:
    """Copy ``a`` into a read-only float array with at least ``ndim`` dims."""
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1 and ndim == 2:
        arr = arr.reshape(1, -1)
    arr.setflags(write=False)
    return arr


def psd_tolerance(reference: np.ndarray) -> float:
    """Scale-relative PSD tolerance: 1e-9 * (1 + ||reference||_2)."""
    scale = np.linalg.norm(reference, 2) if reference.size else 0.0
    return 1e-9 * (1.0 + float(scale))


def min_eig_sym(S: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part of S."""
    if S.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])


class TrajectoryKind(str, Enum):
    """What the second signal of a trajectory is."""

    INPUT_OUTPUT = "io"
    INPUT_STATE = "state"


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed samples u(t), and y(t) or x(t), for t = t0..t0+T-1."""

    kind: TrajectoryKind
    u: np.ndarray
    y_or_x: np.ndarray
    t0: int = 0
    noise: Optional[np.ndarray] = None

    def __post_init__(self):
        u = frozen_array(self.u)
        y = frozen_array(self.y_or_x)
        if u.shape[1] != y.shape[1]:
            raise DimensionError(
                f"u has {u.shape[1]} samples but the second signal has {y.shape[1]}"
            )
        if u.shape[0] < 1 or y.shape[0] < 1 or u.shape[1] < 1:
            raise DimensionError("trajectory needs m, p >= 1 and T >= 1")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y_or_x", y)
        object.__setattr__(self, "t0", int(self.t0))
        if self.noise is not None:
            e = frozen_array(self.noise)
            if e.shape != y.shape:
                raise DimensionError(f"logged noise has shape {e.shape}, expected {y.shape}")
            object.__setattr__(self, "noise", e)

    @property
    def m(self) -> int:
        return self.u.shape[0]

    @property
    def p(self) -> int:
        """Rows of the second signal (outputs p, or states n)."""
        return self.y_or_x.shape[0]

    @property
    def T(self) -> int:
        return self.u.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t0, self.t0 + self.T)

    def index_of(self, t: int) -> int:
        """Column index of time t."""
        return t - self.t0


@dataclass(frozen=True)
class TrajectorySchema:
    """Expected dimensions for a trajectory file; ``None`` means any."""

    kind: Optional[TrajectoryKind] = None
    m: Optional[int] = None
    p: Optional[int] = None


_HEADER_RE = re.compile(r"^([uyx])(\d+)$")


def _parse_header(header: list[str]) -> tuple[TrajectoryKind, int, int]:
    cols = [h.strip() for h in header]
    if not cols or cols[0] != "t":
        raise DataFormatError("first header column must be 't'")

    groups: dict[str, list[int]] = {"u": [], "y": [], "x": []}
    order: list[str] = []
    for name in cols[1:]:
        match = _HEADER_RE.match(name)
        if not match:
            raise DataFormatError(f"unrecognised column '{name}'")
        letter, idx = match.group(1), int(match.group(2))
        groups[letter].append(idx)
        if not order or order[-1] != letter:
            order.append(letter)

    if groups["y"] and groups["x"]:
        raise DataFormatError("a trajectory holds either y or x columns, not both")
    second = "y" if groups["y"] else "x"
    if order != ["u", second]:
        raise DataFormatError("columns must be t, u1..um, then y1..yp or x1..xn")
    for letter in ("u", second):
        if groups[letter] != list(range(1, len(groups[letter]) + 1)):
            raise DataFormatError(f"{letter} columns must be numbered 1..k in order")

    kind = TrajectoryKind.INPUT_OUTPUT if second == "y" else TrajectoryKind.INPUT_STATE
    return kind, len(groups["u"]), len(groups[second])


def load_trajectory(path: Path | str, schema: Optional[TrajectorySchema] = None) -> Trajectory:
    """Read a trajectory CSV with header ``t,u1..um,(y1..yp | x1..xn)``.

    Args:
        path: CSV file (UTF-8, comma separated, '.' decimal)
        schema: Optional expected kind and dimensions

    Returns:
        Trajectory with kind inferred from the header

    Raises:
        DataFormatError: malformed file
        NonContiguousError: time column with gaps or not increasing
        DimensionError: dimensions differ from ``schema``
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        rows = [row for row in csv.reader(f) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataFormatError(f"{path}: empty file")

    kind, m, p = _parse_header(rows[0])
    width = 1 + m + p
    body = rows[1:]
    if not body:
        raise DataFormatError(f"{path}: no samples")

    values = np.empty((len(body), width))
    for i, row in enumerate(body, start=2):
        if len(row) != width:
            raise DataFormatError(f"{path}:{i}: expected {width} fields, got {len(row)}")
        try:
            values[i - 2] = [float(c) for c in row]
        except ValueError as e:
            raise DataFormatError(f"{path}:{i}: {e}") from e

    t = values[:, 0]
    if not np.all(t == np.round(t)):
        raise DataFormatError(f"{path}: time column must hold integers")
    steps = np.diff(t)
    if np.any(steps != 1):
        bad = int(np.argmax(steps != 1))
        raise NonContiguousError(
            f"{path}: time jumps from {int(t[bad])} to {int(t[bad + 1])}"
        )

    if schema is not None:
        if schema.kind is not None and schema.kind != kind:
            raise DimensionError(f"{path}: expected {schema.kind.value} data, found {kind.value}")
        if schema.m is not None and schema.m != m:
            raise DimensionError(f"{path}: expected m={schema.m}, found {m}")
        if schema.p is not None and schema.p != p:
            raise DimensionError(f"{path}: expected {schema.p} output/state columns, found {p}")

    return Trajectory(
        kind=kind,
        u=values[:, 1 : 1 + m].T,
        y_or_x=values[:, 1 + m :].T,
        t0=int(t[0]),
    )


def save_trajectory(traj: Trajectory, path: Path | str) -> None:
    """Write ``traj`` in the CSV format read by :func:`load_trajectory`."""
    letter = "y" if traj.kind is TrajectoryKind.INPUT_OUTPUT else "x"
    header = ["t"] + [f"u{i + 1}" for i in range(traj.m)] + [f"{letter}{i + 1}" for i in range(traj.p)]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for k, t in enumerate(traj.times):
            writer.writerow(
                [str(int(t))]
                + [format(v, ".17g") for v in traj.u[:, k]]
                + [format(v, ".17g") for v in traj.y_or_x[:, k]]
            )


@dataclass(frozen=True)
class IoDataMatrices:
    """Stacked input-output data Z-, Y-, U- for lag order l."""

    Zm: np.ndarray
    Ym: np.ndarray
    Um: np.ndarray
    l: int
    t_start: int = 0

    def __post_init__(self):
        for name in ("Zm", "Ym", "Um"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))
        if not (self.Zm.shape[1] == self.Ym.shape[1] == self.Um.shape[1]):
            raise DimensionError("Z-, Y-, U- must have equal column counts")
        if self.Zm.shape[0] != (self.p + self.m) * self.l:
            raise DimensionError(
                f"Z- has {self.Zm.shape[0]} rows, expected (p+m)l = {(self.p + self.m) * self.l}"
            )

    @property
    def p(self) -> int:
        return self.Ym.shape[0]

    @property
    def m(self) -> int:
        return self.Um.shape[0]

    @property
    def n(self) -> int:
        return self.Zm.shape[0]

    @property
    def N(self) -> int:
        return self.Ym.shape[1]


@dataclass(frozen=True)
class StateDataMatrices:
    """Input-state data X-, X+, U-."""

    Xm: np.ndarray
    Xp: np.ndarray
    Um: np.ndarray
    t_start: int = 0

    def __post_init__(self):
        for name in ("Xm", "Xp", "Um"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))
        if not (self.Xm.shape[1] == self.Xp.shape[1] == self.Um.shape[1]):
            raise DimensionError("X-, X+, U- must have equal column counts")
        if self.Xm.shape[0] != self.Xp.shape[0]:
            raise DimensionError("X- and X+ must have the same number of rows")

    @property
    def n(self) -> int:
        return self.Xm.shape[0]

    @property
    def m(self) -> int:
        return self.Um.shape[0]

    @property
    def N(self) -> int:
        return self.Xm.shape[1]


def zeta_at(traj: Trajectory, t: int, l: int) -> np.ndarray:
    """ζ(t) = col(y(t-1), ..., y(t-l), u(t-1), ..., u(t-l)) from raw samples."""
    k = traj.index_of(t)
    if k - l < 0:
        raise PreconditionError(f"ζ({t}) needs samples back to t={t - l}")
    ys = [traj.y_or_x[:, k - j] for j in range(1, l + 1)]
    us = [traj.u[:, k - j] for j in range(1, l + 1)]
    return np.concatenate(ys + us)


def build_io_matrices(traj: Trajectory, l: int) -> IoDataMatrices:
    """Stack Z-, Y-, U- over the window t = max(t0 + l, 0) .. t0 + T - 1.

    Raises:
        PreconditionError: wrong trajectory kind, l < 1, or T <= l
    """
    if traj.kind is not TrajectoryKind.INPUT_OUTPUT:
        raise PreconditionError("build_io_matrices needs input-output data")
    if l < 1:
        raise PreconditionError("lag order l must be >= 1")
    t_start = max(traj.t0 + l, 0)
    first = traj.index_of(t_start)
    if first >= traj.T:
        raise PreconditionError(f"trajectory of length {traj.T} has no columns for lag order {l}")

    cols = np.arange(first, traj.T)
    y, u = traj.y_or_x, traj.u
    Zm = np.vstack([y[:, cols - j] for j in range(1, l + 1)] + [u[:, cols - j] for j in range(1, l + 1)])
    return IoDataMatrices(Zm=Zm, Ym=y[:, cols], Um=u[:, cols], l=l, t_start=t_start)


def build_state_matrices(traj: Trajectory) -> StateDataMatrices:
    """Window the state samples from t = max(t0, 0) into X-, X+, U-.

    Raises:
        PreconditionError: wrong trajectory kind or fewer than 2 samples
    """
    if traj.kind is not TrajectoryKind.INPUT_STATE:
        raise PreconditionError("build_state_matrices needs input-state data")
    t_start = max(traj.t0, 0)
    first = traj.index_of(t_start)
    if traj.T - first < 2:
        raise PreconditionError("input-state data needs at least 2 samples")
    x, u = traj.y_or_x, traj.u
    return StateDataMatrices(
        Xm=x[:, first:-1], Xp=x[:, first + 1 :], Um=u[:, first:-1], t_start=t_start
    )


class InstrumentKind(str, Enum):
    """How the instrumental signal r(t) is chosen."""

    IDENTITY = "identity"
    LAGGED_INPUT = "lagged"
    CUSTOM = "custom"


@dataclass(frozen=True)
class InstrumentSpec:
    """Recipe for an instrument matrix R-."""

    kind: InstrumentKind
    lags: tuple[int, ...] = ()
    matrix: Optional[np.ndarray] = field(default=None, compare=False)

    @classmethod
    def identity(cls) -> "InstrumentSpec":
        return cls(InstrumentKind.IDENTITY)

    @classmethod
    def lagged(cls, lags: Sequence[int]) -> "InstrumentSpec":
        lags = tuple(int(k) for k in lags)
        if not lags or min(lags) < 0:
            raise ValueError("lagged instrument needs a non-empty list of non-negative lags")
        return cls(InstrumentKind.LAGGED_INPUT, lags=lags)

    @classmethod
    def custom(cls, matrix) -> "InstrumentSpec":
        return cls(InstrumentKind.CUSTOM, matrix=frozen_array(matrix))

    @classmethod
    def parse(cls, text: str) -> "InstrumentSpec":
        """Parse a CLI instrument spec.

        Accepted forms: ``identity``, ``lags:0-9``, ``lags:0,1,3``,
        ``csv:<path>`` (M rows by N columns, no header).
        """
        text = text.strip()
        if text == "identity":
            return cls.identity()
        if text.startswith("lags:"):
            body = text[len("lags:") :]
            if re.fullmatch(r"\d+-\d+", body):
                lo, hi = (int(v) for v in body.split("-"))
                return cls.lagged(range(lo, hi + 1))
            try:
                return cls.lagged([int(v) for v in body.split(",")])
            except ValueError as e:
                raise DataFormatError(f"bad lag list '{body}'") from e
        if text.startswith("csv:"):
            return cls.custom(load_instrument_matrix(text[len("csv:") :]))
        raise DataFormatError(f"unknown instrument spec '{text}'")


def load_instrument_matrix(path: Path | str) -> np.ndarray:
    """Read a custom R- matrix: M rows by N columns, comma separated, no header."""
    try:
        R = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}") from e
    return R


@dataclass(frozen=True)
class Instrument:
    """Instrument matrix R- (M x N) with the recipe that produced it."""

    Rm: np.ndarray
    spec: InstrumentSpec

    def __post_init__(self):
        object.__setattr__(self, "Rm", frozen_array(self.Rm))

    @property
    def M(self) -> int:
        return self.Rm.shape[0]

    @property
    def N(self) -> int:
        return self.Rm.shape[1]


def build_instrument(
    traj: Trajectory,
    spec: InstrumentSpec,
    *,
    t_start: Optional[int] = None,
    n_cols: Optional[int] = None,
) -> Instrument:
    """Build R- on the data window ``t_start .. t_start + n_cols - 1``.

    Pass ``t_start=d.t_start, n_cols=d.N`` to align with data matrices ``d``.
    The default window is every sample from t = max(t0, 0).

    Raises:
        PreconditionError: lagged instrument without enough pre-samples
        DimensionError: custom matrix with the wrong column count
    """
    if t_start is None:
        t_start = max(traj.t0, 0)
    first = traj.index_of(t_start)
    if n_cols is None:
        n_cols = traj.T - first
    if first < 0 or first + n_cols > traj.T or n_cols < 1:
        raise PreconditionError("instrument window lies outside the trajectory")

    if spec.kind is InstrumentKind.IDENTITY:
        return Instrument(Rm=np.eye(n_cols), spec=spec)

    if spec.kind is InstrumentKind.LAGGED_INPUT:
        deepest = max(spec.lags)
        if first - deepest < 0:
            raise PreconditionError(
                f"lag {deepest} needs input samples from t={t_start - deepest}, "
                f"trajectory starts at t={traj.t0}"
            )
        cols = np.arange(first, first + n_cols)
        Rm = np.vstack([traj.u[:, cols - k] for k in spec.lags])
        return Instrument(Rm=Rm, spec=spec)

    assert spec.matrix is not None
    if spec.matrix.shape[1] != n_cols:
        raise DimensionError(
            f"custom instrument has {spec.matrix.shape[1]} columns, data window has {n_cols}"
        )
    return Instrument(Rm=spec.matrix, spec=spec)


@dataclass(frozen=True)
class NoiseBound:
    """Generalized cross-covariance bound

    [I; R-E-ᵀ]ᵀ [[Q11, Q12], [Q12ᵀ, Q22]] [I; R-E-ᵀ] ⪰ 0, with Q22 ≺ 0.
    """

    Q11: np.ndarray
    Q12: np.ndarray
    Q22: np.ndarray

    def __post_init__(self):
        Q11, Q12, Q22 = frozen_array(self.Q11), frozen_array(self.Q12), frozen_array(self.Q22)
        p, M = Q11.shape[0], Q22.shape[0]
        if Q11.shape != (p, p) or Q22.shape != (M, M) or Q12.shape != (p, M):
            raise DimensionError(f"inconsistent bound blocks {Q11.shape}, {Q12.shape}, {Q22.shape}")
        if not np.allclose(Q11, Q11.T) or not np.allclose(Q22, Q22.T):
            raise DimensionError("Q11 and Q22 must be symmetric")
        if np.linalg.eigvalsh(Q22)[-1] >= 0:
            raise NotPositiveSemidefiniteError("Q22 must be negative definite")
        object.__setattr__(self, "Q11", frozen_array(0.5 * (Q11 + Q11.T)))
        object.__setattr__(self, "Q12", Q12)
        object.__setattr__(self, "Q22", frozen_array(0.5 * (Q22 + Q22.T)))

    @property
    def p(self) -> int:
        return self.Q11.shape[0]

    @property
    def M(self) -> int:
        return self.Q22.shape[0]

    @property
    def tol_psd(self) -> float:
        return psd_tolerance(self.Q11)

    def as_matrix(self) -> np.ndarray:
        """Full symmetric (p+M) x (p+M) matrix Q."""
        return np.block([[self.Q11, self.Q12], [self.Q12.T, self.Q22]])


def _as_square(Hu, name: str = "Hu") -> np.ndarray:
    H = np.atleast_2d(np.asarray(Hu, dtype=float))
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"{name} must be square, got {H.shape}")
    return H


def make_cross_cov_bound(Hu, N: int, M: int) -> NoiseBound:
    """Bound (1/N) E-R-ᵀR-E-ᵀ ⪯ Hu, i.e. Q11 = N·Hu, Q12 = 0, Q22 = -I_M.

    Raises:
        NotPositiveSemidefiniteError: Hu is not PSD
    """
    H = _as_square(Hu)
    if not np.allclose(H, H.T):
        raise NotPositiveSemidefiniteError("Hu must be symmetric")
    if np.linalg.eigvalsh(H)[0] < -psd_tolerance(H):
        raise NotPositiveSemidefiniteError("Hu must be positive semidefinite")
    p = H.shape[0]
    return NoiseBound(Q11=N * H, Q12=np.zeros((p, M)), Q22=-np.eye(M))


def make_norm_bound(Hu, N: int) -> NoiseBound:
    """Norm bound E-E-ᵀ ⪯ N·Hu, to be paired with the identity instrument."""
    return make_cross_cov_bound(Hu, N, N)


def noise_bound_margin(Em: np.ndarray, R: Instrument, Q: NoiseBound) -> float:
    """Smallest eigenvalue of the bound's quadratic form at E-."""
    Em = np.atleast_2d(np.asarray(Em, dtype=float))
    if Em.shape != (Q.p, R.N) or R.M != Q.M:
        raise DimensionError(
            f"E- {Em.shape}, R- {R.Rm.shape} and bound (p={Q.p}, M={Q.M}) do not match"
        )
    G = R.Rm @ Em.T
    S = Q.Q11 + Q.Q12 @ G + G.T @ Q.Q12.T + G.T @ Q.Q22 @ G
    return min_eig_sym(S)


def check_noise_bound(Em: np.ndarray, R: Instrument, Q: NoiseBound) -> bool:
    """True iff E- satisfies the bound within ``Q.tol_psd``.

    Raises:
        DimensionError: shapes do not match
    """
    return noise_bound_margin(Em, R, Q) >= -Q.tol_psd
