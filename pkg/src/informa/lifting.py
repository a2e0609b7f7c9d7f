"""Non-minimal state-space lifting of ARX systems.

The lifted state is ζ(t) = col(y(t-1..t-l), u(t-1..t-l)) of order
n = (p+m)l. Its row layout, used by every structural matrix here:

    [0, p)          parameter rows (Ā, B̄ and B0 live here)
    [p, pl)         y shift register
    [pl, pl+m)      u(t) injection (J2)
    [pl+m, n)       u shift register
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from .data_model import Trajectory, TrajectoryKind, frozen_array
from .errors import DataFormatError, DimensionError, ObservabilityError, PreconditionError


@dataclass(frozen=True)
class ArxModel:
    """A(q⁻¹)y(t) = B(q⁻¹)u(t) + e(t) with A(ξ) = I + ΣAᵢξⁱ, B(ξ) = ΣBᵢξⁱ."""

    A_coeffs: tuple[np.ndarray, ...]
    B_coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        A = tuple(frozen_array(a) for a in self.A_coeffs)
        B = tuple(frozen_array(b) for b in self.B_coeffs)
        if len(A) < 1 or len(B) != len(A) + 1:
            raise DimensionError(f"need l >= 1 A-coefficients and l+1 B-coefficients, got {len(A)}, {len(B)}")
        p, m = B[0].shape
        if any(a.shape != (p, p) for a in A) or any(b.shape != (p, m) for b in B):
            raise DimensionError("coefficient shapes must be p x p (A) and p x m (B)")
        object.__setattr__(self, "A_coeffs", A)
        object.__setattr__(self, "B_coeffs", B)

    @property
    def l(self) -> int:
        return len(self.A_coeffs)

    @property
    def p(self) -> int:
        return self.B_coeffs[0].shape[0]

    @property
    def m(self) -> int:
        return self.B_coeffs[0].shape[1]

    @property
    def n(self) -> int:
        return (self.p + self.m) * self.l

    @property
    def Abar(self) -> np.ndarray:
        """row(-A1, ..., -Al)."""
        return np.hstack([-a for a in self.A_coeffs])

    @property
    def Bbar(self) -> np.ndarray:
        """row(B1, ..., Bl)."""
        return np.hstack(self.B_coeffs[1:])

    @property
    def theta(self) -> np.ndarray:
        """[Ā B̄], the p x n parameter block multiplying ζ(t)."""
        return np.hstack([self.Abar, self.Bbar])

    def frequency_response(self, z: complex) -> np.ndarray:
        """A(z⁻¹)⁻¹ B(z⁻¹)."""
        xi = 1.0 / z
        A = np.eye(self.p, dtype=complex) + sum(a * xi ** (i + 1) for i, a in enumerate(self.A_coeffs))
        B = sum(b * xi**i for i, b in enumerate(self.B_coeffs))
        return np.linalg.solve(A, B)


@dataclass(frozen=True)
class LiftingStructure:
    """Binary structure of the lifting: A_z = Λ_e + J1, B_z = B_e + J2."""

    l: int
    p: int
    m: int
    J1: np.ndarray
    J2: np.ndarray
    Hz: np.ndarray

    @property
    def n(self) -> int:
        return (self.p + self.m) * self.l

    @property
    def param_row_count(self) -> int:
        return self.p

    def embed(self, theta: np.ndarray) -> np.ndarray:
        """Place a p-row parameter block into n rows (zero rows elsewhere)."""
        return self.Hz @ np.atleast_2d(theta)


def lift_structure(l: int, p: int, m: int) -> LiftingStructure:
    """Build J1 (n x n), J2 (n x m) and H_z (n x p).

    Raises:
        PreconditionError: l < 1 or p, m < 1
    """
    if l < 1 or p < 1 or m < 1:
        raise PreconditionError(f"lifting needs l, p, m >= 1 (got l={l}, p={p}, m={m})")
    n = (p + m) * l
    J1 = np.zeros((n, n))
    J1[p : p * l, 0 : p * (l - 1)] = np.eye(p * (l - 1))
    J1[p * l + m : n, p * l : p * l + m * (l - 1)] = np.eye(m * (l - 1))
    J2 = np.zeros((n, m))
    J2[p * l : p * l + m, :] = np.eye(m)
    Hz = np.zeros((n, p))
    Hz[:p, :] = np.eye(p)
    return LiftingStructure(
        l=l, p=p, m=m, J1=frozen_array(J1), J2=frozen_array(J2), Hz=frozen_array(Hz)
    )


@dataclass(frozen=True)
class StateSpaceModel:
    """x(t+1) = Az x + Bz u + Hz e,  z(t) = Cz x + Dz u."""

    Az: np.ndarray
    Bz: np.ndarray
    Hz: np.ndarray
    Cz: np.ndarray
    Dz: np.ndarray

    def __post_init__(self):
        for name in ("Az", "Bz", "Hz", "Cz", "Dz"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))
        n = self.Az.shape[0]
        if (
            self.Az.shape != (n, n)
            or self.Bz.shape[0] != n
            or self.Hz.shape[0] != n
            or self.Cz.shape[1] != n
            or self.Dz.shape != (self.Cz.shape[0], self.Bz.shape[1])
        ):
            raise DimensionError("inconsistent state-space dimensions")

    @property
    def n(self) -> int:
        return self.Az.shape[0]

    @property
    def m(self) -> int:
        return self.Bz.shape[1]


def default_performance_output(l: int, p: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """C_z selecting y(t-1) from ζ(t), D_z = 0."""
    n = (p + m) * l
    Cz = np.zeros((p, n))
    Cz[:, :p] = np.eye(p)
    return Cz, np.zeros((p, m))


def lift_arx(
    model: ArxModel,
    Cz: Optional[np.ndarray] = None,
    Dz: Optional[np.ndarray] = None,
) -> StateSpaceModel:
    """Non-minimal realization A_z = H_z[Ā B̄] + J1, B_z = H_z B0 + J2."""
    s = lift_structure(model.l, model.p, model.m)
    if Cz is None or Dz is None:
        Cz_default, Dz_default = default_performance_output(model.l, model.p, model.m)
        Cz = Cz_default if Cz is None else Cz
        Dz = Dz_default if Dz is None else Dz
    return StateSpaceModel(
        Az=s.embed(model.theta) + s.J1,
        Bz=s.embed(model.B_coeffs[0]) + s.J2,
        Hz=s.Hz,
        Cz=np.atleast_2d(Cz),
        Dz=np.atleast_2d(Dz),
    )


def observability_matrix(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    blocks = [C]
    for _ in range(A.shape[0] - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks)


def arx_from_state_space(A0: np.ndarray, B0: np.ndarray, C0: np.ndarray) -> ArxModel:
    """Scalar-output ARX model with A⁻¹(ξ)B(ξ) = C0(qI - A0)⁻¹B0.

    A(ξ) = det(I - ξA0) and B(ξ) follows from matching Markov parameters
    h_k = C0 A0^(k-1) B0: B_k = Σ_{i<k} a_i h_(k-i).

    Raises:
        PreconditionError: more than one output
        ObservabilityError: (A0, C0) not observable
    """
    A0, B0, C0 = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A0, B0, C0))
    n0 = A0.shape[0]
    if A0.shape != (n0, n0) or B0.shape[0] != n0 or C0.shape[1] != n0:
        raise DimensionError("A0, B0, C0 dimensions do not match")
    if C0.shape[0] != 1:
        raise PreconditionError("state-space to ARX conversion supports a single output only")
    if np.linalg.matrix_rank(observability_matrix(A0, C0)) < n0:
        raise ObservabilityError("(A0, C0) is not observable")

    a = np.real(np.poly(A0))  # det(λI - A0) = λⁿ + a1 λⁿ⁻¹ + ... + an
    markov = [C0 @ np.linalg.matrix_power(A0, k - 1) @ B0 for k in range(1, n0 + 1)]
    m = B0.shape[1]
    B_coeffs = [np.zeros((1, m))]
    for k in range(1, n0 + 1):
        B_coeffs.append(sum(a[i] * markov[k - i - 1] for i in range(k)))
    A_coeffs = [np.array([[a[i]]]) for i in range(1, n0 + 1)]
    return ArxModel(A_coeffs=tuple(A_coeffs), B_coeffs=tuple(B_coeffs))


def state_space_frequency_response(A: np.ndarray, B: np.ndarray, C: np.ndarray, z: complex) -> np.ndarray:
    """C(zI - A)⁻¹B."""
    return C @ np.linalg.solve(z * np.eye(A.shape[0]) - A, B)


@dataclass(frozen=True)
class ControllerRealization:
    """C(q⁻¹)u(t) = D(q⁻¹)y(t) with C(ξ) = I + ΣCᵢξⁱ, D(ξ) = ΣDᵢξⁱ."""

    Cbar: np.ndarray
    Dbar: np.ndarray
    l: int
    p: int
    m: int

    @property
    def C_coeffs(self) -> list[np.ndarray]:
        """C1..Cl (Cᵢ = -C̄ block i)."""
        m = self.m
        return [-self.Cbar[:, i * m : (i + 1) * m] for i in range(self.l)]

    @property
    def D_coeffs(self) -> list[np.ndarray]:
        """D1..Dl (Dᵢ = D̄ block i)."""
        p = self.p
        return [self.Dbar[:, i * p : (i + 1) * p] for i in range(self.l)]

    def C_polynomial(self) -> list[np.ndarray]:
        """Coefficients of C(ξ), constant term first."""
        return [np.eye(self.m)] + self.C_coeffs

    def D_polynomial(self) -> list[np.ndarray]:
        """Coefficients of D(ξ), constant term first."""
        return [np.zeros((self.m, self.p))] + self.D_coeffs

    def gain(self) -> np.ndarray:
        """K = [D̄ C̄]."""
        return np.hstack([self.Dbar, self.Cbar])


def controller_from_gain(K: np.ndarray, l: int, p: int, m: int) -> ControllerRealization:
    """Split K = [D̄ C̄] into the controller difference equation.

    Raises:
        DimensionError: K is not m x (p+m)l
    """
    K = np.atleast_2d(np.asarray(K, dtype=float))
    n = (p + m) * l
    if K.shape != (m, n):
        raise DimensionError(f"K has shape {K.shape}, expected ({m}, {n})")
    return ControllerRealization(
        Cbar=frozen_array(K[:, p * l :]), Dbar=frozen_array(K[:, : p * l]), l=l, p=p, m=m
    )


def closed_loop(ss: StateSpaceModel, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(A_cl, C_cl) = (Az + Bz K, Cz + Dz K)."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    if K.shape != (ss.m, ss.n):
        raise DimensionError(f"K has shape {K.shape}, expected ({ss.m}, {ss.n})")
    return ss.Az + ss.Bz @ K, ss.Cz + ss.Dz @ K


def controller_state_permutation(l: int, p: int, m: int) -> np.ndarray:
    """Matrix [[0, I], [I, 0]] mapping ζ to ζ_c = col(u-lags, y-lags)."""
    py, mu = p * l, m * l
    Pi = np.zeros((py + mu, py + mu))
    Pi[:mu, py:] = np.eye(mu)
    Pi[mu:, :py] = np.eye(py)
    return Pi


def simulate(
    system: ArxModel | StateSpaceModel,
    u: np.ndarray,
    e: np.ndarray,
    initial: Optional[np.ndarray] = None,
    pre_samples: Optional[int] = None,
) -> Trajectory:
    """Run the exact recursion for T = u.shape[1] steps and log the noise.

    For an ArxModel the result is input-output data; ``initial`` is ζ(0)
    and ``pre_samples`` (default l) history columns t < 0 are prepended
    (samples older than ζ(0) are zero). For a StateSpaceModel the result
    is input-state data with x(0) = ``initial``; pre-sample columns are zero.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    T = u.shape[1]
    if e.shape[1] != T:
        raise DimensionError("u and e must have the same length")

    if isinstance(system, ArxModel):
        return _simulate_arx(system, u, e, initial, system.l if pre_samples is None else pre_samples)
    return _simulate_state(system, u, e, initial, pre_samples or 0)


def _simulate_arx(model: ArxModel, u, e, zeta0, pre: int) -> Trajectory:
    l, p, m, T = model.l, model.p, model.m, u.shape[1]
    if u.shape[0] != m or e.shape[0] != p:
        raise DimensionError("input/noise rows do not match the model")
    depth = max(pre, l)
    y_all = np.zeros((p, depth + T))
    u_all = np.zeros((m, depth + T))
    if zeta0 is not None:
        zeta0 = np.asarray(zeta0, dtype=float).ravel()
        for j in range(1, l + 1):
            y_all[:, depth - j] = zeta0[(j - 1) * p : j * p]
            u_all[:, depth - j] = zeta0[p * l + (j - 1) * m : p * l + j * m]
    u_all[:, depth:] = u

    for t in range(T):
        k = depth + t
        yk = model.B_coeffs[0] @ u_all[:, k] + e[:, t]
        for i in range(1, l + 1):
            yk += -model.A_coeffs[i - 1] @ y_all[:, k - i] + model.B_coeffs[i] @ u_all[:, k - i]
        y_all[:, k] = yk

    keep = depth - pre
    noise = np.hstack([np.zeros((p, pre)), e])
    return Trajectory(
        kind=TrajectoryKind.INPUT_OUTPUT,
        u=u_all[:, keep:],
        y_or_x=y_all[:, keep:],
        t0=-pre,
        noise=noise,
    )


def _simulate_state(ss: StateSpaceModel, u, e, x0, pre: int) -> Trajectory:
    n, T = ss.n, u.shape[1]
    if u.shape[0] != ss.m or e.shape[0] != ss.Hz.shape[1]:
        raise DimensionError("input/noise rows do not match the model")
    x = np.zeros((n, T))
    if x0 is not None:
        x[:, 0] = np.asarray(x0, dtype=float).ravel()
    for t in range(T - 1):
        x[:, t + 1] = ss.Az @ x[:, t] + ss.Bz @ u[:, t] + ss.Hz @ e[:, t]
    noise = ss.Hz @ e
    return Trajectory(
        kind=TrajectoryKind.INPUT_STATE,
        u=np.hstack([np.zeros((ss.m, pre)), u]),
        y_or_x=np.hstack([np.zeros((n, pre)), x]),
        t0=-pre,
        noise=np.hstack([np.zeros((n, pre)), noise]),
    )


def simulate_closed_loop(
    model: ArxModel,
    controller: ControllerRealization,
    e: np.ndarray,
    zeta0: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Co-simulate plant A(q⁻¹)y = B(q⁻¹)u + e against C(q⁻¹)u = D(q⁻¹)y.

    Returns:
        (y, u, zetas) with zetas[:, t] = ζ(t) for t = 0..T
    """
    e = np.atleast_2d(np.asarray(e, dtype=float))
    l, p, m, T = model.l, model.p, model.m, e.shape[1]
    y_hist = np.zeros((p, l + T))
    u_hist = np.zeros((m, l + T))
    if zeta0 is not None:
        zeta0 = np.asarray(zeta0, dtype=float).ravel()
        for j in range(1, l + 1):
            y_hist[:, l - j] = zeta0[(j - 1) * p : j * p]
            u_hist[:, l - j] = zeta0[p * l + (j - 1) * m : p * l + j * m]

    C_coeffs, D_coeffs = controller.C_coeffs, controller.D_coeffs
    for t in range(T):
        k = l + t
        uk = np.zeros(m)
        for i in range(1, l + 1):
            uk += D_coeffs[i - 1] @ y_hist[:, k - i] - C_coeffs[i - 1] @ u_hist[:, k - i]
        u_hist[:, k] = uk
        yk = model.B_coeffs[0] @ uk + e[:, t]
        for i in range(1, l + 1):
            yk += -model.A_coeffs[i - 1] @ y_hist[:, k - i] + model.B_coeffs[i] @ u_hist[:, k - i]
        y_hist[:, k] = yk

    zetas = np.empty(((p + m) * l, T + 1))
    for t in range(T + 1):
        k = l + t
        zetas[:, t] = np.concatenate(
            [y_hist[:, k - j] for j in range(1, l + 1)] + [u_hist[:, k - j] for j in range(1, l + 1)]
        )
    return y_hist[:, l:], u_hist[:, l:], zetas


class ArxModelFile(BaseModel):
    """JSON model file holding ARX coefficients."""

    l: int
    p: int
    m: int
    A_coeffs: list[list[list[float]]]
    B_coeffs: list[list[list[float]]]


class StateSpaceModelFile(BaseModel):
    """JSON model file holding (A0, B0, C0), converted to ARX on load."""

    A0: list[list[float]]
    B0: list[list[float]]
    C0: list[list[float]]


def load_model(path: Path | str) -> ArxModel:
    """Read an ARX model from ``{l,p,m,A_coeffs,B_coeffs}`` or ``{A0,B0,C0}`` JSON.

    Raises:
        DataFormatError: unreadable file or neither schema matches
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise DataFormatError(f"{path}: {e}") from e

    try:
        if "A0" in data:
            ss = StateSpaceModelFile.model_validate(data)
            return arx_from_state_space(np.array(ss.A0), np.array(ss.B0), np.array(ss.C0))
        arx = ArxModelFile.model_validate(data)
    except ValidationError as e:
        raise DataFormatError(f"{path}: {e}") from e

    model = ArxModel(
        A_coeffs=tuple(np.array(a) for a in arx.A_coeffs),
        B_coeffs=tuple(np.array(b) for b in arx.B_coeffs),
    )
    if (model.l, model.p, model.m) != (arx.l, arx.p, arx.m):
        raise DataFormatError(f"{path}: declared (l, p, m) do not match the coefficients")
    return model


def dump_model(model: ArxModel) -> dict:
    """Inverse of :func:`load_model` for ARX models."""
    return ArxModelFile(
        l=model.l,
        p=model.p,
        m=model.m,
        A_coeffs=[a.tolist() for a in model.A_coeffs],
        B_coeffs=[b.tolist() for b in model.B_coeffs],
    ).model_dump()


def impulse_response(model: ArxModel, length: int, channel: int = 0) -> np.ndarray:
    """First ``length`` samples of y for u = δ on input ``channel`` and e = 0."""
    u = np.zeros((model.m, length))
    u[channel, 0] = 1.0
    traj = simulate(model, u, np.zeros((model.p, length)), pre_samples=0)
    return traj.y_or_x
