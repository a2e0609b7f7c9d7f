"""System-norm oracles that never touch the LMI path."""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigvals, schur, solve_triangular, svdvals

from ..errors import DimensionError, UnstableSystemError

HINF_GRID_POINTS = 2048


def spectral_radius(A: np.ndarray) -> float:
    """max |λ| over the eigenvalues of A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"spectral radius needs a square matrix, got {A.shape}")
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def _require_stable(A: np.ndarray) -> None:
    rho = spectral_radius(A)
    if rho >= 1.0:
        raise UnstableSystemError(f"spectral radius {rho:.6g} >= 1")


def solve_stein(A: np.ndarray, Qm: np.ndarray) -> np.ndarray:
    """X with AᵀXA - X + Qm = 0 for Schur-stable A.

    A = U T Uᴴ (complex Schur) turns the equation into Tᴴ Y T - Y + Q̃ = 0,
    solved one column at a time: (T_jj Tᴴ - I) y_j = -q̃_j - Tᴴ Σ_{k<j} y_k T_kj,
    a lower-triangular system.

    Raises:
        UnstableSystemError: ρ(A) >= 1
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Qm = np.atleast_2d(np.asarray(Qm, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n) or Qm.shape != (n, n):
        raise DimensionError(f"A {A.shape} and Q {Qm.shape} must be square of equal size")
    _require_stable(A)

    T, U = schur(A.astype(complex), output="complex")
    Qt = U.conj().T @ Qm @ U
    Th = T.conj().T
    Y = np.zeros((n, n), dtype=complex)
    for j in range(n):
        rhs = -Qt[:, j]
        if j:
            rhs = rhs - Th @ (Y[:, :j] @ T[:j, j])
        Y[:, j] = solve_triangular(T[j, j] * Th - np.eye(n), rhs, lower=True)

    X = (U @ Y @ U.conj().T).real
    return 0.5 * (X + X.T)


def h2_norm(A_K: np.ndarray, Hz: np.ndarray, C_K: np.ndarray) -> float:
    """‖C_K (zI - A_K)⁻¹ H_z‖_H2 = sqrt(trace(H_zᵀ X H_z)), X from the Stein equation.

    Raises:
        UnstableSystemError: ρ(A_K) >= 1
    """
    A_K, Hz, C_K = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A_K, Hz, C_K))
    X = solve_stein(A_K, C_K.T @ C_K)
    return float(np.sqrt(max(np.trace(Hz.T @ X @ Hz), 0.0)))


def sigma_max(A: np.ndarray, B: np.ndarray, C: np.ndarray, omega: float) -> float:
    """Largest singular value of C (e^{jω} I - A)⁻¹ B."""
    n = A.shape[0]
    G = C @ np.linalg.solve(np.exp(1j * omega) * np.eye(n) - A, B)
    return float(svdvals(G)[0]) if G.size else 0.0


def _unit_circle_angles(A, B, C, gamma: float, tol: float) -> np.ndarray:
    """Angles of the unit-circle eigenvalues of the symplectic pencil for level γ.

    λ [[I, -γ⁻²BBᵀ], [0, Aᵀ]] - [[A, 0], [-CᵀC, I]] has an eigenvalue e^{jω}
    iff γ is a singular value of C(e^{jω}I - A)⁻¹B.
    """
    n = A.shape[0]
    I, O = np.eye(n), np.zeros((n, n))
    E = np.block([[I, -(B @ B.T) / gamma**2], [O, A.T]])
    F = np.block([[A, O], [-(C.T @ C), I]])
    lam = eigvals(F, E)
    lam = lam[np.isfinite(lam)]
    on_circle = lam[np.abs(np.abs(lam) - 1.0) < tol]
    return np.sort(np.abs(np.angle(on_circle)))


def hinf_norm(
    A_K: np.ndarray,
    Hz: np.ndarray,
    C_K: np.ndarray,
    tol: float = 1e-6,
    circle_tol: float = 1e-5,
    max_iter: int = 200,
) -> float:
    """‖C_K (zI - A_K)⁻¹ H_z‖_H∞ by bisection on γ.

    Each step asks whether the symplectic pencil for γ has unit-circle
    eigenvalues; candidates are confirmed by evaluating σ_max at their
    angles and midpoints, and any confirmed value raises the lower end.
    Returns the upper end once the relative gap is below ``tol``.

    Raises:
        UnstableSystemError: ρ(A_K) >= 1
    """
    A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A_K, Hz, C_K))
    _require_stable(A)
    if not np.any(B) or not np.any(C):
        return 0.0

    start_angles = [0.0, np.pi] + [abs(float(np.angle(lam))) for lam in np.linalg.eigvals(A)]
    lo = max(sigma_max(A, B, C, w) for w in start_angles)
    if lo == 0.0:
        lo = np.finfo(float).tiny

    def _exceeds(gamma: float) -> float:
        """Largest confirmed σ_max >= γ, or 0.0 when γ is an upper bound."""
        angles = _unit_circle_angles(A, B, C, gamma, circle_tol)
        if angles.size == 0:
            return 0.0
        checks = list(angles) + list(0.5 * (angles[1:] + angles[:-1]))
        best = max(sigma_max(A, B, C, w) for w in checks)
        return best if best >= gamma else 0.0

    hi = 2.0 * lo
    for _ in range(64):
        found = _exceeds(hi)
        if not found:
            break
        lo, hi = found, 2.0 * found
    for _ in range(max_iter):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        found = _exceeds(mid)
        if found:
            lo = max(lo, found)
        else:
            hi = mid
    return float(hi)


def hinf_norm_grid(
    A_K: np.ndarray,
    Hz: np.ndarray,
    C_K: np.ndarray,
    points: int = HINF_GRID_POINTS,
    refine: bool = True,
) -> float:
    """Frequency-grid lower estimate of the H∞ norm with one refinement pass around the peak.

    Raises:
        UnstableSystemError: ρ(A_K) >= 1
    """
    A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A_K, Hz, C_K))
    _require_stable(A)
    grid = np.linspace(0.0, np.pi, points)
    values = np.array([sigma_max(A, B, C, w) for w in grid])
    k = int(np.argmax(values))
    peak = float(values[k])
    if refine:
        lo_w, hi_w = grid[max(k - 1, 0)], grid[min(k + 1, points - 1)]
        fine = np.linspace(lo_w, hi_w, points)
        peak = max(peak, max(sigma_max(A, B, C, w) for w in fine))
    return peak
