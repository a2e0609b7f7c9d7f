"""Membership in the feasible set and sampling from it."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import cycle
from typing import Optional, Sequence

import numpy as np

from ..data_model import IoDataMatrices, check_noise_bound
from ..errors import PreconditionError
from ..informativity.forms import FeasibleSetForm

DEFAULT_SHRINK = (1.0 - 1e-6, 0.9, 0.5, 0.1)
_BOUNDARY_STEPS = 60


def membership(A: np.ndarray, B: np.ndarray, f: FeasibleSetForm, tol: Optional[float] = None) -> bool:
    """True iff [I A B] Λ [I A B]ᵀ ⪰ 0 within ``tol`` (default ``f.tol_psd``)."""
    tol = f.tol_psd if tol is None else tol
    return float(np.linalg.eigvalsh(f.quadratic(A, B))[0]) >= -tol


def _direction_mask(f: FeasibleSetForm) -> np.ndarray:
    # only parameter rows move for lifted input-output data
    return np.any(np.abs(f.Hz) > 0, axis=1)


def _boundary_step(f: FeasibleSetForm, A0, B0, D: np.ndarray, t_max: float) -> float:
    """Largest t in [0, t_max] with (A0, B0) + tD still a member, by bisection."""
    n = f.n

    def inside(t: float) -> bool:
        return membership(A0 + t * D[:, :n], B0 + t * D[:, n:], f)

    if inside(t_max):
        return t_max
    lo, hi = 0.0, t_max
    for _ in range(_BOUNDARY_STEPS):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


def sample_members(
    f: FeasibleSetForm,
    base: tuple[np.ndarray, np.ndarray],
    count: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    shrink: Sequence[float] = DEFAULT_SHRINK,
    t_max: Optional[float] = None,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Up to ``count`` members of the feasible set, ``base`` first.

    Each further sample walks from ``base`` along a random direction to the
    boundary and keeps a point at the next shrink factor of that distance.
    Duplicates are dropped. For a singleton set the walk only reaches points
    within the membership tolerance of ``base``.

    Raises:
        PreconditionError: ``base`` is not a member, or ``count`` < 1
    """
    if count < 1:
        raise PreconditionError(f"count must be positive, got {count}")
    A0 = np.atleast_2d(np.asarray(base[0], dtype=float))
    B0 = np.atleast_2d(np.asarray(base[1], dtype=float))
    if not membership(A0, B0, f):
        raise PreconditionError("base point is not in the feasible set")

    rng = rng or np.random.default_rng(seed)
    t_max = 10.0 * (1.0 + float(np.linalg.norm(np.hstack([A0, B0])))) if t_max is None else t_max
    mask = _direction_mask(f)
    samples = [(A0, B0)]
    seen = {np.hstack([A0, B0]).tobytes()}
    factors = cycle(shrink)

    for _ in range(count - 1):
        D = rng.standard_normal((f.n, f.n + f.m))
        D[~mask, :] = 0.0
        norm = float(np.linalg.norm(D))
        if norm == 0.0:
            break
        D /= norm
        t = next(factors) * _boundary_step(f, A0, B0, D, t_max)
        A, B = A0 + t * D[:, : f.n], B0 + t * D[:, f.n :]
        key = np.hstack([A, B]).tobytes()
        if key in seen or not membership(A, B, f):
            continue
        seen.add(key)
        samples.append((A, B))
    return samples


@dataclass(frozen=True)
class NoiseReconstruction:
    """Noise sequence that explains the data for a given member."""

    E: np.ndarray
    structural_residual: float
    satisfies_bound: Optional[bool]


def reconstruct_noise(A: np.ndarray, B: np.ndarray, f: FeasibleSetForm) -> NoiseReconstruction:
    """E- from H_z E- = top - A Z- - B U-, with top = H_z Y- or X+.

    ``structural_residual`` is the part of the residual outside range(H_z);
    it vanishes for members of an input-output feasible set.

    Raises:
        PreconditionError: ``f`` was not built from data
    """
    d = f.data
    if d is None:
        raise PreconditionError("feasible set carries no data matrices")
    if isinstance(d, IoDataMatrices):
        top, regressor = f.Hz @ d.Ym, d.Zm
    else:
        top, regressor = d.Xp, d.Xm
    residual = top - np.asarray(A, dtype=float) @ regressor - np.asarray(B, dtype=float) @ d.Um
    E = np.linalg.lstsq(f.Hz, residual, rcond=None)[0]
    structural = float(np.linalg.norm(residual - f.Hz @ E))
    satisfies = None
    if f.instrument is not None and f.bound is not None:
        satisfies = check_noise_bound(E, f.instrument, f.bound)
    return NoiseReconstruction(E=E, structural_residual=structural, satisfies_bound=satisfies)
