"""Standard-form carrier for linear matrix inequalities.

A problem is a flat decision vector x, a list of blocks each required to be
PSD, ``F0 + Σ xᵢ Fᵢ ⪰ 0``, and an optional linear objective ``min cᵀx``.
Named variables (symmetric matrices, general matrices, scalars) are mapped
onto contiguous slices of x by a :class:`VarLayout`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from ..errors import DimensionError, PreconditionError

Values = Mapping[str, np.ndarray]
BlockBuilder = Callable[[Values], np.ndarray]


@dataclass(frozen=True)
class VarSlice:
    """One named variable: ``size`` entries of x starting at ``start``."""

    name: str
    start: int
    shape: tuple[int, int]
    symmetric: bool = False

    @property
    def size(self) -> int:
        r, c = self.shape
        return r * (r + 1) // 2 if self.symmetric else r * c

    @property
    def stop(self) -> int:
        return self.start + self.size

    def unpack(self, x: np.ndarray) -> np.ndarray:
        chunk = np.asarray(x[self.start : self.stop], dtype=float)
        r, c = self.shape
        if not self.symmetric:
            return chunk.reshape(r, c)
        M = np.zeros((r, r))
        iu = np.triu_indices(r)
        M[iu] = chunk
        return M + np.triu(M, 1).T

    def pack(self, value: np.ndarray) -> np.ndarray:
        value = np.atleast_2d(np.asarray(value, dtype=float))
        if value.shape != self.shape:
            raise DimensionError(f"{self.name}: expected shape {self.shape}, got {value.shape}")
        if self.symmetric:
            return value[np.triu_indices(self.shape[0])]
        return value.ravel()


@dataclass(frozen=True)
class VarLayout:
    """Disjoint named slices covering the decision vector."""

    slices: tuple[VarSlice, ...] = ()

    @property
    def num_vars(self) -> int:
        return self.slices[-1].stop if self.slices else 0

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.slices]

    def _append(self, s: VarSlice) -> "VarLayout":
        if s.name in self.names:
            raise PreconditionError(f"variable '{s.name}' declared twice")
        return VarLayout(self.slices + (s,))

    def symmetric(self, name: str, n: int) -> "VarLayout":
        return self._append(VarSlice(name, self.num_vars, (n, n), symmetric=True))

    def matrix(self, name: str, rows: int, cols: int) -> "VarLayout":
        return self._append(VarSlice(name, self.num_vars, (rows, cols)))

    def scalar(self, name: str) -> "VarLayout":
        return self._append(VarSlice(name, self.num_vars, (1, 1)))

    def __getitem__(self, name: str) -> VarSlice:
        for s in self.slices:
            if s.name == name:
                return s
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def unpack(self, x: np.ndarray) -> dict[str, np.ndarray]:
        return {s.name: s.unpack(x) for s in self.slices}

    def pack(self, values: Values) -> np.ndarray:
        x = np.zeros(self.num_vars)
        for s in self.slices:
            if s.name in values:
                x[s.start : s.stop] = s.pack(values[s.name])
        return x

    def zeros(self) -> dict[str, np.ndarray]:
        return self.unpack(np.zeros(self.num_vars))

    def linear(self, weights: Mapping[str, np.ndarray | float]) -> np.ndarray:
        """Vector c with cᵀx = Σ ⟨weights[name], var⟩ (trace inner product)."""
        c = np.zeros(self.num_vars)
        for name, w in weights.items():
            s = self[name]
            W = np.broadcast_to(np.asarray(w, dtype=float), s.shape)
            if s.symmetric:
                iu = np.triu_indices(s.shape[0])
                # off-diagonal entries appear twice in the trace product
                c[s.start : s.stop] = np.where(iu[0] == iu[1], 1.0, 2.0) * 0.5 * (W + W.T)[iu]
            else:
                c[s.start : s.stop] = W.ravel()
        return c


@dataclass(frozen=True)
class LmiBlock:
    """F0 + Σ xᵢ Fᵢ ⪰ 0 for one block; ``Fi`` has shape (num_vars, size, size)."""

    name: str
    F0: np.ndarray
    Fi: np.ndarray

    @property
    def size(self) -> int:
        return self.F0.shape[0]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.F0 + np.tensordot(np.asarray(x, dtype=float), self.Fi, axes=1)

    def min_eig(self, x: np.ndarray) -> float:
        S = self.evaluate(x)
        return float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])


@dataclass(frozen=True)
class SdpProblem:
    """Blocks required PSD plus an optional objective ``min cᵀx``."""

    name: str
    layout: VarLayout
    blocks: tuple[LmiBlock, ...]
    objective: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        k = self.layout.num_vars
        for b in self.blocks:
            if b.F0.shape != (b.size, b.size) or b.Fi.shape != (k, b.size, b.size):
                raise DimensionError(f"block '{b.name}' does not match {k} decision variables")
        if self.objective is not None and np.shape(self.objective) != (k,):
            raise DimensionError(f"objective must have length {k}")

    @property
    def num_vars(self) -> int:
        return self.layout.num_vars

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def block(self, name: str) -> LmiBlock:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def block_min_eigs(self, x: np.ndarray) -> dict[str, float]:
        return {b.name: b.min_eig(x) for b in self.blocks}

    def objective_value(self, x: np.ndarray) -> Optional[float]:
        if self.objective is None:
            return None
        return float(self.objective @ x)

    def with_extra(
        self,
        blocks: Sequence[LmiBlock] = (),
        objective: Optional[np.ndarray] = None,
        name: Optional[str] = None,
    ) -> "SdpProblem":
        """Copy with more blocks and a replaced objective."""
        return SdpProblem(
            name=name or self.name,
            layout=self.layout,
            blocks=self.blocks + tuple(blocks),
            objective=objective,
            meta=dict(self.meta),
        )


def affine_block(name: str, layout: VarLayout, builder: BlockBuilder, sym_tol: float = 1e-12) -> LmiBlock:
    """Extract F0 = f(0) and Fᵢ = f(eᵢ) - F0 from a builder that is affine in the variables.

    Raises:
        DimensionError: builder output not square or some Fᵢ not symmetric
    """
    x0 = np.zeros(layout.num_vars)
    F0 = np.asarray(builder(layout.unpack(x0)), dtype=float)
    if F0.ndim != 2 or F0.shape[0] != F0.shape[1]:
        raise DimensionError(f"block '{name}' is not square: {F0.shape}")
    Fi = np.empty((layout.num_vars,) + F0.shape)
    for i in range(layout.num_vars):
        x0[i] = 1.0
        Fi[i] = np.asarray(builder(layout.unpack(x0)), dtype=float) - F0
        x0[i] = 0.0

    scale = 1.0 + max(np.abs(F0).max(initial=0.0), np.abs(Fi).max(initial=0.0))
    if np.abs(F0 - F0.T).max(initial=0.0) > sym_tol * scale or (
        Fi.size and np.abs(Fi - Fi.transpose(0, 2, 1)).max() > sym_tol * scale
    ):
        raise DimensionError(f"block '{name}' is not symmetric")
    F0 = 0.5 * (F0 + F0.T)
    Fi = 0.5 * (Fi + Fi.transpose(0, 2, 1))
    F0.setflags(write=False)
    Fi.setflags(write=False)
    return LmiBlock(name=name, F0=F0, Fi=Fi)


def build_problem(
    name: str,
    layout: VarLayout,
    builders: Sequence[tuple[str, BlockBuilder]],
    objective: Optional[np.ndarray] = None,
    meta: Optional[dict] = None,
) -> SdpProblem:
    """Assemble an SdpProblem from named affine block builders."""
    blocks = tuple(affine_block(block_name, layout, f) for block_name, f in builders)
    return SdpProblem(name=name, layout=layout, blocks=blocks, objective=objective, meta=meta or {})
