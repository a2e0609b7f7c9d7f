"""Experiment configuration: what to sweep, how to generate data, which bounds to test."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import DataFormatError
from ..informativity import Objective

DEFAULT_N_GRID = [2, 5, 10, 15, 20, 30, 50, 100, 250]
DEFAULT_LAGS = list(range(10))
DEFAULT_OUTPUTS = [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]


class BallUniformNoise(BaseModel):
    """e(t) uniform on {‖e‖² <= radius_sq}."""

    dist: Literal["ball"] = "ball"
    radius_sq: float = Field(0.35, gt=0)


class IntervalUniformNoise(BaseModel):
    """Each entry of e(t) uniform on [-halfwidth, halfwidth]."""

    dist: Literal["interval"] = "interval"
    halfwidth: float = Field(0.35, gt=0)


NoiseConfig = Annotated[Union[BallUniformNoise, IntervalUniformNoise], Field(discriminator="dist")]


class _BoundBase(BaseModel):
    name: Optional[str] = None
    Hu: Union[float, list[list[float]]] = 1.0

    def hu_matrix(self, p: int) -> np.ndarray:
        if isinstance(self.Hu, float | int):
            return float(self.Hu) * np.eye(p)
        return np.asarray(self.Hu, dtype=float)


class NormBoundConfig(_BoundBase):
    """E-E-ᵀ ⪯ N·Hu with the identity instrument."""

    type: Literal["norm"] = "norm"

    @property
    def label(self) -> str:
        return self.name or "norm"


class CrossCovBoundConfig(_BoundBase):
    """(1/N) E-R-ᵀR-E-ᵀ ⪯ Hu with r(t) = col(u(t-k) for k in lags)."""

    type: Literal["crosscov"] = "crosscov"
    lags: list[int] = Field(default_factory=lambda: list(DEFAULT_LAGS))

    @field_validator("lags")
    @classmethod
    def _lags_valid(cls, v: list[int]) -> list[int]:
        if not v or min(v) < 0:
            raise ValueError("lags must be a non-empty list of non-negative integers")
        return v

    @property
    def label(self) -> str:
        return self.name or "crosscov"


BoundConfig = Annotated[Union[NormBoundConfig, CrossCovBoundConfig], Field(discriminator="type")]


class SolverOverrides(BaseModel):
    solver: Optional[str] = None
    eps_abs: Optional[float] = None
    eps_rel: Optional[float] = None
    max_iter: Optional[int] = None

    def as_kwargs(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class ExperimentConfig(BaseModel):
    """One Monte-Carlo study over data lengths N.

    ``study="state"`` sweeps every entry of ``bounds`` on input-state data
    from the benchmark system. ``study="io"`` sweeps every output matrix in
    ``output_matrices`` with the first entry of ``bounds``.
    """

    model_config = ConfigDict(extra="forbid")

    study: Literal["state", "io"] = "state"
    seed: int = 0
    N_grid: list[int] = Field(default_factory=lambda: list(DEFAULT_N_GRID))
    reps: int = Field(20, ge=1)
    objective: Objective = Objective.H2
    noise: NoiseConfig = Field(default_factory=BallUniformNoise)
    bounds: list[BoundConfig] = Field(
        default_factory=lambda: [NormBoundConfig(Hu=0.35), CrossCovBoundConfig(Hu=1.0)]
    )
    output_matrices: list[list[float]] = Field(default_factory=lambda: [list(c) for c in DEFAULT_OUTPUTS])
    input_std: float = Field(1.0, gt=0)
    gamma_from: Optional[str] = None
    workers: int = Field(1, ge=1)
    solver: SolverOverrides = Field(default_factory=SolverOverrides)

    @field_validator("N_grid")
    @classmethod
    def _grid_ascending(cls, v: list[int]) -> list[int]:
        if any(n < 1 for n in v):
            raise ValueError("data lengths must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("N_grid must be strictly ascending")
        return v

    @field_validator("bounds")
    @classmethod
    def _bounds_present(cls, v: list) -> list:
        if not v:
            raise ValueError("at least one bound is required")
        labels = [b.label for b in v]
        if len(set(labels)) != len(labels):
            raise ValueError(f"bound labels must be unique, got {labels}")
        return v

    @classmethod
    def state_default(cls, **overrides) -> "ExperimentConfig":
        return cls(study="state", **overrides)

    @classmethod
    def io_default(cls, **overrides) -> "ExperimentConfig":
        base = {
            "study": "io",
            "noise": IntervalUniformNoise(halfwidth=0.35),
            "bounds": [CrossCovBoundConfig(Hu=0.3)],
        }
        base.update(overrides)
        return cls(**base)


def output_label(C0) -> str:
    """``C0_1_0_0`` for C0 = [1 0 0]."""
    return "C0_" + "_".join(f"{v:g}" for v in C0)


def load_experiment_config(path: Path | str) -> ExperimentConfig:
    """Read a JSON or YAML experiment config.

    Raises:
        DataFormatError: unreadable file or invalid config
    """
    path = Path(path)
    try:
        text = path.read_text()
        raw = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise DataFormatError(f"{path}: {e}") from e
    try:
        return ExperimentConfig.model_validate(raw or {})
    except ValidationError as e:
        raise DataFormatError(f"{path}: {e}") from e
