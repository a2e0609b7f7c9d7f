"""Synthetic data sets from the benchmark system."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..data_model import (
    InstrumentSpec,
    Trajectory,
    build_instrument,
    check_noise_bound,
    make_cross_cov_bound,
    make_norm_bound,
)
from ..lifting import ArxModel, arx_from_state_space, simulate
from .benchmark import benchmark_state_space, benchmark_system
from .config import (
    BallUniformNoise,
    BoundConfig,
    CrossCovBoundConfig,
    ExperimentConfig,
    IntervalUniformNoise,
)


@dataclass(frozen=True)
class GeneratedDataset:
    """Trajectory starting at rest, its noise window E- and the bound check per label."""

    traj: Trajectory
    N: int
    Em: np.ndarray
    bound_ok: dict[str, bool] = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return not all(self.bound_ok.values())


def cell_rng(seed: int, N: int, rep: int) -> np.random.Generator:
    """Independent stream for cell (N, rep) under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, N, rep]))


def sample_noise(noise: BallUniformNoise | IntervalUniformNoise, dim: int, T: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(noise, IntervalUniformNoise):
        return rng.uniform(-noise.halfwidth, noise.halfwidth, size=(dim, T))
    directions = rng.standard_normal((dim, T))
    directions /= np.linalg.norm(directions, axis=0, keepdims=True)
    radii = np.sqrt(noise.radius_sq) * rng.uniform(size=T) ** (1.0 / dim)
    return directions * radii


def pre_sample_count(config: ExperimentConfig, l: int = 0) -> int:
    lags = [max(b.lags) for b in config.bounds if isinstance(b, CrossCovBoundConfig)]
    return max([l, *lags])


def instrument_spec(bound: BoundConfig) -> InstrumentSpec:
    if isinstance(bound, CrossCovBoundConfig):
        return InstrumentSpec.lagged(bound.lags)
    return InstrumentSpec.identity()


def _check_bounds(traj: Trajectory, Em: np.ndarray, config: ExperimentConfig) -> dict[str, bool]:
    p, N = Em.shape
    flags: dict[str, bool] = {}
    for bound in config.bounds:
        R = build_instrument(traj, instrument_spec(bound), t_start=0, n_cols=N)
        Hu = bound.hu_matrix(p)
        Q = make_cross_cov_bound(Hu, N, R.M) if isinstance(bound, CrossCovBoundConfig) else make_norm_bound(Hu, N)
        flags[bound.label] = check_noise_bound(Em, R, Q)
    return flags


def generate_dataset(
    config: ExperimentConfig,
    N: int,
    rep: int,
    C0: Optional[np.ndarray] = None,
) -> GeneratedDataset:
    """Data set for cell (N, rep): input-state when ``C0`` is None, else input-output.

    The system starts at rest with zero pre-samples, enough for the deepest
    instrument lag. Inputs are i.i.d. N(0, input_std²). The data window
    starts at t = 0 and holds exactly N columns.
    """
    rng = cell_rng(config.seed, N, rep)

    if C0 is None:
        ss = benchmark_state_space()
        pre = pre_sample_count(config)
        u = config.input_std * rng.standard_normal((ss.m, N + 1))
        e = sample_noise(config.noise, ss.n, N + 1, rng)
        traj = simulate(ss, u, e, pre_samples=pre)
    else:
        model = io_model(C0)
        pre = pre_sample_count(config, model.l)
        u = config.input_std * rng.standard_normal((model.m, N))
        e = sample_noise(config.noise, model.p, N, rng)
        traj = simulate(model, u, e, pre_samples=pre)

    Em = traj.noise[:, traj.index_of(0) : traj.index_of(0) + N]
    return GeneratedDataset(traj=traj, N=N, Em=Em, bound_ok=_check_bounds(traj, Em, config))


def io_model(C0) -> ArxModel:
    """ARX model of the benchmark seen through the single output C0."""
    A, B, _ = benchmark_system()
    return arx_from_state_space(A, B, np.atleast_2d(np.asarray(C0, dtype=float)))
