"""Monte-Carlo informativity studies on the benchmark system."""

from .benchmark import MODEL_BASED_H2, benchmark_state_space, benchmark_system
from .config import (
    BallUniformNoise,
    CrossCovBoundConfig,
    ExperimentConfig,
    IntervalUniformNoise,
    NormBoundConfig,
    load_experiment_config,
    output_label,
)
from .generate import GeneratedDataset, cell_rng, generate_dataset, io_model, sample_noise
from .plotdata import emit_plot_data
from .sweep import CellResult, SweepResult, run_cell, run_io_sweep, run_state_sweep, run_sweep

__all__ = [
    "MODEL_BASED_H2",
    "BallUniformNoise",
    "CellResult",
    "CrossCovBoundConfig",
    "ExperimentConfig",
    "GeneratedDataset",
    "IntervalUniformNoise",
    "NormBoundConfig",
    "SweepResult",
    "benchmark_state_space",
    "benchmark_system",
    "cell_rng",
    "emit_plot_data",
    "generate_dataset",
    "io_model",
    "load_experiment_config",
    "output_label",
    "run_cell",
    "run_io_sweep",
    "run_state_sweep",
    "run_sweep",
    "sample_noise",
]
