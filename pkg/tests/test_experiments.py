"""Tests for experiment configs, data generation, sweeps and plot data."""

import csv
import json

import numpy as np
import pytest
from pydantic import ValidationError

from informa.errors import DataFormatError, PreconditionError
from informa.experiments import (
    BallUniformNoise,
    CellResult,
    CrossCovBoundConfig,
    ExperimentConfig,
    IntervalUniformNoise,
    NormBoundConfig,
    SweepResult,
    cell_rng,
    emit_plot_data,
    generate_dataset,
    io_model,
    load_experiment_config,
    output_label,
    run_io_sweep,
    run_state_sweep,
    run_sweep,
    sample_noise,
)
from informa.informativity import Objective


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_state_defaults(self):
        config = ExperimentConfig.state_default()
        assert config.N_grid == [2, 5, 10, 15, 20, 30, 50, 100, 250]
        assert config.reps == 20
        assert config.objective is Objective.H2
        assert [b.label for b in config.bounds] == ["norm", "crosscov"]
        assert config.bounds[1].lags == list(range(10))
        assert isinstance(config.noise, BallUniformNoise)

    def test_io_defaults(self):
        config = ExperimentConfig.io_default(reps=3)
        assert config.study == "io"
        assert isinstance(config.noise, IntervalUniformNoise)
        assert config.bounds[0].Hu == pytest.approx(0.3)
        assert config.reps == 3
        assert len(config.output_matrices) == 3

    @pytest.mark.parametrize(
        "overrides",
        [
            {"N_grid": [5, 2]},
            {"N_grid": [0, 5]},
            {"reps": 0},
            {"bounds": []},
            {"bounds": [{"type": "norm"}, {"type": "norm"}]},
            {"noise": {"dist": "gaussian"}},
            {"colour": "red"},
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ValidationError):
            ExperimentConfig(**overrides)

    def test_empty_grid_allowed(self):
        assert ExperimentConfig(N_grid=[]).N_grid == []

    def test_bound_discriminator(self):
        config = ExperimentConfig(bounds=[{"type": "crosscov", "Hu": 0.5, "lags": [0, 1]}, {"type": "norm", "name": "n2"}])
        assert isinstance(config.bounds[0], CrossCovBoundConfig)
        assert isinstance(config.bounds[1], NormBoundConfig)
        assert config.bounds[1].label == "n2"
        np.testing.assert_allclose(config.bounds[0].hu_matrix(2), 0.5 * np.eye(2))

    def test_load_yaml_and_json(self, tmp_path):
        yml = tmp_path / "exp.yaml"
        yml.write_text("study: io\nseed: 7\nN_grid: [10, 20]\nreps: 2\nnoise:\n  dist: interval\n  halfwidth: 0.1\n")
        config = load_experiment_config(yml)
        assert (config.study, config.seed, config.N_grid) == ("io", 7, [10, 20])
        assert config.noise.halfwidth == pytest.approx(0.1)

        js = tmp_path / "exp.json"
        js.write_text(json.dumps({"reps": 4, "objective": "stab"}))
        assert load_experiment_config(js).objective is Objective.STAB

    def test_load_errors(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        with pytest.raises(DataFormatError):
            load_experiment_config(bad)
        invalid = tmp_path / "invalid.yaml"
        invalid.write_text("reps: -1\n")
        with pytest.raises(DataFormatError):
            load_experiment_config(invalid)
        with pytest.raises(DataFormatError):
            load_experiment_config(tmp_path / "missing.yaml")

    def test_output_label(self):
        assert output_label([1.0, 0.0, 0.0]) == "C0_1_0_0"
        assert output_label([1, 0, 1]) == "C0_1_0_1"


class TestGenerate:
    def test_cell_streams_are_independent_and_repeatable(self):
        a = cell_rng(3, 10, 0).standard_normal(5)
        np.testing.assert_array_equal(a, cell_rng(3, 10, 0).standard_normal(5))
        assert not np.allclose(a, cell_rng(3, 10, 1).standard_normal(5))
        assert not np.allclose(a, cell_rng(4, 10, 0).standard_normal(5))

    def test_ball_noise_radius(self, rng):
        e = sample_noise(BallUniformNoise(radius_sq=0.35), 3, 2000, rng)
        norms = np.linalg.norm(e, axis=0)
        assert norms.max() <= np.sqrt(0.35) + 1e-12
        # radius ~ U^(1/3): a third of the samples sit beyond 0.87 of the edge
        assert np.mean(norms > 0.87 * np.sqrt(0.35)) > 0.25

    def test_interval_noise(self, rng):
        e = sample_noise(IntervalUniformNoise(halfwidth=0.2), 2, 500, rng)
        assert np.abs(e).max() <= 0.2

    def test_state_dataset_layout(self):
        config = ExperimentConfig.state_default(seed=1)
        data = generate_dataset(config, 15, 0)
        assert data.traj.t0 == -9
        assert data.traj.T == 9 + 15 + 1
        assert data.Em.shape == (3, 15)
        np.testing.assert_array_equal(data.traj.u[:, :9], 0.0)
        assert set(data.bound_ok) == {"norm", "crosscov"}
        # ‖e(t)‖² <= 0.35 makes the norm bound hold by construction
        assert data.bound_ok["norm"]

    def test_dataset_is_reproducible(self):
        config = ExperimentConfig.state_default(seed=5)
        first, second = generate_dataset(config, 10, 2), generate_dataset(config, 10, 2)
        np.testing.assert_array_equal(first.traj.y_or_x, second.traj.y_or_x)
        other = generate_dataset(config, 10, 3)
        assert not np.allclose(first.traj.y_or_x, other.traj.y_or_x)

    def test_tight_bound_is_flagged(self):
        config = ExperimentConfig.state_default(bounds=[NormBoundConfig(Hu=1e-6)])
        data = generate_dataset(config, 20, 0)
        assert data.bound_ok == {"norm": False}
        assert data.flagged

    def test_io_dataset(self):
        config = ExperimentConfig.io_default()
        data = generate_dataset(config, 12, 0, C0=np.array([1.0, 0.0, 0.0]))
        assert io_model([1.0, 0.0, 0.0]).l == 3
        assert data.traj.t0 == -9
        assert data.Em.shape == (1, 12)
        assert set(data.bound_ok) == {"crosscov"}


def _sweep(cells, N_grid=(10, 20), labels=("norm", "crosscov")):
    return SweepResult(
        study="state",
        objective="h2",
        labels=list(labels),
        N_grid=list(N_grid),
        gamma_label=labels[-1],
        cells=cells,
    )


def _cell(label, N, rep, informative, gamma_sq=None, bound_ok=True):
    return CellResult(
        label=label,
        N=N,
        rep=rep,
        informative=informative,
        gamma_sq=gamma_sq,
        status="feasible" if informative else "infeasible",
        bound_ok=bound_ok,
    )


class TestAggregates:
    @pytest.fixture
    def sweep(self):
        return _sweep(
            [
                _cell("norm", 10, 0, False),
                _cell("norm", 10, 1, True, 4.0),
                _cell("crosscov", 10, 0, True, 2.0),
                _cell("crosscov", 10, 1, True, 4.0, bound_ok=False),
                _cell("crosscov", 20, 0, True, 1.5),
            ]
        )

    def test_fractions(self, sweep):
        assert sweep.fraction("norm", 10) == 0.5
        assert sweep.fraction("crosscov", 10) == 1.0
        assert sweep.fraction("norm", 20) is None
        assert sweep.fractions()["crosscov"] == {10: 1.0, 20: 1.0}

    def test_gamma_stats(self, sweep):
        stats = sweep.gamma_stats()
        assert stats[10] == (3.0, 2.5, 3.5)
        assert stats[20] == (1.5, 1.5, 1.5)
        assert sweep.gamma_stats("norm") == {10: (4.0, 4.0, 4.0)}

    def test_flagged(self, sweep):
        assert sweep.flagged == 1

    def test_plot_files(self, sweep, tmp_path):
        paths = emit_plot_data(sweep, tmp_path / "out")
        assert read_rows(paths["fractions"]) == [
            ["N", "fraction_norm", "fraction_crosscov"],
            ["10", "0.5", "1"],
            ["20", "", "1"],
        ]
        assert read_rows(paths["gamma"]) == [
            ["N", "median", "p25", "p75"],
            ["10", "3", "2.5", "3.5"],
            ["20", "1.5", "1.5", "1.5"],
        ]
        cells = read_rows(paths["cells"])
        assert cells[0] == ["label", "N", "rep", "informative", "gamma_sq", "status", "bound_ok"]
        assert cells[1] == ["norm", "10", "0", "0", "", "infeasible", "1"]
        assert cells[4] == ["crosscov", "10", "1", "1", "4", "feasible", "0"]

    def test_empty_sweep_gives_headers(self, tmp_path):
        paths = emit_plot_data(_sweep([], N_grid=()), tmp_path)
        assert read_rows(paths["fractions"]) == [["N", "fraction_norm", "fraction_crosscov"]]
        assert read_rows(paths["gamma"]) == [["N", "median", "p25", "p75"]]
        assert len(read_rows(paths["cells"])) == 1


class TestSweepGuards:
    def test_unknown_gamma_label(self):
        config = ExperimentConfig.state_default(N_grid=[5], reps=1, gamma_from="nope")
        with pytest.raises(PreconditionError, match="nope"):
            run_sweep(config)

    def test_study_mismatch(self):
        with pytest.raises(PreconditionError):
            run_state_sweep(ExperimentConfig.io_default(N_grid=[5], reps=1))
        with pytest.raises(PreconditionError):
            run_io_sweep(ExperimentConfig.state_default(N_grid=[5], reps=1))

    def test_empty_grid_runs_nothing(self):
        result = run_sweep(ExperimentConfig.state_default(N_grid=[]))
        assert result.cells == []
        assert result.gamma_label == "crosscov"


@pytest.mark.solver
@pytest.mark.slow
class TestSweep:
    def test_small_state_sweep(self):
        config = ExperimentConfig.state_default(
            N_grid=[5, 60],
            reps=2,
            objective=Objective.STAB,
            bounds=[NormBoundConfig(Hu=0.35)],
        )
        result = run_state_sweep(config)
        assert len(result.cells) == 4
        assert [c.N for c in result.cells] == [5, 5, 60, 60]
        assert all(c.bound_ok for c in result.cells)
        assert all(c.gamma_sq is None for c in result.cells)
        assert all(c.status in ("feasible", "infeasible", "inaccurate", "iteration_limit") for c in result.cells)

    def test_workers_match_serial(self):
        config = ExperimentConfig.state_default(
            N_grid=[30], reps=2, objective=Objective.STAB, bounds=[NormBoundConfig(Hu=0.35)]
        )
        serial = run_sweep(config, workers=1)
        pooled = run_sweep(config, workers=2)
        assert serial.cells == pooled.cells
