"""Shared fixtures: small systems and trajectories simulated from them."""

import os
import tempfile

# log records go to a throwaway file, set before informa.log reads it
os.environ.setdefault("INFORMA_LOG_PATH", os.path.join(tempfile.mkdtemp(), "informa.log"))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from informa.data_model import Trajectory, TrajectoryKind  # noqa: E402
from informa.experiments import benchmark_state_space  # noqa: E402
from informa.lifting import ArxModel, simulate  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def arx_model():
    """Stable second-order ARX model, one output, two inputs."""
    return ArxModel(
        A_coeffs=(np.array([[-0.5]]), np.array([[0.06]])),
        B_coeffs=(np.array([[0.0, 0.0]]), np.array([[1.0, 0.5]]), np.array([[0.3, -0.2]])),
    )


def make_state_traj(N, noise_scale, rng, pre=0):
    ss = benchmark_state_space()
    u = rng.standard_normal((ss.m, N + 1))
    e = noise_scale * rng.uniform(-1.0, 1.0, size=(ss.n, N + 1))
    return simulate(ss, u, e, pre_samples=pre)


def make_io_traj(model, N, noise_scale, rng, pre=None):
    u = rng.standard_normal((model.m, N))
    e = noise_scale * rng.uniform(-1.0, 1.0, size=(model.p, N))
    return simulate(model, u, e, pre_samples=pre)


@pytest.fixture
def state_traj(rng):
    """40 samples of benchmark state data with noise entries in [-0.01, 0.01]."""
    return make_state_traj(40, 0.01, rng)


@pytest.fixture
def io_traj(arx_model, rng):
    """60 samples of ARX data with noise in [-0.01, 0.01] and 4 zero pre-samples."""
    return make_io_traj(arx_model, 60, 0.01, rng, pre=4)


@pytest.fixture
def tiny_traj():
    return Trajectory(
        kind=TrajectoryKind.INPUT_OUTPUT,
        u=np.array([[1.0, 2.0, 3.0, 4.0, 5.0]]),
        y_or_x=np.array([[0.5, 0.25, 0.125, 0.0625, 0.03125]]),
        t0=-1,
    )


@pytest.fixture
def state_traj_of(rng):
    """Factory for benchmark state data of a given length."""

    def _make(N, noise_scale=0.01):
        return make_state_traj(N, noise_scale, rng)

    return _make
