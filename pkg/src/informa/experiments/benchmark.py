"""Benchmark third-order system with two inputs."""

import numpy as np

from ..data_model import frozen_array
from ..lifting import StateSpaceModel

A0 = frozen_array(
    [
        [-0.2414, -0.8649, 0.6277],
        [0.3192, -0.0301, 1.0933],
        [0.3129, -0.1649, 1.1093],
    ]
)
B0 = frozen_array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
CZ_STATE = frozen_array([[0.0, 0.0, 1.0]])

# H2 norm reached by state feedback designed with (A0, B0) known
MODEL_BASED_H2 = 1.0


def benchmark_system() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A0, B0, Cz) with performance output z = x3."""
    return A0.copy(), B0.copy(), CZ_STATE.copy()


def benchmark_state_space() -> StateSpaceModel:
    """Benchmark as x(t+1) = A0 x + B0 u + e, z = x3."""
    A, B, Cz = benchmark_system()
    return StateSpaceModel(Az=A, Bz=B, Hz=np.eye(3), Cz=Cz, Dz=np.zeros((1, 2)))
