"""Tests for the non-minimal lifting of ARX systems."""

import json

import numpy as np
import pytest

from informa.data_model import zeta_at
from informa.errors import DataFormatError, DimensionError, ObservabilityError, PreconditionError
from informa.experiments import benchmark_system
from informa.lifting import (
    ArxModel,
    arx_from_state_space,
    closed_loop,
    controller_from_gain,
    controller_state_permutation,
    dump_model,
    impulse_response,
    lift_arx,
    lift_structure,
    load_model,
    simulate_closed_loop,
    state_space_frequency_response,
)

UNIT_CIRCLE = [np.exp(1j * w) for w in (0.1, 0.7, 1.9, 3.0)]


class TestLiftStructure:
    @pytest.mark.parametrize(("l", "p", "m"), [(1, 1, 1), (2, 1, 2), (3, 2, 1), (4, 2, 3)])
    def test_shapes_and_nilpotency(self, l, p, m):
        s = lift_structure(l, p, m)
        n = (p + m) * l
        assert s.J1.shape == (n, n)
        assert s.J2.shape == (n, m)
        assert s.Hz.shape == (n, p)
        np.testing.assert_array_equal(np.linalg.matrix_power(s.J1, l), np.zeros((n, n)))

    @pytest.mark.parametrize(("l", "p", "m"), [(1, 1, 1), (3, 2, 1), (4, 1, 2)])
    def test_injection_rows_untouched_by_shift(self, l, p, m):
        s = lift_structure(l, p, m)
        np.testing.assert_array_equal(s.J2.T @ s.J1, np.zeros((m, s.n)))
        np.testing.assert_array_equal(s.Hz.T @ s.J1, np.zeros((p, s.n)))
        np.testing.assert_array_equal(s.Hz.T @ s.J2, np.zeros((p, m)))

    def test_rejects_zero_dimensions(self):
        with pytest.raises(PreconditionError):
            lift_structure(0, 1, 1)
        with pytest.raises(PreconditionError):
            lift_structure(2, 1, 0)


class TestArxModel:
    def test_coefficient_counts(self):
        with pytest.raises(DimensionError):
            ArxModel(A_coeffs=(np.eye(1),), B_coeffs=(np.zeros((1, 1)),))

    def test_theta_layout(self, arx_model):
        np.testing.assert_allclose(arx_model.theta, [[0.5, -0.06, 1.0, 0.5, 0.3, -0.2]])
        assert arx_model.n == 6

    def test_lifted_recursion_reproduces_data(self, arx_model, io_traj):
        ss = lift_arx(arx_model)
        for t in range(0, io_traj.T + io_traj.t0 - 1):
            k = io_traj.index_of(t)
            predicted = (
                ss.Az @ zeta_at(io_traj, t, 2)
                + ss.Bz @ io_traj.u[:, k]
                + ss.Hz @ io_traj.noise[:, k]
            )
            np.testing.assert_allclose(zeta_at(io_traj, t + 1, 2), predicted, atol=1e-12)

    def test_lifted_transfer_is_delayed_model(self, arx_model):
        # default performance output picks y(t-1) from ζ(t)
        ss = lift_arx(arx_model)
        for z in UNIT_CIRCLE:
            lifted = state_space_frequency_response(ss.Az, ss.Bz, ss.Cz, z)
            np.testing.assert_allclose(lifted, arx_model.frequency_response(z) / z, atol=1e-10)

    def test_impulse_response(self, arx_model):
        h = impulse_response(arx_model, 4, channel=0)
        np.testing.assert_allclose(h[0, :3], [0.0, 1.0, 0.8])


class TestStateSpaceConversion:
    def test_benchmark_frequency_response(self):
        A0, B0, _ = benchmark_system()
        C0 = np.array([[1.0, 0.0, 0.0]])
        model = arx_from_state_space(A0, B0, C0)
        assert (model.l, model.p, model.m) == (3, 1, 2)
        for z in UNIT_CIRCLE:
            np.testing.assert_allclose(
                model.frequency_response(z),
                state_space_frequency_response(A0, B0, C0, z),
                atol=1e-10,
            )

    def test_multiple_outputs_rejected(self):
        A0, B0, _ = benchmark_system()
        with pytest.raises(PreconditionError):
            arx_from_state_space(A0, B0, np.eye(3)[:2])

    def test_unobservable_pair(self):
        with pytest.raises(ObservabilityError):
            arx_from_state_space(np.diag([0.5, 0.5]), np.eye(2), np.array([[1.0, 0.0]]))


class TestController:
    def test_gain_split(self):
        K = np.arange(12.0).reshape(2, 6)
        ctrl = controller_from_gain(K, l=2, p=1, m=2)
        np.testing.assert_array_equal(ctrl.Dbar, K[:, :2])
        np.testing.assert_array_equal(ctrl.Cbar, K[:, 2:])
        np.testing.assert_array_equal(ctrl.gain(), K)
        np.testing.assert_array_equal(ctrl.C_coeffs[1], -K[:, 4:6])
        np.testing.assert_array_equal(ctrl.C_polynomial()[0], np.eye(2))

    def test_gain_shape(self):
        with pytest.raises(DimensionError):
            controller_from_gain(np.zeros((2, 5)), l=2, p=1, m=2)

    def test_closed_loop_simulation_matches_lifted_matrix(self, arx_model, rng):
        K = 0.1 * rng.standard_normal((2, 6))
        ss = lift_arx(arx_model)
        A_cl, _ = closed_loop(ss, K)
        e = 0.1 * rng.standard_normal((1, 12))
        zeta0 = rng.standard_normal(6)
        _, u, zetas = simulate_closed_loop(arx_model, controller_from_gain(K, 2, 1, 2), e, zeta0)

        np.testing.assert_allclose(zetas[:, 0], zeta0)
        for t in range(12):
            np.testing.assert_allclose(u[:, t], K @ zetas[:, t], atol=1e-12)
            np.testing.assert_allclose(zetas[:, t + 1], A_cl @ zetas[:, t] + ss.Hz @ e[:, t], atol=1e-10)

    def test_state_permutation(self):
        Pi = controller_state_permutation(2, 1, 2)
        zeta = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        np.testing.assert_array_equal(Pi @ zeta, [3.0, 4.0, 5.0, 6.0, 1.0, 2.0])
        np.testing.assert_array_equal(Pi @ Pi.T, np.eye(6))


class TestModelFiles:
    def test_arx_file_reloads(self, tmp_path, arx_model):
        path = tmp_path / "model.json"
        path.write_text(json.dumps(dump_model(arx_model)))
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.theta, arx_model.theta)

    def test_state_space_file_converts(self, tmp_path):
        A0, B0, _ = benchmark_system()
        path = tmp_path / "ss.json"
        path.write_text(json.dumps({"A0": A0.tolist(), "B0": B0.tolist(), "C0": [[1, 0, 0]]}))
        assert load_model(path).l == 3

    def test_declared_dimensions_checked(self, tmp_path, arx_model):
        data = dump_model(arx_model)
        data["l"] = 3
        path = tmp_path / "model.json"
        path.write_text(json.dumps(data))
        with pytest.raises(DataFormatError, match="do not match"):
            load_model(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(DataFormatError):
            load_model(path)
        path.write_text(json.dumps({"l": 1}))
        with pytest.raises(DataFormatError):
            load_model(path)
