"""Tests for norm oracles, feasible-set sampling and the controller audit."""

import numpy as np
import pytest
from scipy.linalg import solve_discrete_lyapunov

from informa.data_model import Instrument, InstrumentSpec, NoiseBound, build_state_matrices
from informa.errors import PreconditionError, UnstableSystemError
from informa.experiments import benchmark_system
from informa.informativity import (
    BoundKind,
    MatrixJson,
    Objective,
    SynthesisResult,
    build_feasible_form_state,
    prepare_form,
    singleton_form,
    synthesize,
)
from informa.sdp import SolverContract
from informa.verification import (
    AuditReport,
    BoundType,
    audit,
    audit_base,
    h2_norm,
    hinf_norm,
    hinf_norm_grid,
    membership,
    reconstruct_noise,
    sample_members,
    solve_stein,
    spectral_radius,
)


@pytest.fixture
def stable_system(rng):
    A = rng.standard_normal((4, 4))
    A *= 0.8 / spectral_radius(A)
    return A, rng.standard_normal((4, 2)), rng.standard_normal((2, 4))


@pytest.fixture
def state_form(state_traj):
    f, _ = prepare_form(state_traj, InstrumentSpec.identity(), 1e-3 * np.eye(3), bound=BoundKind.NORM)
    return f


def stab_result(K, objective="stab", gamma=None):
    return SynthesisResult(
        feasible=True,
        objective=objective,
        status="feasible",
        K=MatrixJson.from_array(K),
        gamma=gamma,
    )


def random_stable_system(seed):
    """Random (A, B, C) with n in 2..5 and spectral radius in [0.3, 0.9]."""
    r = np.random.default_rng(seed)
    n, m, p = int(r.integers(2, 6)), int(r.integers(1, 3)), int(r.integers(1, 3))
    A = r.standard_normal((n, n))
    A *= r.uniform(0.3, 0.9) / spectral_radius(A)
    return A, r.standard_normal((n, m)), r.standard_normal((p, n))


SYSTEM_SEEDS = range(16)


class TestStein:
    def test_matches_scipy(self, stable_system):
        A, _, C = stable_system
        Q = C.T @ C
        X = solve_stein(A, Q)
        np.testing.assert_allclose(A.T @ X @ A - X + Q, np.zeros((4, 4)), atol=1e-10)
        np.testing.assert_allclose(X, solve_discrete_lyapunov(A.T, Q), rtol=1e-8, atol=1e-10)

    @pytest.mark.parametrize("seed", SYSTEM_SEEDS)
    def test_matches_scipy_on_random_systems(self, seed):
        A, _, C = random_stable_system(seed)
        Q = C.T @ C
        reference = solve_discrete_lyapunov(A.T, Q)
        atol = 1e-10 * (1.0 + np.abs(reference).max())
        np.testing.assert_allclose(solve_stein(A, Q), reference, rtol=1e-8, atol=atol)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError):
            solve_stein(np.array([[1.0]]), np.eye(1))


class TestNorms:
    def test_scalar_h2(self):
        # Σ 0.25^k = 4/3
        assert h2_norm(np.array([[0.5]]), np.eye(1), np.eye(1)) == pytest.approx(np.sqrt(4.0 / 3.0))

    def test_scalar_hinf(self):
        # |1 / (z - 0.5)| peaks at z = 1
        assert hinf_norm(np.array([[0.5]]), np.eye(1), np.eye(1)) == pytest.approx(2.0, rel=1e-5)
        assert hinf_norm(np.array([[-0.5]]), np.eye(1), np.eye(1)) == pytest.approx(2.0, rel=1e-5)

    def test_hinf_agrees_with_grid(self, stable_system):
        A, B, C = stable_system
        exact = hinf_norm(A, B, C)
        grid = hinf_norm_grid(A, B, C)
        assert exact >= grid * (1 - 1e-9)
        assert exact == pytest.approx(grid, rel=1e-3)

    @pytest.mark.parametrize("seed", SYSTEM_SEEDS)
    def test_h2_matches_observability_gramian(self, seed):
        A, B, C = random_stable_system(seed)
        Wo = solve_discrete_lyapunov(A.T, C.T @ C)
        assert h2_norm(A, B, C) == pytest.approx(np.sqrt(np.trace(B.T @ Wo @ B)), rel=1e-8)

    @pytest.mark.parametrize("seed", SYSTEM_SEEDS)
    def test_hinf_agrees_with_grid_on_random_systems(self, seed):
        A, B, C = random_stable_system(seed)
        exact = hinf_norm(A, B, C)
        grid = hinf_norm_grid(A, B, C)
        assert exact >= grid * (1 - 1e-9)
        assert exact == pytest.approx(grid, rel=1e-3)

    def test_zero_channel(self, stable_system):
        A, B, C = stable_system
        assert hinf_norm(A, np.zeros_like(B), C) == 0.0

    def test_h2_bounded_by_hinf_times_sqrt_dim(self, stable_system):
        A, B, C = stable_system
        # ‖G‖₂² = (1/π)∫₀^π ‖G(e^{jω})‖_F² dω <= rank · ‖G‖∞²
        assert h2_norm(A, B, C) <= np.sqrt(2) * hinf_norm(A, B, C) * (1 + 1e-6)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError):
            hinf_norm(np.array([[1.2]]), np.eye(1), np.eye(1))
        with pytest.raises(UnstableSystemError):
            hinf_norm_grid(np.array([[1.0]]), np.eye(1), np.eye(1))


class TestMembership:
    def test_samples_are_members(self, state_form):
        A0, B0, _ = benchmark_system()
        samples = sample_members(state_form, (A0, B0), 12, seed=1)
        np.testing.assert_array_equal(samples[0][0], A0)
        assert 1 < len(samples) <= 12
        assert all(membership(A, B, state_form) for A, B in samples)
        assert any(not np.allclose(A, A0) for A, _ in samples[1:])

    def test_sampling_is_deterministic(self, state_form):
        A0, B0, _ = benchmark_system()
        first = sample_members(state_form, (A0, B0), 6, seed=7)
        second = sample_members(state_form, (A0, B0), 6, seed=7)
        for (A1, B1), (A2, B2) in zip(first, second):
            np.testing.assert_array_equal(A1, A2)
            np.testing.assert_array_equal(B1, B2)

    def test_io_samples_move_parameter_rows_only(self, io_traj, arx_model):
        f, s = prepare_form(io_traj, InstrumentSpec.identity(), 1e-3, l=2, bound=BoundKind.NORM)
        base = (s.embed(arx_model.theta), s.embed(arx_model.B_coeffs[0]))
        for A, B in sample_members(f, base, 8, seed=2):
            np.testing.assert_array_equal(A[1:], 0.0)
            np.testing.assert_array_equal(B[1:], 0.0)

    def test_base_must_be_member(self, state_form):
        A0, B0, _ = benchmark_system()
        with pytest.raises(PreconditionError):
            sample_members(state_form, (A0 + 1.0, B0), 5)
        with pytest.raises(PreconditionError):
            sample_members(state_form, (A0, B0), 0)

    def test_reconstructed_state_noise(self, state_traj, state_form):
        A0, B0, _ = benchmark_system()
        rec = reconstruct_noise(A0, B0, state_form)
        np.testing.assert_allclose(rec.E, state_traj.noise[:, :40], atol=1e-12)
        assert rec.structural_residual == pytest.approx(0.0, abs=1e-12)
        assert rec.satisfies_bound is True

    def test_reconstructed_io_noise(self, io_traj, arx_model):
        f, s = prepare_form(io_traj, InstrumentSpec.identity(), 1e-3, l=2, bound=BoundKind.NORM)
        A, B = s.embed(arx_model.theta), s.embed(arx_model.B_coeffs[0])
        rec = reconstruct_noise(A, B, f)
        np.testing.assert_allclose(rec.E, io_traj.noise[:, 4:], atol=1e-12)
        assert rec.structural_residual < 1e-10

        shifted = A.copy()
        shifted[1, 0] += 1.0
        assert reconstruct_noise(shifted, B, f).structural_residual > 1e-3

    def test_singleton_explains_data_without_noise(self):
        A0, B0, _ = benchmark_system()
        rec = reconstruct_noise(A0, B0, singleton_form(A0, B0))
        np.testing.assert_allclose(rec.E, np.zeros((3, 5)), atol=1e-14)
        assert rec.satisfies_bound is True


class TestAudit:
    def test_stable_gain_passes(self):
        A0, B0, _ = benchmark_system()
        f = singleton_form(A0, B0)
        report = audit(stab_result(np.zeros((2, 3))), f, base=(A0, B0), samples=5, bound_type=BoundType.SINGLETON)
        assert isinstance(report, AuditReport)
        assert report.passed
        assert report.bound_type == "singleton"
        assert report.max_spectral_radius < 1.0

    def test_destabilizing_gain_is_reported(self):
        A0, B0, _ = benchmark_system()
        f = singleton_form(A0, B0)
        K = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
        report = audit(stab_result(K), f, base=(A0, B0), samples=1)
        assert not report.passed
        assert report.violations[0].reason == "unstable"
        assert report.violations[0].A.to_array().shape == (3, 3)

    def test_performance_claim_checked(self):
        A0, B0, Cz = benchmark_system()
        f = singleton_form(A0, B0)
        Dz = np.zeros((1, 2))
        level = h2_norm(A0, np.eye(3), Cz)

        honest = audit(stab_result(np.zeros((2, 3)), "h2", level), f, Cz=Cz, Dz=Dz, base=(A0, B0), samples=1)
        assert honest.passed
        assert honest.max_h2 == pytest.approx(level)

        inflated = audit(stab_result(np.zeros((2, 3)), "h2", 0.5 * level), f, Cz=Cz, Dz=Dz, base=(A0, B0), samples=1)
        assert [v.reason for v in inflated.violations] == ["performance"]

    def test_preconditions(self):
        A0, B0, _ = benchmark_system()
        f = singleton_form(A0, B0)
        with pytest.raises(PreconditionError):
            audit(SynthesisResult(feasible=False, objective="stab", status="infeasible"), f)
        with pytest.raises(PreconditionError):
            audit(stab_result(np.zeros((2, 3)), "hinf", 1.0), f)

    def test_empty_feasible_set_rejected(self, state_traj):
        d = build_state_matrices(state_traj)
        # E E^T ⪯ -I has no solution, so no (A, B) explains the data
        empty = NoiseBound(Q11=-np.eye(3), Q12=np.zeros((3, d.N)), Q22=-np.eye(d.N))
        f = build_feasible_form_state(d, Instrument(Rm=np.eye(d.N), spec=InstrumentSpec.identity()), empty)
        assert audit_base(f) is None
        with pytest.raises(PreconditionError, match="no member"):
            audit(stab_result(np.zeros((2, 3))), f)

    def test_audit_base_finds_member(self, state_form):
        A, B = audit_base(state_form)
        assert membership(A, B, state_form)

    @pytest.mark.solver
    def test_synthesized_gain_survives_audit(self, state_form):
        result = synthesize(state_form, Objective.STAB, contract=SolverContract())
        assert result.feasible
        report = audit(result, state_form, samples=20, seed=3)
        assert report.passed
        assert report.samples_tested > 1


@pytest.mark.solver
class TestSynthesizedGainAudit:
    """Gains returned by synthesize hold their claim on sampled members."""

    @pytest.fixture
    def io_form(self, io_traj):
        return prepare_form(io_traj, InstrumentSpec.identity(), 1e-3, l=2, bound=BoundKind.NORM)

    def test_io_stabilization(self, io_form, arx_model):
        f, s = io_form
        result = synthesize(f, Objective.STAB, s=s, contract=SolverContract())
        assert result.feasible
        base = (s.embed(arx_model.theta), s.embed(arx_model.B_coeffs[0]))
        report = audit(result, f, s=s, samples=20, seed=11, base=base, bound_type=BoundType.NORM)
        assert report.violations == []
        assert report.samples_tested > 0
        assert report.max_spectral_radius < 1.0

    def test_state_hinf(self, state_form):
        _, _, Cz = benchmark_system()
        Dz = np.zeros((1, 2))
        result = synthesize(state_form, Objective.HINF, Cz=Cz, Dz=Dz, contract=SolverContract())
        assert result.feasible
        report = audit(result, state_form, Cz=Cz, Dz=Dz, samples=20, seed=12, bound_type=BoundType.NORM)
        assert report.violations == []
        assert report.samples_tested > 0
        assert report.max_hinf <= result.gamma * (1 + 1e-6)

    def test_state_h2(self, state_form):
        _, _, Cz = benchmark_system()
        Dz = np.zeros((1, 2))
        result = synthesize(state_form, Objective.H2, Cz=Cz, Dz=Dz, contract=SolverContract())
        assert result.feasible
        report = audit(result, state_form, Cz=Cz, Dz=Dz, samples=20, seed=13, bound_type=BoundType.NORM)
        assert report.violations == []
        assert report.samples_tested > 0
        assert report.max_h2 <= result.gamma * (1 + 1e-6)
