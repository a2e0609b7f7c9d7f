"""End-to-end informativity queries: data in, verdict and controller out."""

from __future__ import annotations

from enum import Enum
from typing import Optional

import numpy as np

from ..data_model import (
    InstrumentKind,
    InstrumentSpec,
    Trajectory,
    TrajectoryKind,
    build_instrument,
    build_io_matrices,
    build_state_matrices,
    make_cross_cov_bound,
    make_norm_bound,
)
from ..errors import BisectionNotFoundError, PreconditionError
from ..lifting import LiftingStructure, default_performance_output, lift_structure
from ..log import log_event
from ..sdp.bisect import bisect_gamma
from ..sdp.contract import SolveOutcome, SolverContract, SolveStatus
from ..sdp.problem import SdpProblem
from ..sdp.solve import solve, solve_polished
from .extract import MatrixJson, SynthesisResult, SynthesisSetup, extract_result, infeasible_result
from .forms import (
    FeasibleSetForm,
    build_feasible_form_io,
    build_feasible_form_state,
    default_slater_candidates,
    rank_guideline,
    singleton_form,
    slater_diagnostics,
)
from .problems import SynthesisSettings, h2_problem, hinf_problem, stab_problem_io, stab_problem_state


class Objective(str, Enum):
    STAB = "stab"
    HINF = "hinf"
    H2 = "h2"


class BoundKind(str, Enum):
    CROSSCOV = "crosscov"
    NORM = "norm"


def prepare_form(
    traj: Trajectory,
    instrument: InstrumentSpec,
    Hu,
    l: Optional[int] = None,
    bound: BoundKind = BoundKind.CROSSCOV,
) -> tuple[FeasibleSetForm, Optional[LiftingStructure]]:
    """Window the data, build R- and the bound, and assemble Λ.

    Raises:
        PreconditionError: input-output data without ``l``, or a norm bound
            with an instrument other than the identity
    """
    if bound is BoundKind.NORM and instrument.kind is not InstrumentKind.IDENTITY:
        raise PreconditionError("the norm bound pairs with the identity instrument only")

    if traj.kind is TrajectoryKind.INPUT_OUTPUT:
        if l is None:
            raise PreconditionError("input-output data needs a lag order l")
        d = build_io_matrices(traj, l)
        R = build_instrument(traj, instrument, t_start=d.t_start, n_cols=d.N)
        Q = make_norm_bound(Hu, d.N) if bound is BoundKind.NORM else make_cross_cov_bound(Hu, d.N, R.M)
        s = lift_structure(l, d.p, d.m)
        return build_feasible_form_io(d, R, Q, s), s

    ds = build_state_matrices(traj)
    R = build_instrument(traj, instrument, t_start=ds.t_start, n_cols=ds.N)
    Q = make_norm_bound(Hu, ds.N) if bound is BoundKind.NORM else make_cross_cov_bound(Hu, ds.N, R.M)
    return build_feasible_form_state(ds, R, Q), None


def default_performance(f: FeasibleSetForm, s: Optional[LiftingStructure]) -> tuple[np.ndarray, np.ndarray]:
    """z = y(t-1) for input-output data, z = x for input-state data."""
    if s is not None:
        return default_performance_output(s.l, s.p, s.m)
    return np.eye(f.n), np.zeros((f.n, f.m))


def _stab(f, s, settings) -> SdpProblem:
    return stab_problem_io(f, s, settings) if s is not None else stab_problem_state(f, settings)


def _finish(
    outcome: SolveOutcome,
    problem: SdpProblem,
    settings: SynthesisSettings,
) -> SynthesisResult:
    if outcome.feasible:
        return extract_result(outcome, problem, settings)
    return infeasible_result(outcome, problem)


def synthesize(
    f: FeasibleSetForm,
    objective: Objective,
    s: Optional[LiftingStructure] = None,
    Cz=None,
    Dz=None,
    gamma: Optional[float] = None,
    contract: Optional[SolverContract] = None,
    settings: Optional[SynthesisSettings] = None,
    truth: Optional[tuple[np.ndarray, np.ndarray]] = None,
    linear_in_gamma: bool = False,
    setup: Optional[SynthesisSetup] = None,
) -> SynthesisResult:
    """Decide informativity for ``objective`` and return the certificate.

    Stabilization and fixed-γ H∞ are pure feasibility problems solved with
    the β-maximizing polish. H∞ without γ bisects on γ (or minimizes γ
    directly with ``linear_in_gamma``). H2 minimizes trace Z; with ``gamma``
    given, the verdict also requires the achieved level to be at most γ.
    """
    contract = contract or SolverContract.resolve()
    settings = settings or SynthesisSettings()
    objective = Objective(objective)
    if Cz is None or Dz is None:
        Cz_default, Dz_default = default_performance(f, s)
        Cz = Cz_default if Cz is None else Cz
        Dz = Dz_default if Dz is None else Dz

    slater = slater_diagnostics(f, default_slater_candidates(f, truth), tol=settings.slater_tol)
    extra: dict = {}

    if objective is Objective.STAB:
        problem = _stab(f, s, settings)
        result = _finish(solve_polished(problem, contract), problem, settings)

    elif objective is Objective.HINF and gamma is not None:
        problem = hinf_problem(f, s, Cz, Dz, gamma=gamma, settings=settings)
        result = _finish(solve_polished(problem, contract), problem, settings)

    elif objective is Objective.HINF and linear_in_gamma:
        problem = hinf_problem(f, s, Cz, Dz, settings=settings, linear_in_gamma=True)
        result = _finish(solve(problem, contract), problem, settings)

    elif objective is Objective.HINF:
        try:
            found = bisect_gamma(
                lambda g: hinf_problem(f, s, Cz, Dz, gamma=g, settings=settings), contract=contract
            )
        except BisectionNotFoundError as e:
            outcome = e.outcome or SolveOutcome(status=SolveStatus.INFEASIBLE)
            problem = hinf_problem(f, s, Cz, Dz, gamma=1.0, settings=settings)
            result = infeasible_result(outcome, problem)
        else:
            result = extract_result(found.outcome, found.problem, settings)
            extra["bisection_iterations"] = found.iterations

    else:
        problem = h2_problem(f, s, Cz, Dz, settings)
        result = _finish(solve(problem, contract), problem, settings)
        if result.feasible and gamma is not None and result.gamma is not None and result.gamma > gamma:
            extra["achieved_gamma"] = result.gamma
            result = result.model_copy(update={"feasible": False, "status": "performance_not_met"})

    diagnostics = dict(result.diagnostics)
    diagnostics.update(extra)
    diagnostics["slater"] = slater.to_dict()
    diagnostics["rank_flag"] = f.rank_flag
    # state data with a Slater witness makes the LMI necessary as well
    diagnostics["exact_verdict"] = f.kind is TrajectoryKind.INPUT_STATE and slater.holds
    if s is not None:
        diagnostics["rank_guideline"] = rank_guideline(s.l, s.p, s.m)
    if f.instrument is not None:
        diagnostics["instrument_rows"] = f.instrument.M

    if setup is not None:
        setup = setup.model_copy(
            update={"Cz": MatrixJson.from_array(Cz), "Dz": MatrixJson.from_array(Dz)}
        )
    result = result.model_copy(update={"diagnostics": diagnostics, "setup": setup})

    log_event(
        "synthesis",
        {
            "objective": objective.value,
            "kind": f.kind.value,
            "feasible": result.feasible,
            "status": result.status,
            "gamma": result.gamma,
            "slater": slater.holds,
        },
    )
    return result


def model_based_h2(
    A: np.ndarray,
    B: np.ndarray,
    Cz: np.ndarray,
    Dz: Optional[np.ndarray] = None,
    Hz: Optional[np.ndarray] = None,
    contract: Optional[SolverContract] = None,
    settings: Optional[SynthesisSettings] = None,
) -> SynthesisResult:
    """H2-optimal state feedback for a known system, through the singleton feasible set."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    Cz = np.atleast_2d(np.asarray(Cz, dtype=float))
    Dz = np.zeros((Cz.shape[0], B.shape[1])) if Dz is None else Dz
    f = singleton_form(A, B, Hz=np.eye(A.shape[0]) if Hz is None else Hz)
    settings = settings or SynthesisSettings()
    problem = h2_problem(f, None, Cz, Dz, settings)
    return _finish(solve(problem, contract or SolverContract.resolve()), problem, settings)


def model_based_hinf(
    A: np.ndarray,
    B: np.ndarray,
    Cz: np.ndarray,
    Dz: Optional[np.ndarray] = None,
    Hz: Optional[np.ndarray] = None,
    contract: Optional[SolverContract] = None,
    settings: Optional[SynthesisSettings] = None,
    tol_rel: float = 1e-4,
) -> SynthesisResult:
    """γ-optimal H∞ state feedback for a known system, by bisection.

    Raises:
        BisectionNotFoundError: no γ up to the default upper bound works
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    Cz = np.atleast_2d(np.asarray(Cz, dtype=float))
    Dz = np.zeros((Cz.shape[0], B.shape[1])) if Dz is None else Dz
    f = singleton_form(A, B, Hz=np.eye(A.shape[0]) if Hz is None else Hz)
    settings = settings or SynthesisSettings()
    found = bisect_gamma(
        lambda g: hinf_problem(f, None, Cz, Dz, gamma=g, settings=settings),
        tol_rel=tol_rel,
        contract=contract or SolverContract.resolve(),
    )
    return extract_result(found.outcome, found.problem, settings)
