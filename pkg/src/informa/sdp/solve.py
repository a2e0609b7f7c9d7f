"""Solve SdpProblems through cvxpy and replay the returned certificate."""

from __future__ import annotations

import time
from typing import Optional

import cvxpy as cp
import numpy as np
import scipy.sparse as sp

from ..log import log_event
from .contract import SolveOutcome, SolveStatus, SolverContract
from .problem import LmiBlock, SdpProblem, affine_block

_STATUS_MAP = {
    cp.OPTIMAL: (SolveStatus.FEASIBLE, False),
    cp.OPTIMAL_INACCURATE: (SolveStatus.INACCURATE, False),
    cp.INFEASIBLE: (SolveStatus.INFEASIBLE, False),
    cp.INFEASIBLE_INACCURATE: (SolveStatus.INFEASIBLE, True),
    cp.UNBOUNDED: (SolveStatus.INACCURATE, False),
    cp.UNBOUNDED_INACCURATE: (SolveStatus.INACCURATE, False),
    cp.USER_LIMIT: (SolveStatus.ITERATION_LIMIT, False),
}


def _upper_selector(size: int) -> sp.csr_matrix:
    """Rows picking the upper-triangle entries (diagonal included) of a row-major size x size matrix."""
    iu = np.triu_indices(size)
    flat = iu[0] * size + iu[1]
    return sp.csr_matrix(
        (np.ones(flat.size), (np.arange(flat.size), flat)), shape=(flat.size, size * size)
    )


def _psd_constraints(block: LmiBlock, x: cp.Variable) -> list[cp.Constraint]:
    # F(x) is symmetric by construction, so a symmetric slack matched on the
    # upper triangle carries the whole block.
    s = block.size
    S = cp.Variable((s, s), symmetric=True, name=f"S_{block.name}")
    sel = _upper_selector(s)
    A = sel @ block.Fi.reshape(block.Fi.shape[0], s * s).T
    b = sel @ block.F0.ravel()
    return [S >> 0, sel @ cp.reshape(S, (s * s,), order="C") == A @ x + b]


def replay(problem: SdpProblem, x: np.ndarray) -> dict[str, float]:
    """Minimum eigenvalue of every block of ``problem`` at ``x``."""
    return problem.block_min_eigs(x)


def replay_passes(problem: SdpProblem, x: np.ndarray, contract: SolverContract) -> bool:
    """All blocks PSD within ``10 * eps_abs`` relative to the block magnitude."""
    for b in problem.blocks:
        value = b.evaluate(x)
        scale = max(1.0, float(np.abs(value).max(initial=0.0)))
        if b.min_eig(x) < -contract.replay_tol * scale:
            return False
    return True


def solve(problem: SdpProblem, contract: Optional[SolverContract] = None) -> SolveOutcome:
    """Solve ``problem`` once. Solver trouble is reported, never raised.

    A solver-declared optimum whose certificate does not replay is
    downgraded to Inaccurate.
    """
    contract = contract or SolverContract.resolve()
    x = cp.Variable(problem.num_vars, name="x")
    constraints: list[cp.Constraint] = []
    for block in problem.blocks:
        constraints.extend(_psd_constraints(block, x))

    if problem.objective is not None:
        objective = cp.Minimize(problem.objective @ x)
    else:
        objective = cp.Minimize(0)
    prob = cp.Problem(objective, constraints)

    started = time.monotonic()
    try:
        prob.solve(solver=contract.solver, **contract.solver_options())
        raw_status = str(prob.status)
    except cp.SolverError as e:
        raw_status = f"solver_error: {e}"
    elapsed = time.monotonic() - started

    status, weak = _STATUS_MAP.get(raw_status, (SolveStatus.INACCURATE, False))
    xv = None if x.value is None else np.asarray(x.value, dtype=float).copy()
    checks: dict[str, float] = {}

    if xv is not None:
        checks = replay(problem, xv)
        if status is SolveStatus.FEASIBLE and not replay_passes(problem, xv, contract):
            status = SolveStatus.INACCURATE
    elif status is SolveStatus.FEASIBLE:
        status = SolveStatus.INACCURATE

    outcome = SolveOutcome(
        status=status,
        x=xv if status is not SolveStatus.INFEASIBLE else None,
        objective_value=problem.objective_value(xv) if xv is not None and status is SolveStatus.FEASIBLE else None,
        weak=weak,
        solver_status=raw_status,
        replay=checks,
        solve_time=elapsed,
    )
    log_event(
        "sdp_solve",
        {
            "problem": problem.name,
            "num_vars": problem.num_vars,
            "block_sizes": problem.block_sizes,
            "solver": contract.solver,
            "status": outcome.status.value,
            "raw_status": raw_status,
            "objective": outcome.objective_value,
            "duration_ms": int(elapsed * 1000),
        },
    )
    return outcome


def solve_polished(
    problem: SdpProblem,
    contract: Optional[SolverContract] = None,
    maximize: str = "beta",
    normalize: str = "P",
) -> SolveOutcome:
    """Feasibility solve followed by a second solve that maximizes ``maximize``.

    The second solve adds diag(cap - trace(normalize), cap - maximize) ⪰ 0 with
    cap = max(dim, trace of the first solution), which keeps it bounded. Its
    answer is kept only when feasible; otherwise the first outcome stands.
    """
    contract = contract or SolverContract.resolve()
    first = solve(problem, contract)
    if (
        not first.feasible
        or not contract.polish
        or problem.objective is not None
        or maximize not in problem.layout
        or normalize not in problem.layout
    ):
        return first

    layout = problem.layout
    dim = layout[normalize].shape[0]
    cap = max(float(dim), float(np.trace(layout[normalize].unpack(first.x))))

    def _cap_block(values):
        return np.diag([cap - np.trace(values[normalize]), cap - values[maximize].item()])

    polished = problem.with_extra(
        blocks=[affine_block("normalization", layout, _cap_block)],
        objective=-layout.linear({maximize: 1.0}),
        name=f"{problem.name}:polish",
    )
    second = solve(polished, contract)
    if second.feasible and replay_passes(problem, second.x, contract):
        return SolveOutcome(
            status=second.status,
            x=second.x,
            objective_value=None,
            weak=False,
            solver_status=second.solver_status,
            replay=replay(problem, second.x),
            solve_time=first.solve_time + second.solve_time,
        )
    return first
