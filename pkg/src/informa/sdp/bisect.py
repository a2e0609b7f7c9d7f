"""Bisection over a scalar performance level."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import BisectionNotFoundError, PreconditionError
from ..log import log_event
from .contract import SolveOutcome, SolverContract
from .problem import SdpProblem
from .solve import solve

DEFAULT_LO = 1e-6
DEFAULT_HI = 1e6
DEFAULT_MAX_ITER = 40


@dataclass(frozen=True)
class BisectionResult:
    """Smallest feasible level found, with the certificate solved there."""

    gamma_star: float
    outcome: SolveOutcome
    problem: SdpProblem
    iterations: int
    history: list[tuple[float, str]] = field(default_factory=list)


def bisect_gamma(
    builder: Callable[[float], SdpProblem],
    lo: float = DEFAULT_LO,
    hi: float = DEFAULT_HI,
    tol_rel: float = 1e-4,
    contract: Optional[SolverContract] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    solver: Callable[[SdpProblem, SolverContract], SolveOutcome] = solve,
) -> BisectionResult:
    """Find the smallest γ in [lo, hi] for which ``builder(γ)`` is feasible.

    Assumes feasibility is monotone in γ. Midpoints are geometric, so a
    bracket spanning many decades still closes within ``max_iter`` steps.
    Only Feasible outcomes (which have passed replay) count as feasible.

    Raises:
        PreconditionError: lo > hi or lo <= 0
        BisectionNotFoundError: ``builder(hi)`` is not feasible
    """
    if lo <= 0 or lo > hi:
        raise PreconditionError(f"need 0 < lo <= hi, got lo={lo}, hi={hi}")
    contract = contract or SolverContract.resolve()
    history: list[tuple[float, str]] = []

    def _try(gamma: float) -> tuple[SdpProblem, SolveOutcome]:
        problem = builder(gamma)
        outcome = solver(problem, contract)
        history.append((gamma, outcome.status.value))
        log_event("bisection_step", {"problem": problem.name, "gamma": gamma, "status": outcome.status.value})
        return problem, outcome

    best_problem, best = _try(hi)
    if not best.feasible:
        raise BisectionNotFoundError(
            f"infeasible at the upper end gamma={hi:g} ({best.status.value})", outcome=best
        )

    low_problem, low = _try(lo)
    if low.feasible:
        return BisectionResult(lo, low, low_problem, 1, history)

    iterations = 0
    while iterations < max_iter and hi - lo > tol_rel * hi:
        iterations += 1
        mid = math.sqrt(lo * hi)
        problem, outcome = _try(mid)
        if outcome.feasible:
            hi, best, best_problem = mid, outcome, problem
        else:
            lo = mid

    return BisectionResult(hi, best, best_problem, iterations, history)
