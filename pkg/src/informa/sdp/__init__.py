"""Semidefinite programming layer: problem carrier, solver, bisection, export."""

from .bisect import BisectionResult, bisect_gamma
from .contract import SolveOutcome, SolverContract, SolveStatus
from .export import export_standard_form, read_standard_form
from .problem import LmiBlock, SdpProblem, VarLayout, affine_block, build_problem
from .solve import replay, replay_passes, solve, solve_polished

__all__ = [
    "BisectionResult",
    "LmiBlock",
    "SdpProblem",
    "SolveOutcome",
    "SolveStatus",
    "SolverContract",
    "VarLayout",
    "affine_block",
    "bisect_gamma",
    "build_problem",
    "export_standard_form",
    "read_standard_form",
    "replay",
    "replay_passes",
    "solve",
    "solve_polished",
]
