"""Feasible-set forms, informativity LMIs and controller extraction."""

from .extract import MatrixJson, SynthesisResult, SynthesisSetup, extract_result, gain_from_certificate
from .forms import (
    FeasibleSetForm,
    SlaterReport,
    build_feasible_form_io,
    build_feasible_form_state,
    default_slater_candidates,
    feasible_form_from_norm_bound,
    rank_guideline,
    singleton_form,
    slater_diagnostics,
)
from .problems import SynthesisSettings, h2_problem, hinf_problem, stab_problem_io, stab_problem_state
from .synthesis import (
    BoundKind,
    Objective,
    default_performance,
    model_based_h2,
    model_based_hinf,
    prepare_form,
    synthesize,
)

__all__ = [
    "BoundKind",
    "FeasibleSetForm",
    "MatrixJson",
    "Objective",
    "SlaterReport",
    "SynthesisResult",
    "SynthesisSettings",
    "SynthesisSetup",
    "build_feasible_form_io",
    "build_feasible_form_state",
    "default_performance",
    "default_slater_candidates",
    "extract_result",
    "feasible_form_from_norm_bound",
    "gain_from_certificate",
    "h2_problem",
    "hinf_problem",
    "model_based_h2",
    "model_based_hinf",
    "prepare_form",
    "rank_guideline",
    "singleton_form",
    "slater_diagnostics",
    "stab_problem_io",
    "stab_problem_state",
    "synthesize",
]
