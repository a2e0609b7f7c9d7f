"""Contract tests for JSON schema validation."""

import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from typer.testing import CliRunner

from informa.cli import app
from informa.data_model import InstrumentSpec, save_trajectory
from informa.experiments import ExperimentConfig, benchmark_system
from informa.informativity import (
    BoundKind,
    MatrixJson,
    Objective,
    SynthesisResult,
    SynthesisSetup,
    prepare_form,
    singleton_form,
    synthesize,
)
from informa.sdp import SolverContract
from informa.verification import audit

SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"
runner = CliRunner(mix_stderr=False)


def load_schema(name):
    with open(SCHEMAS / name) as f:
        return json.load(f)


@pytest.fixture(autouse=True)
def _reset_json_mode(monkeypatch):
    monkeypatch.setenv("INFORMA_JSON_MODE", "0")


@pytest.fixture
def state_csv(tmp_path, state_traj):
    path = tmp_path / "state.csv"
    save_trajectory(state_traj, path)
    return path


def test_result_envelope_schema_validates_version_json():
    """informa version --json validates against the result schema."""
    result = runner.invoke(app, ["version", "--json"])
    output = json.loads(result.stdout)

    jsonschema.validate(output, load_schema("result.v1.json"))
    assert output["version"] == "1.0"
    assert output["command"] == ["informa", "version"]


def test_result_envelope_schema_validates_bound_check(state_csv):
    result = runner.invoke(
        app, ["bound-check", "--data", str(state_csv), "--hu", "0.001", "--bound", "norm", "--json"]
    )
    output = json.loads(result.stdout)

    jsonschema.validate(output, load_schema("result.v1.json"))
    assert output["code"] == "bound-check.ok"


def test_result_envelope_schema_validates_usage_error(tmp_path):
    missing = tmp_path / "model.json"
    missing.write_text("{}")
    result = runner.invoke(app, ["lift", "--model", str(missing), "--json"])
    output = json.loads(result.stdout)

    assert result.exit_code == 1
    jsonschema.validate(output, load_schema("result.v1.json"))


def test_infeasible_synthesis_result_schema():
    res = SynthesisResult(
        feasible=False,
        objective="h2",
        status="performance_not_met",
        setup=SynthesisSetup(kind="io", bound="crosscov", instrument="lags:0-9", l=3, Hu=MatrixJson.from_array([[0.3]])),
        diagnostics={"achieved_gamma": 2.5},
    )
    jsonschema.validate(json.loads(res.model_dump_json()), load_schema("synthesis-result.v1.json"))


def test_synthesis_result_schema_rejects_unknown_objective():
    payload = json.loads(SynthesisResult(feasible=False, objective="stab", status="infeasible").model_dump_json())
    payload["objective"] = "lqr"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(payload, load_schema("synthesis-result.v1.json"))


def test_audit_report_schema():
    A0, B0, _ = benchmark_system()
    K = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
    res = SynthesisResult(feasible=True, objective="stab", status="feasible", K=MatrixJson.from_array(K))
    report = audit(res, singleton_form(A0, B0), base=(A0, B0), samples=1)

    payload = json.loads(report.model_dump_json())
    jsonschema.validate(payload, load_schema("audit-report.v1.json"))
    assert payload["violations"][0]["reason"] == "unstable"


@pytest.mark.parametrize("config", [ExperimentConfig.state_default(), ExperimentConfig.io_default()])
def test_default_experiment_configs_match_schema(config):
    jsonschema.validate(config.model_dump(mode="json"), load_schema("experiment-config.v1.json"))


def test_experiment_schema_rejects_unknown_keys():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"study": "state", "colour": "red"}, load_schema("experiment-config.v1.json"))


@pytest.mark.solver
def test_feasible_synthesis_result_schema(state_traj):
    f, _ = prepare_form(state_traj, InstrumentSpec.identity(), 1e-3 * np.eye(3), bound=BoundKind.NORM)
    res = synthesize(f, Objective.STAB, contract=SolverContract())

    assert res.feasible
    jsonschema.validate(json.loads(res.model_dump_json()), load_schema("synthesis-result.v1.json"))
