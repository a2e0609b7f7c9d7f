"""Main CLI application for informa."""

import json
import os
import sys
import time
import uuid
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Optional

import click
import numpy as np
import typer
from pydantic import ValidationError

from . import result
from . import version as version_module
from .data_model import InstrumentSpec, TrajectoryKind, load_trajectory, noise_bound_margin
from .errors import DataFormatError, InformaError, PreconditionError
from .experiments import emit_plot_data, load_experiment_config, run_sweep
from .informativity import (
    BoundKind,
    MatrixJson,
    Objective,
    SynthesisResult,
    SynthesisSetup,
    default_performance,
    h2_problem,
    hinf_problem,
    prepare_form,
    rank_guideline,
    slater_diagnostics,
    stab_problem_io,
    stab_problem_state,
    synthesize,
)
from .lifting import lift_arx, lift_structure, load_model
from .log import log_event
from .sdp import SolverContract, export_standard_form, replay, replay_passes
from .ui import print_dim, print_error, print_info, print_kv, print_matrix, print_success, print_warning
from .ui.progress import progress_tracker
from .verification import audit

app = typer.Typer(add_completion=False, help="Data informativity and certified controller synthesis.")


class Mode(str, Enum):
    STATE = "state"
    IO = "io"


def version_callback(value: bool):
    """Handle --version flag."""
    if value:
        print_info(f"informa {version_module.__version__}")
        raise typer.Exit(0)


@app.callback()
def main_callback(
    no_color: bool = typer.Option(False, "--no-color", help="Disable colored output", envvar="INFORMA_NO_COLOR"),
    version_flag: bool = typer.Option(
        False, "--version", "-v", help="Show version and exit", callback=version_callback, is_eager=True
    ),
):
    """Decide whether noisy data are informative for stabilization, H∞ or H2 control."""
    if no_color:
        os.environ["NO_COLOR"] = "1"


class _Run:
    """Timing and envelope emission for one command."""

    def __init__(self, command: list[str], json_output: bool):
        self.command = command
        self.json_output = json_output
        self.started = time.monotonic()
        if json_output:
            os.environ["INFORMA_JSON_MODE"] = "1"

    def finish(
        self,
        status: str,
        summary: str,
        exit_code: int,
        facts: Optional[dict[str, Any]] = None,
        next_steps: Optional[list[result.NextStep]] = None,
    ) -> None:
        if self.json_output:
            envelope = result.ResultEnvelope(
                command=["informa", *self.command],
                status=status,
                code=f"{self.command[0]}.{status}",
                summary=summary,
                run_id=str(uuid.uuid4()),
                duration_ms=int((time.monotonic() - self.started) * 1000),
                facts=facts or {},
                next=next_steps or [],
            )
            print(envelope.model_dump_json(indent=2))
        sys.exit(exit_code)


@contextmanager
def _guarded(run: _Run) -> Iterator[None]:
    """Map exceptions to exit codes: input problems 1, anything unexpected 3."""
    try:
        yield
    except (InformaError, ValidationError) as e:
        if not run.json_output:
            print_error(str(e))
        run.finish("usage_error", str(e), result.EXIT_USAGE, {"error": type(e).__name__})
    except click.exceptions.Exit:
        raise
    except Exception as e:  # noqa: BLE001
        log_event("cli_error", {"command": run.command, "error": repr(e)})
        if not run.json_output:
            print_error(f"unexpected failure: {e}")
        run.finish("numerical_failure", str(e), result.EXIT_NUMERICAL, {"error": type(e).__name__})


def _matrix_arg(text: str, p: int) -> np.ndarray:
    """A scalar (times I_p) or a CSV file holding a matrix."""
    try:
        return float(text) * np.eye(p)
    except ValueError:
        pass
    try:
        return np.loadtxt(text, delimiter=",", ndmin=2)
    except (OSError, ValueError) as e:
        raise DataFormatError(f"cannot read matrix '{text}': {e}") from e


def _load(data: Path, mode: Optional[Mode], instrument: str, hu: str, l: Optional[int], bound: BoundKind):
    traj = load_trajectory(data)
    if mode is not None:
        expected = TrajectoryKind.INPUT_STATE if mode is Mode.STATE else TrajectoryKind.INPUT_OUTPUT
        if traj.kind is not expected:
            raise PreconditionError(f"--{mode.value} given but {data} holds {traj.kind.value} data")
    spec = InstrumentSpec.parse(instrument)
    Hu = _matrix_arg(hu, traj.p)
    f, s = prepare_form(traj, spec, Hu, l=l, bound=bound)
    setup = SynthesisSetup(
        kind=traj.kind.value,
        bound=bound.value,
        instrument=instrument,
        l=l if traj.kind is TrajectoryKind.INPUT_OUTPUT else None,
        Hu=MatrixJson.from_array(Hu),
    )
    return f, s, setup


def _verdict(res: SynthesisResult) -> tuple[str, int]:
    if res.feasible:
        return "informative", result.EXIT_OK
    if res.status in ("infeasible", "performance_not_met"):
        return "not_informative", result.EXIT_NOT_INFORMATIVE
    return "numerical_failure", result.EXIT_NUMERICAL


DataOpt = typer.Option(..., "--data", help="Trajectory CSV (t,u1..,y1.. or t,u1..,x1..)", exists=True, dir_okay=False)
InstrumentOpt = typer.Option("identity", "--instrument", help="identity | lags:0-9 | lags:0,2 | csv:<path>")
HuOpt = typer.Option(..., "--hu", help="Bound Hu: scalar (times I) or CSV matrix file")
LagOpt = typer.Option(None, "--lags", "-l", help="ARX lag order l (input-output data)")
BoundOpt = typer.Option(BoundKind.CROSSCOV, "--bound", help="Noise model")
ModeOpt = typer.Option(None, "--state/--io", help="Assert the data kind")
JsonOpt = typer.Option(False, "--json", help="Output as JSON")


@app.command()
def version(json_output: bool = JsonOpt):
    """Show version and numerical stack information."""
    run = _Run(["version"], json_output)
    with _guarded(run):
        info = version_module.get_version_info()
        if not json_output:
            print_info(f"informa version {info['version']} ({info['commit']})")
            for name, v in info["stack"].items():
                print_kv(name, v)
            print_dim(f"solvers: {', '.join(info['solvers']) or 'none'}")
        run.finish("ok", "Version information", result.EXIT_OK, info)


@app.command()
def lift(
    model: Optional[Path] = typer.Option(None, "--model", help="ARX model JSON ({l,p,m,A_coeffs,B_coeffs} or {A0,B0,C0})"),
    l: Optional[int] = LagOpt,
    p: int = typer.Option(1, "--p", help="Outputs (structure only)"),
    m: int = typer.Option(1, "--m", help="Inputs (structure only)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the realization as JSON"),
    json_output: bool = JsonOpt,
):
    """Show the non-minimal state-space lifting of an ARX model."""
    run = _Run(["lift"], json_output)
    with _guarded(run):
        matrices: dict[str, np.ndarray] = {}
        if model is not None:
            arx = load_model(model)
            ss = lift_arx(arx)
            l, p, m = arx.l, arx.p, arx.m
            matrices = {"Az": ss.Az, "Bz": ss.Bz, "Hz": ss.Hz, "Cz": ss.Cz, "Dz": ss.Dz}
        elif l is None:
            raise PreconditionError("give --model or the structure --lags/--p/--m")
        s = lift_structure(l, p, m)
        matrices.setdefault("Hz", s.Hz)
        matrices.update({"J1": s.J1, "J2": s.J2})

        facts: dict[str, Any] = {"l": l, "p": p, "m": m, "n": s.n, "rank_guideline": rank_guideline(l, p, m)}
        if out is not None:
            payload = {k: MatrixJson.from_array(v).model_dump() for k, v in matrices.items()}
            out.write_text(json.dumps({**facts, "matrices": payload}, indent=2))
            facts["out"] = str(out)
        if not json_output:
            print_kv("state dimension n", str(s.n))
            print_kv("instrument rows needed", str(facts["rank_guideline"]))
            for name in ("Az", "Bz"):
                if name in matrices:
                    print_matrix(name, matrices[name])
        run.finish("ok", f"Lifted l={l}, p={p}, m={m} to n={s.n}", result.EXIT_OK, facts)


@app.command("bound-check")
def bound_check(
    data: Path = DataOpt,
    instrument: str = InstrumentOpt,
    hu: str = HuOpt,
    l: Optional[int] = LagOpt,
    bound: BoundKind = BoundOpt,
    mode: Optional[bool] = ModeOpt,
    noise: Optional[Path] = typer.Option(None, "--noise", help="CSV of E- (p rows by N columns) to test against the bound"),
    json_output: bool = JsonOpt,
):
    """Build the feasible set and report rank, inertia, Slater and (optionally) a noise check."""
    run = _Run(["bound-check"], json_output)
    with _guarded(run):
        f, s, _ = _load(data, _mode(mode), instrument, hu, l, bound)
        slater = slater_diagnostics(f)
        facts: dict[str, Any] = {
            "kind": f.kind.value,
            "N": f.data.N if f.data is not None else None,
            "instrument_rows": f.instrument.M if f.instrument is not None else None,
            "rank_flag": f.rank_flag,
            "positive_inertia": slater.positive_inertia,
            "slater": slater.to_dict(),
        }
        if s is not None:
            facts["rank_guideline"] = rank_guideline(s.l, s.p, s.m)

        status, code = "ok", result.EXIT_OK
        if noise is not None:
            Em = _matrix_arg(str(noise), 1)
            margin = noise_bound_margin(Em, f.instrument, f.bound)
            holds = margin >= -f.bound.tol_psd
            facts.update({"noise_margin": margin, "bound_holds": holds})
            if not holds:
                status, code = "bound_violated", result.EXIT_NOT_INFORMATIVE

        if not json_output:
            print_kv("rank condition", "full column rank" if f.rank_flag else "rank deficient")
            if "rank_guideline" in facts and facts["instrument_rows"] < facts["rank_guideline"]:
                print_warning(f"{facts['instrument_rows']} instruments, at least {facts['rank_guideline']} recommended")
            print_kv("positive inertia", f"{slater.positive_inertia} (need {slater.required_inertia})")
            (print_success if slater.holds else print_warning)(
                f"Slater condition {'holds' if slater.holds else 'not verified'}"
                + (f" (witness: {slater.witness_source})" if slater.holds else "")
            )
            if noise is not None:
                (print_success if code == result.EXIT_OK else print_error)(
                    f"noise bound margin {facts['noise_margin']:.3g}"
                )
        run.finish(status, "Feasible-set diagnostics", code, facts)


def _mode(flag: Optional[bool]) -> Optional[Mode]:
    if flag is None:
        return None
    return Mode.STATE if flag else Mode.IO


@app.command()
def synth(
    objective: Objective = typer.Argument(..., help="stab | hinf | h2"),
    data: Path = DataOpt,
    instrument: str = InstrumentOpt,
    hu: str = HuOpt,
    l: Optional[int] = LagOpt,
    bound: BoundKind = BoundOpt,
    mode: Optional[bool] = ModeOpt,
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Performance level to certify"),
    cz: Optional[Path] = typer.Option(None, "--cz", help="CSV performance output matrix Cz"),
    dz: Optional[Path] = typer.Option(None, "--dz", help="CSV feedthrough matrix Dz"),
    linear_gamma: bool = typer.Option(False, "--linear-gamma", help="H∞: minimize γ in one solve"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the SynthesisResult JSON"),
    json_output: bool = JsonOpt,
):
    """Decide informativity and synthesize a certified controller."""
    run = _Run(["synth", objective.value], json_output)
    with _guarded(run):
        if gamma is not None and gamma <= 0:
            raise PreconditionError("--gamma must be positive")
        f, s, setup = _load(data, _mode(mode), instrument, hu, l, bound)
        Cz, Dz = default_performance(f, s)
        if cz is not None:
            Cz = _matrix_arg(str(cz), 1)
            Dz = np.zeros((Cz.shape[0], f.m))
        if dz is not None:
            Dz = _matrix_arg(str(dz), 1)

        res = synthesize(
            f, objective, s, Cz=Cz, Dz=Dz, gamma=gamma,
            contract=SolverContract.resolve(), linear_in_gamma=linear_gamma, setup=setup,
        )
        if out is not None:
            out.write_text(res.model_dump_json(indent=2))

        status, code = _verdict(res)
        facts: dict[str, Any] = {
            "objective": objective.value,
            "feasible": res.feasible,
            "solver_status": res.status,
            "weak": res.weak,
            "gamma": res.gamma,
            "K": res.K.model_dump() if res.K is not None else None,
            "diagnostics": res.diagnostics,
        }
        next_steps = []
        if out is not None:
            facts["out"] = str(out)
            if res.feasible:
                next_steps.append(
                    result.NextStep(
                        run=["informa", "verify", "--result", str(out), "--data", str(data)],
                        summary="Audit the controller on sampled consistent systems",
                    )
                )
        if not json_output:
            if res.feasible:
                print_success(f"data are informative for {objective.value}")
                if res.gamma is not None:
                    print_kv("gamma", f"{res.gamma:.6g}")
                print_matrix("K", res.gain())
            elif code == result.EXIT_NOT_INFORMATIVE:
                print_warning(f"data are not informative for {objective.value} ({res.status})")
            else:
                print_error(f"solver could not decide ({res.status})")
        run.finish(status, f"{objective.value}: {status.replace('_', ' ')}", code, facts, next_steps)


def _rebuild_problem(res: SynthesisResult, f, s):
    setup = res.setup
    Cz = setup.Cz.to_array() if setup.Cz is not None else default_performance(f, s)[0]
    Dz = setup.Dz.to_array() if setup.Dz is not None else default_performance(f, s)[1]
    if res.objective == "stab":
        problem = stab_problem_io(f, s) if s is not None else stab_problem_state(f)
    elif res.objective == "hinf":
        problem = hinf_problem(f, s, Cz, Dz, gamma=res.gamma)
    else:
        problem = h2_problem(f, s, Cz, Dz)
    return problem, Cz, Dz


@app.command()
def verify(
    result_path: Path = typer.Option(..., "--result", help="SynthesisResult JSON from synth --out", exists=True),
    data: Path = DataOpt,
    samples: int = typer.Option(50, "--samples", help="Members of the feasible set to test"),
    seed: int = typer.Option(0, "--seed", help="Sampling seed"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the AuditReport JSON"),
    json_output: bool = JsonOpt,
):
    """Replay the stored certificate and audit the controller on sampled systems."""
    run = _Run(["verify"], json_output)
    with _guarded(run):
        res = SynthesisResult.model_validate_json(result_path.read_text())
        if res.setup is None or res.setup.Hu is None:
            raise PreconditionError(f"{result_path} carries no setup; re-run synth with --out")
        if not res.feasible:
            raise PreconditionError("result is not informative; nothing to verify")
        setup = res.setup
        traj = load_trajectory(data)
        f, s = prepare_form(
            traj, InstrumentSpec.parse(setup.instrument), setup.Hu.to_array(), l=setup.l, bound=BoundKind(setup.bound)
        )
        problem, Cz, Dz = _rebuild_problem(res, f, s)
        x = problem.layout.pack(res.certificate(float(problem.meta.get("lambda_scale", 1.0))))
        contract = SolverContract.resolve()
        replay_ok = replay_passes(problem, x, contract)

        report = audit(res, f, s, Cz=Cz, Dz=Dz, samples=samples, seed=seed, bound_type=setup.bound)
        if out is not None:
            out.write_text(report.model_dump_json(indent=2))

        ok = replay_ok and report.passed
        facts = {
            "replay_ok": replay_ok,
            "replay": replay(problem, x),
            "audit": report.model_dump(mode="json"),
        }
        if not json_output:
            (print_success if replay_ok else print_error)(f"certificate replay {'passed' if replay_ok else 'failed'}")
            print_kv("samples tested", str(report.samples_tested))
            print_kv("max spectral radius", f"{report.max_spectral_radius:.6g}")
            if report.violations:
                print_error(f"{len(report.violations)} sampled systems violate the claim")
            else:
                print_success("no violations")
        run.finish(
            "verified" if ok else "violated",
            f"{report.samples_tested} samples, {len(report.violations)} violations",
            result.EXIT_OK if ok else result.EXIT_NUMERICAL,
            facts,
        )


@app.command()
def experiment(
    config: Path = typer.Option(..., "--config", help="ExperimentConfig as JSON or YAML", exists=True),
    outdir: Path = typer.Option(Path("results"), "--outdir", help="Directory for CSV and JSON output"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Process pool size (overrides the config)"),
    json_output: bool = JsonOpt,
):
    """Run a Monte-Carlo informativity sweep and write plot data."""
    run = _Run(["experiment"], json_output)
    with _guarded(run):
        cfg = load_experiment_config(config)
        with progress_tracker(silent=json_output or None) as tracker:
            sweep = run_sweep(cfg, progress=tracker, workers=workers)
        paths = emit_plot_data(sweep, outdir)
        (outdir / "sweep.json").write_text(sweep.model_dump_json(indent=2))

        fractions = {
            label: {str(N): v for N, v in by_n.items()} for label, by_n in sweep.fractions().items()
        }
        facts = {
            "study": sweep.study,
            "cells": len(sweep.cells),
            "flagged": sweep.flagged,
            "fractions": fractions,
            "files": {k: str(v) for k, v in paths.items()},
        }
        if not json_output:
            for label, by_n in fractions.items():
                print_kv(label, ", ".join(f"N={N}: {v:.2f}" for N, v in by_n.items() if v is not None))
            if sweep.flagged:
                print_warning(f"{sweep.flagged} cells use data that violate their noise bound")
            print_success(f"wrote {outdir}")
        run.finish("ok", f"{len(sweep.cells)} cells", result.EXIT_OK, facts)


@app.command("export-sdpa")
def export_sdpa(
    problem_kind: Objective = typer.Option(..., "--problem", help="stab | hinf | h2"),
    data: Path = DataOpt,
    instrument: str = InstrumentOpt,
    hu: str = HuOpt,
    l: Optional[int] = LagOpt,
    bound: BoundKind = BoundOpt,
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Fixed H∞ level (otherwise γ is a variable)"),
    out: Path = typer.Option(..., "--out", help="SDPA sparse file (.dat-s)"),
    json_output: bool = JsonOpt,
):
    """Write the informativity SDP in SDPA sparse format."""
    run = _Run(["export-sdpa"], json_output)
    with _guarded(run):
        f, s, _ = _load(data, None, instrument, hu, l, bound)
        Cz, Dz = default_performance(f, s)
        if problem_kind is Objective.STAB:
            problem = stab_problem_io(f, s) if s is not None else stab_problem_state(f)
        elif problem_kind is Objective.HINF:
            problem = hinf_problem(f, s, Cz, Dz, gamma=gamma, linear_in_gamma=gamma is None)
        else:
            problem = h2_problem(f, s, Cz, Dz)
        export_standard_form(problem, out)
        facts = {"problem": problem.name, "num_vars": problem.num_vars, "block_sizes": problem.block_sizes, "out": str(out)}
        if not json_output:
            print_success(f"wrote {problem.name} ({problem.num_vars} variables) to {out}")
        run.finish("ok", f"Exported {problem.name}", result.EXIT_OK, facts)


def main():
    """Console entry point: typer usage errors exit 1."""
    try:
        app(standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        sys.exit(result.EXIT_USAGE)
    except click.exceptions.Abort:
        sys.exit(result.EXIT_USAGE)


if __name__ == "__main__":
    main()
