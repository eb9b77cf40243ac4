"""
Pipelines predict / analyze / simulate e escrita dos artefatos de execução.

Artefatos (diretório de saída):
  manifest.json     config resolvida + versões (sem carimbo de hora)
  components.json   relatório das componentes
  prediction.csv    point,f_infty
  snapshots.csv     t,index,point,f
  diagnostics.csv   colunas de DiagnosticsSeries
  profiles.gp, masses.gp, entropy.gp
  run_summary.pdf   quando diagnostics.pdf_report
"""
from __future__ import annotations

import json
import logging
import platform
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from diagnostics import (
    ConservationReport,
    DecayFit,
    DiagnosticsSeries,
    compute_series,
    conserved_report,
    fit_decay_rate,
)
from dynamics import LinearGenerator, Trajectory, build_generator, simulate
from equilibrium import EquilibriumPrediction, predict_equilibrium
from experiment_config import Experiment, ExperimentConfig, build_experiment
from interaction_graph import (
    CASE_ISOLATED,
    component_count_bound,
    gap_interval_exists,
    rate_lower_bound_details,
)
from kernel import KERNEL_INDICATOR
from run_logging import ComponentLogStats, RunLogReport, emit_run_log
from runtime_settings import OUTPUT_DIR
from simulation_errors import INSUFFICIENT_DATA, IO_ERROR, SimulationError

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.17g"
TRACKED_PACKAGES = ("numpy", "scipy", "POT", "pydantic")


# ============================================================
# RESULTADOS
# ============================================================

@dataclass
class AnalyzeResult:
    experiment: Experiment
    prediction: EquilibriumPrediction
    components: List[Dict[str, Any]]
    report: Dict[str, Any]


@dataclass
class SimulationResult:
    experiment: Experiment
    prediction: EquilibriumPrediction
    trajectory: Trajectory
    series: DiagnosticsSeries
    conservation: ConservationReport
    fit: Optional[DecayFit]
    components: List[Dict[str, Any]]
    outputs: List[str] = field(default_factory=list)


# ============================================================
# RELATÓRIOS
# ============================================================

def component_report(prediction: EquilibriumPrediction, with_bounds: bool = True) -> List[Dict[str, Any]]:
    """Uma entrada por componente, chaves em ordem fixa."""
    graph = prediction.graph
    coords = prediction.mu.space.coords
    out: List[Dict[str, Any]] = []
    for rec in prediction.components:
        entry: Dict[str, Any] = {
            "id": rec.component_id,
            "points": [float(coords[i]) for i in rec.points],
            "indices": list(rec.points),
            "case": rec.case,
            "mass": rec.rho,
            "partner": rec.partner_id,
            "reverse": rec.reverse_id,
            "orbit": rec.orbit_id,
            "eta": rec.eta,
            "rate_lower_bound": None,
            "constant_C": None,
            "beta": None,
        }
        if with_bounds and rec.case != CASE_ISOLATED:
            bound = rate_lower_bound_details(graph.components[rec.component_id],
                                             graph.partners(rec.component_id),
                                             prediction.mu, graph.kernel)
            entry["rate_lower_bound"] = bound.rate
            entry["constant_C"] = bound.constant_C
            entry["beta"] = bound.beta
        out.append(entry)
    return out


def _circle_structure(experiment: Experiment, prediction: EquilibriumPrediction) -> Dict[str, Any]:
    kernel = experiment.kernel
    if not experiment.space.is_circle or kernel.kind != KERNEL_INDICATOR or kernel.alpha is None:
        return {"count_bound": None, "gap_intervals": None}
    return {
        "count_bound": component_count_bound(kernel.alpha),
        "gap_intervals": gap_interval_exists(prediction.mu, kernel.alpha),
    }


def _min_bound(components: List[Dict[str, Any]]) -> Optional[float]:
    bounds = [c["rate_lower_bound"] for c in components if c["rate_lower_bound"] is not None]
    return min(bounds) if bounds else None


# ============================================================
# PIPELINES
# ============================================================

def run_predict(config: ExperimentConfig) -> AnalyzeResult:
    experiment = build_experiment(config)
    prediction = predict_equilibrium(experiment.initial, experiment.kernel)
    components = component_report(prediction, with_bounds=False)
    report = {"scenario": config.name, "components": components}
    return AnalyzeResult(experiment, prediction, components, report)


def run_analyze(config: ExperimentConfig) -> AnalyzeResult:
    experiment = build_experiment(config)
    prediction = predict_equilibrium(experiment.initial, experiment.kernel)
    components = component_report(prediction)
    generator: LinearGenerator = build_generator(prediction.mu, experiment.kernel)
    gap = generator.spectral_gap()
    report: Dict[str, Any] = {
        "scenario": config.name,
        "components": components,
        **_circle_structure(experiment, prediction),
        "spectral_gap": gap,
        "entropy_rate_from_spectrum": 2.0 * gap if gap is not None else None,
        "min_rate_lower_bound": _min_bound(components),
    }
    return AnalyzeResult(experiment, prediction, components, report)


def fit_series(series: DiagnosticsSeries) -> Optional[DecayFit]:
    """Ajusta Σ ℋ_𝒯 quando há componentes não isoladas (η ≠ 0 incluso); senão ℋ."""
    values = series.excess_entropy if series.component_ids else series.H
    try:
        return fit_decay_rate(series.times, values)
    except SimulationError as e:
        if e.code != INSUFFICIENT_DATA:
            raise
        logger.info("rate_fit_skipped reason=%s", e.message)
        return None


def run_simulation(config: ExperimentConfig) -> SimulationResult:
    experiment = build_experiment(config)
    integ = config.integrator
    prediction = predict_equilibrium(experiment.initial, experiment.kernel)
    trajectory = simulate(experiment.initial, experiment.kernel, integ.method,
                          integ.dt, integ.steps, integ.snapshot_every)
    series = compute_series(trajectory, prediction, experiment.kernel, w1=config.diagnostics.w1)
    conservation = conserved_report(trajectory, prediction.graph, series)
    fit = fit_series(series)
    components = component_report(prediction)
    return SimulationResult(experiment, prediction, trajectory, series, conservation, fit, components)


# ============================================================
# ESCRITA
# ============================================================

def versions() -> Dict[str, str]:
    out = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            out[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            out[name] = "unknown"
    return out


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao escrever {path}: {e}") from e


def write_json(path: Path, payload: Any) -> None:
    _write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def write_csv(path: Path, header: List[str], rows: np.ndarray) -> None:
    try:
        np.savetxt(path, np.atleast_2d(rows), fmt=CSV_FORMAT, delimiter=",",
                   header=",".join(header), comments="")
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao escrever {path}: {e}") from e


def prepare_output_dir(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> Path:
    target = Path(out or config.output_dir or Path(OUTPUT_DIR) / config.name)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao criar {target}: {e}") from e
    return target


def write_prediction(out_dir: Path, prediction: EquilibriumPrediction) -> None:
    coords = prediction.f_infty.space.coords
    write_csv(out_dir / "prediction.csv", ["point", "f_infty"],
              np.column_stack([coords, prediction.f_infty.values]))


def write_snapshots(out_dir: Path, trajectory: Trajectory) -> None:
    coords = trajectory.space.coords
    n = coords.size
    snaps = len(trajectory)
    rows = np.column_stack([
        np.repeat(trajectory.times, n),
        np.tile(np.arange(n), snaps),
        np.tile(coords, snaps),
        trajectory.values.reshape(-1),
    ])
    write_csv(out_dir / "snapshots.csv", ["t", "index", "point", "f"], rows)


def write_diagnostics(out_dir: Path, series: DiagnosticsSeries) -> None:
    cols = series.columns()
    write_csv(out_dir / "diagnostics.csv", list(cols), np.column_stack(list(cols.values())))


def plot_scripts(series: DiagnosticsSeries, snapshots: int, points: int) -> Dict[str, str]:
    """Scripts gnuplot lendo os CSVs do próprio diretório."""
    cols = list(series.columns())
    entropy_col = cols.index("H") + 1
    last = snapshots - 1
    profiles = "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'x'",
        "set ylabel 'f'",
        f"plot 'snapshots.csv' every ::0::{points - 1} using 3:4 with lines title 't inicial', \\",
        f"     'snapshots.csv' every ::{last * points}::{(last + 1) * points - 1} using 3:4 with lines title 't final', \\",
        "     'prediction.csv' using 1:2 with points title 'f_infty'",
        "",
    ])
    masses = "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        "plot for [c=2:4] 'diagnostics.csv' using 1:c with lines",
        "",
    ])
    entropy = "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set logscale y",
        "set xlabel 't'",
        f"plot 'diagnostics.csv' using 1:{entropy_col} with lines",
        "",
    ])
    return {"profiles.gp": profiles, "masses.gp": masses, "entropy.gp": entropy}


def _fit_payload(fit: Optional[DecayFit]) -> Optional[Dict[str, Any]]:
    if fit is None:
        return None
    return {"lambda": fit.lambda_, "r_squared": fit.r_squared, "window": list(fit.window), "samples": fit.samples}


def _conservation_payload(report: ConservationReport) -> Dict[str, Any]:
    return {
        "mass_drift": report.mass_drift,
        "symmetric_drift": report.symmetric_drift,
        "eta_drift": report.eta_drift,
        "upper_mass_drift": report.upper_mass_drift,
        "lower_mass_drift": report.lower_mass_drift,
        "half_masses_are_component_union": report.half_masses_are_component_union,
        "final_upper_mass": report.final_upper_mass,
        "final_lower_mass": report.final_lower_mass,
        "max_entropy_increase": report.max_entropy_increase,
    }


def manifest(config: ExperimentConfig, command: str, outputs: List[str], **extra: Any) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "name": config.name,
        "command": command,
        "config": config.model_dump(mode="json"),
        "versions": versions(),
        "outputs": sorted(outputs),
    }
    payload.update(extra)
    return payload


def write_predict_outputs(result: AnalyzeResult, out_dir: Path, command: str = "predict") -> List[str]:
    write_prediction(out_dir, result.prediction)
    name = "components.json" if command == "predict" else "analysis.json"
    write_json(out_dir / name, result.report)
    outputs = ["prediction.csv", name, "manifest.json"]
    write_json(out_dir / "manifest.json", manifest(result.experiment.config, command, outputs))
    return outputs


def write_simulation_outputs(result: SimulationResult, out_dir: Path) -> List[str]:
    config = result.experiment.config
    write_prediction(out_dir, result.prediction)
    write_snapshots(out_dir, result.trajectory)
    write_diagnostics(out_dir, result.series)
    write_json(out_dir / "components.json", {"scenario": config.name, "components": result.components})
    outputs = ["prediction.csv", "snapshots.csv", "diagnostics.csv", "components.json"]
    for name, text in plot_scripts(result.series, len(result.trajectory), result.trajectory.space.size).items():
        _write_text(out_dir / name, text)
        outputs.append(name)
    if config.diagnostics.pdf_report:
        from report_pdf_service import write_run_summary_pdf

        write_run_summary_pdf(out_dir / "run_summary.pdf", result)
        outputs.append("run_summary.pdf")
    outputs.append("manifest.json")
    write_json(out_dir / "manifest.json", manifest(
        config, "simulate", outputs,
        method_used=result.trajectory.method,
        fit=_fit_payload(result.fit),
        conservation=_conservation_payload(result.conservation),
    ))
    result.outputs = outputs
    return outputs


# ============================================================
# LOG
# ============================================================

def log_stats(components: List[Dict[str, Any]]) -> List[ComponentLogStats]:
    return [
        ComponentLogStats(c["id"], c["case"], len(c["indices"]), c["eta"], c["rate_lower_bound"])
        for c in components
    ]


def run(config: ExperimentConfig, command: str = "simulate",
        out: Optional[Union[str, Path]] = None) -> Union[AnalyzeResult, SimulationResult]:
    """Executa o pipeline do comando, grava os artefatos e emite o log da execução."""
    started = time.perf_counter()
    report = RunLogReport(scenario=config.name, command=command)
    try:
        if command == "simulate":
            report.method = config.integrator.method
            report.dt = config.integrator.dt
            report.steps = config.integrator.steps
            result: Union[AnalyzeResult, SimulationResult] = run_simulation(config)
            out_dir = prepare_output_dir(config, out)
            write_simulation_outputs(result, out_dir)
            report.final_H = float(result.series.H[-1])
            report.final_tv = float(result.series.tv_to_finfty[-1])
            report.mass_drift = result.conservation.mass_drift
            report.eta_drift = result.conservation.eta_drift
            report.fitted_rate = result.fit.lambda_ if result.fit else None
        else:
            result = run_analyze(config) if command == "analyze" else run_predict(config)
            out_dir = prepare_output_dir(config, out)
            write_predict_outputs(result, out_dir, command)
        report.components = log_stats(result.components)
        report.output_dir = str(out_dir)
        return result
    except SimulationError as e:
        report.error_code = e.code
        raise
    finally:
        report.elapsed_ms = (time.perf_counter() - started) * 1000.0
        emit_run_log(report)
