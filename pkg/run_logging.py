"""Logging estruturado de execuções (predict/analyze/simulate)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

logger = logging.getLogger(__name__)


@dataclass
class ComponentLogStats:
    component_id: int
    case: str
    points: int
    eta: Optional[float] = None
    rate_lower_bound: Optional[float] = None


@dataclass
class RunLogReport:
    scenario: str
    command: str
    method: Optional[str] = None
    dt: Optional[float] = None
    steps: Optional[int] = None
    components: List[ComponentLogStats] = field(default_factory=list)
    final_H: Optional[float] = None
    final_tv: Optional[float] = None
    fitted_rate: Optional[float] = None
    mass_drift: Optional[float] = None
    eta_drift: Optional[float] = None
    output_dir: Optional[str] = None
    error_code: Optional[str] = None
    elapsed_ms: Optional[float] = None


def _quote(value: str) -> str:
    escaped = (value or "").replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _num(value: float) -> str:
    return f"{value:.6g}"


def format_run_log(report: RunLogReport) -> str:
    lines = ["[reversal-run]", f"scenario={_quote(report.scenario)}", f"command={report.command}"]
    if report.method:
        lines.append(f"method={report.method}")
    if report.dt is not None:
        lines.append(f"dt={_num(report.dt)}")
    if report.steps is not None:
        lines.append(f"steps={report.steps}")

    lines.append(f"components={len(report.components)}")
    if report.components:
        lines.append("cases=" + ",".join(c.case for c in report.components))
        etas = [_num(c.eta) for c in report.components if c.eta is not None]
        if etas:
            lines.append("eta=" + ",".join(etas))
        bounds = [_num(c.rate_lower_bound) for c in report.components if c.rate_lower_bound is not None]
        if bounds:
            lines.append("rate_lower_bound=" + ",".join(bounds))

    for name in ("final_H", "final_tv", "fitted_rate", "mass_drift", "eta_drift"):
        value = getattr(report, name)
        if value is not None:
            lines.append(f"{name}={_num(value)}")
    if report.output_dir:
        lines.append(f"output_dir={_quote(report.output_dir)}")
    if report.error_code:
        lines.append(f"error={report.error_code}")
    if report.elapsed_ms is not None:
        lines.append(f"elapsed_ms={report.elapsed_ms:.1f}")
    return "\n".join(lines)


def emit_run_log(report: RunLogReport) -> None:
    logger.info("%s", format_run_log(report))
