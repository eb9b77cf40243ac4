"""
Resumo em PDF (reportlab) de uma execução de simulate: cabeçalho, tabela de
componentes (caso, massa, η, cota de taxa), deriva das quantidades
conservadas e taxa ajustada.
"""
from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import TYPE_CHECKING, List, Optional, Union

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.units import mm
from reportlab.pdfgen import canvas
from reportlab.platypus import Table, TableStyle

from simulation_errors import IO_ERROR, SimulationError

if TYPE_CHECKING:
    from run_service import SimulationResult

logger = logging.getLogger(__name__)

COR_HEADER = colors.Color(40 / 255, 70 / 255, 120 / 255)
MAX_TABLE_ROWS = 40


def _fmt(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}"


def _draw_table(c: canvas.Canvas, data: List[List[str]], x: float, y: float, col_widths: List[float]) -> float:
    """Desenha tabela e retorna y final (abaixo da tabela)."""
    table = Table(data, colWidths=col_widths, repeatRows=1)
    table.setStyle(
        TableStyle(
            [
                ("BACKGROUND", (0, 0), (-1, 0), COR_HEADER),
                ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
                ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
                ("FONTSIZE", (0, 0), (-1, -1), 8),
                ("GRID", (0, 0), (-1, -1), 0.3, colors.Color(0.7, 0.7, 0.7)),
                ("ALIGN", (1, 0), (-1, -1), "RIGHT"),
            ]
        )
    )
    _, h = table.wrap(sum(col_widths), 500)
    table.drawOn(c, x, y - h)
    return y - h


def component_rows(result: "SimulationResult") -> List[List[str]]:
    rows = [["id", "caso", "pontos", "massa", "eta", "cota de taxa"]]
    for comp in result.components[:MAX_TABLE_ROWS]:
        rows.append([
            str(comp["id"]),
            comp["case"],
            str(len(comp["indices"])),
            _fmt(comp["mass"]),
            _fmt(comp["eta"]),
            _fmt(comp["rate_lower_bound"]),
        ])
    return rows


def build_run_summary_pdf(result: "SimulationResult") -> bytes:
    config = result.experiment.config
    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=A4)
    page_w, page_h = A4
    M = 15 * mm

    c.setFillColor(COR_HEADER)
    c.rect(0, page_h - 18 * mm, page_w, 18 * mm, fill=1, stroke=0)
    c.setFillColor(colors.white)
    c.setFont("Helvetica-Bold", 14)
    c.drawCentredString(page_w / 2, page_h - 11 * mm, f"EXECUÇÃO: {config.name}")
    c.setFillColor(colors.black)

    y = page_h - 28 * mm
    c.setFont("Helvetica", 9)
    integ = config.integrator
    c.drawString(M, y, f"espaço: {result.experiment.space.kind} ({result.experiment.space.size} pontos)   "
                       f"kernel: {result.experiment.kernel.kind}")
    y -= 5 * mm
    c.drawString(M, y, f"método: {result.trajectory.method}   dt: {integ.dt:g}   passos: {integ.steps}   "
                       f"t final: {float(result.trajectory.times[-1]):g}")
    y -= 8 * mm

    c.setFont("Helvetica-Bold", 10)
    c.drawString(M, y, "Componentes")
    y -= 3 * mm
    y = _draw_table(c, component_rows(result), M, y, [15 * mm, 30 * mm, 20 * mm, 30 * mm, 30 * mm, 30 * mm])
    if len(result.components) > MAX_TABLE_ROWS:
        y -= 4 * mm
        c.setFont("Helvetica", 8)
        c.drawString(M, y, f"... {len(result.components) - MAX_TABLE_ROWS} componentes omitidas")
    y -= 8 * mm

    cons = result.conservation
    c.setFont("Helvetica-Bold", 10)
    c.drawString(M, y, "Quantidades conservadas")
    y -= 3 * mm
    rows = [
        ["grandeza", "deriva máxima"],
        ["massa total", _fmt(cons.mass_drift, 3)],
        ["parte simétrica", _fmt(cons.symmetric_drift, 3)],
        ["eta por componente", _fmt(cons.eta_drift, 3)],
        ["massa superior", _fmt(cons.upper_mass_drift, 3)],
        ["massa inferior", _fmt(cons.lower_mass_drift, 3)],
        ["aumento de H", _fmt(cons.max_entropy_increase, 3)],
    ]
    y = _draw_table(c, rows, M, y, [50 * mm, 40 * mm])
    y -= 8 * mm

    c.setFont("Helvetica-Bold", 10)
    c.drawString(M, y, "Decaimento")
    y -= 5 * mm
    c.setFont("Helvetica", 9)
    if result.fit is None:
        c.drawString(M, y, "sem ajuste (amostras insuficientes acima do piso)")
    else:
        c.drawString(M, y, f"taxa ajustada: {_fmt(result.fit.lambda_)}   r2: {_fmt(result.fit.r_squared, 4)}   "
                           f"janela: [{result.fit.window[0]:g}, {result.fit.window[1]:g}]")
    y -= 5 * mm
    c.drawString(M, y, f"tv final até f_infty: {_fmt(float(result.series.tv_to_finfty[-1]), 3)}")

    c.setFont("Helvetica", 8)
    c.drawCentredString(page_w / 2, 10 * mm, "Documento gerado automaticamente pelo simulador.")
    c.showPage()
    c.save()
    return buf.getvalue()


def write_run_summary_pdf(path: Union[str, Path], result: "SimulationResult") -> None:
    data = build_run_summary_pdf(result)
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao escrever {path}: {e}") from e
    logger.info("run_summary_pdf path=%s bytes=%d", path, len(data))
