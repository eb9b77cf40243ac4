"""
Configuração de experimento (JSON) validada com pydantic.

Blocos: space, kernel, initial, integrator, diagnostics e output_dir.
Chaves desconhecidas são erro; falhas viram SimulationError(CONFIG_INVALID)
com o caminho do campo (ex.: "kernel.alpha").
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from kernel import (
    KERNEL_CUSTOM,
    KERNEL_GAP,
    KERNEL_INDICATOR,
    KERNEL_SMOOTH,
    CollisionKernel,
    custom_kernel,
    gap_kernel,
    indicator_kernel,
    load_kernel_table,
    smooth_kernel,
)
from measure import DiscreteMeasure, atoms, grid_density, normalized
from simulation_errors import CONFIG_INVALID, IO_ERROR, SimulationError
from space import (
    KIND_ATOMIC_CIRCLE,
    KIND_REFLECTED_INTERVAL,
    KIND_TORUS_GRID,
    StateSpace,
    space_from_block,
)

logger = logging.getLogger(__name__)


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ============================================================
# BLOCOS
# ============================================================

class SpaceBlock(_Block):
    kind: Literal["torus_grid", "atomic_circle", "reflected_interval"]
    n: Optional[int] = Field(None, ge=1)
    angles: Optional[List[float]] = None
    points: Optional[List[float]] = None

    @model_validator(mode="after")
    def _campos_do_tipo(self) -> "SpaceBlock":
        required = {
            KIND_TORUS_GRID: "n",
            KIND_ATOMIC_CIRCLE: "angles",
            KIND_REFLECTED_INTERVAL: "points",
        }[self.kind]
        for name in ("n", "angles", "points"):
            present = getattr(self, name) is not None
            if name == required and not present:
                raise ValueError(f"{name} é obrigatório para {self.kind}")
            if name != required and present:
                raise ValueError(f"{name} não se aplica a {self.kind}")
        if self.angles is not None and not self.angles:
            raise ValueError("angles vazio")
        if self.points is not None and not self.points:
            raise ValueError("points vazio")
        return self


class KernelBlock(_Block):
    kind: Literal["indicator", "smooth", "gap", "custom"]
    alpha: Optional[float] = None
    ramp: Optional[float] = None
    table_file: Optional[str] = None
    table: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _campos_do_tipo(self) -> "KernelBlock":
        if self.kind in (KERNEL_INDICATOR, KERNEL_SMOOTH) and self.alpha is None:
            raise ValueError(f"alpha é obrigatório para {self.kind}")
        if self.kind == KERNEL_SMOOTH and self.ramp is None:
            raise ValueError("ramp é obrigatório para smooth")
        if self.kind == KERNEL_CUSTOM:
            if (self.table_file is None) == (self.table is None):
                raise ValueError("custom exige exatamente um de table_file/table")
            if self.table_file is not None and not Path(self.table_file).is_file():
                raise ValueError(f"arquivo não encontrado: {self.table_file}")
        elif self.table_file is not None or self.table is not None:
            raise ValueError(f"tabela só se aplica a custom (kind={self.kind})")
        return self


class InitialBlock(_Block):
    kind: Literal["grid_density", "atoms"]
    values: Optional[List[float]] = None
    values_file: Optional[str] = None
    atoms: Optional[List[Tuple[float, float]]] = None
    # densidades de grade costumam vir sem normalização
    normalize: bool = False

    @model_validator(mode="after")
    def _campos_do_tipo(self) -> "InitialBlock":
        if self.kind == "grid_density":
            if (self.values is None) == (self.values_file is None):
                raise ValueError("grid_density exige exatamente um de values/values_file")
            if self.values_file is not None and not Path(self.values_file).is_file():
                raise ValueError(f"arquivo não encontrado: {self.values_file}")
            if self.atoms is not None:
                raise ValueError("atoms não se aplica a grid_density")
        else:
            if not self.atoms:
                raise ValueError("atoms é obrigatório para kind=atoms")
            if self.values is not None or self.values_file is not None:
                raise ValueError("values/values_file não se aplicam a atoms")
        return self


class IntegratorBlock(_Block):
    method: Literal["euler", "rk4", "expm", "picard"] = "rk4"
    dt: float = Field(0.01, gt=0)
    steps: int = Field(100, ge=1)
    snapshot_every: int = Field(1, ge=1)


class DiagnosticsBlock(_Block):
    w1: bool = False
    pdf_report: bool = False


class ExperimentConfig(_Block):
    name: str = "custom"
    space: SpaceBlock
    kernel: KernelBlock
    initial: InitialBlock
    integrator: IntegratorBlock = Field(default_factory=IntegratorBlock)
    diagnostics: DiagnosticsBlock = Field(default_factory=DiagnosticsBlock)
    output_dir: Optional[str] = None
    seed: int = 0


# ============================================================
# CARGA
# ============================================================

def _field_path(error: Dict[str, Any]) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<raiz>"


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = _field_path(first)
        raise SimulationError(
            CONFIG_INVALID,
            f"{path}: {first.get('msg', 'inválido')}",
            details={"field": path, "errors": len(e.errors())},
        ) from e


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao ler config {path}: {e}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SimulationError(CONFIG_INVALID, f"JSON inválido em {path}: linha {e.lineno}") from e
    if not isinstance(data, dict):
        raise SimulationError(CONFIG_INVALID, "<raiz>: esperado objeto JSON")
    return parse_config(data)


def with_overrides(config: ExperimentConfig, **integrator: Any) -> ExperimentConfig:
    """Aplica flags do CLI (method/dt/steps/snapshot_every) e revalida."""
    data = config.model_dump()
    for key, value in integrator.items():
        if value is not None:
            data["integrator"][key] = value
    return parse_config(data)


# ============================================================
# MONTAGEM
# ============================================================

@dataclass
class Experiment:
    config: ExperimentConfig
    space: StateSpace
    kernel: CollisionKernel
    initial: DiscreteMeasure


def build_space(block: SpaceBlock) -> StateSpace:
    return space_from_block(block.kind, n=block.n, angles=block.angles, points=block.points)


def build_kernel(block: KernelBlock, space: StateSpace) -> CollisionKernel:
    if block.kind == KERNEL_INDICATOR:
        return indicator_kernel(space, block.alpha)
    if block.kind == KERNEL_SMOOTH:
        return smooth_kernel(space, block.alpha, block.ramp)
    if block.kind == KERNEL_GAP:
        return gap_kernel(space)
    table = load_kernel_table(block.table_file) if block.table_file else block.table
    return custom_kernel(space, table)


def _read_values_file(path: str) -> np.ndarray:
    """CSV "point,weight" com cabeçalho; usa a coluna weight na ordem das linhas."""
    try:
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2, dtype=float)
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao ler {path}: {e}") from e
    except ValueError as e:
        raise SimulationError(CONFIG_INVALID, f"initial.values_file: {e}") from e
    if data.shape[1] < 2:
        raise SimulationError(CONFIG_INVALID, "initial.values_file: esperado point,weight")
    return data[:, 1]


def build_initial(block: InitialBlock, space: StateSpace) -> DiscreteMeasure:
    if block.kind == "grid_density":
        values = np.asarray(block.values, dtype=float) if block.values is not None else _read_values_file(block.values_file)
        f = grid_density(space, values)
    else:
        f = atoms(space, block.atoms)
    return normalized(f) if block.normalize else f


def build_experiment(config: ExperimentConfig) -> Experiment:
    try:
        space = build_space(config.space)
        kernel = build_kernel(config.kernel, space)
        initial = build_initial(config.initial, space)
    except SimulationError as e:
        logger.warning("experiment_build_failed name=%s code=%s", config.name, e.code)
        raise
    logger.debug(
        "experiment_built name=%s space=%s points=%d kernel=%s",
        config.name, space.kind, space.size, kernel.kind,
    )
    return Experiment(config, space, kernel, initial)
