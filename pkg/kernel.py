"""Kernels de colisão b(x, x*) como tabelas densas validadas."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from runtime_settings import SYMMETRY_TOL, THRESHOLD_TOL
from simulation_errors import (
    DIMENSION_MISMATCH,
    INVALID_ARGUMENT,
    IO_ERROR,
    NEGATIVE_ENTRY,
    NOT_CIRCLE_SPACE,
    SYMMETRY_VIOLATION,
    SimulationError,
)
from space import KIND_REFLECTED_INTERVAL, StateSpace

logger = logging.getLogger(__name__)

KERNEL_INDICATOR = "indicator"
KERNEL_SMOOTH = "smooth"
KERNEL_GAP = "gap"
KERNEL_CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class CollisionKernel:
    kind: str
    table: np.ndarray
    bound_M: float
    lipschitz_lambda: Optional[float] = None
    alpha: Optional[float] = None

    @property
    def size(self) -> int:
        return int(self.table.shape[0])


def check_kernel_table(space: StateSpace, table: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    """b(x,x*) = b(x*,x) = b(x↓,x*↓), entradas >= 0, dimensão n×n."""
    if table.ndim != 2 or table.shape != (space.size, space.size):
        raise SimulationError(
            DIMENSION_MISMATCH,
            f"tabela {table.shape} não bate com o espaço de {space.size} pontos",
        )
    if not np.all(np.isfinite(table)):
        raise SimulationError(INVALID_ARGUMENT, "tabela com valores não finitos")
    if np.any(table < 0):
        i, j = np.argwhere(table < 0)[0]
        raise SimulationError(NEGATIVE_ENTRY, f"b[{i},{j}] = {table[i, j]!r} < 0")
    swap = float(np.max(np.abs(table - table.T)))
    if swap > tol:
        raise SimulationError(SYMMETRY_VIOLATION, f"b(x,x*) != b(x*,x) (defeito {swap:.3g})")
    inv = space.involution
    rev = float(np.max(np.abs(table - table[np.ix_(inv, inv)])))
    if rev > tol:
        raise SimulationError(SYMMETRY_VIOLATION, f"b(x,x*) != b(x↓,x*↓) (defeito {rev:.3g})")


def _require_circle(space: StateSpace, what: str) -> None:
    if not space.is_circle:
        raise SimulationError(NOT_CIRCLE_SPACE, f"{what} exige espaço do tipo círculo ({space.kind})")


def indicator_kernel(space: StateSpace, alpha: float) -> CollisionKernel:
    if not (0.0 < alpha < math.pi):
        raise SimulationError(INVALID_ARGUMENT, f"alpha fora de (0, π): {alpha!r}")
    _require_circle(space, "indicator_kernel")
    # desigualdade estrita: d = π−α dá 0
    table = (space.distances > (math.pi - alpha) + THRESHOLD_TOL).astype(float)
    check_kernel_table(space, table)
    return CollisionKernel(KERNEL_INDICATOR, table, bound_M=1.0, alpha=float(alpha))


def smooth_kernel(space: StateSpace, alpha: float, ramp: float) -> CollisionKernel:
    if not (0.0 < ramp < alpha < math.pi):
        raise SimulationError(
            INVALID_ARGUMENT, f"exige 0 < ramp < alpha < π (ramp={ramp!r}, alpha={alpha!r})"
        )
    _require_circle(space, "smooth_kernel")
    table = np.clip((space.distances - (math.pi - alpha)) / ramp, 0.0, 1.0)
    check_kernel_table(space, table)
    return CollisionKernel(
        KERNEL_SMOOTH, table, bound_M=1.0, lipschitz_lambda=1.0 / ramp, alpha=float(alpha)
    )


def gap_kernel(space: StateSpace) -> CollisionKernel:
    if space.kind != KIND_REFLECTED_INTERVAL:
        raise SimulationError(INVALID_ARGUMENT, f"gap_kernel exige intervalo refletido ({space.kind})")
    excess = space.distances - 1.0
    table = np.where(excess > THRESHOLD_TOL, excess, 0.0)
    check_kernel_table(space, table)
    return CollisionKernel(KERNEL_GAP, table, bound_M=1.0, lipschitz_lambda=1.0)


def custom_kernel(space: StateSpace, table) -> CollisionKernel:
    arr = np.array(table, dtype=float)
    check_kernel_table(space, arr)
    bound = float(arr.max()) if arr.size else 0.0
    return CollisionKernel(KERNEL_CUSTOM, arr, bound_M=bound)


def load_kernel_table(path: Union[str, Path]) -> np.ndarray:
    """CSV n×n sem cabeçalho."""
    try:
        return np.atleast_2d(np.loadtxt(Path(path), delimiter=",", dtype=float))
    except OSError as e:
        raise SimulationError(IO_ERROR, f"falha ao ler tabela {path}: {e}") from e
    except ValueError as e:
        raise SimulationError(INVALID_ARGUMENT, f"tabela inválida em {path}: {e}") from e
