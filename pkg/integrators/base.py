"""Interface dos integradores da formulação linear em h."""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from runtime_settings import BOUND_TOL
from simulation_errors import STEP_SIZE, SimulationError

if TYPE_CHECKING:
    from dynamics import LinearGenerator


def check_h_bounds(h: np.ndarray, t: float, method: str, code: str = STEP_SIZE) -> None:
    """Propagação de −1 ⩽ h ⩽ 1 (com tolerância)."""
    if h.size == 0:
        return
    peak = float(np.max(np.abs(h)))
    if not np.isfinite(peak) or peak > 1.0 + BOUND_TOL:
        raise SimulationError(
            code,
            f"{method}: |h| = {peak:.12g} > 1 em t = {t:.6g}",
            {"t": float(t), "method": method},
        )


class HIntegrator(ABC):
    name: str = "base"

    @abstractmethod
    def integrate(
        self,
        generator: "LinearGenerator",
        h0: np.ndarray,
        t_grid: np.ndarray,
    ) -> np.ndarray:
        """Retorna h em cada instante de `t_grid` (linhas), começando em h0."""
        raise NotImplementedError
