"""Solução exata h(t) = exp(tA) h0 (oráculo para espaços atômicos pequenos)."""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from integrators.base import HIntegrator, check_h_bounds
from simulation_errors import INTERNAL_ERROR


class ExpmIntegrator(HIntegrator):
    name = "expm"

    def integrate(self, generator, h0, t_grid):
        A = generator.matrix
        out = np.empty((len(t_grid), h0.size))
        out[0] = h0
        for j in range(1, len(t_grid)):
            # direto de t=0: sem acúmulo de erro entre instantes
            out[j] = expm(A * float(t_grid[j])) @ h0
            check_h_bounds(out[j], t_grid[j], self.name, code=INTERNAL_ERROR)
        return out
