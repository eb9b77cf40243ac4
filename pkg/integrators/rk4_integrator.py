"""Runge-Kutta clássico de passo fixo para h' = A h."""
from __future__ import annotations

import math

import numpy as np

from integrators.base import HIntegrator, check_h_bounds
from runtime_settings import RK4_MAX_STEP


class RK4Integrator(HIntegrator):
    name = "rk4"

    def __init__(self, max_step: float = RK4_MAX_STEP):
        self.max_step = float(max_step)

    def integrate(self, generator, h0, t_grid):
        A = generator.matrix
        out = np.empty((len(t_grid), h0.size))
        out[0] = h0
        h = np.array(h0, dtype=float)
        for j in range(1, len(t_grid)):
            span = float(t_grid[j] - t_grid[j - 1])
            substeps = max(1, int(math.ceil(span / self.max_step - 1e-9)))
            dt = span / substeps
            for _ in range(substeps):
                k1 = A @ h
                k2 = A @ (h + 0.5 * dt * k1)
                k3 = A @ (h + 0.5 * dt * k2)
                k4 = A @ (h + dt * k3)
                h = h + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            check_h_bounds(h, t_grid[j], self.name)
            out[j] = h
        return out
