"""
Iteração de Picard na formulação branda

    h(t) = e^{−γ(t−t0)} h(t0) − ∫_{t0}^{t} e^{γ(s−t)} (C h)(s) ds,   C = 2 b μ,

janela a janela. Em cada janela h é representado pelos valores em nós de
Chebyshev (interpolação de Lagrange); as integrais de e^{γ(s−t)} ℓ_j(s)
saem por Gauss-Legendre e ficam em cache por tamanho de janela.
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Tuple

import numpy as np

from integrators.base import HIntegrator, check_h_bounds
from runtime_settings import PICARD_MAX_ITER, PICARD_NODES, PICARD_TOL, RK4_MAX_STEP
from simulation_errors import NON_CONVERGENCE, SimulationError

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 16
# iterações seguidas sem contração antes de desistir
STALL_LIMIT = 5


def lagrange_basis(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """L[q, j] = ℓ_j(points[q]) para a base de Lagrange em `nodes`."""
    m = nodes.size
    L = np.ones((points.size, m))
    for j in range(m):
        for k in range(m):
            if k != j:
                L[:, j] *= (points - nodes[k]) / (nodes[j] - nodes[k])
    return L


class PicardIntegrator(HIntegrator):
    name = "picard"

    def __init__(
        self,
        max_step: float = RK4_MAX_STEP,
        nodes: int = PICARD_NODES,
        tol: float = PICARD_TOL,
        max_iter: int = PICARD_MAX_ITER,
    ):
        self.max_step = float(max_step)
        self.nodes = max(2, int(nodes))
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self._cache: Dict[Tuple[float, int], Tuple[np.ndarray, np.ndarray]] = {}
        self.iterations = 0

    def _window(self, gamma: np.ndarray, tau: float) -> Tuple[np.ndarray, np.ndarray]:
        key = (round(tau, 15), id(gamma))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        m = self.nodes
        s = tau * 0.5 * (1.0 - np.cos(np.pi * np.arange(m) / (m - 1)))
        gl_x, gl_w = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)
        W = np.zeros((m, m, gamma.size))
        for a in range(1, m):
            sigma = 0.5 * s[a] * (gl_x + 1.0)
            weights = 0.5 * s[a] * gl_w
            L = lagrange_basis(s, sigma)
            decay = np.exp(-np.outer(s[a] - sigma, gamma))
            W[a] = np.einsum("q,qj,qx->jx", weights, L, decay)
        self._cache[key] = (s, W)
        return s, W

    def _advance(self, generator, h_start: np.ndarray, tau: float, t0: float) -> np.ndarray:
        gamma = generator.gamma
        coupling = generator.coupling
        s, W = self._window(gamma, tau)
        free = np.exp(-np.outer(s, gamma)) * h_start[None, :]
        H = np.repeat(h_start[None, :], s.size, axis=0)
        previous = math.inf
        stalls = 0
        for it in range(1, self.max_iter + 1):
            new = free - np.einsum("ajx,jx->ax", W, H @ coupling.T)
            change = float(np.max(np.abs(new - H))) if new.size else 0.0
            H = new
            self.iterations += 1
            if change < self.tol:
                return H[-1]
            stalls = stalls + 1 if change >= previous else 0
            if stalls >= STALL_LIMIT:
                raise SimulationError(
                    NON_CONVERGENCE,
                    f"picard sem contração em t = {t0:.6g} (variação {change:.3g})",
                    {"t": t0, "iterations": it},
                )
            previous = change
        raise SimulationError(
            NON_CONVERGENCE,
            f"picard excedeu {self.max_iter} iterações em t = {t0:.6g}",
            {"t": t0, "iterations": self.max_iter},
        )

    def integrate(self, generator, h0, t_grid):
        self._cache.clear()
        out = np.empty((len(t_grid), h0.size))
        out[0] = h0
        h = np.array(h0, dtype=float)
        for j in range(1, len(t_grid)):
            t0 = float(t_grid[j - 1])
            span = float(t_grid[j]) - t0
            windows = max(1, int(math.ceil(span / self.max_step - 1e-9)))
            tau = span / windows
            for w in range(windows):
                h = self._advance(generator, h, tau, t0 + w * tau)
            check_h_bounds(h, t_grid[j], self.name)
            out[j] = h
        logger.debug("picard_done iterations=%d points=%d", self.iterations, h0.size)
        return out
