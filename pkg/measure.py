"""
Medidas discretas, decomposição f = (1+h)μ e métricas (TV, W1 no círculo).

Densidades de grade guardam os valores f_k e aplicam o peso de quadratura π/n
só na integração (`masses`); medidas atômicas guardam massas cruas (peso 1).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import ot

from runtime_settings import BOUND_TOL, NEGATIVITY_TOL, SUPPORT_REL_EPS, SYMMETRY_TOL
from simulation_errors import (
    DIMENSION_MISMATCH,
    INVALID_ARGUMENT,
    NOT_CIRCLE_SPACE,
    NOT_PROBABILITY,
    SPACE_MISMATCH,
    SimulationError,
)
from space import KIND_TORUS_GRID, TWO_PI, StateSpace

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    space: StateSpace
    values: np.ndarray
    cell_weight: float = 1.0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.space.size,):
            raise SimulationError(
                DIMENSION_MISMATCH,
                f"{values.shape[0] if values.ndim else 0} pesos para {self.space.size} pontos",
            )
        if not np.all(np.isfinite(values)):
            raise SimulationError(INVALID_ARGUMENT, "pesos não finitos")
        if np.any(values < -NEGATIVITY_TOL):
            raise SimulationError(INVALID_ARGUMENT, f"peso negativo: {values.min()!r}")
        object.__setattr__(self, "values", values)

    @property
    def masses(self) -> np.ndarray:
        return self.values * self.cell_weight

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def support(self, rel_eps: float = SUPPORT_REL_EPS) -> np.ndarray:
        masses = self.masses
        total = masses.sum()
        if total <= 0:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(masses > rel_eps * total)

    def with_values(self, values: np.ndarray) -> "DiscreteMeasure":
        return DiscreteMeasure(self.space, values, self.cell_weight)

    def is_probability(self, tol: float = PROBABILITY_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class OddCoordinate:
    """h sobre supp(μ): f = (1+h)μ, −1 ⩽ h ⩽ 1, h(x↓) = −h(x)."""

    values: np.ndarray
    support: np.ndarray
    mu: DiscreteMeasure

    def full(self) -> np.ndarray:
        """h estendido por zero fora do suporte."""
        out = np.zeros(self.mu.space.size)
        out[self.support] = self.values
        return out

    def reversed_positions(self) -> np.ndarray:
        """Posição (no vetor de suporte) do ponto revertido de cada ponto do suporte."""
        lookup = np.full(self.mu.space.size, -1, dtype=int)
        lookup[self.support] = np.arange(self.support.shape[0])
        return lookup[self.mu.space.involution[self.support]]

    def oddness_defect(self) -> float:
        if self.values.size == 0:
            return 0.0
        return float(np.max(np.abs(self.values + self.values[self.reversed_positions()])))


# ====================================================================
# Construtores


def point_masses(space: StateSpace, masses: Sequence[float]) -> DiscreteMeasure:
    return DiscreteMeasure(space, np.asarray(masses, dtype=float), 1.0)


def atoms(space: StateSpace, items: Iterable[Tuple[float, float]]) -> DiscreteMeasure:
    """[(posição, massa), ...] → medida atômica; posições repetidas somam."""
    values = np.zeros(space.size)
    for position, mass in items:
        if mass < 0:
            raise SimulationError(INVALID_ARGUMENT, f"massa negativa em {position!r}")
        values[space.index_of(position)] += float(mass)
    return DiscreteMeasure(space, values, 1.0)


def grid_density(space: StateSpace, values: Sequence[float]) -> DiscreteMeasure:
    if space.kind != KIND_TORUS_GRID or space.n is None:
        raise SimulationError(INVALID_ARGUMENT, "grid_density exige torus_grid")
    return DiscreteMeasure(space, np.asarray(values, dtype=float), math.pi / space.n)


def normalized(f: DiscreteMeasure) -> DiscreteMeasure:
    total = f.total_mass
    if total <= 0:
        raise SimulationError(NOT_PROBABILITY, "medida de massa nula")
    return f.with_values(f.values / total)


def _require_same_space(f: DiscreteMeasure, g: DiscreteMeasure) -> None:
    if not f.space.same_as(g.space):
        raise SimulationError(SPACE_MISMATCH, "medidas em espaços diferentes")


# ====================================================================
# Decomposição simétrica / ímpar


def symmetric_part(f: DiscreteMeasure) -> DiscreteMeasure:
    inv = f.space.involution
    return f.with_values(0.5 * (f.values + f.values[inv]))


def odd_coordinate(f: DiscreteMeasure, mu: DiscreteMeasure, tol: float = SYMMETRY_TOL) -> OddCoordinate:
    _require_same_space(f, mu)
    scale = max(1.0, float(np.max(np.abs(mu.values))) if mu.values.size else 1.0)
    defect = float(np.max(np.abs(symmetric_part(f).values - mu.values)))
    if defect > tol * scale:
        raise SimulationError(
            INVALID_ARGUMENT, f"μ não é a parte simétrica de f (defeito {defect:.3g})"
        )
    support = mu.support()
    h = f.values[support] / mu.values[support] - 1.0
    _check_bounds(h)
    return OddCoordinate(h, support, mu)


def reconstruct(h: OddCoordinate, mu: Optional[DiscreteMeasure] = None) -> DiscreteMeasure:
    mu = mu if mu is not None else h.mu
    _check_bounds(h.values)
    values = np.zeros(mu.space.size)
    values[h.support] = (1.0 + h.values) * mu.values[h.support]
    return mu.with_values(np.maximum(values, 0.0))


def _check_bounds(h: np.ndarray) -> None:
    if h.size and float(np.max(np.abs(h))) > 1.0 + BOUND_TOL:
        raise SimulationError(INVALID_ARGUMENT, f"|h| > 1 ({float(np.max(np.abs(h))):.12g})")


# ====================================================================
# Massas e métricas


def total_mass(f: DiscreteMeasure) -> float:
    return f.total_mass


def half_masses(f: DiscreteMeasure) -> Tuple[float, float]:
    """(massa superior, massa inferior): [0, π) e [−π, 0) no círculo; x > 0 e x < 0 no intervalo."""
    coords = f.space.coords
    masses = f.masses
    if f.space.is_circle:
        upper = coords >= 0
        lower = ~upper
    else:
        upper = coords > 0
        lower = coords < 0
    return float(masses[upper].sum()), float(masses[lower].sum())


def tv_distance(f: DiscreteMeasure, g: DiscreteMeasure) -> float:
    _require_same_space(f, g)
    diff = f.masses - g.masses
    return float(max(diff[diff > 0].sum(), -diff[diff < 0].sum(), 0.0))


def _require_circle_probabilities(f: DiscreteMeasure, g: DiscreteMeasure) -> None:
    _require_same_space(f, g)
    if not f.space.is_circle:
        raise SimulationError(NOT_CIRCLE_SPACE, f"W1 só no círculo ({f.space.kind})")
    for label, m in (("f", f), ("g", g)):
        if not m.is_probability():
            raise SimulationError(NOT_PROBABILITY, f"{label} tem massa {m.total_mass!r}")


def weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1]))
    return float(values[order][min(k, len(order) - 1)])


def wasserstein1_circle(f: DiscreteMeasure, g: DiscreteMeasure) -> float:
    """
    W1 exato no círculo: min_t Σ |c_k − t| Δ_k, com c as diferenças acumuladas
    em ordem angular e Δ os arcos entre pontos consecutivos. O mínimo está na
    mediana de c ponderada por Δ.
    """
    _require_circle_probabilities(f, g)
    coords = f.space.coords
    order = np.argsort(coords, kind="stable")
    theta = coords[order]
    c = np.cumsum((f.masses - g.masses)[order])
    arcs = np.empty_like(theta)
    arcs[:-1] = np.diff(theta)
    arcs[-1] = theta[0] + TWO_PI - theta[-1]
    t = weighted_median(c, arcs)
    return float(np.sum(np.abs(c - t) * arcs))


def wasserstein1_transport_oracle(f: DiscreteMeasure, g: DiscreteMeasure) -> float:
    """Custo do plano ótimo (programa linear do POT) com a matriz de distâncias do espaço."""
    _require_circle_probabilities(f, g)
    a = np.ascontiguousarray(f.masses, dtype=np.float64)
    b = np.ascontiguousarray(g.masses, dtype=np.float64)
    # emd exige massas exatamente iguais
    b = b * (a.sum() / b.sum())
    cost = np.ascontiguousarray(f.space.distances, dtype=np.float64)
    return float(ot.emd2(a, b, cost))
