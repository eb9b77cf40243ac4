"""Constantes conservadas η_𝒯 e o equilíbrio previsto f∞ a partir de f_I."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from interaction_graph import (
    CASE_ISOLATED,
    InteractionGraph,
    build_graph,
)
from dynamics import collision_operator
from kernel import CollisionKernel
from measure import DiscreteMeasure, odd_coordinate, symmetric_part
from runtime_settings import SYMMETRY_TOL
from simulation_errors import (
    EMPTY_PARTNER_SET,
    INTERNAL_ERROR,
    NOT_PROBABILITY,
    SimulationError,
)

logger = logging.getLogger(__name__)

ETA_CROSS_CHECK_TOL = 1e-12


@dataclass
class ComponentRecord:
    component_id: int
    points: List[int]
    case: str
    partner_id: Optional[int]
    reverse_id: int
    orbit_id: int
    rho: float
    rho_star: float
    eta: Optional[float]


@dataclass
class EquilibriumPrediction:
    f_infty: DiscreteMeasure
    mu: DiscreteMeasure
    graph: InteractionGraph
    components: List[ComponentRecord] = field(default_factory=list)

    def eta_of(self, cid: int) -> Optional[float]:
        return self.components[cid].eta


def _union(*parts: np.ndarray) -> np.ndarray:
    if not parts:
        return np.zeros(0, dtype=int)
    return np.unique(np.concatenate(parts))


def eta(T: int, graph: InteractionGraph, f_I: DiscreteMeasure, mu: DiscreteMeasure,
        tol: float = ETA_CROSS_CHECK_TOL, symmetry_tol: float = SYMMETRY_TOL) -> float:
    """
    η_𝒯 = ∫_{𝒯∪𝒯_*↓} f_I / ∫_{𝒯∪𝒯_*↓} μ − 1, conferido contra
    (ρ⟨h⟩_𝒯 − ρ_*⟨h⟩_{𝒯_*}) / (ρ + ρ_*).
    """
    pid = graph.partner_component[T]
    if pid is None:
        raise SimulationError(EMPTY_PARTNER_SET, f"componente {T} sem parceiros")
    comp = graph.components[T]
    partner = graph.components[pid]
    partner_rev = graph.components[graph.reverse_component[pid]]
    union = _union(comp, partner_rev)

    mu_mass = mu.masses
    denom = float(mu_mass[union].sum())
    if denom <= 0:
        raise SimulationError(INTERNAL_ERROR, f"μ sem massa em 𝒯 ∪ 𝒯_*↓ (componente {T})")
    eta_direct = float(f_I.masses[union].sum()) / denom - 1.0

    h = odd_coordinate(f_I, mu, tol=symmetry_tol).full()
    rho = float(mu_mass[comp].sum())
    rho_star = float(mu_mass[partner].sum())
    eta_avg = (float((h * mu_mass)[comp].sum()) - float((h * mu_mass)[partner].sum())) / (rho + rho_star)

    if abs(eta_direct - eta_avg) > tol:
        raise SimulationError(
            INTERNAL_ERROR,
            f"η inconsistente na componente {T}: {eta_direct!r} vs {eta_avg!r}",
        )
    return eta_direct


def predict_equilibrium(f_I: DiscreteMeasure, b: CollisionKernel,
                        graph: Optional[InteractionGraph] = None) -> EquilibriumPrediction:
    """f_I nas componentes isoladas, (1+η_𝒯)μ nas demais, 0 fora de supp(μ)."""
    if not f_I.is_probability():
        raise SimulationError(NOT_PROBABILITY, f"f_I tem massa {f_I.total_mass!r}")
    mu = symmetric_part(f_I)
    graph = graph or build_graph(mu, b)

    values = np.zeros(f_I.space.size)
    records: List[ComponentRecord] = []
    etas: dict[int, float] = {}
    for orbit_id, orbit in enumerate(graph.orbits):
        for cid in orbit:
            comp = graph.components[cid]
            pid = graph.partner_component[cid]
            case = graph.cases[cid]
            rho = float(mu.masses[comp].sum())
            if case == CASE_ISOLATED:
                values[comp] = f_I.values[comp]
                records.append(ComponentRecord(cid, comp.tolist(), case, None,
                                               graph.reverse_component[cid], orbit_id, rho, 0.0, None))
                continue
            if cid not in etas:
                value = eta(cid, graph, f_I, mu)
                etas[cid] = value
                etas.setdefault(pid, -value)
                etas.setdefault(graph.reverse_component[cid], -value)
                etas.setdefault(graph.reverse_component[pid], value)
            value = etas[cid]
            values[comp] = (1.0 + value) * mu.values[comp]
            rho_star = float(mu.masses[graph.components[pid]].sum())
            records.append(ComponentRecord(cid, comp.tolist(), case, pid,
                                           graph.reverse_component[cid], orbit_id, rho, rho_star, value))

    records.sort(key=lambda r: r.component_id)
    f_infty = f_I.with_values(values)
    logger.info(
        "equilibrium_predicted components=%d isolated=%d etas=%s",
        graph.count,
        sum(1 for r in records if r.case == CASE_ISOLATED),
        ",".join(f"{r.eta:.6g}" for r in records if r.eta is not None),
    )
    return EquilibriumPrediction(f_infty=f_infty, mu=mu, graph=graph, components=records)


def verify_steady(f: DiscreteMeasure, b: CollisionKernel) -> float:
    rate = collision_operator(f, b)
    return float(np.max(np.abs(rate))) if rate.size else 0.0
