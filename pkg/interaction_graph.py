"""
Grafo de interação Γ sobre supp(μ): x ↔ y quando têm um parceiro de colisão
comum. Componentes, conjuntos parceiros 𝒯_*, classificação em cinco casos,
β de gargalo e a cota inferior de taxa por coberturas de singletons.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, minimum_spanning_tree

from kernel import CollisionKernel
from measure import DiscreteMeasure
from runtime_settings import SYMMETRY_TOL, THRESHOLD_TOL
from simulation_errors import (
    EMPTY_PARTNER_SET,
    INTERNAL_ERROR,
    INVALID_ARGUMENT,
    NOT_CIRCLE_SPACE,
    SimulationError,
)
from space import TWO_PI, normalize_angle

logger = logging.getLogger(__name__)

CASE_ISOLATED = "isolated"
CASE_FOUR_DISJOINT = "four-disjoint"
CASE_PAIR_II = "pair-ii"
CASE_PAIR_III = "pair-iii"
CASE_PAIR_IV = "pair-iv"
CASE_SINGLE_V = "single-v"

# casos em que (𝒯 ∪ 𝒯_*↓) é simétrico e η = 0
ETA_ZERO_CASES = frozenset({CASE_PAIR_III, CASE_PAIR_IV, CASE_SINGLE_V})


@dataclass(frozen=True, eq=False)
class InteractionGraph:
    mu: DiscreteMeasure
    kernel: CollisionKernel
    support: np.ndarray
    adjacency: np.ndarray
    components: List[np.ndarray]
    component_of: Dict[int, int]
    partner_component: List[Optional[int]]
    reverse_component: List[int]
    cases: List[str]
    orbits: List[List[int]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.components)

    def points(self, cid: int) -> np.ndarray:
        return self.components[cid]

    def partners(self, cid: int) -> np.ndarray:
        pid = self.partner_component[cid]
        return self.components[pid] if pid is not None else np.zeros(0, dtype=int)

    def is_isolated(self, cid: int) -> bool:
        return self.partner_component[cid] is None

    def orbit_of(self, cid: int) -> int:
        for k, orbit in enumerate(self.orbits):
            if cid in orbit:
                return k
        raise SimulationError(INTERNAL_ERROR, f"componente {cid} sem órbita")


def _is_symmetric(mu: DiscreteMeasure, tol: float) -> bool:
    values = mu.values
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    return float(np.max(np.abs(values - values[mu.space.involution]))) <= tol * scale


def _bfs_components(adjacency: np.ndarray) -> List[np.ndarray]:
    """Componentes por busca em largura; vizinhos visitados em ordem crescente."""
    size = adjacency.shape[0]
    label = np.full(size, -1, dtype=int)
    comps: List[np.ndarray] = []
    for start in range(size):
        if label[start] >= 0:
            continue
        cid = len(comps)
        label[start] = cid
        queue = deque([start])
        members = [start]
        while queue:
            node = queue.popleft()
            for nb in np.flatnonzero(adjacency[node]):
                if label[nb] < 0:
                    label[nb] = cid
                    members.append(int(nb))
                    queue.append(int(nb))
        comps.append(np.array(sorted(members), dtype=int))
    return comps


def build_graph(mu: DiscreteMeasure, b: CollisionKernel, tol: float = SYMMETRY_TOL) -> InteractionGraph:
    if b.size != mu.space.size:
        raise SimulationError(INVALID_ARGUMENT, "kernel e medida em espaços diferentes")
    if not _is_symmetric(mu, tol):
        raise SimulationError(INVALID_ARGUMENT, "μ não é simétrica")

    support = mu.support()
    local = b.table[np.ix_(support, support)] > 0
    link = local.astype(np.int64)
    adjacency = (link @ link.T) > 0
    local_comps = _bfs_components(adjacency)
    components = [support[c] for c in local_comps]

    component_of: Dict[int, int] = {}
    for cid, comp in enumerate(components):
        for x in comp:
            component_of[int(x)] = cid

    partner_component: List[Optional[int]] = []
    for cid, comp in enumerate(local_comps):
        partner_local = np.flatnonzero(local[comp].any(axis=0))
        if partner_local.size == 0:
            partner_component.append(None)
            continue
        partner = support[partner_local]
        pid = component_of[int(partner[0])]
        if not np.array_equal(np.sort(partner), components[pid]):
            raise SimulationError(INTERNAL_ERROR, f"𝒯_* da componente {cid} não é uma componente")
        partner_component.append(pid)

    inv = mu.space.involution
    reverse_component = [component_of[int(inv[comp[0]])] for comp in components]

    graph = InteractionGraph(
        mu=mu,
        kernel=b,
        support=support,
        adjacency=adjacency,
        components=components,
        component_of=component_of,
        partner_component=partner_component,
        reverse_component=reverse_component,
        cases=[],
    )
    graph.cases.extend(classify(cid, graph) for cid in range(len(components)))
    graph.orbits.extend(component_orbits(graph))
    logger.debug(
        "interaction_graph support=%d components=%d cases=%s",
        support.size, len(components), ",".join(graph.cases),
    )
    return graph


def classify(component: int, graph: InteractionGraph) -> str:
    """Caso da componente conforme as coincidências entre 𝒯, 𝒯_*, 𝒯↓ e 𝒯_*↓."""
    partner = graph.partner_component[component]
    if partner is None:
        return CASE_ISOLATED
    rev = graph.reverse_component[component]
    partner_rev = graph.reverse_component[partner]
    if component == partner and component == rev:
        return CASE_SINGLE_V
    if component == partner:
        return CASE_PAIR_III
    if component == rev:
        return CASE_PAIR_IV
    if component == partner_rev:
        return CASE_PAIR_II
    return CASE_FOUR_DISJOINT


def component_orbits(graph: InteractionGraph) -> List[List[int]]:
    """Órbitas sob 𝒯 ↦ 𝒯_* e 𝒯 ↦ 𝒯↓ (cada η é calculado uma vez por órbita)."""
    seen: Dict[int, int] = {}
    orbits: List[List[int]] = []
    for start in range(len(graph.components)):
        if start in seen:
            continue
        orbit: List[int] = []
        queue = deque([start])
        seen[start] = len(orbits)
        while queue:
            cid = queue.popleft()
            orbit.append(cid)
            for nxt in (graph.partner_component[cid], graph.reverse_component[cid]):
                if nxt is not None and nxt not in seen:
                    seen[nxt] = len(orbits)
                    queue.append(nxt)
        orbits.append(sorted(orbit))
    return orbits


# ====================================================================
# Círculo com kernel indicador


def component_count_bound(alpha: float) -> int:
    return 2 * int(math.floor(math.pi / alpha + 1e-12))


def gap_interval_exists(mu: DiscreteMeasure, alpha: float) -> bool:
    """Existe arco aberto de comprimento α sem pontos do suporte?"""
    if not mu.space.is_circle:
        raise SimulationError(NOT_CIRCLE_SPACE, "gap_interval_exists exige círculo")
    support = mu.support()
    if support.size == 0:
        return True
    theta = np.sort(mu.space.coords[support])
    gaps = np.empty_like(theta)
    gaps[:-1] = np.diff(theta)
    gaps[-1] = theta[0] + TWO_PI - theta[-1]
    return bool(gaps.max() >= alpha - THRESHOLD_TOL)


def regular_polygon_support(alpha: float, phi0: float = 0.0) -> List[float]:
    """Vértices do 2⌊π/α⌋-ágono regular (máximo de componentes quando π/α é inteiro)."""
    count = component_count_bound(alpha)
    return [normalize_angle(phi0 + k * TWO_PI / count) for k in range(count)]


# ====================================================================
# β-conectividade e cota de taxa


def _bipartite(T: Sequence[int], T_star: Sequence[int], b: CollisionKernel) -> np.ndarray:
    return b.table[np.ix_(np.asarray(T, dtype=int), np.asarray(T_star, dtype=int))]


def _bipartite_csr(block: np.ndarray, weights: np.ndarray) -> csr_matrix:
    n_left, n_right = block.shape
    size = n_left + n_right
    full = np.zeros((size, size))
    full[:n_left, n_left:] = weights
    return csr_matrix(full)


def bottleneck_beta(T: Sequence[int], T_star: Sequence[int], b: CollisionKernel) -> float:
    """
    Maior β com o grafo bipartido {b(x,x*) ⩾ β} sobre 𝒯 ∪ 𝒯_* conexo: a menor
    aresta de uma árvore geradora máxima (MST com pesos bmax + 1 − b).
    """
    if len(T_star) == 0:
        raise SimulationError(EMPTY_PARTNER_SET, "𝒯_* vazio")
    block = _bipartite(T, T_star, b)
    positive = block > 0
    top = float(block.max())
    weights = np.where(positive, top + 1.0 - block, 0.0)
    tree = minimum_spanning_tree(_bipartite_csr(block, weights)).tocoo()
    nodes = block.shape[0] + block.shape[1]
    if tree.nnz != nodes - 1:
        raise SimulationError(INTERNAL_ERROR, "grafo bipartido desconexo para todo β > 0")
    return float(np.min(top + 1.0 - tree.data))


@dataclass
class RateBound:
    rate: float
    constant_C: float
    beta: float
    rho: float
    rho_star: float
    worst_pair: Tuple[int, int]
    worst_path_links: int


def rate_lower_bound_details(
    T: Sequence[int], T_star: Sequence[int], mu: DiscreteMeasure, b: CollisionKernel
) -> RateBound:
    """
    Cobertura por singletons. Para cada par (i, j) ∈ 𝒯 × 𝒯_* o caminho mais
    curto de β-links i=i_0, j_0, ..., i_k, j_k=j dá
        c_ij = (2k+1)/β · Σ_arestas μ_i μ_j / (μ_a μ_b).
    C = (número de pares) · max c_ij domina Σ c_ij; λ = 2 min(ρ, ρ_*)/C.
    """
    if len(T_star) == 0:
        raise SimulationError(EMPTY_PARTNER_SET, "𝒯_* vazio")
    T = np.asarray(T, dtype=int)
    T_star = np.asarray(T_star, dtype=int)
    beta = bottleneck_beta(T, T_star, b)
    block = _bipartite(T, T_star, b)
    links = np.where(block >= beta - THRESHOLD_TOL * max(1.0, beta), 1.0, 0.0)
    graph = _bipartite_csr(block, links)
    graph = graph + graph.T

    masses = mu.masses
    m_left = masses[T]
    m_right = masses[T_star]
    n_left = T.size
    node_mass = np.concatenate([m_left, m_right])

    worst = -1.0
    worst_pair = (int(T[0]), int(T_star[0]))
    worst_links = 0
    for i in range(n_left):
        order, pred = breadth_first_order(graph, i, directed=False, return_predecessors=True)
        for jj in range(T_star.size):
            node = n_left + jj
            if pred[node] < 0 and node != i:
                raise SimulationError(INTERNAL_ERROR, "par sem caminho de β-links")
            ratio_sum = 0.0
            edges = 0
            target = m_left[i] * m_right[jj]
            while node != i:
                prev = int(pred[node])
                ratio_sum += target / (node_mass[node] * node_mass[prev])
                edges += 1
                node = prev
            k = (edges - 1) // 2
            c_ij = (2 * k + 1) / beta * ratio_sum
            if c_ij > worst:
                worst = c_ij
                worst_pair = (int(T[i]), int(T_star[jj]))
                worst_links = edges
    constant = worst * (n_left * T_star.size)
    rho = float(m_left.sum())
    rho_star = float(m_right.sum())
    rate = 2.0 * min(rho, rho_star) / constant
    return RateBound(rate, constant, beta, rho, rho_star, worst_pair, worst_links)


def rate_lower_bound(T: Sequence[int], T_star: Sequence[int], mu: DiscreteMeasure, b: CollisionKernel) -> float:
    return rate_lower_bound_details(T, T_star, mu, b).rate
