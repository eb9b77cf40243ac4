"""
Funcionais de entropia/dissipação, monitoramento de conservação, ajuste de
taxa exponencial e o verificador da estimativa de estabilidade em W1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from dynamics import Trajectory, build_generator, integrate_h
from equilibrium import EquilibriumPrediction
from interaction_graph import CASE_ISOLATED, InteractionGraph
from kernel import CollisionKernel
from measure import (
    DiscreteMeasure,
    OddCoordinate,
    half_masses,
    odd_coordinate,
    symmetric_part,
    tv_distance,
    wasserstein1_circle,
)
from runtime_settings import RATE_FLOOR
from simulation_errors import (
    INSUFFICIENT_DATA,
    INTERNAL_ERROR,
    INVALID_ARGUMENT,
    SimulationError,
)

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-12
MIN_FIT_SAMPLES = 10


# ====================================================================
# Funcionais


def _h_mu(h: OddCoordinate, mu: Optional[DiscreteMeasure]) -> Tuple[np.ndarray, np.ndarray]:
    mu = mu if mu is not None else h.mu
    return h.values, mu.masses[h.support]


def entropy(h: OddCoordinate, mu: Optional[DiscreteMeasure] = None, check: bool = True) -> float:
    """ℋ = ½ Σ h² μ; confere com ¼ ∬ (h − h*)² dμ dμ* (normalizado pela massa de μ)."""
    hv, m = _h_mu(h, mu)
    value = 0.5 * float(np.sum(hv * hv * m))
    if check and hv.size:
        rho = float(m.sum())
        diff = hv[:, None] - hv[None, :]
        double = 0.25 * float(np.sum(diff * diff * m[:, None] * m[None, :])) / rho
        if abs(double - value) > IDENTITY_TOL * max(1.0, value):
            raise SimulationError(INTERNAL_ERROR, f"formas de ℋ divergem: {value!r} vs {double!r}")
    return value


def dissipation(h: OddCoordinate, mu: Optional[DiscreteMeasure], b: CollisionKernel) -> float:
    """𝒟 = ∬ b(x,x*) (h + h*)² dμ dμ*."""
    hv, m = _h_mu(h, mu)
    table = b.table[np.ix_(h.support, h.support)]
    s = hv[:, None] + hv[None, :]
    return float(np.sum(table * s * s * m[:, None] * m[None, :]))


def _restrict(h: OddCoordinate, mu: Optional[DiscreteMeasure], points: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    full = h.full()
    masses = (mu if mu is not None else h.mu).masses
    idx = np.asarray(points, dtype=int)
    return full[idx], masses[idx]


def pair_square_sum(h: OddCoordinate, mu: Optional[DiscreteMeasure], T: Sequence[int], T_star: Sequence[int]) -> float:
    """∬_{𝒯×𝒯_*} (h + h*)² dμ dμ*."""
    hT, mT = _restrict(h, mu, T)
    hS, mS = _restrict(h, mu, T_star)
    s = hT[:, None] + hS[None, :]
    return float(np.sum(s * s * mT[:, None] * mS[None, :]))


def component_entropy(
    h: OddCoordinate,
    mu: Optional[DiscreteMeasure],
    T: Sequence[int],
    T_star: Sequence[int],
    eta: float,
    check: bool = True,
) -> float:
    """ℋ_𝒯 = ½∫_𝒯 (h−η)² dμ + ½∫_{𝒯_*} (h+η)² dμ."""
    hT, mT = _restrict(h, mu, T)
    hS, mS = _restrict(h, mu, T_star)
    value = 0.5 * float(np.sum((hT - eta) ** 2 * mT)) + 0.5 * float(np.sum((hS + eta) ** 2 * mS))
    if not check:
        return value

    rho, rho_star = float(mT.sum()), float(mS.sum())
    alt = 0.5 * float(np.sum(hT * hT * mT)) + 0.5 * float(np.sum(hS * hS * mS)) - 0.5 * (rho + rho_star) * eta * eta
    if abs(alt - value) > IDENTITY_TOL * max(1.0, value):
        raise SimulationError(INTERNAL_ERROR, f"formas de ℋ_𝒯 divergem: {value!r} vs {alt!r}")
    lhs = 2.0 * min(rho, rho_star) * value
    rhs = pair_square_sum(h, mu, T, T_star)
    if lhs > rhs + IDENTITY_TOL * max(1.0, rhs):
        raise SimulationError(
            INTERNAL_ERROR, f"2 min(ρ,ρ*) ℋ_𝒯 = {lhs!r} > ∬(h+h*)² = {rhs!r}"
        )
    return value


def component_dissipation(
    h: OddCoordinate, mu: Optional[DiscreteMeasure], b: CollisionKernel, T: Sequence[int], T_star: Sequence[int]
) -> float:
    """𝒟_𝒯 = 2 ∬_{𝒯×𝒯_*} b (h + h*)², com dℋ_𝒯/dt = −𝒟_𝒯."""
    hT, mT = _restrict(h, mu, T)
    hS, mS = _restrict(h, mu, T_star)
    table = b.table[np.ix_(np.asarray(T, dtype=int), np.asarray(T_star, dtype=int))]
    s = hT[:, None] + hS[None, :]
    return 2.0 * float(np.sum(table * s * s * mT[:, None] * mS[None, :]))


# ====================================================================
# Ajuste de taxa


@dataclass
class DecayFit:
    lambda_: float
    r_squared: float
    window: Tuple[float, float]
    samples: int


def fit_decay_rate(times: Sequence[float], values: Sequence[float], floor: float = RATE_FLOOR) -> DecayFit:
    """Inclinação de log H na metade final das amostras acima do piso; λ = −inclinação."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = y > floor
    t, y = t[keep], y[keep]
    if t.size < MIN_FIT_SAMPLES:
        raise SimulationError(
            INSUFFICIENT_DATA, f"{t.size} amostras acima de {floor:g} (mínimo {MIN_FIT_SAMPLES})"
        )
    start = t.size // 2
    tw, yw = t[start:], np.log(y[start:])
    fit = linregress(tw, yw)
    r2 = float(fit.rvalue) ** 2 if np.isfinite(fit.rvalue) else 0.0
    return DecayFit(float(-fit.slope), r2, (float(tw[0]), float(tw[-1])), int(tw.size))


def entropy_derivative_residual(times: Sequence[float], H: Sequence[float], D: Sequence[float]) -> float:
    """max |dH/dt + D| com diferenças centradas nas amostras interiores."""
    t = np.asarray(times, dtype=float)
    Hs = np.asarray(H, dtype=float)
    Ds = np.asarray(D, dtype=float)
    if t.size < 3:
        raise SimulationError(INSUFFICIENT_DATA, "diferença centrada exige 3 amostras")
    dH = (Hs[2:] - Hs[:-2]) / (t[2:] - t[:-2])
    return float(np.max(np.abs(dH + Ds[1:-1])))


# ====================================================================
# Estabilidade em W1


def stability_coefficient(t: float, lam: float, M: float, L: float) -> float:
    return 1.0 + (M + 5.0 * lam * L) * t + 2.0 * t * t * lam * M * L


def stability_bound(t: float, lam: float, M: float, L: float, w1_initial: float) -> float:
    return math.exp(lam * L * t) * stability_coefficient(t, lam, M, L) * w1_initial


@dataclass
class StabilityCheck:
    times: np.ndarray
    w1: np.ndarray
    bound: np.ndarray

    @property
    def holds(self) -> bool:
        return bool(np.all(self.w1 <= self.bound + 1e-12))


def verify_stability(
    f_I: DiscreteMeasure,
    g_I: DiscreteMeasure,
    b: CollisionKernel,
    t_grid: Sequence[float],
    method: str = "expm",
) -> StabilityCheck:
    """Simula os dois dados iniciais e compara W1(f(t), g(t)) com e^{λLt} C(t) W1(f_I, g_I)."""
    if b.lipschitz_lambda is None:
        raise SimulationError(INVALID_ARGUMENT, "kernel sem constante de Lipschitz")
    if not f_I.space.is_circle:
        raise SimulationError(INVALID_ARGUMENT, "estabilidade só é verificada no círculo")
    L = math.pi  # diâmetro do círculo
    runs = []
    for initial in (f_I, g_I):
        mu = symmetric_part(initial)
        runs.append(integrate_h(odd_coordinate(initial, mu), build_generator(mu, b), t_grid, method))
    w1_initial = wasserstein1_circle(f_I, g_I)
    times = runs[0].times
    w1 = np.array([wasserstein1_circle(runs[0].measure_at(j), runs[1].measure_at(j)) for j in range(times.size)])
    bound = np.array([stability_bound(t, b.lipschitz_lambda, b.bound_M, L, w1_initial) for t in times])
    return StabilityCheck(times, w1, bound)


# ====================================================================
# Séries ao longo da trajetória


@dataclass
class DiagnosticsSeries:
    times: np.ndarray
    mass_total: np.ndarray
    mass_upper: np.ndarray
    mass_lower: np.ndarray
    H: np.ndarray
    D: np.ndarray
    tv_to_finfty: np.ndarray
    component_ids: List[int]
    H_T: np.ndarray
    D_T: np.ndarray
    eta_T: np.ndarray
    symmetric_drift: np.ndarray
    w1_to_finfty: Optional[np.ndarray] = None

    @property
    def excess_entropy(self) -> np.ndarray:
        """Σ_𝒯 ℋ_𝒯 = ∫ (h − h∞)² dμ nas componentes não isoladas."""
        if not self.component_ids:
            return np.zeros_like(self.H)
        return self.H_T.sum(axis=1)

    def columns(self) -> Dict[str, np.ndarray]:
        cols: Dict[str, np.ndarray] = {
            "t": self.times,
            "mass_total": self.mass_total,
            "mass_upper": self.mass_upper,
            "mass_lower": self.mass_lower,
            "H": self.H,
            "D": self.D,
            "tv_to_finfty": self.tv_to_finfty,
        }
        if self.w1_to_finfty is not None:
            cols["w1_to_finfty"] = self.w1_to_finfty
        for k, cid in enumerate(self.component_ids):
            cols[f"H_T{cid}"] = self.H_T[:, k]
        for k, cid in enumerate(self.component_ids):
            cols[f"D_T{cid}"] = self.D_T[:, k]
        return cols


def _eta_now(f: DiscreteMeasure, mu: DiscreteMeasure, graph: InteractionGraph, cid: int) -> float:
    pid = graph.partner_component[cid]
    union = np.unique(np.concatenate([graph.components[cid], graph.components[graph.reverse_component[pid]]]))
    return float(f.masses[union].sum()) / float(mu.masses[union].sum()) - 1.0


def compute_series(
    trajectory: Trajectory,
    prediction: EquilibriumPrediction,
    b: CollisionKernel,
    w1: bool = False,
) -> DiagnosticsSeries:
    graph = prediction.graph
    mu = trajectory.mu
    active = [r.component_id for r in prediction.components if r.case != CASE_ISOLATED]
    snaps = len(trajectory)
    out = {name: np.zeros(snaps) for name in ("mass_total", "mass_upper", "mass_lower", "H", "D", "tv", "sym")}
    H_T = np.zeros((snaps, len(active)))
    D_T = np.zeros((snaps, len(active)))
    eta_T = np.zeros((snaps, len(active)))
    w1_values = np.zeros(snaps) if (w1 and mu.space.is_circle) else None

    inv = mu.space.involution
    for j in range(snaps):
        f = trajectory.measure_at(j)
        h = trajectory.odd_at(j)
        out["mass_total"][j] = f.total_mass
        out["mass_upper"][j], out["mass_lower"][j] = half_masses(f)
        out["H"][j] = entropy(h, mu, check=False)
        out["D"][j] = dissipation(h, mu, b)
        out["tv"][j] = tv_distance(f, prediction.f_infty)
        out["sym"][j] = float(np.max(np.abs(0.5 * (f.values + f.values[inv]) - mu.values)))
        for k, cid in enumerate(active):
            T = graph.components[cid]
            T_star = graph.partners(cid)
            eta_value = prediction.components[cid].eta
            H_T[j, k] = component_entropy(h, mu, T, T_star, eta_value, check=(j == 0 or j == snaps - 1))
            D_T[j, k] = component_dissipation(h, mu, b, T, T_star)
            eta_T[j, k] = _eta_now(f, mu, graph, cid)
        if w1_values is not None:
            w1_values[j] = wasserstein1_circle(f, prediction.f_infty)

    return DiagnosticsSeries(
        times=trajectory.times.copy(),
        mass_total=out["mass_total"],
        mass_upper=out["mass_upper"],
        mass_lower=out["mass_lower"],
        H=out["H"],
        D=out["D"],
        tv_to_finfty=out["tv"],
        component_ids=active,
        H_T=H_T,
        D_T=D_T,
        eta_T=eta_T,
        symmetric_drift=out["sym"],
        w1_to_finfty=w1_values,
    )


# ====================================================================
# Relatório de conservação


@dataclass
class ConservationReport:
    mass_drift: float
    symmetric_drift: float
    eta_drift: float
    upper_mass_drift: float
    lower_mass_drift: float
    half_masses_are_component_union: bool
    final_upper_mass: float
    final_lower_mass: float
    max_entropy_increase: float
    extra: Dict[str, float] = field(default_factory=dict)


def half_masses_are_component_union(graph: InteractionGraph) -> bool:
    """A metade superior do espaço (restrita ao suporte) é união de componentes?"""
    coords = graph.mu.space.coords
    upper = coords >= 0 if graph.mu.space.is_circle else coords > 0
    lower = coords < 0
    for comp in graph.components:
        for side in (upper, lower):
            inside = side[comp]
            if inside.any() and not inside.all():
                return False
    return True


def conserved_report(
    trajectory: Trajectory,
    graph: InteractionGraph,
    series: DiagnosticsSeries,
) -> ConservationReport:
    if len(trajectory) == 0:
        raise SimulationError(INVALID_ARGUMENT, "trajetória vazia")

    def drift(values: np.ndarray) -> float:
        return float(np.max(np.abs(values - values[0]))) if values.size else 0.0

    eta_drift = 0.0
    if series.eta_T.size:
        eta_drift = float(np.max(np.abs(series.eta_T - series.eta_T[0:1, :])))
    increase = float(np.max(np.diff(series.H))) if series.H.size > 1 else 0.0
    return ConservationReport(
        mass_drift=drift(series.mass_total),
        symmetric_drift=float(series.symmetric_drift.max()),
        eta_drift=eta_drift,
        upper_mass_drift=drift(series.mass_upper),
        lower_mass_drift=drift(series.mass_lower),
        half_masses_are_component_union=half_masses_are_component_union(graph),
        final_upper_mass=float(series.mass_upper[-1]),
        final_lower_mass=float(series.mass_lower[-1]),
        max_entropy_increase=max(increase, 0.0),
    )
