"""
Biblioteca de cenários embutidos: os cenários de grade no toro (fig1, fig3, fig4)
e os exemplos atômicos (família ε, três deltas, quatro átomos, kernel
com lacuna no intervalo e a família truncada de componentes).

Cada cenário é uma função de parâmetros nomeados que devolve um
ExperimentConfig já validado.
"""
from __future__ import annotations

import inspect
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

from experiment_config import ExperimentConfig, parse_config
from interaction_graph import regular_polygon_support
from simulation_errors import INVALID_ARGUMENT, UNKNOWN_SCENARIO, SimulationError
from space import reflected_interval, torus_grid

logger = logging.getLogger(__name__)

FIG_GRID_N = 202
RIGHT_ANGLE = math.pi / 2


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    description: str
    builder: Callable[..., ExperimentConfig]

    @property
    def params(self) -> Dict[str, Any]:
        sig = inspect.signature(self.builder)
        return {p.name: p.default for p in sig.parameters.values()}


def _grid_coords(n: int) -> np.ndarray:
    return torus_grid(n).coords


def _config(name: str, space: dict, kernel: dict, initial: dict, integrator: dict, **extra: Any) -> ExperimentConfig:
    data = {
        "name": name,
        "space": space,
        "kernel": kernel,
        "initial": initial,
        "integrator": integrator,
    }
    data.update(extra)
    return parse_config(data)


# ============================================================
# GRADE NO TORO
# ============================================================

def fig1(n: int = FIG_GRID_N) -> ExperimentConfig:
    phi = _grid_coords(n)
    density = (1.0 + 0.2 * np.cos(2 * phi) + 0.02 * np.sin(phi)
               + 0.2 * np.sin(3 * phi) + 0.1 * np.cos(5 * phi)) / (2 * math.pi)
    return _config(
        "fig1",
        {"kind": "torus_grid", "n": n},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "grid_density", "values": density.tolist(), "normalize": True},
        {"method": "euler", "dt": 0.01, "steps": 1000, "snapshot_every": 10},
    )


def _two_bumps(phi: np.ndarray, upper_mass: float, lower_mass: float, n: int) -> np.ndarray:
    """cos²(2φ) em (π/4,3π/4) e (−3π/4,−π/4), formas diferindo ~1,5% entre os lados."""
    base = np.cos(2 * phi) ** 2
    wiggle = 0.015 * np.sin(4 * phi)
    upper = (phi > math.pi / 4) & (phi < 3 * math.pi / 4)
    lower = (phi > -3 * math.pi / 4) & (phi < -math.pi / 4)
    a = np.where(upper, base * (1.0 + wiggle), 0.0)
    b = np.where(lower, base * (1.0 - wiggle), 0.0)
    w = math.pi / n
    return upper_mass * a / (a.sum() * w) + lower_mass * b / (b.sum() * w)


def fig4(n: int = FIG_GRID_N, upper_mass: float = 0.55) -> ExperimentConfig:
    if not (0.0 < upper_mass < 1.0):
        raise SimulationError(INVALID_ARGUMENT, f"upper_mass fora de (0, 1): {upper_mass!r}")
    phi = _grid_coords(n)
    values = _two_bumps(phi, upper_mass, 1.0 - upper_mass, n)
    return _config(
        "fig4",
        {"kind": "torus_grid", "n": n},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "grid_density", "values": values.tolist()},
        {"method": "euler", "dt": 0.01, "steps": 250, "snapshot_every": 5},
    )


def fig3(n: int = FIG_GRID_N, bridge_mass: float = 0.03) -> ExperimentConfig:
    if not (0.0 < bridge_mass < 1.0):
        raise SimulationError(INVALID_ARGUMENT, f"bridge_mass fora de (0, 1): {bridge_mass!r}")
    phi = _grid_coords(n)
    rest = 1.0 - bridge_mass
    values = _two_bumps(phi, 0.55 * rest, 0.45 * rest, n)
    inside = np.abs(phi) < 0.1
    bridge = np.where(inside, np.cos(math.pi * phi / 0.2) ** 2, 0.0)
    values = values + bridge_mass * bridge / (bridge.sum() * math.pi / n)
    return _config(
        "fig3",
        {"kind": "torus_grid", "n": n},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "grid_density", "values": values.tolist()},
        {"method": "euler", "dt": 0.1, "steps": 5000, "snapshot_every": 50},
    )


# ============================================================
# OBSERVAÇÕES
# ============================================================

def epsilon_family(eps: float = 0.1) -> ExperimentConfig:
    if not (0.0 < eps < RIGHT_ANGLE):
        raise SimulationError(INVALID_ARGUMENT, f"eps fora de (0, π/2): {eps!r}")
    second = RIGHT_ANGLE + eps
    return _config(
        "epsilon_family",
        {"kind": "atomic_circle", "angles": [0.0, second]},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "atoms", "atoms": [[0.0, 0.5], [second, 0.5]]},
        {"method": "expm", "dt": 0.05, "steps": 100, "snapshot_every": 1},
    )


def three_dirac(alpha: float = 0.1, beta: Optional[float] = None,
                gamma: Optional[float] = None, h_last: float = -1.0) -> ExperimentConfig:
    """
    μ = α, β, γ nas órbitas de 0, 2π/3, −2π/3; β = γ quando omitidos. f_I tem
    h = +1 nas duas primeiras órbitas e h = h_last na terceira. Com β = γ o modo
    lento é antissimétrico entre 2π/3 e −2π/3: h_last = 1 não o excita.
    """
    if beta is None and gamma is None:
        beta = gamma = 0.5 * (0.5 - alpha)
    elif beta is None or gamma is None:
        raise SimulationError(INVALID_ARGUMENT, "informe beta e gamma juntos")
    weights = (alpha, beta, gamma)
    if min(weights) <= 0 or abs(sum(weights) - 0.5) > 1e-12:
        raise SimulationError(INVALID_ARGUMENT, f"exige α, β, γ > 0 com soma ½: {weights!r}")
    angles = [0.0, 2 * math.pi / 3, -2 * math.pi / 3]
    if not (-1.0 <= h_last <= 1.0):
        raise SimulationError(INVALID_ARGUMENT, f"h_last fora de [−1, 1]: {h_last!r}")
    placed = [[0.0, 2.0 * alpha], [angles[1], 2.0 * beta]]
    for angle, mass in ((angles[2], (1.0 + h_last) * gamma), (angles[2] + math.pi, (1.0 - h_last) * gamma)):
        if mass > 0:
            placed.append([angle, mass])
    return _config(
        "three_dirac",
        {"kind": "atomic_circle", "angles": angles},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "atoms", "atoms": placed},
        {"method": "expm", "dt": 0.1, "steps": 600, "snapshot_every": 5},
    )


def four_atoms(phi0: float = 0.3) -> ExperimentConfig:
    angles = regular_polygon_support(RIGHT_ANGLE, phi0)
    masses = [0.4, 0.1, 0.3, 0.2]
    return _config(
        "four_atoms",
        {"kind": "atomic_circle", "angles": angles},
        {"kind": "indicator", "alpha": RIGHT_ANGLE},
        {"kind": "atoms", "atoms": [[a, m] for a, m in zip(angles, masses)]},
        {"method": "rk4", "dt": 0.01, "steps": 200, "snapshot_every": 10},
    )


def gap_interval(points: int = 10) -> ExperimentConfig:
    """Intervalo [−1, 1] com b = (|x − x*| − 1)₊; pontos k/points, k = 0..points, e reflexos."""
    if points < 2:
        raise SimulationError(INVALID_ARGUMENT, "gap_interval exige points >= 2")
    half = [k / points for k in range(points + 1)]
    coords = reflected_interval(half).coords
    weights = 1.2 + 0.6 * coords + 0.3 * coords * coords
    weights = weights / weights.sum()
    return _config(
        "gap_interval",
        {"kind": "reflected_interval", "points": half},
        {"kind": "gap"},
        {"kind": "atoms", "atoms": [[float(x), float(w)] for x, w in zip(coords, weights)], "normalize": True},
        {"method": "rk4", "dt": 0.05, "steps": 400, "snapshot_every": 4},
    )


def truncated_components_table(coords: np.ndarray) -> np.ndarray:
    """b = 1 sse mesmo sinal (não nulo), |x| < |x*| + x*² e |x*| < |x| + x²."""
    x = coords[:, None]
    y = coords[None, :]
    ax, ay = np.abs(x), np.abs(y)
    same_side = (np.sign(x) == np.sign(y)) & (x != 0)
    linked = same_side & (ax < ay + ay * ay) & (ay < ax + ax * ax)
    return linked.astype(float)


def truncated_components(K: int = 4, seed: int = 0) -> ExperimentConfig:
    """
    K blocos de 4 pontos em [1/(2k+1), 1/(2k)] e o ponto 0 (isolado). Cada
    bloco é componente com 𝒯_* = 𝒯; a taxa piora com k.
    """
    K = int(K)
    if K < 1:
        raise SimulationError(INVALID_ARGUMENT, "K >= 1")
    half = [0.0]
    for k in range(1, K + 1):
        half.extend(np.linspace(1.0 / (2 * k + 1), 1.0 / (2 * k), 4).tolist())
    coords = reflected_interval(half).coords
    table = truncated_components_table(coords)
    rng = np.random.default_rng(int(seed))
    weights = rng.uniform(0.5, 1.5, size=coords.size)
    weights = weights / weights.sum()
    return _config(
        "truncated_components",
        {"kind": "reflected_interval", "points": half},
        {"kind": "custom", "table": table.tolist()},
        {"kind": "atoms", "atoms": [[float(x), float(w)] for x, w in zip(coords, weights)], "normalize": True},
        {"method": "rk4", "dt": 0.05, "steps": 400, "snapshot_every": 4},
        seed=int(seed),
    )


# ============================================================
# REGISTRO
# ============================================================

_LIBRARY: List[ScenarioInfo] = [
    ScenarioInfo("fig1", "densidade positiva em todo o toro; uma componente, f∞ = μ", fig1),
    ScenarioInfo("fig3", "dois suportes mais uma ponte pequena em (−0.1, 0.1); uma componente", fig3),
    ScenarioInfo("fig4", "suportes (π/4,3π/4) e (−3π/4,−π/4); duas componentes, η ≠ 0", fig4),
    ScenarioInfo("epsilon_family", "½(δ_0 + δ_{π/2+ε}); solução fechada", epsilon_family),
    ScenarioInfo("three_dirac", "três deltas em 0, ±2π/3; polinômio característico conhecido", three_dirac),
    ScenarioInfo("four_atoms", "quatro átomos a π/2; solução constante", four_atoms),
    ScenarioInfo("gap_interval", "kernel com lacuna no intervalo; componentes x<0, {0}, x>0", gap_interval),
    ScenarioInfo("truncated_components", "K componentes com taxa degenerando; sonda de degenerescência", truncated_components),
]


def scenario_library() -> List[ScenarioInfo]:
    return list(_LIBRARY)


def scenario_names() -> List[str]:
    return [s.name for s in _LIBRARY]


def _coerce(name: str, default: Any, raw: Any) -> Any:
    if isinstance(default, bool):
        return str(raw).lower() in ("1", "true", "yes")
    if isinstance(default, int):
        value = float(raw)
        if value != int(value):
            raise SimulationError(INVALID_ARGUMENT, f"{name} deve ser inteiro: {raw!r}")
        return int(value)
    return float(raw)


def resolve_scenario(name: str, params: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    info = next((s for s in _LIBRARY if s.name == name), None)
    if info is None:
        raise SimulationError(
            UNKNOWN_SCENARIO, f"cenário desconhecido: {name!r} (disponíveis: {', '.join(scenario_names())})"
        )
    accepted = info.params
    kwargs: Dict[str, Any] = {}
    for key, raw in (params or {}).items():
        if key not in accepted:
            raise SimulationError(INVALID_ARGUMENT, f"parâmetro {key!r} não existe em {name}")
        try:
            kwargs[key] = _coerce(key, accepted[key], raw)
        except (TypeError, ValueError) as e:
            raise SimulationError(INVALID_ARGUMENT, f"{key}={raw!r}: {e}") from e
    logger.debug("scenario_resolved name=%s params=%s", name, kwargs)
    return info.builder(**kwargs)
