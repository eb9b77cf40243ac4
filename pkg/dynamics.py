"""
Integração no tempo.

- esquema não linear na grade (Euler explícito sobre Q_REV^n);
- gerador linear da formulação em h, com rk4 / expm / picard;
- `simulate` escolhe o caminho conforme o método pedido.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from integrators import ExpmIntegrator, HIntegrator, PicardIntegrator, RK4Integrator
from kernel import CollisionKernel
from measure import DiscreteMeasure, OddCoordinate, odd_coordinate, symmetric_part
from runtime_settings import (
    BOUND_TOL,
    EULER_SYMMETRY_TOL,
    EXPM_MAX_POINTS,
    NEGATIVITY_TOL,
    RK4_MAX_STEP,
    SYMMETRY_TOL,
)
from simulation_errors import (
    DIMENSION_MISMATCH,
    EMPTY_SUPPORT,
    INVALID_ARGUMENT,
    NEGATIVITY_ABORT,
    STEP_SIZE,
    SimulationError,
)

logger = logging.getLogger(__name__)

METHOD_EULER = "euler"
METHOD_RK4 = "rk4"
METHOD_EXPM = "expm"
METHOD_PICARD = "picard"
METHODS = (METHOD_EULER, METHOD_RK4, METHOD_EXPM, METHOD_PICARD)

# autovalores abaixo disso (em módulo) contam como modos conservados
ZERO_MODE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LinearGenerator:
    """(A h)(x) = −γ(x) h(x) − Σ_{x*} 2 b(x,x*) μ(x*) h(x*) sobre supp(μ)."""

    mu: DiscreteMeasure
    support: np.ndarray
    matrix: np.ndarray
    gamma: np.ndarray
    coupling: np.ndarray
    reverse_positions: np.ndarray

    @property
    def size(self) -> int:
        return int(self.support.size)

    def apply(self, h: np.ndarray) -> np.ndarray:
        return self.matrix @ h

    def odd_representatives(self) -> np.ndarray:
        """Um ponto por par {x, x↓}; pontos fixos da involução ficam de fora (h = 0 ali)."""
        positions = np.arange(self.size)
        return positions[self.reverse_positions > positions]

    def odd_restriction(self) -> np.ndarray:
        """R[x, y] = A[x, y] − A[x, y↓] nos representantes (h ímpar)."""
        reps = self.odd_representatives()
        rows = self.matrix[reps]
        return rows[:, reps] - rows[:, self.reverse_positions[reps]]

    def eigenvalues(self) -> np.ndarray:
        R = self.odd_restriction()
        return np.linalg.eigvals(R) if R.size else np.zeros(0)

    def spectral_gap(self, tol: float = ZERO_MODE_TOL) -> Optional[float]:
        """Menor taxa de decaimento não nula dos modos ímpares (taxa de h, não de H)."""
        rates = -np.real(self.eigenvalues())
        rates = rates[rates > tol]
        return float(rates.min()) if rates.size else None

    def characteristic_polynomial(self) -> np.ndarray:
        return np.real(np.poly(self.odd_restriction()))


@dataclass
class Trajectory:
    mu: DiscreteMeasure
    support: np.ndarray
    times: np.ndarray
    h: np.ndarray
    values: np.ndarray
    method: str

    @property
    def space(self):
        return self.mu.space

    def __len__(self) -> int:
        return int(self.times.size)

    def measure_at(self, j: int) -> DiscreteMeasure:
        return self.mu.with_values(self.values[j])

    def odd_at(self, j: int) -> OddCoordinate:
        return OddCoordinate(self.h[j], self.support, self.mu)


# ====================================================================
# Gerador linear


def _require_symmetric(mu: DiscreteMeasure, tol: float = SYMMETRY_TOL) -> None:
    defect = float(np.max(np.abs(mu.values - mu.values[mu.space.involution])))
    if defect > tol * max(1.0, float(np.max(np.abs(mu.values)))):
        raise SimulationError(INVALID_ARGUMENT, f"μ não é simétrica (defeito {defect:.3g})")


def build_generator(mu: DiscreteMeasure, b: CollisionKernel) -> LinearGenerator:
    if b.size != mu.space.size:
        raise SimulationError(DIMENSION_MISMATCH, "kernel e medida em espaços diferentes")
    support = mu.support()
    if support.size == 0:
        raise SimulationError(EMPTY_SUPPORT, "μ sem suporte")
    _require_symmetric(mu)

    masses = mu.masses[support]
    table = b.table[np.ix_(support, support)]
    gamma = 2.0 * table @ masses
    coupling = 2.0 * table * masses[None, :]
    matrix = -np.diag(gamma) - coupling

    lookup = np.full(mu.space.size, -1, dtype=int)
    lookup[support] = np.arange(support.size)
    reverse_positions = lookup[mu.space.involution[support]]
    return LinearGenerator(mu, support, matrix, gamma, coupling, reverse_positions)


def build_integrator(method: str, max_step: Optional[float] = None) -> HIntegrator:
    step = float(max_step) if max_step else RK4_MAX_STEP
    if method == METHOD_RK4:
        return RK4Integrator(step)
    if method == METHOD_EXPM:
        return ExpmIntegrator()
    if method == METHOD_PICARD:
        return PicardIntegrator(step)
    raise SimulationError(INVALID_ARGUMENT, f"método desconhecido para h: {method!r}")


def integrate_h(
    h0: OddCoordinate,
    A: LinearGenerator,
    t_grid: Sequence[float],
    method: str = METHOD_RK4,
    max_step: Optional[float] = None,
) -> Trajectory:
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise SimulationError(INVALID_ARGUMENT, "t_grid deve começar em 0 e ser estritamente crescente")
    if h0.values.size and float(np.max(np.abs(h0.values))) > 1.0 + BOUND_TOL:
        raise SimulationError(INVALID_ARGUMENT, "h0 fora de [−1, 1]")
    if not np.array_equal(h0.support, A.support):
        raise SimulationError(DIMENSION_MISMATCH, "h0 e gerador com suportes diferentes")

    if method == METHOD_EXPM and A.size > EXPM_MAX_POINTS:
        logger.warning(
            "expm_fallback points=%d limit=%d method=%s", A.size, EXPM_MAX_POINTS, METHOD_RK4
        )
        method = METHOD_RK4

    integrator = build_integrator(method, max_step)
    h = integrator.integrate(A, h0.values, times)

    mu_values = A.mu.values
    values = np.zeros((times.size, mu_values.size))
    values[:, A.support] = (1.0 + h) * mu_values[A.support][None, :]
    np.maximum(values, 0.0, out=values)
    return Trajectory(A.mu, A.support, times, h, values, integrator.name)


# ====================================================================
# Esquema não linear


def collision_operator(f: DiscreteMeasure, b: CollisionKernel) -> np.ndarray:
    """
    Taxa em unidades de `values`: w·(f↓ (b f↓) − f (b f)), com w o peso de célula.
    Na grade do toro coincide com a quadratura π/n de Q_REV^n.
    """
    if b.size != f.space.size:
        raise SimulationError(DIMENSION_MISMATCH, "kernel e medida em espaços diferentes")
    return _rate(f.values, f.space.involution, b.table, f.cell_weight)


def _rate(values: np.ndarray, involution: np.ndarray, table: np.ndarray, weight: float) -> np.ndarray:
    rev = values[involution]
    return weight * (rev * (table @ rev) - values * (table @ values))


def grid_collision_operator(f: Sequence[float], b: CollisionKernel, n: int) -> np.ndarray:
    """Q_REV^n(f, f)_k = (π/n) Σ_{k*} b_{k,k*} (f_{k+n} f_{k*+n} − f_k f_{k*}), índices mod 2n."""
    values = np.asarray(f, dtype=float)
    if values.shape != (2 * n,) or b.size != 2 * n:
        raise SimulationError(
            DIMENSION_MISMATCH, f"grade de {2 * n} pontos vs f {values.shape} / b {b.size}"
        )
    rev = np.roll(values, n)
    table = b.table
    return (math.pi / n) * (rev * (table @ rev) - values * (table @ values))


def euler_step_bound(b: CollisionKernel, mass: float) -> float:
    return 1.0 / (2.0 * b.bound_M * mass) if b.bound_M > 0 and mass > 0 else math.inf


def euler_simulate(
    f0: DiscreteMeasure,
    b: CollisionKernel,
    dt: float,
    steps: int,
    snapshot_every: int = 1,
) -> Trajectory:
    """f^{m+1} = f^m + dt·Q(f^m, f^m); aborta se alguma densidade ficar abaixo de −tol."""
    if dt <= 0 or steps < 0 or snapshot_every < 1:
        raise SimulationError(INVALID_ARGUMENT, "dt > 0, steps >= 0 e snapshot_every >= 1")
    if b.size != f0.space.size:
        raise SimulationError(DIMENSION_MISMATCH, "kernel e medida em espaços diferentes")
    mass = f0.total_mass
    limit = euler_step_bound(b, mass)
    # heurística: dt·2M·massa ⩽ 1
    if dt > limit:
        raise SimulationError(
            STEP_SIZE, f"dt = {dt!r} acima do limite {limit:.6g} (2·M·massa·dt ⩽ 1)"
        )
    logger.info("euler_start dt=%s steps=%d bound=%.6g points=%d", dt, steps, limit, f0.space.size)

    mu = symmetric_part(f0)
    support = mu.support()
    involution = f0.space.involution
    table = b.table
    weight = f0.cell_weight

    f = f0.values.copy()
    times: List[float] = [0.0]
    snaps: List[np.ndarray] = [f.copy()]
    for m in range(steps):
        f = f + dt * _rate(f, involution, table, weight)
        low = float(f.min())
        if low < -NEGATIVITY_TOL:
            raise SimulationError(
                NEGATIVITY_ABORT,
                f"densidade {low:.3g} < 0 no passo {m + 1}",
                {"step": m + 1, "value": low},
            )
        if (m + 1) % snapshot_every == 0 or m + 1 == steps:
            times.append((m + 1) * dt)
            snaps.append(f.copy())

    values = np.vstack(snaps)
    mu_support = mu.values[support]
    h = values[:, support] / mu_support[None, :] - 1.0
    return Trajectory(mu, support, np.asarray(times), h, values, METHOD_EULER)


# ====================================================================
# Caminho único usado pelo CLI/API


def snapshot_grid(dt: float, steps: int, snapshot_every: int) -> np.ndarray:
    idx = list(range(0, steps + 1, snapshot_every))
    if idx[-1] != steps:
        idx.append(steps)
    return dt * np.asarray(idx, dtype=float)


def simulate(
    f_I: DiscreteMeasure,
    b: CollisionKernel,
    method: str,
    dt: float,
    steps: int,
    snapshot_every: int = 1,
) -> Trajectory:
    if method not in METHODS:
        raise SimulationError(INVALID_ARGUMENT, f"método desconhecido: {method!r}")
    if method == METHOD_EULER:
        return euler_simulate(f_I, b, dt, steps, snapshot_every)
    if dt <= 0 or steps < 1 or snapshot_every < 1:
        raise SimulationError(INVALID_ARGUMENT, "dt > 0, steps >= 1 e snapshot_every >= 1")
    mu = symmetric_part(f_I)
    h0 = odd_coordinate(f_I, mu)
    A = build_generator(mu, b)
    return integrate_h(h0, A, snapshot_grid(dt, steps, snapshot_every), method, max_step=dt)


def rescale_time_for_mass(times: np.ndarray, values: np.ndarray, rho: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Se f resolve a dinâmica com massa ρ, t ↦ f(t/ρ)/ρ resolve com massa 1:
    devolve (ρ·times, values/ρ).
    """
    if rho <= 0:
        raise SimulationError(INVALID_ARGUMENT, "ρ deve ser positivo")
    return np.asarray(times) * rho, np.asarray(values) / rho


def odd_coordinate_of_snapshot(trajectory: Trajectory, j: int) -> OddCoordinate:
    """h do instante j recalculado de f (tolerância relaxada para Euler)."""
    tol = EULER_SYMMETRY_TOL if trajectory.method == METHOD_EULER else SYMMETRY_TOL
    return odd_coordinate(trajectory.measure_at(j), trajectory.mu, tol=tol)
