"""
Espaços de estados finitos com métrica e involução x ↦ x↓.

Três construtores: grade do toro (φ_k = (k−n)π/n), configuração atômica no
círculo e intervalo refletido [−1, 1] com x↓ = −x. Ângulos sempre em [−π, π).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from runtime_settings import THRESHOLD_TOL
from simulation_errors import INVALID_ARGUMENT, SimulationError

logger = logging.getLogger(__name__)

KIND_TORUS_GRID = "torus_grid"
KIND_ATOMIC_CIRCLE = "atomic_circle"
KIND_REFLECTED_INTERVAL = "reflected_interval"
CIRCLE_KINDS = frozenset({KIND_TORUS_GRID, KIND_ATOMIC_CIRCLE})

# Casamento de pontos revertidos já presentes (radianos ou unidades do intervalo).
CLOSURE_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def normalize_angle(phi: float) -> float:
    """Leva um ângulo para [−π, π)."""
    value = math.fmod(float(phi) + math.pi, TWO_PI)
    if value < 0:
        value += TWO_PI
    value -= math.pi
    # fmod pode devolver exatamente π por arredondamento
    return -math.pi if value >= math.pi else value


def arc_distance(a: float, b: float) -> float:
    d = abs(float(a) - float(b)) % TWO_PI
    return min(d, TWO_PI - d)


def _arc_distance_matrix(coords: np.ndarray) -> np.ndarray:
    diff = np.abs(coords[:, None] - coords[None, :]) % TWO_PI
    return np.minimum(diff, TWO_PI - diff)


@dataclass(frozen=True, eq=False)
class StateSpace:
    kind: str
    coords: np.ndarray
    involution: np.ndarray
    distances: np.ndarray
    n: Optional[int] = None

    @property
    def size(self) -> int:
        return int(self.coords.shape[0])

    @property
    def is_circle(self) -> bool:
        return self.kind in CIRCLE_KINDS

    @property
    def points(self) -> List[Tuple[int, float]]:
        return [(i, float(c)) for i, c in enumerate(self.coords)]

    def metric(self, i: int, j: int) -> float:
        return float(self.distances[i, j])

    def reverse(self, i: int) -> int:
        return int(self.involution[i])

    def index_of(self, position: float, tol: float = 1e-9) -> int:
        """Índice do ponto mais próximo de `position` (erro se nenhum estiver a menos de tol)."""
        if self.is_circle:
            gaps = np.array([arc_distance(position, c) for c in self.coords])
        else:
            gaps = np.abs(self.coords - float(position))
        idx = int(np.argmin(gaps))
        if gaps[idx] > tol:
            raise SimulationError(
                INVALID_ARGUMENT,
                f"posição {position!r} não pertence ao espaço {self.kind}",
            )
        return idx

    def same_as(self, other: "StateSpace") -> bool:
        if self is other:
            return True
        return (
            self.kind == other.kind
            and self.size == other.size
            and np.array_equal(self.involution, other.involution)
            and np.allclose(self.coords, other.coords, rtol=0.0, atol=CLOSURE_TOL)
        )


def torus_grid(n: int) -> StateSpace:
    if int(n) != n or n < 2:
        raise SimulationError(INVALID_ARGUMENT, f"torus_grid exige n >= 2 (recebido {n!r})")
    n = int(n)
    size = 2 * n
    k = np.arange(size)
    coords = (k - n) * math.pi / n
    involution = (k + n) % size
    # distância por aritmética de índices: exata e invariante pela involução
    steps = np.abs(k[:, None] - k[None, :]) % size
    steps = np.minimum(steps, size - steps)
    distances = steps * (math.pi / n)
    return StateSpace(KIND_TORUS_GRID, coords, involution, distances, n=n)


def atomic_circle(angles: Iterable[float]) -> StateSpace:
    raw = [normalize_angle(a) for a in angles]
    if not raw:
        raise SimulationError(INVALID_ARGUMENT, "atomic_circle exige ao menos um ângulo")
    for i in range(len(raw)):
        for j in range(i):
            if arc_distance(raw[i], raw[j]) <= CLOSURE_TOL:
                raise SimulationError(
                    INVALID_ARGUMENT, f"ângulos duplicados após normalização: {raw[j]!r}"
                )

    coords: List[float] = list(raw)
    for phi in raw:
        rev = normalize_angle(phi + math.pi)
        if not any(arc_distance(rev, c) <= CLOSURE_TOL for c in coords):
            coords.append(rev)

    arr = np.asarray(coords, dtype=float)
    involution = _match_involution(arr, lambda c: normalize_angle(c + math.pi), circle=True)
    return StateSpace(KIND_ATOMIC_CIRCLE, arr, involution, _arc_distance_matrix(arr))


def reflected_interval(points: Iterable[float]) -> StateSpace:
    raw = [float(x) for x in points]
    if not raw:
        raise SimulationError(INVALID_ARGUMENT, "reflected_interval exige ao menos um ponto")
    for x in raw:
        if not (-1.0 <= x <= 1.0):
            raise SimulationError(INVALID_ARGUMENT, f"ponto fora de [-1, 1]: {x!r}")

    closed: List[float] = []
    for x in raw + [-x for x in raw]:
        x = 0.0 if x == 0 else x  # -0.0
        if not any(abs(x - c) <= CLOSURE_TOL for c in closed):
            closed.append(x)
    arr = np.sort(np.asarray(closed, dtype=float))
    involution = _match_involution(arr, lambda c: -c, circle=False)
    distances = np.abs(arr[:, None] - arr[None, :])
    return StateSpace(KIND_REFLECTED_INTERVAL, arr, involution, distances)


def _match_involution(coords: np.ndarray, reverse, *, circle: bool) -> np.ndarray:
    involution = np.empty(coords.shape[0], dtype=int)
    for i, c in enumerate(coords):
        target = reverse(c)
        if circle:
            gaps = np.array([arc_distance(target, other) for other in coords])
        else:
            gaps = np.abs(coords - target)
        j = int(np.argmin(gaps))
        if gaps[j] > CLOSURE_TOL:
            raise SimulationError(INVALID_ARGUMENT, f"ponto revertido ausente para {c!r}")
        involution[i] = j
    return involution


def validate_space(space: StateSpace, tol: float = THRESHOLD_TOL) -> List[str]:
    """
    Checagem exaustiva dos axiomas (involução, métrica, isometria).
    Retorna a lista de problemas encontrados; vazia = espaço válido.
    """
    problems: List[str] = []
    inv = space.involution
    d = space.distances
    size = space.size

    if not np.array_equal(inv[inv], np.arange(size)):
        problems.append("involution_not_involutive")
    if not np.allclose(d, d.T, rtol=0.0, atol=tol):
        problems.append("metric_not_symmetric")
    if np.any(np.abs(np.diag(d)) > tol):
        problems.append("metric_diagonal_nonzero")
    off = d + np.eye(size) * (tol + 1.0)
    if np.any(off <= tol):
        problems.append("metric_zero_off_diagonal")
    for j in range(size):
        if np.any(d > d[:, j, None] + d[None, j, :] + tol):
            problems.append("triangle_inequality")
            break
    if space.kind in (KIND_TORUS_GRID, KIND_REFLECTED_INTERVAL):
        if not np.allclose(d[np.ix_(inv, inv)], d, rtol=0.0, atol=tol):
            problems.append("involution_not_isometry")
    if space.is_circle:
        if not np.allclose(d[np.arange(size), inv], math.pi, rtol=0.0, atol=tol):
            problems.append("antipode_distance_not_pi")
    return problems


def space_from_block(kind: str, *, n: Optional[int] = None,
                     angles: Optional[Sequence[float]] = None,
                     points: Optional[Sequence[float]] = None) -> StateSpace:
    if kind == KIND_TORUS_GRID:
        return torus_grid(n if n is not None else 0)
    if kind == KIND_ATOMIC_CIRCLE:
        return atomic_circle(angles or [])
    if kind == KIND_REFLECTED_INTERVAL:
        return reflected_interval(points or [])
    raise SimulationError(INVALID_ARGUMENT, f"tipo de espaço desconhecido: {kind!r}")
