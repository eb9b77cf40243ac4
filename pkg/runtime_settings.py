# runtime_settings.py
"""Tolerâncias e defaults de execução, lidos do ambiente (.env opcional)."""
from __future__ import annotations

import os

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or str(raw).strip() == "":
        return default
    try:
        value = int(str(raw).strip())
    except ValueError:
        return default
    return value if value > 0 else default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or str(raw).strip() == "":
        return default
    try:
        value = float(str(raw).strip())
    except ValueError:
        return default
    return value if value > 0 else default


def _env_str(name: str, default: str) -> str:
    raw = os.getenv(name)
    if raw is None or str(raw).strip() == "":
        return default
    return str(raw).strip()


# Tolerâncias numéricas. Os valores default são os usados nos testes de aceitação;
# só mexa via ENV para investigação.
SYMMETRY_TOL = _env_float("REVERSAL_SYMMETRY_TOL", 1e-12)
THRESHOLD_TOL = _env_float("REVERSAL_THRESHOLD_TOL", 1e-12)
SUPPORT_REL_EPS = _env_float("REVERSAL_SUPPORT_REL_EPS", 1e-12)
BOUND_TOL = _env_float("REVERSAL_BOUND_TOL", 1e-9)
NEGATIVITY_TOL = _env_float("REVERSAL_NEGATIVITY_TOL", 1e-12)
EULER_SYMMETRY_TOL = _env_float("REVERSAL_EULER_SYMMETRY_TOL", 1e-10)
RATE_FLOOR = _env_float("REVERSAL_RATE_FLOOR", 1e-14)

# Integradores
EXPM_MAX_POINTS = _env_int("REVERSAL_EXPM_MAX_POINTS", 64)
PICARD_MAX_ITER = _env_int("REVERSAL_PICARD_MAX_ITER", 10_000)
PICARD_TOL = _env_float("REVERSAL_PICARD_TOL", 1e-12)
PICARD_NODES = _env_int("REVERSAL_PICARD_NODES", 9)
RK4_MAX_STEP = _env_float("REVERSAL_RK4_MAX_STEP", 0.01)

OUTPUT_DIR = _env_str("REVERSAL_OUTPUT_DIR", "runs")
LOG_LEVEL = _env_str("LOG_LEVEL", "INFO").upper()
API_PREFIX = os.getenv("API_PREFIX", "/api")
