"""Erros de domínio da simulação: código estável + mensagem legível."""
from __future__ import annotations

from typing import Any, Dict, Optional

INVALID_ARGUMENT = "INVALID_ARGUMENT"
SYMMETRY_VIOLATION = "SYMMETRY_VIOLATION"
NEGATIVE_ENTRY = "NEGATIVE_ENTRY"
DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
SPACE_MISMATCH = "SPACE_MISMATCH"
NOT_PROBABILITY = "NOT_PROBABILITY"
NOT_CIRCLE_SPACE = "NOT_CIRCLE_SPACE"
EMPTY_PARTNER_SET = "EMPTY_PARTNER_SET"
EMPTY_SUPPORT = "EMPTY_SUPPORT"
STEP_SIZE = "STEP_SIZE"
NEGATIVITY_ABORT = "NEGATIVITY_ABORT"
NON_CONVERGENCE = "NON_CONVERGENCE"
INSUFFICIENT_DATA = "INSUFFICIENT_DATA"
UNKNOWN_SCENARIO = "UNKNOWN_SCENARIO"
CONFIG_INVALID = "CONFIG_INVALID"
IO_ERROR = "IO_ERROR"
INTERNAL_ERROR = "INTERNAL_ERROR"

# Código de saída do CLI por código de erro; o resto sai com 1.
EXIT_CODES: Dict[str, int] = {
    CONFIG_INVALID: 2,
    UNKNOWN_SCENARIO: 2,
    INVALID_ARGUMENT: 2,
    NEGATIVITY_ABORT: 3,
    STEP_SIZE: 3,
    IO_ERROR: 4,
}


class SimulationError(ValueError):
    """
    Falha de domínio. `code` é estável (usado no CLI e na API);
    `details` leva contexto extra, ex.: {"step": 17} no abort de negatividade.
    """

    def __init__(self, code: str, message: str = "", details: Optional[Dict[str, Any]] = None):
        self.code = code
        self.message = message or code
        self.details = dict(details or {})
        super().__init__(f"{code}: {self.message}" if message else code)

    def exit_status(self) -> int:
        return EXIT_CODES.get(self.code, 1)
