from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel, Field

from experiment_config import ExperimentConfig, parse_config, with_overrides
from run_service import run_analyze, run_predict, run_simulation
from scenarios import resolve_scenario, scenario_library
from simulation_errors import SimulationError

logger = logging.getLogger(__name__)

# ============================================================
# ROTAS DE SIMULAÇÃO
# ============================================================

router = APIRouter(tags=["Simulação"])

# passos máximos aceitos por requisição síncrona
MAX_API_STEPS = 20_000


# ============================================================
# SCHEMAS
# ============================================================

class ScenarioOut(BaseModel):
    name: str
    description: str
    params: Dict[str, Any]


class RunRequest(BaseModel):
    scenario: Optional[str] = Field(None, examples=["fig4", "three_dirac"])
    params: Dict[str, Any] = Field(default_factory=dict)
    config: Optional[Dict[str, Any]] = None


class SimulateRequest(RunRequest):
    method: Optional[str] = Field(None, examples=["rk4", "expm"])
    dt: Optional[float] = None
    steps: Optional[int] = None
    snapshot_every: Optional[int] = None


class ComponentOut(BaseModel):
    id: int
    points: List[float]
    case: str
    mass: float
    eta: Optional[float] = None
    rate_lower_bound: Optional[float] = None


class PredictOut(BaseModel):
    scenario: str
    components: List[ComponentOut]
    f_infty: List[float]


class SimulateOut(BaseModel):
    scenario: str
    method: str
    final_time: float
    final_H: float
    final_tv: float
    mass_drift: float
    eta_drift: float
    fitted_rate: Optional[float] = None
    r_squared: Optional[float] = None
    components: List[ComponentOut]


# ============================================================
# HELPERS
# ============================================================

def _http_error(e: SimulationError) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                         detail={"code": e.code, "detail": e.message})


def _config_from(body: RunRequest) -> ExperimentConfig:
    if (body.scenario is None) == (body.config is None):
        raise HTTPException(status.HTTP_400_BAD_REQUEST, "Informe exatamente um de scenario/config")
    if body.scenario is not None:
        return resolve_scenario(body.scenario, body.params)
    return parse_config(body.config)


def _components(items: List[Dict[str, Any]]) -> List[ComponentOut]:
    return [ComponentOut(**{k: c[k] for k in ComponentOut.model_fields}) for c in items]


# ============================================================
# ENDPOINTS
# ============================================================

@router.get("/scenarios", response_model=List[ScenarioOut])
def listar_cenarios():
    return [ScenarioOut(name=s.name, description=s.description, params=s.params) for s in scenario_library()]


@router.post("/predict", response_model=PredictOut)
def prever(body: RunRequest):
    try:
        result = run_predict(_config_from(body))
    except SimulationError as e:
        raise _http_error(e)
    return PredictOut(
        scenario=result.experiment.config.name,
        components=_components(result.components),
        f_infty=result.prediction.f_infty.values.tolist(),
    )


@router.post("/analyze")
def analisar(body: RunRequest) -> Dict[str, Any]:
    try:
        return run_analyze(_config_from(body)).report
    except SimulationError as e:
        raise _http_error(e)


@router.post("/simulate", response_model=SimulateOut)
def simular(body: SimulateRequest):
    try:
        config = with_overrides(
            _config_from(body),
            method=body.method,
            dt=body.dt,
            steps=body.steps,
            snapshot_every=body.snapshot_every,
        )
        if config.integrator.steps > MAX_API_STEPS:
            raise HTTPException(status.HTTP_400_BAD_REQUEST, f"steps acima de {MAX_API_STEPS}")
        result = run_simulation(config)
    except SimulationError as e:
        raise _http_error(e)

    logger.info(
        "api_simulate scenario=%s method=%s steps=%d",
        config.name, result.trajectory.method, config.integrator.steps,
    )
    return SimulateOut(
        scenario=config.name,
        method=result.trajectory.method,
        final_time=float(result.trajectory.times[-1]),
        final_H=float(result.series.H[-1]),
        final_tv=float(result.series.tv_to_finfty[-1]),
        mass_drift=result.conservation.mass_drift,
        eta_drift=result.conservation.eta_drift,
        fitted_rate=result.fit.lambda_ if result.fit else None,
        r_squared=result.fit.r_squared if result.fit else None,
        components=_components(result.components),
    )
