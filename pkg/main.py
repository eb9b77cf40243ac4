from __future__ import annotations

import logging
import time

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException as FastAPIHTTPException
from fastapi.responses import JSONResponse

from runtime_settings import API_PREFIX, LOG_LEVEL
from simulation_errors import SimulationError

logger = logging.getLogger("main")

logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.INFO))

# ──────────────────────────────────────────────────────────────────
# App
app = FastAPI(
    title="API Dinâmica de Reversão",
    version="0.3.0",
    openapi_url=f"{API_PREFIX}/openapi.json",
    docs_url=f"{API_PREFIX}/docs",
    redoc_url=f"{API_PREFIX}/redoc",
)


@app.middleware("http")
async def process_time_header(request: Request, call_next):
    start = time.perf_counter()
    response = await call_next(request)
    response.headers["X-Backend-Process-Time"] = f"{(time.perf_counter() - start) * 1000:.3f}"
    return response


# ──────────────────────────────────────────────────────────────────
# Routers em uso
from simulation_routes import router as simulation_router

app.include_router(simulation_router, prefix=API_PREFIX)


@app.exception_handler(FastAPIHTTPException)
async def http_exception_handler(request: Request, exc: FastAPIHTTPException):
    detail = exc.detail
    if isinstance(detail, dict):
        return JSONResponse(status_code=exc.status_code, content=detail)
    return JSONResponse(status_code=exc.status_code, content={"detail": str(detail) if detail else "Erro"})


@app.exception_handler(SimulationError)
async def simulation_exception_handler(request: Request, exc: SimulationError):
    logger.warning(
        "simulation_error method=%s path=%s code=%s", request.method, request.url.path, exc.code
    )
    return JSONResponse(status_code=422, content={"code": exc.code, "detail": exc.message})


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    detail = str(exc) or "Erro interno do servidor"
    logger.exception(
        "unhandled_exception method=%s path=%s detail=%s",
        request.method,
        request.url.path,
        detail,
    )
    return JSONResponse(status_code=500, content={"detail": detail})


# ──────────────────────────────────────────────────────────────────
# Healthcheck
@app.get(f"{API_PREFIX}/health", tags=["Health"])
def health():
    return {"status": "ok", "version": app.version}
