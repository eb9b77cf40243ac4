from integrators.base import HIntegrator, check_h_bounds
from integrators.expm_integrator import ExpmIntegrator
from integrators.picard_integrator import PicardIntegrator
from integrators.rk4_integrator import RK4Integrator

__all__ = [
    "HIntegrator",
    "check_h_bounds",
    "ExpmIntegrator",
    "PicardIntegrator",
    "RK4Integrator",
]
