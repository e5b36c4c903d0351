"""Discrete-event simulator for data-centric WSN routing: DRUG, SPIN and FLOODING."""

from .config import RunConfig, parse_config
from .energy import EnergyModel
from .engine import (RunResult, Simulator, delivery_ratio, first_death_time,
                     residual_energy_total, run)

__all__ = [
    "EnergyModel", "RunConfig", "RunResult", "Simulator", "delivery_ratio",
    "first_death_time", "parse_config", "residual_energy_total", "run",
]
__version__ = "0.1.0"
