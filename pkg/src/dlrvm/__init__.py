"""Dynamical low-rank projector-splitting integrator for the 1x2v Vlasov-Maxwell system."""

from .config import RunConfig, parse_config
from .driver import simulate
from .grid import GridSpec
from .integrator import SubstepConfig, lie_step, strang_step
from .lowrank import LowRankState
from .maxwell import EMField
from .scenarios import ScenarioSpec, build

__all__ = [
    "EMField",
    "GridSpec",
    "LowRankState",
    "RunConfig",
    "ScenarioSpec",
    "SubstepConfig",
    "build",
    "lie_step",
    "parse_config",
    "simulate",
    "strang_step",
]
