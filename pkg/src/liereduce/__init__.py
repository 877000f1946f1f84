"""Symmetry-reduced optimality conditions for multi-agent left-invariant systems on SE(2)."""
from . import lie_core, se2
from .config import PRESETS, ScenarioConfig, load_config, parse_config
from .dynamics import HamiltonianState, LagrangianState, MultiAgentSystem
from .errors import (
    CollisionError,
    ConfigError,
    DomainError,
    GroupStateError,
    InputError,
    LieReduceError,
    NumericalError,
)
from .interaction import EdgeParams, InteractionGraph, PotentialParams
from .lie_core import CostMetric, Decomposition, StructureConstants
from .sim import IntegratorSpec, TrajectoryRecord, integrate, run

__version__ = "0.1.0"

__all__ = [
    "CollisionError",
    "ConfigError",
    "CostMetric",
    "Decomposition",
    "DomainError",
    "EdgeParams",
    "GroupStateError",
    "HamiltonianState",
    "InputError",
    "IntegratorSpec",
    "InteractionGraph",
    "LagrangianState",
    "LieReduceError",
    "MultiAgentSystem",
    "NumericalError",
    "PRESETS",
    "PotentialParams",
    "ScenarioConfig",
    "StructureConstants",
    "TrajectoryRecord",
    "integrate",
    "lie_core",
    "load_config",
    "parse_config",
    "run",
    "se2",
]
