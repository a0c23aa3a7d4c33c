"""Seedable simulator of decentralized fictitious play with learning-aware
communication and communication-aware mobility for multi-robot target assignment."""

from .agent import AgentState, LearnParams
from .channel import CommParams, LinkOutcome
from .config import ConfigError, build_config, load_config_file, preset_config
from .engine import (
    BatchResult,
    BatchSummary,
    MetricsFrame,
    RunResult,
    ScenarioConfig,
    Variant,
    attempts_ratio,
    parameter_sweep,
    run_batch,
    run_replication,
    simulate_step,
)
from .mobility import MobilityParams

__all__ = [
    "AgentState",
    "BatchResult",
    "BatchSummary",
    "CommParams",
    "ConfigError",
    "LearnParams",
    "LinkOutcome",
    "MetricsFrame",
    "MobilityParams",
    "RunResult",
    "ScenarioConfig",
    "Variant",
    "attempts_ratio",
    "build_config",
    "load_config_file",
    "parameter_sweep",
    "preset_config",
    "run_batch",
    "run_replication",
    "simulate_step",
]

__version__ = "0.1.0"
