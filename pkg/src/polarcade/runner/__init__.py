"""Experiment orchestration: INI configs, training loops, JSONL logging,
checkpoint/resume, and the ``polarcade`` command line."""

from .cli import main, report_sweep, report_train_runs, run_seeds, run_sweep
from .config import (AGENT_KINDS, ENCODER_KINDS, EXPLORATION_MODES,
                     SWEEP_AXES, ConfigError, ExperimentConfig, load_config,
                     parse_seed_list)
from .loop import (LOG_SCHEMA, RunResult, build_agent, build_env,
                   episode_seed, evaluate_greedy, train_single)

__all__ = [
    "AGENT_KINDS",
    "ENCODER_KINDS",
    "EXPLORATION_MODES",
    "LOG_SCHEMA",
    "SWEEP_AXES",
    "ConfigError",
    "ExperimentConfig",
    "RunResult",
    "build_agent",
    "build_env",
    "episode_seed",
    "evaluate_greedy",
    "load_config",
    "main",
    "parse_seed_list",
    "report_sweep",
    "report_train_runs",
    "run_seeds",
    "run_sweep",
    "train_single",
]
