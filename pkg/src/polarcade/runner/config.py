"""Experiment configuration: a typed description of one training run, loaded
from sectioned ``key = value`` files.

The file format has three sections — ``[experiment]`` (what to run),
``[wrapper]`` (preprocessing), and ``[agent]`` (hyperparameters) — and is
fail-fast: unknown sections or keys are rejected with the list of accepted
names, as are values that do not parse or validate.  Only ``game`` is
required; everything else has the documented default.

``continuous`` and ``tau`` never appear under ``[wrapper]``: the action
interface is implied by the agent kind (``sac`` is continuous; ``sacd`` and
``dqn`` are discrete) and the threshold is an ``[experiment]`` key, so a
sweep over it cannot silently disagree with the wrapper.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from ..agents import (AgentHyperparams, EpsilonSchedule, dqn_defaults,
                      sac_defaults, sacd_defaults)
from ..envcore import WrapperConfig
from ..games import GAME_REGISTRY
from ..joystick import Threshold


class ConfigError(ValueError):
    """Invalid experiment configuration; maps to process exit code 1."""


AGENT_KINDS = ("sac", "sacd", "dqn")
ENCODER_KINDS = ("sac", "dqn")
EXPLORATION_MODES = ("standard", "epsilon")
SWEEP_AXES = ("tau", "encoder", "exploration")

_HYPER_DEFAULTS = {"sac": sac_defaults, "sacd": sacd_defaults,
                   "dqn": dqn_defaults}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_seed_list(text: str) -> tuple[int, ...]:
    parts = [p for chunk in str(text).split(",") for p in chunk.split()]
    if not parts:
        raise ValueError("seed list is empty")
    return tuple(int(p) for p in parts)


_EXPERIMENT_KEYS = {
    "game": str,
    "agent": str,
    "encoder": str,
    "exploration": str,
    "tau": float,
    "frame_budget": int,
    "eval_interval": int,
    "eval_episodes": int,
    "seeds": parse_seed_list,
    "minimal_set": _parse_bool,
}

_WRAPPER_KEYS = {
    "sticky_prob": float,
    "frame_skip": int,
    "frame_stack": int,
    "downsample": int,
    "pool_last_two": _parse_bool,
    "max_episode_steps": int,
}

_AGENT_KEYS = {
    "discount": float,
    "batch_size": int,
    "learning_rate": float,
    "adam_eps": float,
    "replay_capacity": int,
    "min_replay_history": int,
    "update_period": int,
    "target_update_rho": float,
    "target_sync_period": int,
    "n_step": int,
    "entropy_target": float,
    "epsilon_start": float,
    "epsilon_end": float,
    "epsilon_horizon": int,
}

_SECTIONS = {"experiment": _EXPERIMENT_KEYS, "wrapper": _WRAPPER_KEYS,
             "agent": _AGENT_KEYS}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one seeded training run needs, validated at construction."""

    game: str
    agent: str = "dqn"
    encoder: str = "dqn"
    exploration: str = "epsilon"
    tau: float = 0.5
    frame_budget: int = 100_000
    eval_interval: int = 10_000
    eval_episodes: int = 10
    seeds: tuple[int, ...] = (0,)
    minimal_set: bool = True
    wrapper: WrapperConfig = WrapperConfig()
    hyper: AgentHyperparams = dataclasses.field(default=None)

    def __post_init__(self):
        if self.game not in GAME_REGISTRY:
            known = ", ".join(sorted(GAME_REGISTRY))
            raise ConfigError(f"unknown game {self.game!r}; available: {known}")
        if self.agent not in AGENT_KINDS:
            raise ConfigError(f"agent must be one of {AGENT_KINDS}, "
                              f"got {self.agent!r}")
        if self.encoder not in ENCODER_KINDS:
            raise ConfigError(f"encoder must be one of {ENCODER_KINDS}, "
                              f"got {self.encoder!r}")
        if self.exploration not in EXPLORATION_MODES:
            raise ConfigError(f"exploration must be one of {EXPLORATION_MODES}, "
                              f"got {self.exploration!r}")
        if self.agent == "dqn" and self.exploration != "epsilon":
            raise ConfigError("the dqn agent only supports epsilon exploration")
        try:
            Threshold(self.tau)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.frame_budget < 0:
            raise ConfigError("frame_budget cannot be negative")
        if self.eval_interval < 1:
            raise ConfigError("eval_interval must be positive")
        if self.eval_episodes < 1:
            raise ConfigError("eval_episodes must be positive")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.hyper is None:
            object.__setattr__(self, "hyper", _HYPER_DEFAULTS[self.agent]())
        needs_epsilon = self.agent == "dqn" or self.exploration == "epsilon"
        if needs_epsilon and self.hyper.epsilon is None:
            object.__setattr__(
                self, "hyper",
                self.hyper.with_overrides(epsilon=EpsilonSchedule()))

    @property
    def continuous(self) -> bool:
        return self.agent == "sac"

    def wrapper_for_run(self) -> WrapperConfig:
        """The wrapper with the action interface and threshold filled in."""
        return dataclasses.replace(self.wrapper, continuous=self.continuous,
                                   tau=self.tau)

    def replaced(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_axis_value(self, axis: str, value) -> "ExperimentConfig":
        """A copy with one sweep axis replaced (rebuilding dependent state)."""
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, "
                              f"got {axis!r}")
        if axis == "tau":
            return self.replaced(tau=float(value))
        return self.replaced(**{axis: str(value)})

    def summary(self) -> dict:
        """JSON-ready echo of every field, for log headers and manifests."""
        epsilon = self.hyper.epsilon
        hyper = {k: v for k, v in dataclasses.asdict(self.hyper).items()
                 if k != "epsilon"}
        hyper["epsilon"] = (None if epsilon is None else
                            {"start": epsilon.start, "end": epsilon.end,
                             "horizon_frames": epsilon.horizon_frames})
        return {
            "game": self.game,
            "agent": self.agent,
            "encoder": self.encoder,
            "exploration": self.exploration,
            "tau": self.tau,
            "frame_budget": self.frame_budget,
            "eval_interval": self.eval_interval,
            "eval_episodes": self.eval_episodes,
            "seeds": list(self.seeds),
            "minimal_set": self.minimal_set,
            "wrapper": dataclasses.asdict(self.wrapper),
            "hyper": hyper,
        }


def _parse_section(parser: configparser.ConfigParser, section: str) -> dict:
    if not parser.has_section(section):
        return {}
    allowed = _SECTIONS[section]
    values = {}
    for key, raw in parser.items(section):
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in section [{section}]; accepted keys: "
                f"{', '.join(sorted(allowed))}")
        try:
            values[key] = allowed[key](raw)
        except ValueError as exc:
            raise ConfigError(
                f"bad value for {key!r} in section [{section}]: {exc}") from None
    return values


def load_config(path, *, seeds: tuple[int, ...] | None = None) -> ExperimentConfig:
    """Parse and validate a config file; ``seeds`` overrides the file's list."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    unknown = set(parser.sections()) - set(_SECTIONS)
    if unknown:
        raise ConfigError(
            f"unknown section(s) {sorted(unknown)}; accepted sections: "
            f"{sorted(_SECTIONS)}")
    if parser.defaults():
        raise ConfigError("top-level keys outside a section are not accepted")

    experiment = _parse_section(parser, "experiment")
    wrapper_kwargs = _parse_section(parser, "wrapper")
    agent_kwargs = _parse_section(parser, "agent")
    if "game" not in experiment:
        raise ConfigError("the [experiment] section must set 'game'")
    if seeds is not None:
        experiment["seeds"] = tuple(seeds)

    try:
        wrapper = WrapperConfig(**wrapper_kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad [wrapper] settings: {exc}") from None

    agent_kind = experiment.get("agent", "dqn")
    if agent_kind not in AGENT_KINDS:
        raise ConfigError(f"agent must be one of {AGENT_KINDS}, "
                          f"got {agent_kind!r}")
    epsilon_keys = {k: agent_kwargs.pop(k) for k in
                    ("epsilon_start", "epsilon_end", "epsilon_horizon")
                    if k in agent_kwargs}
    try:
        hyper = _HYPER_DEFAULTS[agent_kind]().with_overrides(**agent_kwargs)
        if epsilon_keys:
            hyper = hyper.with_overrides(epsilon=EpsilonSchedule(
                start=epsilon_keys.get("epsilon_start", 1.0),
                end=epsilon_keys.get("epsilon_end", 0.01),
                horizon_frames=epsilon_keys.get("epsilon_horizon", 1_000_000)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [agent] settings: {exc}") from None

    return ExperimentConfig(wrapper=wrapper, hyper=hyper, **experiment)
