"""Shared agent machinery: hyperparameters, presets, and the float batch
format the update functions consume."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .. import nn
from .exploration import EpsilonSchedule
from .replay import SampledBatch

N_EVENTS = 18


@dataclass
class TransitionBatch:
    """Network-ready transitions: float observations in the layout the
    networks expect, actions as stored (box triples or event indices),
    discounted n-step rewards with their horizon, and terminal flags."""

    obs: np.ndarray
    action: np.ndarray
    reward: np.ndarray
    next_obs: np.ndarray
    terminal: np.ndarray
    horizon: np.ndarray

    @classmethod
    def from_pixels(cls, sampled: SampledBatch) -> "TransitionBatch":
        """Convert a replay sample of stacked uint8 frames: scale to [0, 1]
        and reorder to channels-first."""
        return cls(
            obs=nn.to_input(sampled.obs).data,
            action=sampled.action,
            reward=sampled.reward,
            next_obs=nn.to_input(sampled.next_obs).data,
            terminal=sampled.terminal,
            horizon=sampled.horizon,
        )


@dataclass(frozen=True)
class AgentHyperparams:
    """Knobs shared by the three agents; per-agent presets below.

    ``target_update_rho`` drives Polyak averaging for the soft-update agents
    (SAC, SAC-D); ``target_sync_period`` counts gradient updates between hard
    target copies for DQN.  ``entropy_target`` is the per-agent entropy the
    temperature auto-tuner steers toward (None for agents without one).
    """

    discount: float = 0.99
    batch_size: int = 32
    learning_rate: float = 3e-4
    adam_eps: float = 1.5e-4
    replay_capacity: int = 100_000
    min_replay_history: int = 1_600
    update_period: int = 4
    target_update_rho: float = 0.995
    target_sync_period: int = 2_000
    n_step: int = 1
    entropy_target: float | None = None
    epsilon: EpsilonSchedule | None = None

    def __post_init__(self):
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError(f"discount must lie in [0, 1], got {self.discount}")
        for name in ("batch_size", "replay_capacity", "min_replay_history",
                     "update_period", "target_sync_period", "n_step"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("learning_rate", "adam_eps"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not 0.0 <= self.target_update_rho <= 1.0:
            raise ValueError(
                f"target_update_rho must lie in [0, 1], got {self.target_update_rho}")
        if self.min_replay_history < self.batch_size:
            raise ValueError("min_replay_history must be at least one batch")
        if self.replay_capacity < self.min_replay_history:
            raise ValueError("replay_capacity must cover min_replay_history")

    def with_overrides(self, **changes) -> "AgentHyperparams":
        return replace(self, **changes)


def sac_defaults() -> AgentHyperparams:
    """Continuous SAC: entropy target = -(action dimensions) = -3."""
    return AgentHyperparams(learning_rate=3e-4, entropy_target=-3.0)


def sacd_defaults() -> AgentHyperparams:
    """Categorical SAC: larger batch; entropy target just under the uniform
    maximum so the temperature stays finite on an 18-way categorical."""
    return AgentHyperparams(learning_rate=3e-4, batch_size=64,
                            entropy_target=0.98 * math.log(N_EVENTS))


def dqn_defaults() -> AgentHyperparams:
    """DQN-lite: 10-step returns and a linearly decayed epsilon."""
    return AgentHyperparams(learning_rate=1e-4, n_step=10,
                            epsilon=EpsilonSchedule())


_MASK64 = (1 << 64) - 1


def _pack_pcg64(gen: np.random.Generator) -> np.ndarray:
    """A PCG64 generator's full state as six uint64 words (checkpointable)."""
    s = gen.bit_generator.state
    if s["bit_generator"] != "PCG64":
        raise ValueError(f"can only pack PCG64 state, got {s['bit_generator']}")
    state, inc = s["state"]["state"], s["state"]["inc"]
    return np.array([state >> 64, state & _MASK64, inc >> 64, inc & _MASK64,
                     s["has_uint32"], s["uinteger"]], dtype=np.uint64)


def _unpack_pcg64(gen: np.random.Generator, packed: np.ndarray):
    words = [int(w) for w in packed]
    gen.bit_generator.state = {
        "bit_generator": "PCG64",
        "state": {"state": (words[0] << 64) | words[1],
                  "inc": (words[2] << 64) | words[3]},
        "has_uint32": words[4],
        "uinteger": words[5],
    }


class ReplayAgentBase:
    """Shared training-loop plumbing for the replay-buffer agents.

    Subclasses set ``hyper`` and ``replay`` in their constructor and
    implement action selection (``_behavior_action``), the replay encoding of
    an action (``_stored_action``), one gradient update (``train_step``), and
    the checkpoint layout hooks (``_modules``/``_optimizers``/
    ``_scalar_tensors``).

    The driving loop calls ``begin_episode(obs)`` after each environment
    reset and ``step(reward, obs, terminated, truncated, env_frames)`` after
    each environment step; ``step`` records the transition, trains every
    ``update_period`` recorded transitions once the replay holds
    ``min_replay_history`` of them, and returns the next action (or None when
    the episode ended).  ``env_frames`` is the caller's cumulative
    environment-frame count, which feeds epsilon schedules.

    Checkpoints are flat array dumps (the nn module's format) holding every
    module parameter, optimizer state, random-generator state, and step
    counter, so a reloaded agent continues bit-exactly — except for the
    replay buffer, which is not persisted and refills after a resume.
    """

    hyper: AgentHyperparams
    replay: "FrameRingReplay"

    def _init_loop_state(self):
        self.updates_done = 0
        self._appends = 0
        self._last_action = None
        self.last_losses: dict = {}

    # hooks -------------------------------------------------------------------

    def _behavior_action(self, obs: np.ndarray, env_frames: int):
        raise NotImplementedError

    def _stored_action(self, action):
        raise NotImplementedError

    def train_step(self) -> dict:
        raise NotImplementedError

    def _modules(self) -> dict[str, nn.Module]:
        raise NotImplementedError

    def _optimizers(self) -> dict[str, nn.AdamState]:
        raise NotImplementedError

    def _scalar_tensors(self) -> dict[str, nn.Tensor]:
        return {}

    def _rngs(self) -> dict[str, np.random.Generator]:
        return {}

    # loop protocol -----------------------------------------------------------

    def begin_episode(self, obs: np.ndarray, env_frames: int = 0):
        self.replay.begin_episode(obs[..., -1])
        self._last_action = self._behavior_action(obs, env_frames)
        return self._last_action

    def step(self, reward: float, obs: np.ndarray, terminated: bool,
             truncated: bool, env_frames: int):
        """Record the last transition, train if due, and pick the next action
        (None once the episode is over)."""
        self.replay.append(self._stored_action(self._last_action), reward,
                           terminated, obs[..., -1])
        self._appends += 1
        if (len(self.replay) >= self.hyper.min_replay_history
                and self._appends % self.hyper.update_period == 0):
            self.last_losses = self.train_step()
        if terminated or truncated:
            self._last_action = None
            return None
        self._last_action = self._behavior_action(obs, env_frames)
        return self._last_action

    # persistence ---------------------------------------------------------------

    def _named_arrays(self) -> dict[str, np.ndarray]:
        arrays: dict[str, np.ndarray] = {}
        for prefix, module in self._modules().items():
            for name, p in module.named_parameters(f"{prefix}."):
                arrays[name] = p.data
        for name, t in self._scalar_tensors().items():
            arrays[name] = t.data
        for prefix, opt in self._optimizers().items():
            arrays[f"{prefix}.step"] = np.array([opt.step_count], np.int64)
            for i, (m, v) in enumerate(zip(opt.m, opt.v)):
                arrays[f"{prefix}.m.{i}"] = m
                arrays[f"{prefix}.v.{i}"] = v
        for name, gen in self._rngs().items():
            arrays[f"rng.{name}"] = _pack_pcg64(gen)
        arrays["counters"] = np.array([self.updates_done, self._appends], np.int64)
        return arrays

    def save(self, path):
        nn.save_arrays(path, self._named_arrays())

    def load(self, path):
        loaded = nn.load_arrays(path)
        current = self._named_arrays()
        if set(loaded) != set(current):
            raise ValueError("checkpoint does not match this agent's layout")
        for name, arr in current.items():
            if arr.shape != loaded[name].shape:
                raise ValueError(f"shape mismatch for checkpoint entry {name!r}")
            np.copyto(arr, loaded[name])
        for prefix, opt in self._optimizers().items():
            opt.step_count = int(loaded[f"{prefix}.step"][0])
        for name, gen in self._rngs().items():
            _unpack_pcg64(gen, loaded[f"rng.{name}"])
        self.updates_done = int(loaded["counters"][0])
        self._appends = int(loaded["counters"][1])
