"""Game interface and the preprocessing wrapper stack.

The wrapper applies, in this fixed order: continuous-action mapping,
sticky-action substitution (one draw per agent step, previous event starts
as NOOP after reset), frame skip (event repeated, rewards summed, last
frame kept — optionally max-pooled with the one before), and frame stack.

Determinism contract: (seed, action sequence, config) fully determines a
trajectory.  ``reset(seed)`` splits the seed into independent streams for
game randomness and sticky substitution, so replaying recorded events with
``sticky_prob=0`` and the same seed reproduces observations and rewards
exactly.

Budget accounting: the environment counts *frames*; one agent step spends
``frame_skip`` frames (a 400k-frame budget is 100k agent steps at the
default skip of 4).
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .joystick import (
    ContinuousAction,
    JoystickEvent,
    Threshold,
    canonical_action,
    map_action,
)

FULL_ACTION_SET: tuple[JoystickEvent, ...] = tuple(JoystickEvent)


@dataclass(frozen=True)
class GameSpec:
    """Static description of one game: action sets and normalization anchors."""

    name: str
    minimal_set: frozenset[JoystickEvent]
    minimal_set_size: int
    random_anchor: float
    oracle_anchor: float
    full_set: tuple[JoystickEvent, ...] = FULL_ACTION_SET

    def __post_init__(self):
        if not self.minimal_set <= set(self.full_set):
            raise ValueError("minimal action set must be a subset of the full set")
        if len(self.minimal_set) != self.minimal_set_size:
            raise ValueError(
                f"declared minimal-set size {self.minimal_set_size} does not match "
                f"the actual set ({len(self.minimal_set)} events)"
            )
        if not self.oracle_anchor > self.random_anchor:
            raise ValueError("oracle anchor must exceed the random anchor")


def event_effect_mask(spec: GameSpec, event: JoystickEvent) -> bool:
    """True iff the event is in the game's minimal action set."""
    return JoystickEvent(event) in spec.minimal_set


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict


@dataclass(frozen=True)
class WrapperConfig:
    sticky_prob: float = 0.25
    frame_skip: int = 4
    frame_stack: int = 4
    continuous: bool = False
    tau: float = 0.5
    downsample: int = 1
    pool_last_two: bool = False
    max_episode_steps: int = 10_000

    def __post_init__(self):
        if not 0.0 <= self.sticky_prob < 1.0:
            raise ValueError(f"sticky_prob must be in [0, 1), got {self.sticky_prob}")
        if self.frame_skip < 1:
            raise ValueError("frame_skip must be a positive integer")
        if self.frame_stack < 1:
            raise ValueError("frame_stack must be a positive integer")
        Threshold(self.tau)  # validates (0, 1)
        if self.downsample < 1:
            raise ValueError("downsample factor must be >= 1")
        if self.max_episode_steps < 1:
            raise ValueError("max_episode_steps must be positive")


class MiniGame(ABC):
    """One raw game: 42x42 uint8 frames advanced one frame per event.

    Subclasses implement the per-frame dynamics and declare a GameSpec.
    Events outside the minimal action set are projected onto it before
    the dynamics run, so out-of-set events are behaviorally identical to
    their projection.
    """

    SIZE = 42
    spec: GameSpec
    frame_limit: int

    def __init__(self):
        self.frames = 0

    @abstractmethod
    def reset(self, rng: np.random.Generator) -> None:
        """Reinitialize state from the given stream; resets the frame counter."""

    @abstractmethod
    def project_event(self, event: JoystickEvent) -> JoystickEvent:
        """Map any of the 18 events onto the minimal action set."""

    @abstractmethod
    def _advance(self, event: JoystickEvent) -> tuple[float, bool]:
        """Run one frame under an in-minimal-set event; return (reward, terminated)."""

    @abstractmethod
    def render(self) -> np.ndarray:
        """Current frame as a (SIZE, SIZE) uint8 array."""

    def step_event(self, event: JoystickEvent) -> tuple[float, bool, bool]:
        """One frame; returns (reward, terminated, truncated)."""
        reward, terminated = self._advance(self.project_event(JoystickEvent(event)))
        self.frames += 1
        truncated = not terminated and self.frames >= self.frame_limit
        return reward, terminated, truncated


def downsample_max(frame: np.ndarray, factor: int) -> np.ndarray:
    """Block max-reduction; the frame size must be divisible by the factor."""
    if factor == 1:
        return frame
    h, w = frame.shape
    if h % factor or w % factor:
        raise ValueError(f"frame shape {frame.shape} not divisible by {factor}")
    return frame.reshape(h // factor, factor, w // factor, factor).max(axis=(1, 3))


class WrappedEnv:
    """Preprocessing stack over one MiniGame instance.

    Observations are (H, W, frame_stack) uint8 with the newest frame last.
    Instances require exclusive access; run separate instances in parallel.
    """

    def __init__(self, game: MiniGame, config: WrapperConfig = WrapperConfig()):
        if game.SIZE % config.downsample:
            raise ValueError("downsample factor must divide the frame size")
        self.game = game
        self.config = config
        side = game.SIZE // config.downsample
        self.observation_shape = (side, side, config.frame_stack)
        self._stack = np.zeros(self.observation_shape, dtype=np.uint8)
        self._sticky_rng: np.random.Generator | None = None
        self._prev_event = JoystickEvent.NOOP
        self._episode_over = True
        self.agent_steps = 0

    @property
    def spec(self) -> GameSpec:
        return self.game.spec

    @property
    def frames_elapsed(self) -> int:
        return self.game.frames

    def reset(self, seed: int) -> np.ndarray:
        game_seq, sticky_seq = np.random.SeedSequence(seed).spawn(2)
        self._sticky_rng = np.random.Generator(np.random.PCG64(sticky_seq))
        self.game.reset(np.random.Generator(np.random.PCG64(game_seq)))
        self._prev_event = JoystickEvent.NOOP
        self._episode_over = False
        self.agent_steps = 0
        frame = downsample_max(self.game.render(), self.config.downsample)
        self._stack = np.repeat(frame[:, :, None], self.config.frame_stack, axis=2)
        return self._stack.copy()

    def step_discrete(self, event: JoystickEvent) -> StepResult:
        if self._episode_over:
            raise RuntimeError("episode is over; call reset() before stepping")
        requested = JoystickEvent(event)

        executed = requested
        if self.config.sticky_prob > 0.0:
            if self._sticky_rng.random() < self.config.sticky_prob:
                executed = self._prev_event
        self._prev_event = executed

        cfg = self.config
        total_reward = 0.0
        terminated = truncated = False
        frame = prev_frame = None
        for i in range(cfg.frame_skip):
            reward, terminated, truncated = self.game.step_event(executed)
            total_reward += reward
            want_render = (i >= cfg.frame_skip - 2) if cfg.pool_last_two else (i == cfg.frame_skip - 1)
            if want_render or terminated or truncated:
                prev_frame = frame
                frame = downsample_max(self.game.render(), cfg.downsample)
            if terminated or truncated:
                break
        if cfg.pool_last_two and prev_frame is not None:
            frame = np.maximum(frame, prev_frame)

        self.agent_steps += 1
        if not terminated and self.agent_steps >= cfg.max_episode_steps:
            truncated = True
        self._episode_over = terminated or truncated

        self._stack[:, :, :-1] = self._stack[:, :, 1:]
        self._stack[:, :, -1] = frame
        info = {
            "event": int(executed),
            "requested": int(requested),
            "frames": self.game.frames,
        }
        return StepResult(self._stack.copy(), total_reward, terminated, truncated, info)

    def step_continuous(self, action: ContinuousAction | tuple) -> StepResult:
        if not self.config.continuous:
            raise RuntimeError("environment was not configured for continuous actions")
        if not isinstance(action, ContinuousAction):
            action = ContinuousAction(*action)
        event = map_action(action, Threshold(self.config.tau))
        result = self.step_discrete(event)
        result.info["continuous"] = action.as_tuple()
        return result


# -- trajectory record files -----------------------------------------------------
#
# One JSON object per line per agent step.  Discrete-mode steps store the
# canonical continuous representative of the executed event, so every record
# carries a full (r, theta, fire) triple.

@dataclass(frozen=True)
class TrajectoryStep:
    step: int
    event: int
    action: tuple[float, float, float]
    reward: float
    terminated: bool


class TrajectoryRecorder:
    """Incrementally writes trajectory records to a line-delimited file."""

    def __init__(self, path: str | Path):
        self._fh = open(path, "w", encoding="utf-8")

    def record(self, result: StepResult, step: int):
        action = result.info.get("continuous")
        if action is None:
            action = canonical_action(JoystickEvent(result.info["event"])).as_tuple()
        rec = TrajectoryStep(step, result.info["event"], tuple(action),
                             float(result.reward), bool(result.terminated))
        self._fh.write(json.dumps(vars(rec), sort_keys=True) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trajectory(path: str | Path) -> list[TrajectoryStep]:
    steps = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            raw = json.loads(line)
            steps.append(TrajectoryStep(
                step=int(raw["step"]),
                event=int(raw["event"]),
                action=tuple(float(v) for v in raw["action"]),
                reward=float(raw["reward"]),
                terminated=bool(raw["terminated"]),
            ))
    return steps


def replay_events(env: WrappedEnv, seed: int, events: Iterable[int]) -> Iterator[StepResult]:
    """Step recorded events through a freshly reset env, yielding each result."""
    env.reset(seed)
    for event in events:
        yield env.step_discrete(JoystickEvent(event))
