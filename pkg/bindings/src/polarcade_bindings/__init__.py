"""Gymnasium-style bindings for the polarcade arcade environments.

This package wraps the native :mod:`polarcade` library behind the calling
convention popular in the mainstream RL tooling ecosystem:

* :func:`make` builds an environment from a game name plus wrapper options
  and returns a :class:`BoundEnv` carrying action/observation-space
  descriptors,
* ``env.reset(seed)`` returns ``(observation, info)``,
* ``env.step(action)`` returns the five-tuple
  ``(observation, reward, terminated, truncated, info)``,
* :func:`map_action_py` exposes the polar action-to-event mapping as a
  plain-float function.

Parity contract: every operation here returns bit-identical results to the
native library for the same seed and action sequence.  The bindings add no
behavior of their own beyond argument conversion -- continuous actions are
normalized through the native rules (radius/trigger clamped, angle wrapped)
and discrete actions index the environment's event table.

Observations are the native unsigned 8-bit arrays, passed through without
copying; agents convert to float on their side.  Handles are not
thread-safe: a single :class:`BoundEnv` must not be stepped from two
threads at once, though independent handles may run concurrently.

The bindings expose environments and the action mapping only.  Agents,
training loops, and vectorized batching are out of scope.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field

import numpy as np

import polarcade
from polarcade import ContinuousAction, JoystickEvent, map_action, normalize_action
from polarcade.envcore import FULL_ACTION_SET, WrappedEnv, WrapperConfig
from polarcade.games import GAME_REGISTRY, make_game

__version__ = polarcade.__version__

__all__ = [
    "BoundEnv",
    "BoxSpace",
    "DiscreteSpace",
    "ObservationSpace",
    "game_names",
    "make",
    "map_action_py",
    "__version__",
]


def game_names() -> tuple[str, ...]:
    """Names accepted by :func:`make`, sorted alphabetically."""
    return tuple(sorted(GAME_REGISTRY))


@dataclass(frozen=True)
class BoxSpace:
    """Continuous action-space descriptor: an axis-aligned box.

    The polar joystick box is ``[0, 1] x [-pi, pi] x [0, 1]`` over
    ``(radius, angle, trigger)``.
    """

    low: tuple[float, ...]
    high: tuple[float, ...]
    dtype: str = "float64"

    @property
    def shape(self) -> tuple[int, ...]:
        return (len(self.low),)

    def contains(self, point) -> bool:
        values = np.asarray(point, dtype=np.float64)
        if values.shape != self.shape or not np.all(np.isfinite(values)):
            return False
        return bool(
            np.all(values >= np.asarray(self.low))
            and np.all(values <= np.asarray(self.high))
        )


@dataclass(frozen=True)
class DiscreteSpace:
    """Discrete action-space descriptor: indices ``0 .. n-1``.

    ``events`` records which joystick event each index triggers, in index
    order, so callers can recover semantic names without extra lookups.
    """

    n: int
    events: tuple[int, ...] = field(default=())

    def contains(self, index) -> bool:
        try:
            value = operator.index(index)
        except TypeError:
            return False
        return 0 <= value < self.n


@dataclass(frozen=True)
class ObservationSpace:
    """Observation descriptor: stacked byte frames with inclusive bounds."""

    shape: tuple[int, ...]
    dtype: str = "uint8"
    low: int = 0
    high: int = 255


def map_action_py(r: float, theta: float, fire: float, tau: float) -> int:
    """Map a polar joystick reading to its discrete event id.

    Exact passthrough to the native mapping: the same closed thresholds,
    the same event ids.  All four inputs must be finite; out-of-range
    values raise the native validation errors rather than being clamped.
    """
    values = (("r", r), ("theta", theta), ("fire", fire), ("tau", tau))
    for name, value in values:
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    event = map_action(ContinuousAction(float(r), float(theta), float(fire)), float(tau))
    return int(event)


class BoundEnv:
    """An open environment handle with Gymnasium-style ``reset``/``step``.

    Instances are created by :func:`make`.  The handle stays valid until
    :meth:`close` is called; afterwards ``reset`` and ``step`` raise
    ``RuntimeError``.  A handle must not be shared between threads.
    """

    def __init__(
        self,
        handle: WrappedEnv,
        action_space: BoxSpace | DiscreteSpace,
        observation_space: ObservationSpace,
        events: tuple[JoystickEvent, ...] | None,
    ) -> None:
        self._handle: WrappedEnv | None = handle
        self.action_space = action_space
        self.observation_space = observation_space
        self._events = events

    @property
    def closed(self) -> bool:
        return self._handle is None

    @property
    def continuous(self) -> bool:
        return self._events is None

    def _require_open(self) -> WrappedEnv:
        if self._handle is None:
            raise RuntimeError("environment is closed")
        return self._handle

    def reset(self, seed: int | None = None) -> tuple[np.ndarray, dict]:
        """Start a new episode; returns ``(observation, info)``.

        ``seed=None`` draws a fresh seed from OS entropy; passing an
        integer makes the episode reproducible.
        """
        handle = self._require_open()
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
        observation = handle.reset(int(seed))
        return observation, {}

    def step(self, action) -> tuple[np.ndarray, float, bool, bool, dict]:
        """Advance one decision step; returns the five-tuple.

        Continuous handles take ``(radius, angle, trigger)``; out-of-range
        finite values are normalized (radius/trigger clamped into [0, 1],
        angle wrapped into (-pi, pi]).  Discrete handles take an index into
        ``action_space.events``; out-of-set indices are rejected.  ``info``
        always carries the triggered event id under ``"event"``.
        """
        handle = self._require_open()
        if self._events is None:
            result = handle.step_continuous(self._as_continuous(action))
        else:
            result = handle.step_discrete(self._as_event(action))
        return (
            result.observation,
            float(result.reward),
            bool(result.terminated),
            bool(result.truncated),
            dict(result.info),
        )

    def _as_continuous(self, action) -> ContinuousAction:
        if isinstance(action, ContinuousAction):
            return action
        values = np.asarray(action, dtype=np.float64)
        if values.shape != (3,):
            raise ValueError(
                f"continuous action must have shape (3,), got {values.shape}"
            )
        return normalize_action(float(values[0]), float(values[1]), float(values[2]))

    def _as_event(self, action) -> JoystickEvent:
        try:
            index = operator.index(action)
        except TypeError:
            raise TypeError(
                f"discrete action must be an integer index, got {type(action).__name__}"
            ) from None
        events = self._events
        assert events is not None
        if not 0 <= index < len(events):
            raise ValueError(
                f"discrete action {index} outside [0, {len(events) - 1}]"
            )
        return events[index]

    def close(self) -> None:
        """Invalidate the handle.  Closing twice is a no-op."""
        self._handle = None

    def __enter__(self) -> "BoundEnv":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def __repr__(self) -> str:
        state = "closed" if self.closed else "open"
        return f"<BoundEnv {self.action_space!r} [{state}]>"


def make(
    game: str,
    *,
    continuous: bool = False,
    tau: float = 0.5,
    full_action_set: bool = False,
    sticky_prob: float = 0.25,
    frame_skip: int = 4,
    frame_stack: int = 4,
    downsample: int = 1,
    pool_last_two: bool = False,
    max_episode_steps: int = 10_000,
) -> BoundEnv:
    """Build an environment handle from a game name and wrapper options.

    ``continuous=True`` yields the 3-D polar box action space with the
    discretization threshold ``tau``; otherwise the action space is the
    game's minimal event set (or all 18 events with
    ``full_action_set=True``).  The remaining keywords mirror the native
    wrapper options and keep its defaults.  Unknown game names and invalid
    thresholds raise ``ValueError``.
    """
    native_game = make_game(game)
    config = WrapperConfig(
        sticky_prob=sticky_prob,
        frame_skip=frame_skip,
        frame_stack=frame_stack,
        continuous=continuous,
        tau=tau,
        downsample=downsample,
        pool_last_two=pool_last_two,
        max_episode_steps=max_episode_steps,
    )
    handle = WrappedEnv(native_game, config)
    if continuous:
        action_space: BoxSpace | DiscreteSpace = BoxSpace(
            low=(0.0, -math.pi, 0.0), high=(1.0, math.pi, 1.0)
        )
        events: tuple[JoystickEvent, ...] | None = None
    else:
        if full_action_set:
            events = tuple(FULL_ACTION_SET)
        else:
            events = tuple(sorted(native_game.spec.minimal_set))
        action_space = DiscreteSpace(
            n=len(events), events=tuple(int(e) for e in events)
        )
    observation_space = ObservationSpace(shape=tuple(handle.observation_shape))
    return BoundEnv(handle, action_space, observation_space, events)
