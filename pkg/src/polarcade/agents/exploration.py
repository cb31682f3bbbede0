"""Exploration helpers: linear epsilon decay and uniform action draws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..joystick import ContinuousAction, JoystickEvent


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear interpolation from ``start`` to ``end`` over a frame horizon.

    ``value(frame)`` is exact at the landmarks: ``start`` at frame 0, the
    arithmetic midpoint at half the horizon, and ``end`` at the horizon and
    beyond.
    """

    start: float = 1.0
    end: float = 0.01
    horizon_frames: int = 1_000_000

    def __post_init__(self):
        if not isinstance(self.horizon_frames, int) or self.horizon_frames < 1:
            raise ValueError(
                f"horizon_frames must be a positive integer, got {self.horizon_frames!r}")
        if not 0.0 <= self.end <= self.start <= 1.0:
            raise ValueError(
                f"need 0 <= end <= start <= 1, got start={self.start}, end={self.end}")

    def value(self, frame: int) -> float:
        if frame < 0:
            raise ValueError(f"frame must be nonnegative, got {frame}")
        if frame >= self.horizon_frames:
            return self.end
        fraction = frame / self.horizon_frames
        return self.start * (1.0 - fraction) + self.end * fraction


def uniform_box_action(rng: np.random.Generator) -> ContinuousAction:
    """One uniform draw over the action box [0,1] x [-pi,pi] x [0,1]."""
    return ContinuousAction(
        rng.uniform(0.0, 1.0),
        rng.uniform(-math.pi, math.pi),
        rng.uniform(0.0, 1.0),
    )


def uniform_event(rng: np.random.Generator,
                  events: Sequence[JoystickEvent] | None = None) -> JoystickEvent:
    """One uniform draw over ``events`` (default: all 18 joystick events)."""
    pool = list(JoystickEvent) if events is None else list(events)
    if not pool:
        raise ValueError("events must be non-empty")
    return JoystickEvent(pool[int(rng.integers(len(pool)))])


def epsilon_greedy_wrap(base_action_source: Callable,
                        schedule: EpsilonSchedule,
                        rng: np.random.Generator,
                        *,
                        events: Sequence[JoystickEvent] | None = None) -> Callable:
    """Dither an action source with schedule-driven uniform exploration.

    Returns ``wrapped(obs, frame)``: with probability ``schedule.value(frame)``
    it emits a uniform draw — over the continuous box by default, or over
    ``events`` when a discrete event pool is given — and otherwise defers to
    ``base_action_source(obs)``.  When the schedule evaluates to exactly 0 no
    random number is consumed, so a zero schedule is deterministic.
    """

    def wrapped(obs, frame: int):
        eps = schedule.value(frame)
        if eps > 0.0 and rng.random() < eps:
            if events is None:
                return uniform_box_action(rng)
            return uniform_event(rng, events)
        return base_action_source(obs)

    return wrapped
