"""Continuous joystick action space and its thresholded event mapping.

A continuous action is a point in [0, 1] x [-pi, pi] x [0, 1]: stick radius,
stick angle, and fire intensity.  A threshold ``tau`` splits each cartesian
stick axis into three bands (negative, neutral, positive), yielding nine
stick directions; combined with the fire cutoff this produces 18 discrete
joystick events.

Event integer ordering is frozen (conventional Atari ordering)::

    0 NOOP      1 FIRE       2 UP          3 RIGHT       4 LEFT
    5 DOWN      6 UPRIGHT    7 UPLEFT      8 DOWNRIGHT   9 DOWNLEFT
    10 UPFIRE   11 RIGHTFIRE 12 LEFTFIRE   13 DOWNFIRE   14 UPRIGHTFIRE
    15 UPLEFTFIRE            16 DOWNRIGHTFIRE            17 DOWNLEFTFIRE

Threshold comparisons are closed on the event side: an axis value equal to
``tau`` triggers the event.  The same ``tau`` is used as the fire cutoff.
All functions here are pure and safe to call from any thread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class Direction(enum.Enum):
    """One of the nine stick positions."""

    CENTER = (0, 0)
    UP = (0, 1)
    DOWN = (0, -1)
    LEFT = (-1, 0)
    RIGHT = (1, 0)
    UPLEFT = (-1, 1)
    UPRIGHT = (1, 1)
    DOWNLEFT = (-1, -1)
    DOWNRIGHT = (1, -1)

    @property
    def dx(self) -> int:
        """Horizontal unit component (+1 is right)."""
        return self.value[0]

    @property
    def dy(self) -> int:
        """Vertical unit component (+1 is up, mathematical convention)."""
        return self.value[1]

    @property
    def is_diagonal(self) -> bool:
        return self.dx != 0 and self.dy != 0


DIAGONALS = frozenset(
    {Direction.UPLEFT, Direction.UPRIGHT, Direction.DOWNLEFT, Direction.DOWNRIGHT}
)


class JoystickEvent(enum.IntEnum):
    """One of the 18 discrete joystick events (9 directions x fire on/off)."""

    NOOP = 0
    FIRE = 1
    UP = 2
    RIGHT = 3
    LEFT = 4
    DOWN = 5
    UPRIGHT = 6
    UPLEFT = 7
    DOWNRIGHT = 8
    DOWNLEFT = 9
    UPFIRE = 10
    RIGHTFIRE = 11
    LEFTFIRE = 12
    DOWNFIRE = 13
    UPRIGHTFIRE = 14
    UPLEFTFIRE = 15
    DOWNRIGHTFIRE = 16
    DOWNLEFTFIRE = 17

    @property
    def direction(self) -> Direction:
        return _EVENT_TO_DIRECTION[self]

    @property
    def fire_pressed(self) -> bool:
        return self >= JoystickEvent.UPFIRE or self == JoystickEvent.FIRE

    @staticmethod
    def from_parts(direction: Direction, fire_pressed: bool) -> "JoystickEvent":
        return _PARTS_TO_EVENT[(direction, fire_pressed)]


_DIRECTION_ORDER = [
    Direction.CENTER,
    Direction.UP,
    Direction.RIGHT,
    Direction.LEFT,
    Direction.DOWN,
    Direction.UPRIGHT,
    Direction.UPLEFT,
    Direction.DOWNRIGHT,
    Direction.DOWNLEFT,
]

_PARTS_TO_EVENT = {
    (Direction.CENTER, False): JoystickEvent.NOOP,
    (Direction.CENTER, True): JoystickEvent.FIRE,
    (Direction.UP, False): JoystickEvent.UP,
    (Direction.RIGHT, False): JoystickEvent.RIGHT,
    (Direction.LEFT, False): JoystickEvent.LEFT,
    (Direction.DOWN, False): JoystickEvent.DOWN,
    (Direction.UPRIGHT, False): JoystickEvent.UPRIGHT,
    (Direction.UPLEFT, False): JoystickEvent.UPLEFT,
    (Direction.DOWNRIGHT, False): JoystickEvent.DOWNRIGHT,
    (Direction.DOWNLEFT, False): JoystickEvent.DOWNLEFT,
    (Direction.UP, True): JoystickEvent.UPFIRE,
    (Direction.RIGHT, True): JoystickEvent.RIGHTFIRE,
    (Direction.LEFT, True): JoystickEvent.LEFTFIRE,
    (Direction.DOWN, True): JoystickEvent.DOWNFIRE,
    (Direction.UPRIGHT, True): JoystickEvent.UPRIGHTFIRE,
    (Direction.UPLEFT, True): JoystickEvent.UPLEFTFIRE,
    (Direction.DOWNRIGHT, True): JoystickEvent.DOWNRIGHTFIRE,
    (Direction.DOWNLEFT, True): JoystickEvent.DOWNLEFTFIRE,
}

_EVENT_TO_DIRECTION = {event: parts[0] for parts, event in _PARTS_TO_EVENT.items()}

ALL_EVENTS = tuple(JoystickEvent)
NUM_EVENTS = len(ALL_EVENTS)

# Canonical stick angle per non-center direction, radians.
_DIRECTION_ANGLE = {
    Direction.RIGHT: 0.0,
    Direction.UPRIGHT: math.pi / 4,
    Direction.UP: math.pi / 2,
    Direction.UPLEFT: 3 * math.pi / 4,
    Direction.LEFT: math.pi,
    Direction.DOWNLEFT: -3 * math.pi / 4,
    Direction.DOWN: -math.pi / 2,
    Direction.DOWNRIGHT: -math.pi / 4,
}


@dataclass(frozen=True)
class Threshold:
    """Axis cutoff demarcating the nine stick positions; must lie in (0, 1)."""

    tau: float

    def __post_init__(self):
        tau = self.tau
        if not (isinstance(tau, (int, float)) and math.isfinite(tau)):
            raise ValueError(f"threshold must be a finite number, got {tau!r}")
        if not 0.0 < tau < 1.0:
            raise ValueError(f"threshold must lie strictly inside (0, 1), got {tau}")


def _tau_value(tau: "Threshold | float") -> float:
    if isinstance(tau, Threshold):
        return tau.tau
    return Threshold(float(tau)).tau


@dataclass(frozen=True)
class ContinuousAction:
    """Stick radius in [0, 1], stick angle in [-pi, pi], fire intensity in [0, 1]."""

    r: float
    theta: float
    fire: float

    def __post_init__(self):
        for name, value in (("r", self.r), ("theta", self.theta), ("fire", self.fire)):
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if not -math.pi <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [-pi, pi], got {self.theta}")
        if not 0.0 <= self.fire <= 1.0:
            raise ValueError(f"fire must lie in [0, 1], got {self.fire}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.theta, self.fire)


def to_cartesian(action: ContinuousAction) -> tuple[float, float]:
    """Stick position (x, y) in the unit disk for a polar action."""
    return (action.r * math.cos(action.theta), action.r * math.sin(action.theta))


def map_direction(x: float, y: float, tau: "Threshold | float") -> Direction:
    """Stick position to direction: an axis triggers when its magnitude reaches tau."""
    t = _tau_value(tau)
    dx = 1 if x >= t else (-1 if x <= -t else 0)
    dy = 1 if y >= t else (-1 if y <= -t else 0)
    return Direction((dx, dy))


def map_action(action: ContinuousAction, tau: "Threshold | float") -> JoystickEvent:
    """Full mapping from a continuous action to one of the 18 joystick events."""
    t = _tau_value(tau)
    x, y = to_cartesian(action)
    direction = map_direction(x, y, t)
    return JoystickEvent.from_parts(direction, action.fire >= t)


def normalize_action(raw_r: float, raw_theta: float, raw_fire: float) -> ContinuousAction:
    """Clamp radius and fire into [0, 1] and wrap the angle periodically.

    Angles already inside [-pi, pi] are returned unchanged; out-of-range
    angles are wrapped into (-pi, pi].  Non-finite inputs are rejected.
    """
    for name, value in (("r", raw_r), ("theta", raw_theta), ("fire", raw_fire)):
        if not math.isfinite(value):
            raise ValueError(f"cannot normalize non-finite {name}: {value!r}")
    r = min(max(float(raw_r), 0.0), 1.0)
    fire = min(max(float(raw_fire), 0.0), 1.0)
    theta = float(raw_theta)
    if not -math.pi <= theta <= math.pi:
        theta = math.pi - (math.pi - theta) % TWO_PI
    return ContinuousAction(r, theta, fire)


def canonical_action(event: JoystickEvent, radius: float = 1.0) -> ContinuousAction:
    """A representative continuous action that triggers ``event``.

    Uses the stick pushed to ``radius`` at the direction's canonical angle
    (or centered for NOOP/FIRE) and fire fully pressed or released.  The
    round trip through :func:`map_action` holds whenever the direction is
    reachable at the chosen tau.
    """
    direction = event.direction
    if direction == Direction.CENTER:
        r, theta = 0.0, 0.0
    else:
        r, theta = radius, _DIRECTION_ANGLE[direction]
    return ContinuousAction(r, theta, 1.0 if event.fire_pressed else 0.0)


def map_events_grid(
    r: np.ndarray, theta: np.ndarray, fire: np.ndarray, tau: "Threshold | float"
) -> np.ndarray:
    """Vectorized :func:`map_action` over arrays of action components.

    Returns an int array of event ids with the broadcast shape of the inputs.
    """
    t = _tau_value(tau)
    r = np.asarray(r, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    fire = np.asarray(fire, dtype=np.float64)
    x = r * np.cos(theta)
    y = r * np.sin(theta)
    dx = np.where(x >= t, 1, np.where(x <= -t, -1, 0))
    dy = np.where(y >= t, 1, np.where(y <= -t, -1, 0))
    fire_on = fire >= t
    # Direction ids follow _DIRECTION_ORDER; (dx, dy) indexes into a 3x3 table.
    dir_table = np.empty((3, 3), dtype=np.int64)
    for idx, direction in enumerate(_DIRECTION_ORDER):
        dir_table[direction.dx + 1, direction.dy + 1] = idx
    dir_ids = dir_table[dx + 1, dy + 1]
    event_table = np.empty((len(_DIRECTION_ORDER), 2), dtype=np.int64)
    for idx, direction in enumerate(_DIRECTION_ORDER):
        event_table[idx, 0] = int(JoystickEvent.from_parts(direction, False))
        event_table[idx, 1] = int(JoystickEvent.from_parts(direction, True))
    return event_table[dir_ids, fire_on.astype(np.int64)]


def reachable_events(
    tau: "Threshold | float", grid_resolution: int = 401
) -> set[JoystickEvent]:
    """Events producible by some action, found by brute force over a dense grid.

    The (r, theta) plane is swept at ``grid_resolution`` points per axis; the
    fire axis factors out exactly (a grid containing 0 and 1 always realizes
    both fire states), so reachable events are reachable directions crossed
    with both fire states.
    """
    if grid_resolution < 100:
        raise ValueError(f"grid_resolution must be >= 100, got {grid_resolution}")
    t = _tau_value(tau)
    r = np.linspace(0.0, 1.0, grid_resolution)
    theta = np.linspace(-math.pi, math.pi, grid_resolution)
    ids = map_events_grid(r[:, None], theta[None, :], np.zeros(()), t)
    directions = {ALL_EVENTS[i].direction for i in np.unique(ids)}
    return {
        JoystickEvent.from_parts(direction, fire)
        for direction in directions
        for fire in (False, True)
    }
