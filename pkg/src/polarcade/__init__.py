"""Continuous-joystick arcade toolkit: action mapping, mini-games, agents, evaluation."""

from polarcade.joystick import (
    ALL_EVENTS,
    NUM_EVENTS,
    ContinuousAction,
    Direction,
    JoystickEvent,
    Threshold,
    canonical_action,
    map_action,
    map_direction,
    map_events_grid,
    normalize_action,
    reachable_events,
    to_cartesian,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_EVENTS",
    "NUM_EVENTS",
    "ContinuousAction",
    "Direction",
    "JoystickEvent",
    "Threshold",
    "canonical_action",
    "map_action",
    "map_direction",
    "map_events_grid",
    "normalize_action",
    "reachable_events",
    "to_cartesian",
    "__version__",
]
