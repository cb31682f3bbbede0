"""Independent reimplementations used as test oracles.

These deliberately avoid the library's encoding tables and derive every
event by direct, exhaustive case analysis.  Keep them independent of
``polarcade.joystick`` internals.
"""

import math

import numpy as np

# Independent literal copy of the frozen event ordering.
EVENT_IDS = {
    "NOOP": 0,
    "FIRE": 1,
    "UP": 2,
    "RIGHT": 3,
    "LEFT": 4,
    "DOWN": 5,
    "UPRIGHT": 6,
    "UPLEFT": 7,
    "DOWNRIGHT": 8,
    "DOWNLEFT": 9,
    "UPFIRE": 10,
    "RIGHTFIRE": 11,
    "LEFTFIRE": 12,
    "DOWNFIRE": 13,
    "UPRIGHTFIRE": 14,
    "UPLEFTFIRE": 15,
    "DOWNRIGHTFIRE": 16,
    "DOWNLEFTFIRE": 17,
}


def oracle_event_id(r: float, theta: float, fire: float, tau: float) -> int:
    """Scalar case-analysis mapping of one continuous action to an event id."""
    x = r * math.cos(theta)
    y = r * math.sin(theta)
    if y >= tau:
        vertical = "UP"
    elif y <= -tau:
        vertical = "DOWN"
    else:
        vertical = ""
    if x >= tau:
        horizontal = "RIGHT"
    elif x <= -tau:
        horizontal = "LEFT"
    else:
        horizontal = ""
    name = vertical + horizontal
    if fire >= tau:
        name = name + "FIRE" if name else "FIRE"
    elif not name:
        name = "NOOP"
    return EVENT_IDS[name]


def oracle_event_ids_grid(r, theta, fire, tau: float) -> np.ndarray:
    """Vectorized case-analysis mapping; one explicit condition per event."""
    r = np.asarray(r, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    fire = np.asarray(fire, dtype=np.float64)
    x = r * np.cos(theta)
    y = r * np.sin(theta)
    up = y >= tau
    down = y <= -tau
    right = x >= tau
    left = x <= -tau
    vmid = ~up & ~down
    hmid = ~right & ~left
    f = fire >= tau
    nf = ~f
    conditions = [
        vmid & hmid & nf,    # NOOP
        vmid & hmid & f,     # FIRE
        up & hmid & nf,      # UP
        vmid & right & nf,   # RIGHT
        vmid & left & nf,    # LEFT
        down & hmid & nf,    # DOWN
        up & right & nf,     # UPRIGHT
        up & left & nf,      # UPLEFT
        down & right & nf,   # DOWNRIGHT
        down & left & nf,    # DOWNLEFT
        up & hmid & f,       # UPFIRE
        vmid & right & f,    # RIGHTFIRE
        vmid & left & f,     # LEFTFIRE
        down & hmid & f,     # DOWNFIRE
        up & right & f,      # UPRIGHTFIRE
        up & left & f,       # UPLEFTFIRE
        down & right & f,    # DOWNRIGHTFIRE
        down & left & f,     # DOWNLEFTFIRE
    ]
    return np.select(conditions, list(range(18)), default=-1)


def finite_difference_grad(loss_fn, array: np.ndarray, flat_index: int,
                           h: float = 1e-4) -> float:
    """Central-difference derivative of scalar ``loss_fn()`` wrt one coordinate.

    ``loss_fn`` must recompute the forward pass from ``array``'s current
    contents on each call; the coordinate is restored afterwards.
    """
    idx = np.unravel_index(flat_index, array.shape)
    original = array[idx]
    array[idx] = original + h
    up = loss_fn()
    array[idx] = original - h
    down = loss_fn()
    array[idx] = original
    return (up - down) / (2.0 * h)
