"""Shared geometry and event-projection helpers for the mini games.

Screen convention: frames are indexed ``[row, col]`` with row 0 at the top,
so the joystick's UP (dy=+1) moves a sprite to a smaller row index.
"""

from __future__ import annotations

import numpy as np

from ..joystick import Direction, JoystickEvent

SIZE = 42


def direction_to_rowcol(direction: Direction) -> tuple[int, int]:
    """Joystick (dx, dy) -> screen (row delta, col delta)."""
    return -direction.dy, direction.dx


def horizontal_part(direction: Direction) -> Direction:
    return {-1: Direction.LEFT, 0: Direction.CENTER, 1: Direction.RIGHT}[direction.dx]


def vertical_part(direction: Direction) -> Direction:
    return {-1: Direction.DOWN, 0: Direction.CENTER, 1: Direction.UP}[direction.dy]


def project_axis(event: JoystickEvent, axis: str, *, fire_when_centered: bool,
                 fire_when_moving: bool) -> JoystickEvent:
    """Project an event onto one movement axis (its nearest in-set component).

    The retained direction is the event's horizontal or vertical part.  The
    fire bit survives according to the two flags, letting each game express
    whether its minimal set has a standalone FIRE button, moving fire
    variants, both, or neither.
    """
    part = horizontal_part(event.direction) if axis == "h" else vertical_part(event.direction)
    if part is Direction.CENTER:
        return JoystickEvent.from_parts(part, fire_when_centered and event.fire_pressed)
    return JoystickEvent.from_parts(part, fire_when_moving and event.fire_pressed)


def blit(frame: np.ndarray, top: int, left: int, height: int, width: int, value: int):
    """Draw a clipped solid rectangle."""
    r0, c0 = max(top, 0), max(left, 0)
    r1, c1 = min(top + height, frame.shape[0]), min(left + width, frame.shape[1])
    if r0 < r1 and c0 < c1:
        frame[r0:r1, c0:c1] = value


def overlaps(top_a, left_a, h_a, w_a, top_b, left_b, h_b, w_b) -> bool:
    return (top_a < top_b + h_b and top_b < top_a + h_a
            and left_a < left_b + w_b and left_b < left_a + w_a)
