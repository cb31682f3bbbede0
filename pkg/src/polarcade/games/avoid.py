"""Dodging game with a dense reward stream: +0.1 every surviving frame.

Hazard blocks spawn at seeded random columns every few frames and fall one
pixel per frame; touching one costs -1 and ends the episode.  The agent
slides along the bottom at 2 px/frame and only the horizontal component of
any event has an effect (minimal set {NOOP, LEFT, RIGHT}).
"""

from __future__ import annotations

import numpy as np

from ..envcore import GameSpec, MiniGame
from ..joystick import JoystickEvent
from .base import SIZE, blit, overlaps, project_axis

AGENT_W = 4
AGENT_H = 4
AGENT_TOP = 37
AGENT_SPEED = 2
HAZARD_SIZE = 3
SPAWN_PERIOD = 8
SURVIVE_REWARD = 0.1
CRASH_REWARD = -1.0

AGENT_VALUE = 255
HAZARD_VALUE = 180


class MiniAvoid(MiniGame):
    spec = GameSpec(
        name="mini_avoid",
        minimal_set=frozenset({
            JoystickEvent.NOOP, JoystickEvent.LEFT, JoystickEvent.RIGHT,
        }),
        minimal_set_size=3,
        random_anchor=4.903,
        oracle_anchor=47.941,
    )
    frame_limit = 2400

    def __init__(self):
        super().__init__()
        self._rng: np.random.Generator | None = None
        self.agent_x = 0
        self.hazards: list[list[int]] = []  # [top, left] per falling block

    def reset(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self.frames = 0
        self.agent_x = (SIZE - AGENT_W) // 2
        self.hazards = []

    def project_event(self, event: JoystickEvent) -> JoystickEvent:
        return project_axis(event, "h", fire_when_centered=False, fire_when_moving=False)

    def _advance(self, event: JoystickEvent) -> tuple[float, bool]:
        self.agent_x = int(np.clip(
            self.agent_x + AGENT_SPEED * event.direction.dx, 0, SIZE - AGENT_W
        ))

        for hazard in self.hazards:
            hazard[0] += 1
        self.hazards = [h for h in self.hazards if h[0] < SIZE]
        if self.frames % SPAWN_PERIOD == 0:
            self.hazards.append([-HAZARD_SIZE, int(self._rng.integers(0, SIZE - HAZARD_SIZE + 1))])

        for top, left in self.hazards:
            if overlaps(top, left, HAZARD_SIZE, HAZARD_SIZE,
                        AGENT_TOP, self.agent_x, AGENT_H, AGENT_W):
                return CRASH_REWARD, True
        return SURVIVE_REWARD, False

    def render(self) -> np.ndarray:
        frame = np.zeros((SIZE, SIZE), dtype=np.uint8)
        for top, left in self.hazards:
            blit(frame, top, left, HAZARD_SIZE, HAZARD_SIZE, HAZARD_VALUE)
        blit(frame, AGENT_TOP, self.agent_x, AGENT_H, AGENT_W, AGENT_VALUE)
        return frame
