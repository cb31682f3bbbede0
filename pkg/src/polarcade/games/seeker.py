"""Goal-chasing game where every one of the 18 events matters.

A 14x14 cell arena rendered at 3 pixels per cell.  The agent block moves
one cell per frame in any of the 8 directions (diagonals advance both axes
at once); pressing fire within Chebyshev distance 1 of the goal collects
it for +1 and the goal respawns at least 2 cells away.  Because diagonals
cut the Chebyshev path in half versus cardinal-only movement, a goal on
the exact diagonal at distance d takes d-1 steps to collect with diagonals
and 2(d-1) without.
"""

from __future__ import annotations

import numpy as np

from ..envcore import GameSpec, MiniGame
from ..joystick import JoystickEvent
from .base import SIZE, blit, direction_to_rowcol

CELLS = 14
CELL_PX = SIZE // CELLS
AGENT_VALUE = 255
GOAL_VALUE = 128
COLLECT_RADIUS = 1  # Chebyshev cells
RESPAWN_MIN_DISTANCE = 2


class MiniSeeker(MiniGame):
    spec = GameSpec(
        name="mini_seeker",
        minimal_set=frozenset(JoystickEvent),
        minimal_set_size=18,
        random_anchor=2.99,
        oracle_anchor=36.85,
    )
    frame_limit = 600

    def __init__(self):
        super().__init__()
        self._rng: np.random.Generator | None = None
        self.agent = (CELLS // 2, CELLS // 2)
        self.goal = (0, 0)

    def reset(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self.frames = 0
        self.agent = (CELLS // 2, CELLS // 2)
        self.goal = self._spawn_goal()

    def _spawn_goal(self) -> tuple[int, int]:
        while True:
            cell = (int(self._rng.integers(0, CELLS)), int(self._rng.integers(0, CELLS)))
            if self._chebyshev(cell, self.agent) >= RESPAWN_MIN_DISTANCE:
                return cell

    @staticmethod
    def _chebyshev(a: tuple[int, int], b: tuple[int, int]) -> int:
        return max(abs(a[0] - b[0]), abs(a[1] - b[1]))

    def project_event(self, event: JoystickEvent) -> JoystickEvent:
        return event  # full-set game: every event acts as itself

    def _advance(self, event: JoystickEvent) -> tuple[float, bool]:
        dr, dc = direction_to_rowcol(event.direction)
        self.agent = (
            int(np.clip(self.agent[0] + dr, 0, CELLS - 1)),
            int(np.clip(self.agent[1] + dc, 0, CELLS - 1)),
        )
        reward = 0.0
        if event.fire_pressed and self._chebyshev(self.agent, self.goal) <= COLLECT_RADIUS:
            reward = 1.0
            self.goal = self._spawn_goal()
        return reward, False

    def render(self) -> np.ndarray:
        frame = np.zeros((SIZE, SIZE), dtype=np.uint8)
        blit(frame, self.goal[0] * CELL_PX, self.goal[1] * CELL_PX, CELL_PX, CELL_PX, GOAL_VALUE)
        blit(frame, self.agent[0] * CELL_PX, self.agent[1] * CELL_PX, CELL_PX, CELL_PX, AGENT_VALUE)
        return frame
