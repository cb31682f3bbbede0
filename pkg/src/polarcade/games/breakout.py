"""Brick-breaking game whose minimal action set is {NOOP, FIRE, LEFT, RIGHT}.

The paddle slides along the bottom at 2 px/frame; the ball moves one pixel
diagonally per frame and reflects off walls, bricks, and the paddle.  FIRE
serves the held ball (an automatic serve kicks in after 60 frames so
passive policies still play); the serve's horizontal direction is the only
randomness.  +1 per brick, episode ends when the ball is lost or all 21
bricks are cleared.

Events outside the minimal set project onto their horizontal component;
fire survives only on centered events (UPLEFT acts as LEFT, UPFIRE as FIRE).
"""

from __future__ import annotations

import numpy as np

from ..envcore import GameSpec, MiniGame
from ..joystick import JoystickEvent
from .base import SIZE, blit, project_axis

PADDLE_WIDTH = 8
PADDLE_SPEED = 2
PADDLE_TOP = 40
BALL_SIZE = 2
BRICK_ROWS = 3
BRICK_COLS = 7
BRICK_W = SIZE // BRICK_COLS
BRICK_H = 3
BRICK_TOP = 6
AUTO_SERVE_FRAMES = 60

PADDLE_VALUE = 255
BALL_VALUE = 255
BRICK_VALUE = 200


class MiniBreakout(MiniGame):
    spec = GameSpec(
        name="mini_breakout",
        minimal_set=frozenset({
            JoystickEvent.NOOP, JoystickEvent.FIRE,
            JoystickEvent.LEFT, JoystickEvent.RIGHT,
        }),
        minimal_set_size=4,
        random_anchor=1.35,
        oracle_anchor=17.89,
    )
    frame_limit = 3000

    def __init__(self):
        super().__init__()
        self._rng: np.random.Generator | None = None
        self.paddle = 0
        self.ball = (0, 0)       # (row, col) of the 2x2 ball's top-left
        self.velocity = (0, 0)   # (row delta, col delta) per frame
        self.in_play = False
        self.serve_timer = 0
        self.bricks = np.ones((BRICK_ROWS, BRICK_COLS), dtype=bool)

    def reset(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self.frames = 0
        self.paddle = (SIZE - PADDLE_WIDTH) // 2
        self.bricks[:] = True
        self.in_play = False
        self.serve_timer = 0
        self._hold_ball()

    def _hold_ball(self):
        self.ball = (PADDLE_TOP - BALL_SIZE, self.paddle + PADDLE_WIDTH // 2 - 1)
        self.velocity = (0, 0)

    def project_event(self, event: JoystickEvent) -> JoystickEvent:
        return project_axis(event, "h", fire_when_centered=True, fire_when_moving=False)

    def _advance(self, event: JoystickEvent) -> tuple[float, bool]:
        self.paddle = int(np.clip(
            self.paddle + PADDLE_SPEED * event.direction.dx, 0, SIZE - PADDLE_WIDTH
        ))

        if not self.in_play:
            self._hold_ball()
            self.serve_timer += 1
            if event.fire_pressed or self.serve_timer >= AUTO_SERVE_FRAMES:
                self.in_play = True
                self.serve_timer = 0
                self.velocity = (-1, int(self._rng.choice((-1, 1))))
            return 0.0, False

        reward = 0.0
        vr, vc = self.velocity
        row, col = self.ball

        col += vc
        if col < 0 or col > SIZE - BALL_SIZE:
            vc = -vc
            col = int(np.clip(col, 0, SIZE - BALL_SIZE))
        row += vr
        if row < 0:
            vr = 1
            row = 0

        hit = self._brick_at(row, col)
        if hit is not None:
            self.bricks[hit] = False
            reward = 1.0
            vr = -vr
        elif vr > 0 and row + BALL_SIZE > PADDLE_TOP:
            if col + BALL_SIZE > self.paddle and col < self.paddle + PADDLE_WIDTH:
                vr = -1
                row = PADDLE_TOP - BALL_SIZE
            elif row + BALL_SIZE >= SIZE:
                self.ball = (row, col)
                self.velocity = (vr, vc)
                return 0.0, True  # ball lost

        self.ball = (row, col)
        self.velocity = (vr, vc)
        return reward, not self.bricks.any()

    def _brick_at(self, row: int, col: int):
        """First live brick overlapping the ball at (row, col), if any."""
        for r in range(BRICK_ROWS):
            top = BRICK_TOP + r * BRICK_H
            if row + BALL_SIZE <= top or row >= top + BRICK_H:
                continue
            for c in range(BRICK_COLS):
                if not self.bricks[r, c]:
                    continue
                left = c * BRICK_W
                if col + BALL_SIZE > left and col < left + BRICK_W:
                    return (r, c)
        return None

    def render(self) -> np.ndarray:
        frame = np.zeros((SIZE, SIZE), dtype=np.uint8)
        for r in range(BRICK_ROWS):
            for c in range(BRICK_COLS):
                if self.bricks[r, c]:
                    blit(frame, BRICK_TOP + r * BRICK_H, c * BRICK_W,
                         BRICK_H - 1, BRICK_W - 1, BRICK_VALUE)
        blit(frame, PADDLE_TOP, self.paddle, 2, PADDLE_WIDTH, PADDLE_VALUE)
        blit(frame, self.ball[0], self.ball[1], BALL_SIZE, BALL_SIZE, BALL_VALUE)
        return frame
