"""Two-paddle rally game with a size-6 minimal action set.

The player controls the right paddle (UP/DOWN at 2 px/frame); a scripted
opponent tracks the ball at a capped 1 px/frame and only reacts once the
ball is approaching inside its quarter of the court.  The player's paddle
imparts vertical "english" equal to the clipped hit offset (up to
|vy| = 2, which outruns the opponent's cap); the opponent returns the
ball without changing vy.  Serves always travel toward the player.  +1
when the ball passes the opponent, -1 when it passes the player; first to
5 points ends the episode.

The minimal set mirrors the source console's: {NOOP, FIRE, UP, DOWN,
UPFIRE, DOWNFIRE} — fire variants are accepted but the fire bit itself is
inert.  Other events project onto their vertical component, keeping fire.
"""

from __future__ import annotations

import numpy as np

from ..envcore import GameSpec, MiniGame
from ..joystick import JoystickEvent
from .base import SIZE, blit, project_axis

PADDLE_H = 8
PLAYER_COL = SIZE - 3   # paddle occupies two columns
OPPONENT_COL = 1
PLAYER_SPEED = 2
OPPONENT_SPEED = 1
BALL_SIZE = 2
WIN_SCORE = 5
SERVE_PAUSE = 20

PADDLE_VALUE = 255
BALL_VALUE = 255


class MiniPong(MiniGame):
    spec = GameSpec(
        name="mini_pong",
        minimal_set=frozenset({
            JoystickEvent.NOOP, JoystickEvent.FIRE,
            JoystickEvent.UP, JoystickEvent.DOWN,
            JoystickEvent.UPFIRE, JoystickEvent.DOWNFIRE,
        }),
        minimal_set_size=6,
        random_anchor=-3.83,
        oracle_anchor=4.97,
    )
    frame_limit = 6000

    def __init__(self):
        super().__init__()
        self._rng: np.random.Generator | None = None
        self.player_y = 0
        self.opponent_y = 0
        self.ball = (0, 0)
        self.velocity = (0, 0)
        self.player_score = 0
        self.opponent_score = 0
        self.serve_timer = 0

    def reset(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self.frames = 0
        self.player_y = (SIZE - PADDLE_H) // 2
        self.opponent_y = (SIZE - PADDLE_H) // 2
        self.player_score = 0
        self.opponent_score = 0
        self._serve()

    def _serve(self):
        # always serve toward the player so points are earned by returning,
        # never by the serve itself sailing past the opponent
        self.ball = (SIZE // 2 - 1, SIZE // 2 - 1)
        self.velocity = (int(self._rng.choice((-1, 1))), 1)
        self.serve_timer = SERVE_PAUSE

    def project_event(self, event: JoystickEvent) -> JoystickEvent:
        return project_axis(event, "v", fire_when_centered=True, fire_when_moving=True)

    def _advance(self, event: JoystickEvent) -> tuple[float, bool]:
        self.player_y = int(np.clip(
            self.player_y - PLAYER_SPEED * event.direction.dy, 0, SIZE - PADDLE_H
        ))

        if self.serve_timer > 0:
            self.serve_timer -= 1
            self._track_opponent(toward_center=True)
            return 0.0, False

        vr, vc = self.velocity
        row, col = self.ball
        # the opponent reacts only once the ball enters its quarter of the court
        self._track_opponent(toward_center=not (vc < 0 and col < SIZE // 4))

        row += vr
        if row < 0 or row > SIZE - BALL_SIZE:
            vr = -vr
            row = int(np.clip(row, 0, SIZE - BALL_SIZE))
        col += vc

        if vc > 0 and col + BALL_SIZE > PLAYER_COL:
            if row + BALL_SIZE > self.player_y and row < self.player_y + PADDLE_H:
                # english: hit offset from the paddle center sets vy in [-2, 2]
                offset = (row + BALL_SIZE // 2) - (self.player_y + PADDLE_H // 2)
                vr = int(np.clip(offset, -2, 2))
                vc = -1
                col = PLAYER_COL - BALL_SIZE
        elif vc < 0 and col < OPPONENT_COL + 2:
            if row + BALL_SIZE > self.opponent_y and row < self.opponent_y + PADDLE_H:
                vc = 1
                col = OPPONENT_COL + 2

        self.ball = (row, col)
        self.velocity = (vr, vc)

        if col + BALL_SIZE >= SIZE:
            self.opponent_score += 1
            self._serve()
            return -1.0, self.opponent_score >= WIN_SCORE
        if col < 0:
            self.player_score += 1
            self._serve()
            return 1.0, self.player_score >= WIN_SCORE
        return 0.0, False

    def _track_opponent(self, toward_center: bool):
        target = (SIZE - PADDLE_H) // 2 if toward_center else self.ball[0] - PADDLE_H // 2 + 1
        delta = int(np.clip(target - self.opponent_y, -OPPONENT_SPEED, OPPONENT_SPEED))
        self.opponent_y = int(np.clip(self.opponent_y + delta, 0, SIZE - PADDLE_H))

    def render(self) -> np.ndarray:
        frame = np.zeros((SIZE, SIZE), dtype=np.uint8)
        blit(frame, self.opponent_y, OPPONENT_COL, PADDLE_H, 2, PADDLE_VALUE)
        blit(frame, self.player_y, PLAYER_COL, PADDLE_H, 2, PADDLE_VALUE)
        if self.serve_timer == 0:
            blit(frame, self.ball[0], self.ball[1], BALL_SIZE, BALL_SIZE, BALL_VALUE)
        return frame
