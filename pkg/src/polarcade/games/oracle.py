"""Hand-coded near-optimal policies, used as normalization anchors.

``oracle_policy`` reads privileged internal game state.  The optional
``directions`` argument restricts which joystick directions the oracle may
use; the continuous driver below derives that set from the threshold, so
the same oracle can be driven through the continuous interface at any tau
(falling back to cardinal-only paths when diagonals are unreachable).
"""

from __future__ import annotations

from ..joystick import (
    ContinuousAction,
    Direction,
    JoystickEvent,
    Threshold,
    canonical_action,
    reachable_events,
)
from .avoid import AGENT_H, AGENT_SPEED, AGENT_TOP, AGENT_W, HAZARD_SIZE, MiniAvoid
from .base import SIZE, direction_to_rowcol
from .breakout import BALL_SIZE as BREAKOUT_BALL
from .breakout import PADDLE_SPEED, PADDLE_TOP, PADDLE_WIDTH, MiniBreakout
from .pong import BALL_SIZE, PADDLE_H, PLAYER_COL, PLAYER_SPEED, MiniPong
from .seeker import CELLS, COLLECT_RADIUS, MiniSeeker

ALL_DIRECTIONS = frozenset(Direction)

# cardinals before diagonals so tie-breaks prefer simple moves
_PREFERENCE = (
    Direction.CENTER, Direction.RIGHT, Direction.LEFT, Direction.UP, Direction.DOWN,
    Direction.UPRIGHT, Direction.UPLEFT, Direction.DOWNRIGHT, Direction.DOWNLEFT,
)


def oracle_policy(game, state=None, *, directions=None, stride: int = 1) -> JoystickEvent:
    """Near-optimal event for the game's current (or a supplied) state.

    ``stride`` tells the policy how many raw frames each chosen event will
    be held for (the frame-skip of the surrounding wrapper), so movement
    plans account for the full displacement per decision.
    """
    src = state if state is not None else game
    directions = ALL_DIRECTIONS if directions is None else frozenset(directions)
    if isinstance(game, MiniSeeker):
        return _seeker(src, directions)
    if isinstance(game, MiniBreakout):
        return _breakout(src, stride)
    if isinstance(game, MiniPong):
        return _pong(src, stride)
    if isinstance(game, MiniAvoid):
        return _avoid(src, stride)
    raise TypeError(f"no oracle for {type(game).__name__}")


def _seeker(state, directions) -> JoystickEvent:
    (ar, ac), (gr, gc) = state.agent, state.goal
    diagonals = any(d.is_diagonal for d in directions)

    def remaining(row: int, col: int) -> int:
        dr, dc = abs(gr - row), abs(gc - col)
        return max(dr, dc) if diagonals else dr + dc

    best, best_cost = Direction.CENTER, None
    for direction in _PREFERENCE:
        if direction not in directions:
            continue
        dr, dc = direction_to_rowcol(direction)
        nr = min(max(ar + dr, 0), CELLS - 1)
        nc = min(max(ac + dc, 0), CELLS - 1)
        cost = remaining(nr, nc)
        if best_cost is None or cost < best_cost:
            best, best_cost = direction, cost
    # press fire whenever this move can land inside the collect radius
    fire = max(abs(gr - ar), abs(gc - ac)) <= COLLECT_RADIUS + 1
    return JoystickEvent.from_parts(best, fire)


def _track(current: int, target: int, step_px: int, high: int) -> int:
    """Move sign in {-1, 0, 1} that best closes the gap to ``target``.

    Models one held decision: the body travels ``step_px`` and clips to
    [0, high].  NOOP wins ties so a settled body stays settled.
    """
    best_sign, best_err = 0, abs(target - current)
    for sign in (-1, 1):
        pos = min(max(current + sign * step_px, 0), high)
        err = abs(target - pos)
        if err < best_err:
            best_sign, best_err = sign, err
    return best_sign


def _breakout(state, stride: int = 1) -> JoystickEvent:
    if not state.in_play:
        return JoystickEvent.FIRE
    # predict the landing column at the paddle plane (bricks ignored)
    BB = BREAKOUT_BALL
    row, col = state.ball
    vr, vc = state.velocity
    for _ in range(200):
        if vr > 0 and row + BB > PADDLE_TOP:
            break
        col += vc
        if col < 0 or col > SIZE - BB:
            vc = -vc
            col = min(max(col, 0), SIZE - BB)
        row += vr
        if row < 0:
            vr, row = 1, 0
    target = col + BB // 2 - PADDLE_WIDTH // 2
    sign = _track(state.paddle, target, PADDLE_SPEED * stride, SIZE - PADDLE_WIDTH)
    if sign < 0:
        return JoystickEvent.LEFT
    if sign > 0:
        return JoystickEvent.RIGHT
    return JoystickEvent.NOOP


def _pong(state, stride: int = 1) -> JoystickEvent:
    if state.serve_timer > 0 or state.velocity[1] < 0:
        ball_c = SIZE // 2  # retreat to center while the ball is away
        aim = 0
    else:
        # predict the ball row at the player column, then offset the paddle
        # so the hit's english sends the return away from the opponent
        row, col = state.ball
        vr = state.velocity[0]
        for _ in range(120):
            if col >= PLAYER_COL - BALL_SIZE:
                break
            col += 1
            row += vr
            if row < 0 or row > SIZE - BALL_SIZE:
                vr = -vr
                row = min(max(row, 0), SIZE - BALL_SIZE)
        ball_c = row + BALL_SIZE // 2
        opponent_c = state.opponent_y + PADDLE_H // 2
        # hit above center (negative english) when the opponent sits low:
        # paddle center below the ball means a negative offset, so aim > 0
        aim = 3 if opponent_c > SIZE // 2 else -3
    # paddle-center target; aim shifts the center so the ball meets it off-center
    target = ball_c + aim - PADDLE_H // 2
    sign = _track(state.player_y, target, PLAYER_SPEED * stride, SIZE - PADDLE_H)
    if sign < 0:
        return JoystickEvent.UP
    if sign > 0:
        return JoystickEvent.DOWN
    return JoystickEvent.NOOP


def _avoid(state, stride: int = 1) -> JoystickEvent:
    def clearance(left: int) -> int:
        gaps = [
            AGENT_TOP - (top + HAZARD_SIZE)
            for top, hleft in state.hazards
            if hleft + HAZARD_SIZE > left and hleft < left + AGENT_W
            and top <= AGENT_TOP + AGENT_H - 1
        ]
        return min(gaps) if gaps else 99

    step_px = AGENT_SPEED * stride

    def quality(sign: int) -> int:
        # best stopping point along a straight walk, scored by clearance on
        # arrival (hazards fall 1 px per frame, so clearance k decisions out
        # is discounted by stride*k frames); a non-positive margin en route
        # means the walk collides there and everything beyond is unreachable
        if sign == 0:
            return min(clearance(state.agent_x) - stride, 25)
        best = -99
        for k in range(1, 10):
            pos = min(max(state.agent_x + sign * step_px * k, 0), SIZE - AGENT_W)
            margin = clearance(pos) - stride * k
            if margin <= 0:
                break
            best = max(best, min(margin, 25))
        return best

    stay, left, right = quality(0), quality(-1), quality(1)
    if stay >= left and stay >= right:
        return JoystickEvent.NOOP
    return JoystickEvent.LEFT if left >= right else JoystickEvent.RIGHT


# -- tau-aware continuous driving -------------------------------------------------


def allowed_directions(tau: float, grid_resolution: int = 401) -> frozenset[Direction]:
    """Directions expressible through the continuous interface at this tau."""
    events = reachable_events(Threshold(tau), grid_resolution)
    return frozenset(e.direction for e in events)


def oracle_action(game, tau: float, directions: frozenset[Direction]) -> ContinuousAction:
    """Continuous action whose mapping at ``tau`` triggers the oracle's event."""
    event = oracle_policy(game, directions=directions)
    return canonical_action(event)
