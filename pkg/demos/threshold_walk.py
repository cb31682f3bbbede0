"""
How a high threshold degrades control
=====================================

The seeker game rewards walking onto a goal cell.  With diagonals
available an ideal player moves along the Chebyshev shortest path; once
the threshold tau occludes the corner sectors, the same player must
zig-zag with cardinal moves and every diagonal leg costs two steps.

This script drives the built-in scripted policy through the continuous
action interface at two thresholds and prints the walk lengths, then
shows the anchor scores used for normalization.

    python demos/threshold_walk.py
"""

from polarcade.envcore import WrappedEnv, WrapperConfig
from polarcade.games import make_game
from polarcade.games.oracle import allowed_directions, oracle_action
from polarcade.joystick import JoystickEvent, canonical_action, map_action

# ---------------------------------------------------------------------------
# walking onto a diagonal goal at two thresholds
# ---------------------------------------------------------------------------
# The wrapper is configured raw (no sticky actions, no frame skip) so one
# continuous action is exactly one game frame.  Fire is stripped from the
# scripted policy's actions so the goal stays put and the walk length is
# purely a movement story.


def walk_length(tau: float, distance: int) -> int:
    env = WrappedEnv(make_game("mini_seeker"),
                     WrapperConfig(sticky_prob=0.0, frame_skip=1,
                                   frame_stack=1, continuous=True, tau=tau))
    env.reset(0)
    game = env.game
    game.agent = (10, 2)
    game.goal = (10 - distance, 2 + distance)  # diagonal offset
    directions = allowed_directions(tau)
    steps = 0
    while game.agent != game.goal:
        action = oracle_action(game, tau, directions)
        event = map_action(action, tau)
        walk_only = canonical_action(JoystickEvent.from_parts(event.direction, False))
        env.step_continuous(walk_only)
        steps += 1
    return steps


print("steps for the scripted policy to reach a goal d cells away "
      "(diagonal offset):")
print(f"{'d':>4} {'tau=0.5':>9} {'tau=0.9':>9}")
for distance in (2, 3, 5, 7):
    with_diagonals = walk_length(0.5, distance)
    without = walk_length(0.9, distance)
    print(f"{distance:>4} {with_diagonals:>9} {without:>9}")
print("occluding the diagonals doubles every walk, exactly.")

# ---------------------------------------------------------------------------
# what that costs in score
# ---------------------------------------------------------------------------
# Anchor scores put agent results on a common scale: 0 is uniform-random
# play, 1 is the scripted policy under the standard wrapper (sticky
# actions on, frame skip 4).  Each game ships frozen anchors measured
# over 100 seeded episodes; `random_anchor` / `oracle_anchor` re-measure
# them from scratch (and insist on at least 100 episodes themselves).

print("\nfrozen anchor scores (random vs scripted, 100 episodes each):")
for name in ("mini_seeker", "mini_breakout"):
    spec = make_game(name).spec
    print(f"  {name:14s} random {spec.random_anchor:6.2f}   "
          f"scripted {spec.oracle_anchor:6.2f}")
print("\na normalized score of 0.5 therefore means halfway from random "
      "play to the scripted policy.")
