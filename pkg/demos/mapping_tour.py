"""
A tour of the polar joystick mapping
====================================

A continuous action is a triple (r, theta, fire): stick deflection,
stick angle, and trigger pressure.  A threshold tau decides which of the
18 classic joystick events the triple lands on.  This script walks the
geometry: the nine direction sectors, the fire cutoff, and the corner
occlusion that appears once tau crosses 1/sqrt(2).

Run it; it prints ASCII maps, no plotting packages required:

    python demos/mapping_tour.py
"""

import numpy as np

from polarcade.joystick import (ALL_EVENTS, ContinuousAction, JoystickEvent,
                                map_action, map_events_grid, reachable_events)

# ---------------------------------------------------------------------------
# one point, four thresholds
# ---------------------------------------------------------------------------
# The same stick position can mean different things at different
# thresholds.  This point sits at deflection 0.61 pointing up-left; its
# Cartesian components are each just under 0.5, so it straddles the
# boundary between "pushed" and "centered".

point = ContinuousAction(r=0.61, theta=2.53, fire=0.0)
print("point (r=0.61, theta=2.53):")
for tau in (0.1, 0.3, 0.5, 0.9):
    event = map_action(point, tau)
    print(f"  tau={tau:0.2f} -> {event.name}")

# ---------------------------------------------------------------------------
# the event map as ASCII art
# ---------------------------------------------------------------------------
# Sample the unit disk on a grid and tag each cell with the mapped event.
# Every event gets one character; diagonals are lowercase so the corner
# sectors stand out.

GLYPHS = {
    JoystickEvent.NOOP: ".", JoystickEvent.FIRE: "*",
    JoystickEvent.UP: "U", JoystickEvent.RIGHT: "R",
    JoystickEvent.LEFT: "L", JoystickEvent.DOWN: "D",
    JoystickEvent.UPRIGHT: "e", JoystickEvent.UPLEFT: "q",
    JoystickEvent.DOWNRIGHT: "c", JoystickEvent.DOWNLEFT: "z",
}


def ascii_map(tau: float, cells: int = 33) -> str:
    axis = np.linspace(-1.0, 1.0, cells)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    events = map_events_grid(r, theta, np.zeros_like(r), tau)
    rows = []
    for i in range(cells - 1, -1, -1):  # print top row first
        row = []
        for j in range(cells):
            if r[i, j] > 1.0:
                row.append(" ")
            else:
                row.append(GLYPHS[ALL_EVENTS[int(events[i, j])]])
        rows.append("".join(row))
    return "\n".join(rows)


for tau in (0.3, 0.8):
    print(f"\nevent map at tau={tau} "
          "(. center, URLD cardinals, qezc diagonals):")
    print(ascii_map(tau))

# ---------------------------------------------------------------------------
# corner occlusion
# ---------------------------------------------------------------------------
# A diagonal event needs both |x| >= tau and |y| >= tau inside the unit
# disk, which is only possible while tau <= 1/sqrt(2) ~= 0.707.  Above
# that, the corner sectors vanish: no stick position can produce them.

print("\nreachable events by threshold:")
for tau in (0.1, 0.5, 0.7, 0.71, 0.8, 0.9):
    events = reachable_events(tau)
    diagonals = sorted(e.name for e in events
                       if e.direction.is_diagonal and not e.fire_pressed)
    print(f"  tau={tau:0.2f}: {len(events):2d} events; "
          f"diagonals: {diagonals if diagonals else 'none'}")

# ---------------------------------------------------------------------------
# the trigger axis
# ---------------------------------------------------------------------------
# The fire component has its own cutoff at the same tau: each of the nine
# stick sectors has a plain and a firing variant, giving 9 x 2 = 18 events.

centered = ContinuousAction(r=0.0, theta=0.0, fire=0.9)
right = ContinuousAction(r=1.0, theta=0.0, fire=0.9)
print(f"\nwith the trigger held at 0.9 (tau=0.5): "
      f"centered stick -> {map_action(centered, 0.5).name}, "
      f"full right -> {map_action(right, 0.5).name}")
