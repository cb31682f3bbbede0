"""Four deterministic mini-arcade games behind the 18-event interface.

The quartet spans the axes the toolkit analyzes: minimal-set size (3, 4,
6, 18 events), diagonal dependence (only the seeker needs all 8
directions), and reward sparsity (the seeker is sparse, the dodger dense).
"""

from .anchors import ANCHOR_EPISODES, ANCHOR_SEED, oracle_anchor, random_anchor
from .avoid import MiniAvoid
from .breakout import MiniBreakout
from .oracle import allowed_directions, oracle_action, oracle_policy
from .pong import MiniPong
from .seeker import MiniSeeker

GAME_REGISTRY = {
    cls.spec.name: cls
    for cls in (MiniBreakout, MiniPong, MiniSeeker, MiniAvoid)
}


def make_game(name: str):
    try:
        return GAME_REGISTRY[name]()
    except KeyError:
        known = ", ".join(sorted(GAME_REGISTRY))
        raise ValueError(f"unknown game {name!r}; available: {known}") from None


__all__ = [
    "ANCHOR_EPISODES",
    "ANCHOR_SEED",
    "GAME_REGISTRY",
    "MiniAvoid",
    "MiniBreakout",
    "MiniPong",
    "MiniSeeker",
    "allowed_directions",
    "make_game",
    "oracle_action",
    "oracle_anchor",
    "oracle_policy",
    "random_anchor",
]
