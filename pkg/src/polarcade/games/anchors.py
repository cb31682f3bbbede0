"""Normalization anchors: mean episode returns of random and oracle play.

Anchors are measured under the standard evaluation protocol (sticky 0.25,
frame skip 4, one decision per agent step) so that normalized agent scores
are on the same footing.  The frozen values stored in each GameSpec were
produced by ``compute_anchors`` with the defaults below; tests recompute
them to guard against drift.
"""

from __future__ import annotations

import numpy as np

from ..envcore import WrappedEnv, WrapperConfig
from ..joystick import JoystickEvent
from .oracle import oracle_policy

ANCHOR_EPISODES = 100
ANCHOR_SEED = 20260815
ANCHOR_CONFIG = WrapperConfig()


def _episode_seeds(rng: np.random.Generator, episodes: int) -> list[int]:
    return [int(s) for s in rng.integers(0, 2**31 - 1, size=episodes)]


def random_anchor(game, episodes: int = ANCHOR_EPISODES, seed: int = ANCHOR_SEED,
                  config: WrapperConfig = ANCHOR_CONFIG) -> float:
    """Mean return of uniformly random events over full episodes."""
    if episodes < 100:
        raise ValueError("anchor estimates need at least 100 episodes")
    rng = np.random.default_rng(seed)
    env = WrappedEnv(game, config)
    returns = []
    for episode_seed in _episode_seeds(rng, episodes):
        env.reset(episode_seed)
        total = 0.0
        while True:
            result = env.step_discrete(JoystickEvent(int(rng.integers(0, 18))))
            total += result.reward
            if result.terminated or result.truncated:
                break
        returns.append(total)
    return float(np.mean(returns))


def oracle_anchor(game, episodes: int = ANCHOR_EPISODES, seed: int = ANCHOR_SEED,
                  config: WrapperConfig = ANCHOR_CONFIG) -> float:
    """Mean return of the hand-coded oracle under the same protocol."""
    if episodes < 100:
        raise ValueError("anchor estimates need at least 100 episodes")
    rng = np.random.default_rng(seed)
    env = WrappedEnv(game, config)
    returns = []
    for episode_seed in _episode_seeds(rng, episodes):
        env.reset(episode_seed)
        total = 0.0
        while True:
            result = env.step_discrete(oracle_policy(game, stride=config.frame_skip))
            total += result.reward
            if result.terminated or result.truncated:
                break
        returns.append(total)
    return float(np.mean(returns))
