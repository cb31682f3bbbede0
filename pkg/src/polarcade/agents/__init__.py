"""Desk-scale agents: SAC over the continuous stick, categorical SAC-D, and
DQN-lite, with shared replay, exploration, and checkpoint plumbing."""

from .common import (AgentHyperparams, ReplayAgentBase, TransitionBatch,
                     dqn_defaults, sac_defaults, sacd_defaults)
from .dqn import DQNAgent, DQNNetworks, QNetwork, build_dqn_networks, dqn_update
from .exploration import (EpsilonSchedule, epsilon_greedy_wrap,
                          uniform_box_action, uniform_event)
from .replay import FrameRingReplay, SampledBatch
from .sac import (ACTION_OFFSET, ACTION_SCALE, GaussianPolicyOutput, SACAgent,
                  SACNetworks, actor_forward, build_sac_networks,
                  inverse_squash, make_encoder, sac_log_prob,
                  sac_select_action, sac_update, squash_to_box)
from .sacd import SACDAgent, SACDNetworks, build_sacd_networks, sacd_update

__all__ = [
    "ACTION_OFFSET",
    "ACTION_SCALE",
    "AgentHyperparams",
    "DQNAgent",
    "DQNNetworks",
    "EpsilonSchedule",
    "FrameRingReplay",
    "GaussianPolicyOutput",
    "QNetwork",
    "ReplayAgentBase",
    "SACAgent",
    "SACDAgent",
    "SACDNetworks",
    "SACNetworks",
    "SampledBatch",
    "TransitionBatch",
    "actor_forward",
    "build_dqn_networks",
    "build_sac_networks",
    "build_sacd_networks",
    "dqn_defaults",
    "dqn_update",
    "epsilon_greedy_wrap",
    "inverse_squash",
    "make_encoder",
    "sac_defaults",
    "sac_log_prob",
    "sac_select_action",
    "sac_update",
    "sacd_defaults",
    "sacd_update",
    "squash_to_box",
    "uniform_box_action",
    "uniform_event",
]
