"""Categorical soft actor-critic: an 18-way softmax actor with twin critics
that score every event at once, so all policy expectations are computed
exactly (probability-weighted sums over the event set, no action sampling
inside the update)."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import nn
from ..joystick import JoystickEvent
from .common import (AgentHyperparams, ReplayAgentBase, TransitionBatch,
                     sacd_defaults)
from .exploration import uniform_event
from .replay import FrameRingReplay
from .sac import make_encoder


@dataclass
class SACDNetworks:
    """Categorical actor, twin per-event critics over a shared encoder,
    their targets, the temperature, and one optimizer per loss."""

    encoder: nn.Module
    actor: nn.Module
    critic1: nn.Module
    critic2: nn.Module
    target_encoder: nn.Module
    target_critic1: nn.Module
    target_critic2: nn.Module
    log_alpha: nn.Tensor
    critic_opt: nn.AdamState
    actor_opt: nn.AdamState
    alpha_opt: nn.AdamState

    def critic_params(self) -> list[nn.Tensor]:
        return (self.encoder.parameters() + self.critic1.parameters()
                + self.critic2.parameters())

    def target_params(self) -> list[nn.Tensor]:
        return (self.target_encoder.parameters() + self.target_critic1.parameters()
                + self.target_critic2.parameters())

    def zero_all_grads(self):
        for module in (self.encoder, self.actor, self.critic1, self.critic2):
            module.zero_grad()
        self.log_alpha.grad = None

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha.data))


def build_sacd_networks(obs_shape: tuple[int, int, int], n_actions: int,
                        rng: np.random.Generator, hyper: AgentHyperparams, *,
                        encoder_kind: str = "sac") -> SACDNetworks:
    h, w, channels = obs_shape
    encoder = make_encoder(encoder_kind, channels, (h, w), rng)
    feat = encoder.feature_dim
    actor = nn.MLPHead(feat, n_actions, rng, zero_final=True)
    critic1 = nn.MLPHead(feat, n_actions, rng)
    critic2 = nn.MLPHead(feat, n_actions, rng)
    log_alpha = nn.Tensor(np.float32(0.0), requires_grad=True)
    critic_params = encoder.parameters() + critic1.parameters() + critic2.parameters()
    return SACDNetworks(
        encoder=encoder,
        actor=actor,
        critic1=critic1,
        critic2=critic2,
        target_encoder=copy.deepcopy(encoder),
        target_critic1=copy.deepcopy(critic1),
        target_critic2=copy.deepcopy(critic2),
        log_alpha=log_alpha,
        critic_opt=nn.AdamState.for_params(
            critic_params, lr=hyper.learning_rate, eps=hyper.adam_eps),
        actor_opt=nn.AdamState.for_params(
            actor.parameters(), lr=hyper.learning_rate, eps=hyper.adam_eps),
        alpha_opt=nn.AdamState.for_params(
            [log_alpha], lr=hyper.learning_rate, eps=hyper.adam_eps),
    )


def sacd_update(batch: TransitionBatch, nets: SACDNetworks,
                hyper: AgentHyperparams) -> dict:
    """One gradient step on critics, actor, and temperature, then a soft
    target update; all expectations over actions are exact sums.

    Targets: y = reward + discount**horizon * (1 - terminal) *
    sum_a pi(a|s') * (min target-critic(s', a) - alpha * log pi(a|s')).
    Critic loss is the summed per-critic mean squared error at the taken
    action; actor loss is mean over states of
    sum_a pi(a|s) * (alpha * log pi(a|s) - min critic(s, a)) on detached
    features and critic values; the temperature loss
    mean(log_alpha * (entropy - entropy_target)) steers the categorical
    entropy toward ``hyper.entropy_target``.
    """
    if hyper.entropy_target is None:
        raise ValueError("sacd_update needs hyper.entropy_target")
    obs = np.asarray(batch.obs, dtype=np.float32)
    next_obs = np.asarray(batch.next_obs, dtype=np.float32)
    b = obs.shape[0]
    if b == 0:
        raise ValueError("empty batch")
    actions = np.asarray(batch.action, dtype=np.int64).reshape(b, 1)
    alpha = nets.alpha

    # Bootstrap target: exact expectation under the next-state policy.
    with nn.no_grad():
        feat_next = nets.encoder(nn.Tensor(next_obs))
        logp_next = nn.log_softmax(nets.actor(feat_next)).data.astype(np.float64)
        p_next = np.exp(logp_next)
        feat_next_t = nets.target_encoder(nn.Tensor(next_obs))
        q1t = nets.target_critic1(feat_next_t).data.astype(np.float64)
        q2t = nets.target_critic2(feat_next_t).data.astype(np.float64)
    v_next = (p_next * (np.minimum(q1t, q2t) - alpha * logp_next)).sum(axis=-1)
    not_terminal = 1.0 - np.asarray(batch.terminal, dtype=np.float64)
    gamma_m = hyper.discount ** np.asarray(batch.horizon, dtype=np.float64)
    y = np.asarray(batch.reward, dtype=np.float64) + gamma_m * not_terminal * v_next
    y_t = nn.Tensor(y.astype(np.float32)[:, None])

    # Critic step (trains the shared encoder).
    nets.zero_all_grads()
    feat = nets.encoder(nn.Tensor(obs))
    d1 = nn.gather(nets.critic1(feat), actions) - y_t
    d2 = nn.gather(nets.critic2(feat), actions) - y_t
    critic_loss = (d1 * d1).mean() + (d2 * d2).mean()
    critic_loss.backward()
    nn.step_with_grads(nets.critic_params(), nets.critic_opt)

    # Actor step on detached features and detached critic values.
    with nn.no_grad():
        feat_detached = nets.encoder(nn.Tensor(obs)).data
        q_min = np.minimum(nets.critic1(nn.Tensor(feat_detached)).data,
                           nets.critic2(nn.Tensor(feat_detached)).data)
    nets.zero_all_grads()
    feat_const = nn.Tensor(feat_detached)
    logp = nn.log_softmax(nets.actor(feat_const))
    probs = nn.exp(logp)
    inner = logp * np.float32(alpha) - nn.Tensor(q_min)
    actor_loss = (probs * inner).sum(axis=-1).mean()
    actor_loss.backward()
    nn.step_with_grads(nets.actor.parameters(), nets.actor_opt)

    # Temperature step toward the entropy target.
    entropy = -(probs.data.astype(np.float64) * logp.data).sum(axis=-1)
    nets.log_alpha.grad = None
    alpha_loss = (nets.log_alpha * nn.Tensor(
        (entropy - hyper.entropy_target).astype(np.float32))).mean()
    alpha_loss.backward()
    nn.step_with_grads([nets.log_alpha], nets.alpha_opt)

    nn.soft_update(nets.target_params(), nets.critic_params(),
                   hyper.target_update_rho)
    return {
        "critic_loss": float(critic_loss.data),
        "actor_loss": float(actor_loss.data),
        "alpha_loss": float(alpha_loss.data),
        "alpha": alpha,
        "entropy": float(entropy.mean()),
        "target_mean": float(y.mean()),
    }


class SACDAgent(ReplayAgentBase):
    """Replay-driven categorical SAC emitting joystick events.

    ``events`` restricts the action set (default: all 18 events);
    ``exploration`` is ``"standard"`` (sample the categorical policy) or
    ``"epsilon"`` (greedy argmax dithered by a uniform event draw;
    requires ``hyper.epsilon``).
    """

    def __init__(self, obs_shape: tuple[int, int, int], *,
                 events: Sequence[JoystickEvent] | None = None,
                 encoder_kind: str = "sac",
                 hyper: AgentHyperparams | None = None,
                 exploration: str = "standard", seed: int = 0):
        if exploration not in ("standard", "epsilon"):
            raise ValueError(
                f"exploration must be 'standard' or 'epsilon', got {exploration!r}")
        self.hyper = hyper if hyper is not None else sacd_defaults()
        if exploration == "epsilon" and self.hyper.epsilon is None:
            raise ValueError("epsilon exploration needs hyper.epsilon")
        self.exploration = exploration
        self.obs_shape = tuple(obs_shape)
        self.events = [JoystickEvent(e) for e in
                       (events if events is not None else list(JoystickEvent))]
        if not self.events:
            raise ValueError("events must be non-empty")
        init_seq, act_seq, update_seq = np.random.SeedSequence(seed).spawn(3)
        init_rng = np.random.Generator(np.random.PCG64(init_seq))
        self._act_rng = np.random.Generator(np.random.PCG64(act_seq))
        self._update_rng = np.random.Generator(np.random.PCG64(update_seq))
        self.nets = build_sacd_networks(self.obs_shape, len(self.events),
                                        init_rng, self.hyper,
                                        encoder_kind=encoder_kind)
        h, w, stack = self.obs_shape
        self.replay = FrameRingReplay(self.hyper.replay_capacity, (h, w),
                                      stack=stack, action_shape=(),
                                      action_dtype=np.int64)
        self._init_loop_state()

    # -- acting ---------------------------------------------------------------

    def event_log_probs(self, obs: np.ndarray) -> np.ndarray:
        with nn.no_grad():
            feat = self.nets.encoder(nn.to_input(obs))
            logp = nn.log_softmax(self.nets.actor(feat))
        return logp.data[0].astype(np.float64)

    def greedy_action(self, obs: np.ndarray) -> JoystickEvent:
        return self.events[int(np.argmax(self.event_log_probs(obs)))]

    def _behavior_action(self, obs: np.ndarray, env_frames: int) -> JoystickEvent:
        if self.exploration == "epsilon":
            eps = self.hyper.epsilon.value(env_frames)
            if eps > 0.0 and self._act_rng.random() < eps:
                return uniform_event(self._act_rng, self.events)
            return self.greedy_action(obs)
        probs = np.exp(self.event_log_probs(obs))
        probs /= probs.sum()
        return self.events[int(self._act_rng.choice(len(self.events), p=probs))]

    def _stored_action(self, action: JoystickEvent) -> int:
        return self.events.index(action)

    # -- training ---------------------------------------------------------------

    def train_step(self) -> dict:
        if len(self.replay) < self.hyper.min_replay_history:
            raise ValueError(
                f"replay holds {len(self.replay)} transitions; "
                f"need min_replay_history={self.hyper.min_replay_history}")
        sampled = self.replay.sample(self._update_rng, self.hyper.batch_size,
                                     n_step=self.hyper.n_step,
                                     discount=self.hyper.discount)
        batch = TransitionBatch.from_pixels(sampled)
        losses = sacd_update(batch, self.nets, self.hyper)
        self.updates_done += 1
        return losses

    # -- checkpoint layout --------------------------------------------------------

    def _modules(self) -> dict[str, nn.Module]:
        return {
            "encoder": self.nets.encoder, "actor": self.nets.actor,
            "critic1": self.nets.critic1, "critic2": self.nets.critic2,
            "target_encoder": self.nets.target_encoder,
            "target_critic1": self.nets.target_critic1,
            "target_critic2": self.nets.target_critic2,
        }

    def _optimizers(self) -> dict[str, nn.AdamState]:
        return {"critic_opt": self.nets.critic_opt,
                "actor_opt": self.nets.actor_opt,
                "alpha_opt": self.nets.alpha_opt}

    def _scalar_tensors(self) -> dict[str, nn.Tensor]:
        return {"log_alpha": self.nets.log_alpha}

    def _rngs(self) -> dict[str, np.random.Generator]:
        return {"act": self._act_rng, "update": self._update_rng}
