"""Soft actor-critic over the continuous stick: squashed-Gaussian actor,
twin critics with a shared pixel encoder, and an auto-tuned temperature.

Action convention: the actor head emits a pre-squash Gaussian over R^3; each
dimension is squashed with tanh and affinely mapped onto the action box
[0,1] x [-pi,pi] x [0,1].  Critics consume the tanh output (t-space, each
coordinate in (-1,1)); replayed box actions are mapped back with the inverse
affine before scoring.  A freshly initialized actor has exactly zero head
output, so its greedy action is the box midpoint (0.5, 0.0, 0.5).
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np

from .. import nn
from ..joystick import ContinuousAction
from .common import (AgentHyperparams, ReplayAgentBase, TransitionBatch,
                     sac_defaults)
from .exploration import uniform_box_action
from .replay import FrameRingReplay

ACTION_OFFSET = np.array([0.5, 0.0, 0.5])
ACTION_SCALE = np.array([0.5, math.pi, 0.5])
LOG_SIGMA_MIN = -5.0
LOG_SIGMA_MAX = 2.0
SQUASH_EPS = 1e-6

_LOG_SIGMA_LO_T = nn.Tensor(np.float32(LOG_SIGMA_MIN))
_LOG_SIGMA_HI_T = nn.Tensor(np.float32(LOG_SIGMA_MAX))


@dataclass(frozen=True)
class GaussianPolicyOutput:
    """Pre-squash policy parameters: mean and positive standard deviation.

    ``mu`` and ``sigma`` share a shape whose last axis has length 3 (one
    entry per action dimension); a single output is shape (3,).
    """

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.shape != sigma.shape or mu.shape[-1:] != (3,):
            raise ValueError(
                f"mu/sigma must share a (..., 3) shape, got {mu.shape} and {sigma.shape}")
        if not np.all(sigma > 0.0):
            raise ValueError("sigma must be strictly positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def squash_to_box(pre_squash: np.ndarray) -> np.ndarray:
    """tanh-squash then affinely map onto [0,1] x [-pi,pi] x [0,1]."""
    return ACTION_OFFSET + ACTION_SCALE * np.tanh(np.asarray(pre_squash, np.float64))


def inverse_squash(box_action: np.ndarray) -> np.ndarray:
    """Box action back to t-space (the tanh output), clipped off the open ends."""
    t = (np.asarray(box_action, np.float64) - ACTION_OFFSET) / ACTION_SCALE
    return np.clip(t, -1.0 + SQUASH_EPS, 1.0 - SQUASH_EPS)


def sac_select_action(output: GaussianPolicyOutput, mode: str,
                      rng: np.random.Generator | None = None) -> ContinuousAction:
    """One action from the policy: ``sample`` draws from the squashed
    Gaussian, ``greedy`` squashes the mean."""
    if mode == "greedy":
        pre_squash = output.mu
    elif mode == "sample":
        if rng is None:
            raise ValueError("sample mode needs a random generator")
        pre_squash = output.mu + output.sigma * rng.standard_normal(output.mu.shape)
    else:
        raise ValueError(f"mode must be 'sample' or 'greedy', got {mode!r}")
    a = squash_to_box(np.asarray(pre_squash, np.float64).reshape(3))
    return ContinuousAction(float(a[0]), float(a[1]), float(a[2]))


def sac_log_prob(output: GaussianPolicyOutput, pre_squash_sample) -> np.ndarray:
    """Log-density of the squashed-and-mapped action at the given pre-squash
    point: Gaussian log-density minus the tanh Jacobian correction
    log(1 - tanh(u)^2 + 1e-6) per dimension, minus each affine range scale."""
    u = np.asarray(pre_squash_sample, dtype=np.float64)
    z = (u - output.mu) / output.sigma
    gaussian = -0.5 * z * z - np.log(output.sigma) - 0.5 * math.log(2.0 * math.pi)
    correction = np.log(1.0 - np.tanh(u) ** 2 + SQUASH_EPS)
    return (gaussian - correction).sum(axis=-1) - np.log(ACTION_SCALE).sum()


def actor_forward(actor: nn.Module, features: nn.Tensor):
    """Run a 6-way actor head and split it into (mu, sigma, log_sigma)
    tensors; log-sigma is clipped to [LOG_SIGMA_MIN, LOG_SIGMA_MAX]."""
    out = actor(features)
    b = out.shape[0]
    idx = np.tile(np.arange(3, dtype=np.int64)[None, :], (b, 1))
    mu = nn.gather(out, idx, axis=-1)
    log_sigma = nn.gather(out, idx + 3, axis=-1)
    log_sigma = nn.maximum(nn.minimum(log_sigma, _LOG_SIGMA_HI_T), _LOG_SIGMA_LO_T)
    return mu, nn.exp(log_sigma), log_sigma


@dataclass
class SACNetworks:
    """Actor, twin critics over a shared encoder, their targets, the
    temperature parameter, and one optimizer per loss."""

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


def make_encoder(kind: str, in_channels: int, hw: tuple[int, int],
                 rng: np.random.Generator) -> nn.Module:
    if kind == "sac":
        return nn.EncoderSAC(in_channels, hw, rng)
    if kind == "dqn":
        return nn.EncoderDQN(in_channels, hw, rng)
    raise ValueError(f"unknown encoder kind {kind!r}; expected 'sac' or 'dqn'")


def build_sac_networks(obs_shape: tuple[int, int, int],
                       rng: np.random.Generator,
                       hyper: AgentHyperparams, *,
                       encoder_kind: str = "sac") -> SACNetworks:
    h, w, channels = obs_shape
    encoder = make_encoder(encoder_kind, channels, (h, w), rng)
    feat = encoder.feature_dim
    actor = nn.MLPHead(feat, 6, rng, zero_final=True)
    critic1 = nn.MLPHead(feat + 3, 1, rng)
    critic2 = nn.MLPHead(feat + 3, 1, rng)
    log_alpha = nn.Tensor(np.float32(0.0), requires_grad=True)
    critic_params = encoder.parameters() + critic1.parameters() + critic2.parameters()
    return SACNetworks(
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


def sac_update(batch: TransitionBatch, nets: SACNetworks,
               hyper: AgentHyperparams, rng: np.random.Generator) -> dict:
    """One gradient step on critics, actor, and temperature, then a soft
    target update.

    Targets: y = reward + discount**horizon * (1 - terminal) *
    (min target-critic(s', a') - alpha * log pi(a'|s')) with a' freshly
    sampled.  Critic loss is the summed per-critic mean squared error to y;
    actor loss is mean(alpha * log pi(a|s) - min critic(s, a)) with
    reparameterized actions on detached features; the temperature loss
    -mean(log_alpha * (log pi + entropy_target)) steers policy entropy
    toward ``hyper.entropy_target``.
    """
    if hyper.entropy_target is None:
        raise ValueError("sac_update needs hyper.entropy_target")
    obs = np.asarray(batch.obs, dtype=np.float32)
    next_obs = np.asarray(batch.next_obs, dtype=np.float32)
    b = obs.shape[0]
    if b == 0:
        raise ValueError("empty batch")
    alpha = nets.alpha

    # Bootstrap target, graph-free.
    with nn.no_grad():
        feat_next = nets.encoder(nn.Tensor(next_obs))
        mu_n, sigma_n, _ = actor_forward(nets.actor, feat_next)
        u_next = mu_n.data + sigma_n.data * rng.standard_normal((b, 3))
        a_next = np.tanh(u_next).astype(np.float32)
        logp_next = sac_log_prob(
            GaussianPolicyOutput(mu_n.data, sigma_n.data), u_next)
        feat_next_t = nets.target_encoder(nn.Tensor(next_obs))
        q1t = nets.target_critic1(nn.concat([feat_next_t, nn.Tensor(a_next)])).data[:, 0]
        q2t = nets.target_critic2(nn.concat([feat_next_t, nn.Tensor(a_next)])).data[:, 0]
    not_terminal = 1.0 - np.asarray(batch.terminal, dtype=np.float64)
    gamma_m = hyper.discount ** np.asarray(batch.horizon, dtype=np.float64)
    y = (np.asarray(batch.reward, dtype=np.float64)
         + gamma_m * not_terminal * (np.minimum(q1t, q2t) - alpha * logp_next))
    y_t = nn.Tensor(y.astype(np.float32)[:, None])

    # Critic step (trains the shared encoder).
    nets.zero_all_grads()
    feat = nets.encoder(nn.Tensor(obs))
    a_stored = inverse_squash(batch.action).astype(np.float32)
    joined = nn.concat([feat, nn.Tensor(a_stored)])
    d1 = nets.critic1(joined) - y_t
    d2 = nets.critic2(joined) - y_t
    critic_loss = (d1 * d1).mean() + (d2 * d2).mean()
    critic_loss.backward()
    nn.step_with_grads(nets.critic_params(), nets.critic_opt)

    # Actor step on detached features (the encoder belongs to the critics).
    with nn.no_grad():
        feat_detached = nets.encoder(nn.Tensor(obs)).data
    nets.zero_all_grads()
    feat_const = nn.Tensor(feat_detached)
    mu, sigma, log_sigma = actor_forward(nets.actor, feat_const)
    noise = rng.standard_normal((b, 3)).astype(np.float32)
    u = mu + sigma * nn.Tensor(noise)
    a_new = nn.tanh(u)
    # Reparameterized log pi: the Gaussian density at u = mu + sigma*eps is
    # -0.5 eps^2 - log sigma (+const); mu's direct and indirect terms cancel.
    const_part = (-0.5 * (noise.astype(np.float64) ** 2).sum(axis=-1)
                  - 1.5 * math.log(2.0 * math.pi) - np.log(ACTION_SCALE).sum())
    corr = nn.log(np.float32(1.0 + SQUASH_EPS) - a_new * a_new).sum(axis=-1)
    logp = (log_sigma.sum(axis=-1) * (-1.0) - corr
            + nn.Tensor(const_part.astype(np.float32)))
    q1a = nets.critic1(nn.concat([feat_const, a_new]))
    q2a = nets.critic2(nn.concat([feat_const, a_new]))
    q_min = nn.minimum(q1a, q2a).reshape(b)
    actor_loss = (logp * np.float32(alpha) - q_min).mean()
    actor_loss.backward()
    nn.step_with_grads(nets.actor.parameters(), nets.actor_opt)

    # Temperature step toward the entropy target.
    logp_detached = logp.data.astype(np.float32)
    nets.log_alpha.grad = None
    alpha_loss = (nets.log_alpha
                  * nn.Tensor(logp_detached + np.float32(hyper.entropy_target))).mean() * (-1.0)
    alpha_loss.backward()
    nn.step_with_grads([nets.log_alpha], nets.alpha_opt)

    nn.soft_update(nets.target_params(), nets.critic_params(),
                   hyper.target_update_rho)
    return {
        "critic_loss": float(critic_loss.data),
        "actor_loss": float(actor_loss.data),
        "alpha_loss": float(alpha_loss.data),
        "alpha": alpha,
        "entropy": float(-logp_detached.mean()),
        "target_mean": float(y.mean()),
    }


class SACAgent(ReplayAgentBase):
    """Replay-driven SAC over a pixel environment's continuous interface.

    The driving loop owns the environment; the agent sees stacked uint8
    observations.  ``exploration`` is ``"standard"`` (sample the squashed
    Gaussian) or ``"epsilon"`` (greedy action, replaced by a uniform box draw
    with schedule-driven probability; requires ``hyper.epsilon``).
    """

    def __init__(self, obs_shape: tuple[int, int, int], *,
                 encoder_kind: str = "sac",
                 hyper: AgentHyperparams | None = None,
                 exploration: str = "standard", seed: int = 0):
        if exploration not in ("standard", "epsilon"):
            raise ValueError(
                f"exploration must be 'standard' or 'epsilon', got {exploration!r}")
        self.hyper = hyper if hyper is not None else sac_defaults()
        if exploration == "epsilon" and self.hyper.epsilon is None:
            raise ValueError("epsilon exploration needs hyper.epsilon")
        self.exploration = exploration
        self.obs_shape = tuple(obs_shape)
        init_seq, act_seq, update_seq = np.random.SeedSequence(seed).spawn(3)
        init_rng = np.random.Generator(np.random.PCG64(init_seq))
        self._act_rng = np.random.Generator(np.random.PCG64(act_seq))
        self._update_rng = np.random.Generator(np.random.PCG64(update_seq))
        self.nets = build_sac_networks(self.obs_shape, init_rng, self.hyper,
                                       encoder_kind=encoder_kind)
        h, w, stack = self.obs_shape
        self.replay = FrameRingReplay(self.hyper.replay_capacity, (h, w),
                                      stack=stack, action_shape=(3,),
                                      action_dtype=np.float32)
        self._init_loop_state()

    # -- acting ---------------------------------------------------------------

    def policy_output(self, obs: np.ndarray) -> GaussianPolicyOutput:
        with nn.no_grad():
            feat = self.nets.encoder(nn.to_input(obs))
            mu, sigma, _ = actor_forward(self.nets.actor, feat)
        return GaussianPolicyOutput(mu.data[0], sigma.data[0])

    def greedy_action(self, obs: np.ndarray) -> ContinuousAction:
        return sac_select_action(self.policy_output(obs), "greedy")

    def _behavior_action(self, obs: np.ndarray, env_frames: int) -> ContinuousAction:
        if self.exploration == "epsilon":
            eps = self.hyper.epsilon.value(env_frames)
            if eps > 0.0 and self._act_rng.random() < eps:
                return uniform_box_action(self._act_rng)
            return self.greedy_action(obs)
        return sac_select_action(self.policy_output(obs), "sample", self._act_rng)

    def _stored_action(self, action: ContinuousAction) -> np.ndarray:
        return np.asarray(action.as_tuple(), np.float32)

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
        losses = sac_update(batch, self.nets, self.hyper, self._update_rng)
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
