"""DQN-lite: Q-learning over a game's event set with n-step returns from
replay, a Huber loss, epsilon-greedy acting, and periodic hard target sync."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import nn
from ..joystick import JoystickEvent
from .common import (AgentHyperparams, ReplayAgentBase, TransitionBatch,
                     dqn_defaults)
from .exploration import uniform_event
from .replay import FrameRingReplay
from .sac import make_encoder


class QNetwork(nn.Module):
    """Pixel encoder followed by a per-event value head."""

    def __init__(self, obs_shape: tuple[int, int, int], n_actions: int,
                 rng: np.random.Generator, *, encoder_kind: str = "dqn"):
        h, w, channels = obs_shape
        self.encoder = make_encoder(encoder_kind, channels, (h, w), rng)
        self.head = nn.MLPHead(self.encoder.feature_dim, n_actions, rng)

    def forward(self, x: nn.Tensor) -> nn.Tensor:
        return self.head(self.encoder(x))


@dataclass
class DQNNetworks:
    """Online and target value networks plus the optimizer."""

    online: nn.Module
    target: nn.Module
    opt: nn.AdamState


def build_dqn_networks(obs_shape: tuple[int, int, int], n_actions: int,
                       rng: np.random.Generator, hyper: AgentHyperparams, *,
                       encoder_kind: str = "dqn") -> DQNNetworks:
    online = QNetwork(obs_shape, n_actions, rng, encoder_kind=encoder_kind)
    return DQNNetworks(
        online=online,
        target=copy.deepcopy(online),
        opt=nn.AdamState.for_params(online.parameters(),
                                    lr=hyper.learning_rate, eps=hyper.adam_eps),
    )


def dqn_update(batch: TransitionBatch, nets: DQNNetworks,
               hyper: AgentHyperparams) -> dict:
    """One Huber-loss gradient step on the online network.

    Targets: y = reward + discount**horizon * (1 - terminal) *
    max_a target-Q(s', a), where ``reward`` already holds the discounted
    n-step sum and ``horizon`` its length.  Target syncing is the caller's
    job (the agent hard-copies every ``hyper.target_sync_period`` updates).
    """
    obs = np.asarray(batch.obs, dtype=np.float32)
    next_obs = np.asarray(batch.next_obs, dtype=np.float32)
    b = obs.shape[0]
    if b == 0:
        raise ValueError("empty batch")
    actions = np.asarray(batch.action, dtype=np.int64).reshape(b, 1)

    with nn.no_grad():
        q_next = nets.target(nn.Tensor(next_obs)).data.astype(np.float64)
    not_terminal = 1.0 - np.asarray(batch.terminal, dtype=np.float64)
    gamma_m = hyper.discount ** np.asarray(batch.horizon, dtype=np.float64)
    y = (np.asarray(batch.reward, dtype=np.float64)
         + gamma_m * not_terminal * q_next.max(axis=-1))

    nets.online.zero_grad()
    q = nn.gather(nets.online(nn.Tensor(obs)), actions)
    delta = q - nn.Tensor(y.astype(np.float32)[:, None])
    loss = nn.huber(delta).mean()
    loss.backward()
    nn.step_with_grads(nets.online.parameters(), nets.opt)
    return {
        "loss": float(loss.data),
        "target_mean": float(y.mean()),
        "q_mean": float(q.data.mean()),
    }


class DQNAgent(ReplayAgentBase):
    """Replay-driven Q-learning agent emitting joystick events.

    ``events`` fixes the action set; pass the game's minimal action set to
    train a minimal-set-restricted agent (the default is all 18 events).
    Acting is epsilon-greedy under ``hyper.epsilon``.
    """

    def __init__(self, obs_shape: tuple[int, int, int], *,
                 events: Sequence[JoystickEvent] | None = None,
                 encoder_kind: str = "dqn",
                 hyper: AgentHyperparams | None = None, seed: int = 0):
        self.hyper = hyper if hyper is not None else dqn_defaults()
        if self.hyper.epsilon is None:
            raise ValueError("DQNAgent needs hyper.epsilon")
        self.obs_shape = tuple(obs_shape)
        self.events = [JoystickEvent(e) for e in
                       (events if events is not None else list(JoystickEvent))]
        if not self.events:
            raise ValueError("events must be non-empty")
        init_seq, act_seq, update_seq = np.random.SeedSequence(seed).spawn(3)
        init_rng = np.random.Generator(np.random.PCG64(init_seq))
        self._act_rng = np.random.Generator(np.random.PCG64(act_seq))
        self._update_rng = np.random.Generator(np.random.PCG64(update_seq))
        self.nets = build_dqn_networks(self.obs_shape, len(self.events),
                                       init_rng, self.hyper,
                                       encoder_kind=encoder_kind)
        h, w, stack = self.obs_shape
        self.replay = FrameRingReplay(self.hyper.replay_capacity, (h, w),
                                      stack=stack, action_shape=(),
                                      action_dtype=np.int64)
        self._init_loop_state()

    # -- acting ---------------------------------------------------------------

    def q_values(self, obs: np.ndarray) -> np.ndarray:
        with nn.no_grad():
            q = self.nets.online(nn.to_input(obs))
        return q.data[0].astype(np.float64)

    def greedy_action(self, obs: np.ndarray) -> JoystickEvent:
        return self.events[int(np.argmax(self.q_values(obs)))]

    def _behavior_action(self, obs: np.ndarray, env_frames: int) -> JoystickEvent:
        eps = self.hyper.epsilon.value(env_frames)
        if eps > 0.0 and self._act_rng.random() < eps:
            return uniform_event(self._act_rng, self.events)
        return self.greedy_action(obs)

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
        losses = dqn_update(batch, self.nets, self.hyper)
        self.updates_done += 1
        if self.updates_done % self.hyper.target_sync_period == 0:
            nn.hard_update(self.nets.target.parameters(),
                           self.nets.online.parameters())
        return losses

    # -- checkpoint layout --------------------------------------------------------

    def _modules(self) -> dict[str, nn.Module]:
        return {"online": self.nets.online, "target": self.nets.target}

    def _optimizers(self) -> dict[str, nn.AdamState]:
        return {"opt": self.nets.opt}

    def _rngs(self) -> dict[str, np.random.Generator]:
        return {"act": self._act_rng, "update": self._update_rng}
