"""Agent tests: exploration schedules, the frame-ring replay, and the three
learners (continuous SAC, categorical SAC, DQN-lite).

Oracles: replay reconstruction is judged against a naive per-episode
re-implementation that stores whole episodes and rebuilds stacks by index
arithmetic; update rules against hand-enumerable stub networks (constant
critics, uniform zero-init actors), a scipy-based log-density oracle,
Gauss-Hermite quadrature, and a small MDP solved by value iteration inside
the test.  Distributional claims use fixed-seed KS / chi-squared checks.
"""

import copy
import math

import numpy as np
import pytest
from scipy import integrate, stats

import polarcade.agents as agents
import polarcade.nn as nn
from polarcade.agents import AgentHyperparams
from polarcade.envcore import WrappedEnv, WrapperConfig
from polarcade.games import make_game
from polarcade.joystick import ContinuousAction, JoystickEvent, map_action

# Affine box map constants, restated independently of the library.
BOX_OFFSET = np.array([0.5, 0.0, 0.5])
BOX_SCALE = np.array([0.5, math.pi, 0.5])


# ---------------------------------------------------------------------------
# stubs and helpers
# ---------------------------------------------------------------------------

class _FlatEncoder(nn.Module):
    """Parameter-free encoder: flattens each observation to a feature row."""

    def __init__(self, feature_dim: int):
        self.feature_dim = feature_dim

    def forward(self, x):
        return x.reshape(x.shape[0], -1)


class _BiasHead(nn.Module):
    """Head whose output is a trainable per-action bias, ignoring features."""

    def __init__(self, values):
        self.bias = nn.Tensor(np.asarray(values, np.float32), requires_grad=True)

    def forward(self, x):
        return self.bias * nn.Tensor(np.ones((x.shape[0], 1), np.float32))


class _FlatQ(nn.Module):
    """Value network over already-flat features (for tabular-style tests)."""

    def __init__(self, in_dim: int, n_actions: int, rng):
        self.head = nn.MLPHead(in_dim, n_actions, rng)

    def forward(self, x):
        return self.head(x.reshape(x.shape[0], -1))


def _stub_sac_networks(rng, hyper, feature_dim=4):
    encoder = _FlatEncoder(feature_dim)
    actor = nn.MLPHead(feature_dim, 6, rng, zero_final=True)
    critic1 = nn.MLPHead(feature_dim + 3, 1, rng)
    critic2 = nn.MLPHead(feature_dim + 3, 1, rng)
    log_alpha = nn.Tensor(np.float32(0.0), requires_grad=True)
    critic_params = critic1.parameters() + critic2.parameters()
    return agents.SACNetworks(
        encoder=encoder, actor=actor, critic1=critic1, critic2=critic2,
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


def _stub_sacd_networks(rng, hyper, q1, q2, feature_dim=4):
    encoder = _FlatEncoder(feature_dim)
    actor = nn.MLPHead(feature_dim, len(q1), rng, zero_final=True)
    critic1, critic2 = _BiasHead(q1), _BiasHead(q2)
    log_alpha = nn.Tensor(np.float32(0.0), requires_grad=True)
    critic_params = critic1.parameters() + critic2.parameters()
    return agents.SACDNetworks(
        encoder=encoder, actor=actor, critic1=critic1, critic2=critic2,
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


def _modules_equal(a: nn.Module, b: nn.Module) -> bool:
    pa, pb = a.named_parameters(), b.named_parameters()
    return (len(pa) == len(pb)
            and all(na == nb and np.array_equal(ta.data, tb.data)
                    for (na, ta), (nb, tb) in zip(pa, pb)))


def _log_prob_oracle(mu, sigma, u):
    """Independent squashed-and-scaled Gaussian log-density (scipy-based)."""
    gaussian = stats.norm.logpdf(u, loc=mu, scale=sigma)
    correction = np.log(1.0 - np.tanh(u) ** 2 + 1e-6)
    return (gaussian - correction).sum(axis=-1) - np.log(BOX_SCALE).sum()


def _random_pixel_batch(rng, b, h, w, s):
    raw = rng.integers(0, 256, (b, h, w, s), dtype=np.uint8)
    return nn.to_input(raw).data


# ---------------------------------------------------------------------------
# epsilon schedule and uniform draws
# ---------------------------------------------------------------------------

def test_epsilon_schedule_exact_landmarks():
    sched = agents.EpsilonSchedule()
    assert sched.value(0) == 1.0
    assert sched.value(500_000) == 0.505
    assert sched.value(1_000_000) == 0.01
    assert sched.value(5_000_000) == 0.01
    assert sched.value(999_999) > 0.01


def test_epsilon_schedule_matches_linear_interpolation():
    sched = agents.EpsilonSchedule(start=0.9, end=0.05, horizon_frames=12_345)
    frames = np.arange(0, 13_000, 37)
    expected = np.interp(frames, [0, 12_345], [0.9, 0.05])
    got = np.array([sched.value(int(f)) for f in frames])
    assert np.allclose(got, expected, atol=1e-12)


def test_epsilon_schedule_validation():
    with pytest.raises(ValueError):
        agents.EpsilonSchedule(start=0.5, end=0.6)
    with pytest.raises(ValueError):
        agents.EpsilonSchedule(horizon_frames=0)
    with pytest.raises(ValueError):
        agents.EpsilonSchedule(horizon_frames=10.0)
    with pytest.raises(ValueError):
        agents.EpsilonSchedule(start=1.5)
    with pytest.raises(ValueError):
        agents.EpsilonSchedule(start=0.5, end=-0.1)
    with pytest.raises(ValueError):
        agents.EpsilonSchedule().value(-1)


def test_uniform_box_action_bounds_and_uniformity():
    rng = np.random.default_rng(0)
    draws = [agents.uniform_box_action(rng) for _ in range(30_000)]
    r = np.array([a.r for a in draws])
    theta = np.array([a.theta for a in draws])
    fire = np.array([a.fire for a in draws])
    assert r.min() >= 0.0 and r.max() <= 1.0
    assert theta.min() >= -math.pi and theta.max() <= math.pi
    assert fire.min() >= 0.0 and fire.max() <= 1.0
    for values in (r, (theta + math.pi) / (2.0 * math.pi), fire):
        assert stats.kstest(values, "uniform").pvalue > 0.01


def test_uniform_event_uniformity_and_restriction():
    rng = np.random.default_rng(1)
    counts = np.zeros(18, dtype=np.int64)
    for _ in range(18_000):
        counts[int(agents.uniform_event(rng))] += 1
    assert stats.chisquare(counts).pvalue > 0.01

    pool = [JoystickEvent.LEFT, JoystickEvent.RIGHT]
    for _ in range(50):
        assert agents.uniform_event(rng, pool) in pool
    with pytest.raises(ValueError):
        agents.uniform_event(rng, [])


def test_epsilon_greedy_wrap_zero_eps_consumes_no_randomness():
    rng = np.random.default_rng(2)
    sched = agents.EpsilonSchedule(start=0.0, end=0.0, horizon_frames=10)
    wrapped = agents.epsilon_greedy_wrap(lambda obs: "base", sched, rng)
    before = rng.bit_generator.state
    assert wrapped(None, 0) == "base"
    assert wrapped(None, 99) == "base"
    assert rng.bit_generator.state == before


def test_epsilon_greedy_wrap_full_eps_never_calls_base():
    rng = np.random.default_rng(3)
    sched = agents.EpsilonSchedule(start=1.0, end=1.0, horizon_frames=10)

    def base(obs):
        pytest.fail("base action source must not be consulted at epsilon=1")

    wrapped_box = agents.epsilon_greedy_wrap(base, sched, rng)
    for _ in range(200):
        assert isinstance(wrapped_box(None, 0), ContinuousAction)

    pool = [JoystickEvent.UP, JoystickEvent.DOWN]
    wrapped_ev = agents.epsilon_greedy_wrap(base, sched, rng, events=pool)
    seen = {wrapped_ev(None, 0) for _ in range(200)}
    assert seen == set(pool)


def test_epsilon_greedy_wrap_exploration_rate():
    rng = np.random.default_rng(4)
    sched = agents.EpsilonSchedule(start=0.3, end=0.3, horizon_frames=1000)
    wrapped = agents.epsilon_greedy_wrap(lambda obs: "base", sched, rng)
    n = 100_000
    base_count = sum(wrapped(None, 0) == "base" for _ in range(n))
    assert abs(base_count / n - 0.7) < 0.01


# ---------------------------------------------------------------------------
# replay: naive reconstruction oracle
# ---------------------------------------------------------------------------

FRAME_SHAPE = (2, 3)


def _encode_frame(rng, ep, step):
    frame = rng.integers(0, 256, FRAME_SHAPE, dtype=np.uint8)
    frame[0, 0] = ep
    frame[0, 1] = step
    return frame


def _drive_replay(replay, rng, lengths, terminated_flags):
    """Feed synthetic episodes and return the naive ground-truth record."""
    episodes = []
    for ep, (length, term) in enumerate(zip(lengths, terminated_flags)):
        frames = [_encode_frame(rng, ep, 0)]
        replay.begin_episode(frames[0])
        rewards = []
        for s in range(1, length + 1):
            frame = _encode_frame(rng, ep, s)
            reward = float(rng.normal())
            replay.append(np.float32(s), reward, term and s == length, frame)
            frames.append(frame)
            rewards.append(reward)
        episodes.append({"frames": frames, "rewards": rewards, "terminated": term})
    return episodes


def _naive_stack(frames, t, stack):
    """Stacked view whose newest frame is frames[t], padded with frames[0]."""
    return np.stack([frames[max(t - (stack - 1 - k), 0)] for k in range(stack)],
                    axis=-1)


def _naive_row(episode, s, n_step, discount, stack):
    """Ground-truth sample for the transition taken at step s (1-based)."""
    frames, rewards = episode["frames"], episode["rewards"]
    length = len(rewards)
    reward, horizon, terminal = 0.0, 0, False
    for k in range(n_step):
        idx = s + k
        if idx > length:
            break  # a later episode began here: truncation, keep bootstrapping
        reward += (discount ** k) * rewards[idx - 1]
        horizon = k + 1
        terminal = episode["terminated"] and idx == length
        if terminal:
            break
    obs = _naive_stack(frames, s - 1, stack)
    next_obs = _naive_stack(frames, s - 1 + horizon, stack)
    return obs, reward, next_obs, terminal, horizon


def _decode(row_obs):
    ep = int(row_obs[0, 0, -1])
    step_before = int(row_obs[0, 1, -1])
    return ep, step_before + 1


def _check_batch_against_naive(batch, episodes, n_step, discount, stack):
    for b in range(batch.obs.shape[0]):
        ep, s = _decode(batch.obs[b])
        assert int(batch.action[b]) == s
        obs, reward, next_obs, terminal, horizon = _naive_row(
            episodes[ep], s, n_step, discount, stack)
        assert np.array_equal(batch.obs[b], obs)
        assert np.array_equal(batch.next_obs[b], next_obs)
        assert math.isclose(batch.reward[b], reward, rel_tol=1e-12, abs_tol=1e-12)
        assert bool(batch.terminal[b]) == terminal
        assert int(batch.horizon[b]) == horizon


def test_replay_reconstruction_matches_naive_oracle():
    rng = np.random.default_rng(10)
    lengths = [int(rng.integers(1, 10)) for _ in range(30)]
    flags = [bool(rng.integers(2)) for _ in range(30)]
    flags[-1] = True  # close the final episode so no open tail remains
    replay = agents.FrameRingReplay(400, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    episodes = _drive_replay(replay, rng, lengths, flags)
    assert len(replay) == sum(lengths)
    for n_step in (1, 3):
        for _ in range(40):
            batch = replay.sample(rng, 8, n_step=n_step, discount=0.97)
            _check_batch_against_naive(batch, episodes, n_step, 0.97, 4)


def test_replay_survives_ring_wraparound_without_stitching():
    rng = np.random.default_rng(11)
    lengths = [int(rng.integers(3, 7)) for _ in range(12)]
    flags = [bool(rng.integers(2)) for _ in range(12)]
    flags[-1] = True
    replay = agents.FrameRingReplay(12, FRAME_SHAPE, stack=2,
                                    action_shape=(), action_dtype=np.float32)
    episodes = _drive_replay(replay, rng, lengths, flags)
    assert sum(lengths) + len(lengths) > 3 * replay.capacity  # heavy overwrite
    for _ in range(50):
        batch = replay.sample(rng, 8, n_step=2, discount=0.9)
        _check_batch_against_naive(batch, episodes, 2, 0.9, 2)


def test_replay_nstep_discount_hand_math():
    rng = np.random.default_rng(12)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    replay.begin_episode(_encode_frame(rng, 0, 0))
    for s, reward in enumerate([1.0, 2.0, 3.0, 4.0], start=1):
        replay.append(np.float32(s), reward, s == 4, _encode_frame(rng, 0, s))

    expected = {  # s -> (reward, horizon, terminal) at n_step=3, discount=0.5
        1: (1.0 + 0.5 * 2.0 + 0.25 * 3.0, 3, False),
        2: (2.0 + 0.5 * 3.0 + 0.25 * 4.0, 3, True),
        3: (3.0 + 0.5 * 4.0, 2, True),
        4: (4.0, 1, True),
    }
    seen = {}
    for _ in range(40):
        batch = replay.sample(rng, 4, n_step=3, discount=0.5)
        for b in range(4):
            _, s = _decode(batch.obs[b])
            seen[s] = (float(batch.reward[b]), int(batch.horizon[b]),
                       bool(batch.terminal[b]))
    assert seen == expected  # discounted sums are exact in binary arithmetic


def test_replay_truncation_boundary_bootstraps():
    rng = np.random.default_rng(13)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    episodes = _drive_replay(replay, rng, [3, 2], [False, True])
    for _ in range(30):
        batch = replay.sample(rng, 4, n_step=5, discount=0.9)
        _check_batch_against_naive(batch, episodes, 5, 0.9, 4)
        for b in range(4):
            ep, s = _decode(batch.obs[b])
            if ep == 0:
                # the un-terminated episode must bootstrap at its boundary
                assert not batch.terminal[b]
                assert int(batch.horizon[b]) == min(5, 3 - s + 1)


def test_replay_open_episode_tail_is_not_sampled():
    rng = np.random.default_rng(14)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    replay.begin_episode(_encode_frame(rng, 0, 0))
    for s in range(1, 7):
        replay.append(np.float32(s), 0.0, False, _encode_frame(rng, 0, s))

    steps_n3 = set()
    for _ in range(60):
        batch = replay.sample(rng, 8, n_step=3, discount=0.99)
        steps_n3.update(_decode(batch.obs[b])[1] for b in range(8))
    # a 3-step window starting at steps 5 or 6 would run past the newest write
    assert steps_n3 == {1, 2, 3, 4}

    steps_n1 = set()
    for _ in range(60):
        batch = replay.sample(rng, 8, n_step=1, discount=0.99)
        steps_n1.update(_decode(batch.obs[b])[1] for b in range(8))
    assert steps_n1 == {1, 2, 3, 4, 5, 6}


def test_replay_rejects_when_no_window_fits():
    rng = np.random.default_rng(15)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    replay.begin_episode(_encode_frame(rng, 0, 0))
    replay.append(np.float32(1), 0.0, False, _encode_frame(rng, 0, 1))
    with pytest.raises(RuntimeError):
        replay.sample(rng, 2, n_step=3)


def test_replay_error_cases():
    rng = np.random.default_rng(16)
    with pytest.raises(ValueError):
        agents.FrameRingReplay(5, FRAME_SHAPE, stack=4)  # under 2 * (stack + 1)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4)
    with pytest.raises(RuntimeError):
        replay.append(0.0, 0.0, False, np.zeros(FRAME_SHAPE, np.uint8))
    with pytest.raises(ValueError):
        replay.sample(rng, 1)  # no transitions yet
    replay.begin_episode(np.zeros(FRAME_SHAPE, np.uint8))
    with pytest.raises(ValueError):
        replay.begin_episode(np.zeros((3, 3), np.uint8))  # wrong frame shape
    replay.append(0.0, 0.0, False, np.zeros(FRAME_SHAPE, np.uint8))
    with pytest.raises(ValueError):
        replay.sample(rng, 1, n_step=0)


def test_replay_len_counts_transitions_not_heads():
    rng = np.random.default_rng(17)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=2)
    assert len(replay) == 0
    _drive_replay(replay, rng, [3, 2], [True, True])
    assert len(replay) == 5


def test_replay_sampling_is_uniform_over_transitions():
    rng = np.random.default_rng(18)
    replay = agents.FrameRingReplay(64, FRAME_SHAPE, stack=4,
                                    action_shape=(), action_dtype=np.float32)
    _drive_replay(replay, rng, [8, 8], [True, True])
    counts = np.zeros((2, 8), dtype=np.int64)
    for _ in range(600):
        batch = replay.sample(rng, 16, n_step=1, discount=0.99)
        for b in range(16):
            ep, s = _decode(batch.obs[b])
            counts[ep, s - 1] += 1
    assert stats.chisquare(counts.ravel()).pvalue > 0.01


def test_replay_reconstruction_matches_wrapper_stacks_bit_exactly():
    env = WrappedEnv(make_game("mini_pong"),
                     WrapperConfig(sticky_prob=0.0, downsample=2))
    h, w, stack = env.observation_shape
    replay = agents.FrameRingReplay(512, (h, w), stack=stack,
                                    action_shape=(2,), action_dtype=np.int64)
    rng = np.random.default_rng(19)
    events = sorted(env.spec.minimal_set)

    all_eps = []
    obs = env.reset(0)
    replay.begin_episode(obs[..., -1])
    all_eps.append([obs])
    for i in range(150):
        result = env.step_discrete(events[int(rng.integers(len(events)))])
        ep, step = len(all_eps) - 1, len(all_eps[-1])
        replay.append(np.array([ep, step]), result.reward, result.terminated,
                      result.observation[..., -1])
        all_eps[-1].append(result.observation)
        if result.terminated or result.truncated:
            obs = env.reset(i + 1)
            replay.begin_episode(obs[..., -1])
            all_eps.append([obs])

    for _ in range(25):
        batch = replay.sample(rng, 8, n_step=1, discount=0.99)
        for b in range(8):
            ep, s = int(batch.action[b, 0]), int(batch.action[b, 1])
            assert np.array_equal(batch.obs[b], all_eps[ep][s - 1])
            assert np.array_equal(batch.next_obs[b], all_eps[ep][s])


# ---------------------------------------------------------------------------
# hyperparameters and batch plumbing
# ---------------------------------------------------------------------------

def test_hyperparams_validation_and_presets():
    base = AgentHyperparams()
    assert base.with_overrides(discount=0.5).discount == 0.5
    for bad in (dict(discount=1.5), dict(batch_size=0), dict(n_step=0),
                dict(learning_rate=0.0), dict(target_update_rho=1.2),
                dict(min_replay_history=4, batch_size=8),
                dict(replay_capacity=10, min_replay_history=100),
                dict(update_period=0)):
        with pytest.raises(ValueError):
            base.with_overrides(**bad)

    assert agents.sac_defaults().entropy_target == -3.0
    assert math.isclose(agents.sacd_defaults().entropy_target,
                        0.98 * math.log(18))
    dqn = agents.dqn_defaults()
    assert dqn.n_step == 10 and dqn.epsilon is not None


def test_transition_batch_from_pixels_scales_and_reorders():
    rng = np.random.default_rng(20)
    sampled = agents.SampledBatch(
        obs=rng.integers(0, 256, (2, 3, 3, 4), np.uint8),
        action=np.array([1, 2], np.int64),
        reward=np.array([0.5, -1.0]),
        next_obs=rng.integers(0, 256, (2, 3, 3, 4), np.uint8),
        terminal=np.array([False, True]),
        horizon=np.array([1, 2], np.int64),
        indices=np.array([3, 4], np.int64),
    )
    batch = agents.TransitionBatch.from_pixels(sampled)
    assert batch.obs.shape == (2, 4, 3, 3) and batch.obs.dtype == np.float32
    for k in range(4):
        assert np.allclose(batch.obs[0, k], sampled.obs[0, ..., k] / 255.0)
        assert np.allclose(batch.next_obs[1, k], sampled.next_obs[1, ..., k] / 255.0)
    assert np.array_equal(batch.action, sampled.action)
    assert np.array_equal(batch.reward, sampled.reward)


class _LoopProbe(agents.ReplayAgentBase):
    """Minimal agent recording when the loop triggers training."""

    def __init__(self):
        self.hyper = AgentHyperparams(min_replay_history=10, batch_size=4,
                                      update_period=4)
        self.replay = agents.FrameRingReplay(64, (2, 2), stack=2,
                                             action_shape=(),
                                             action_dtype=np.int64)
        self._init_loop_state()
        self.calls = []

    def _behavior_action(self, obs, env_frames):
        return 7

    def _stored_action(self, action):
        return action

    def train_step(self):
        self.calls.append(self._appends)
        return {"loss": 0.0}


def test_agent_loop_training_cadence_and_warmup():
    probe = _LoopProbe()
    obs = np.zeros((2, 2, 2), np.uint8)
    total = 0
    while total < 30:
        action = probe.begin_episode(obs, total)
        assert action == 7
        for s in range(6):
            total += 1
            action = probe.step(1.0, obs, s == 5, False, total)
            if total >= 30:
                break
        if total % 6 == 0:
            assert action is None
    # training waits for 10 stored transitions, then fires every 4th append
    assert probe.calls == [12, 16, 20, 24, 28]
    assert int(probe.replay._actions[1]) == 7  # stored via _stored_action


# ---------------------------------------------------------------------------
# continuous SAC: action map, densities, update rule
# ---------------------------------------------------------------------------

def test_squash_and_inverse_cover_the_action_box():
    rng = np.random.default_rng(30)
    u = rng.normal(0.0, 5.0, (100_000, 3))
    box = agents.squash_to_box(u)
    assert box[:, 0].min() >= 0.0 and box[:, 0].max() <= 1.0
    assert box[:, 1].min() >= -math.pi and box[:, 1].max() <= math.pi
    assert box[:, 2].min() >= 0.0 and box[:, 2].max() <= 1.0
    assert np.allclose(agents.squash_to_box(np.zeros(3)), [0.5, 0.0, 0.5])
    back = agents.inverse_squash(box)
    assert np.allclose(back, np.clip(np.tanh(u), -1 + 1e-6, 1 - 1e-6),
                       atol=1e-12)


def test_sac_select_action_modes():
    out = agents.GaussianPolicyOutput(np.zeros(3), np.ones(3))
    greedy = agents.sac_select_action(out, "greedy")
    assert greedy.as_tuple() == (0.5, 0.0, 0.5)
    assert map_action(greedy, 0.5) == JoystickEvent.RIGHTFIRE

    tight = agents.GaussianPolicyOutput(np.array([1.0, -0.5, 0.2]),
                                        np.full(3, 1e-12))
    sampled = agents.sac_select_action(tight, "sample", np.random.default_rng(0))
    near_greedy = agents.sac_select_action(tight, "greedy")
    assert np.allclose(sampled.as_tuple(), near_greedy.as_tuple(), atol=1e-9)

    with pytest.raises(ValueError):
        agents.sac_select_action(out, "sample")  # rng required
    with pytest.raises(ValueError):
        agents.sac_select_action(out, "argmax")
    with pytest.raises(ValueError):
        agents.GaussianPolicyOutput(np.zeros(3), np.zeros(3))  # sigma > 0
    with pytest.raises(ValueError):
        agents.GaussianPolicyOutput(np.zeros(2), np.ones(2))  # needs 3 dims


def test_sac_select_action_sample_replays_generator():
    out = agents.GaussianPolicyOutput(np.array([0.3, -0.7, 1.2]),
                                      np.array([0.8, 1.5, 0.4]))
    action = agents.sac_select_action(out, "sample", np.random.default_rng(7))
    u = out.mu + out.sigma * np.random.default_rng(7).standard_normal(3)
    assert action.as_tuple() == tuple(agents.squash_to_box(u))


def test_squashed_sample_mean_matches_gauss_hermite_quadrature():
    mu = np.array([0.3, -0.7, 1.2])
    sigma = np.array([0.8, 1.5, 0.4])
    rng = np.random.default_rng(31)
    u = mu + sigma * rng.standard_normal((500_000, 3))
    box = agents.squash_to_box(u)

    nodes, weights = np.polynomial.hermite.hermgauss(120)
    for k in range(3):
        f = BOX_OFFSET[k] + BOX_SCALE[k] * np.tanh(mu[k] + math.sqrt(2) * sigma[k] * nodes)
        expected = float((weights * f).sum() / math.sqrt(math.pi))
        sample_mean = box[:, k].mean()
        se = box[:, k].std() / math.sqrt(len(box))
        assert abs(sample_mean - expected) < 5 * se + 1e-6


def test_sac_log_prob_matches_scipy_oracle():
    rng = np.random.default_rng(32)
    mu = rng.normal(0, 1, (50, 3))
    sigma = rng.uniform(0.2, 2.0, (50, 3))
    u = np.clip(rng.normal(0, 1.5, (50, 3)), -3, 3)
    out = agents.GaussianPolicyOutput(mu, sigma)
    assert np.allclose(agents.sac_log_prob(out, u),
                       _log_prob_oracle(mu, sigma, u), atol=1e-10)
    # extreme pre-squash points stay finite (the 1e-6 floor in the Jacobian)
    extreme = agents.sac_log_prob(
        agents.GaussianPolicyOutput(np.zeros(3), np.ones(3)),
        np.full(3, 20.0))
    assert np.isfinite(extreme)


def test_sac_log_prob_is_a_normalized_density_over_the_box():
    mu = np.array([0.3, -0.7, 1.2])
    sigma = np.array([0.8, 1.5, 0.4])
    out = agents.GaussianPolicyOutput(mu, sigma)
    logp0 = float(agents.sac_log_prob(out, np.zeros(3)))

    # The density is separable across dimensions, so the box integral is the
    # product of per-axis slice integrals (others pinned at 0), renormalized
    # by exp(2 * logp(0)): integrate each slice over the pre-squash axis with
    # the change of variables da_k = scale_k * (1 - tanh(u)^2) du.
    slices = []
    for k in range(3):
        def slice_density(t, k=k):
            point = np.zeros(3)
            point[k] = t
            jac = BOX_SCALE[k] * (1.0 - math.tanh(t) ** 2)
            return math.exp(float(agents.sac_log_prob(out, point))) * jac

        value, err = integrate.quad(slice_density, -12.0, 12.0, limit=200)
        assert err < 1e-8
        slices.append(value)
    total = np.prod(slices) / math.exp(2.0 * logp0)
    assert abs(total - 1.0) < 5e-3


def test_actor_forward_splits_mean_and_clips_log_sigma():
    class _Const(nn.Module):
        def __init__(self, row):
            self.row = np.asarray(row, np.float32)

        def forward(self, x):
            return nn.Tensor(np.tile(self.row, (x.shape[0], 1)))

    actor = _Const([0.4, -9.0, 3.0, -7.0, 0.3, 5.0])
    mu, sigma, log_sigma = agents.actor_forward(actor, nn.Tensor(np.zeros((2, 4), np.float32)))
    assert np.allclose(mu.data[0], [0.4, -9.0, 3.0])  # mean is never clipped
    assert np.allclose(log_sigma.data[0], [-5.0, 0.3, 2.0])  # clipped to range
    assert np.allclose(sigma.data, np.exp(log_sigma.data))


def test_sac_update_target_matches_independent_recomputation():
    hyper = agents.sac_defaults().with_overrides(batch_size=8)
    rng = np.random.default_rng(33)
    nets = agents.build_sac_networks((15, 15, 2), rng, hyper)
    nets_before = copy.deepcopy(nets)

    box = np.column_stack([rng.uniform(0, 1, 8),
                           rng.uniform(-math.pi, math.pi, 8),
                           rng.uniform(0, 1, 8)]).astype(np.float32)
    batch = agents.TransitionBatch(
        obs=_random_pixel_batch(rng, 8, 15, 15, 2),
        action=box,
        reward=rng.normal(0, 1, 8),
        next_obs=_random_pixel_batch(rng, 8, 15, 15, 2),
        terminal=np.array([0, 0, 0, 1, 0, 1, 0, 0], bool),
        horizon=np.array([1, 2, 1, 1, 3, 1, 2, 1], np.int64),
    )
    losses = agents.sac_update(batch, nets, hyper, np.random.default_rng(99))

    # Recompute the bootstrap target from the pre-update networks with the
    # same generator stream and the scipy density oracle.
    rng_replica = np.random.default_rng(99)
    with nn.no_grad():
        feat_next = nets_before.encoder(nn.Tensor(batch.next_obs.astype(np.float32)))
        mu, sigma, _ = agents.actor_forward(nets_before.actor, feat_next)
        u_next = mu.data + sigma.data * rng_replica.standard_normal((8, 3))
        a_next = np.tanh(u_next).astype(np.float32)
        logp_next = _log_prob_oracle(mu.data, sigma.data, u_next)
        feat_t = nets_before.target_encoder(nn.Tensor(batch.next_obs.astype(np.float32)))
        q1 = nets_before.target_critic1(nn.concat([feat_t, nn.Tensor(a_next)])).data[:, 0]
        q2 = nets_before.target_critic2(nn.concat([feat_t, nn.Tensor(a_next)])).data[:, 0]
    y = (batch.reward + hyper.discount ** batch.horizon.astype(np.float64)
         * (1.0 - batch.terminal.astype(np.float64))
         * (np.minimum(q1, q2) - 1.0 * logp_next))
    assert math.isclose(losses["target_mean"], float(y.mean()), abs_tol=1e-6)


def test_sac_update_degenerate_targets():
    rng = np.random.default_rng(34)
    base = agents.sac_defaults().with_overrides(batch_size=4)

    def batch_for(terminal):
        box = np.column_stack([rng.uniform(0, 1, 4),
                               rng.uniform(-math.pi, math.pi, 4),
                               rng.uniform(0, 1, 4)]).astype(np.float32)
        return agents.TransitionBatch(
            obs=_random_pixel_batch(rng, 4, 15, 15, 2), action=box,
            reward=rng.normal(0, 1, 4),
            next_obs=_random_pixel_batch(rng, 4, 15, 15, 2),
            terminal=np.full(4, terminal, bool),
            horizon=np.ones(4, np.int64))

    # discount 0: the target collapses to the immediate reward
    hyper0 = base.with_overrides(discount=0.0)
    nets = agents.build_sac_networks((15, 15, 2), rng, hyper0)
    batch = batch_for(False)
    losses = agents.sac_update(batch, nets, hyper0, np.random.default_rng(0))
    assert math.isclose(losses["target_mean"], float(batch.reward.mean()),
                        abs_tol=1e-12)

    # all-terminal: same collapse at any discount
    nets = agents.build_sac_networks((15, 15, 2), rng, base)
    batch = batch_for(True)
    losses = agents.sac_update(batch, nets, base, np.random.default_rng(0))
    assert math.isclose(losses["target_mean"], float(batch.reward.mean()),
                        abs_tol=1e-12)

    with pytest.raises(ValueError):
        agents.sac_update(batch, nets, base.with_overrides(entropy_target=None),
                          np.random.default_rng(0))


def test_sac_update_is_deterministic():
    hyper = agents.sac_defaults().with_overrides(batch_size=4)
    rng = np.random.default_rng(35)
    nets_a = agents.build_sac_networks((15, 15, 2), np.random.default_rng(1), hyper)
    nets_b = agents.build_sac_networks((15, 15, 2), np.random.default_rng(1), hyper)
    box = np.column_stack([rng.uniform(0, 1, 4),
                           rng.uniform(-math.pi, math.pi, 4),
                           rng.uniform(0, 1, 4)]).astype(np.float32)
    batch = agents.TransitionBatch(
        obs=_random_pixel_batch(rng, 4, 15, 15, 2), action=box,
        reward=rng.normal(0, 1, 4),
        next_obs=_random_pixel_batch(rng, 4, 15, 15, 2),
        terminal=np.zeros(4, bool), horizon=np.ones(4, np.int64))
    la = agents.sac_update(batch, nets_a, hyper, np.random.default_rng(5))
    lb = agents.sac_update(batch, nets_b, hyper, np.random.default_rng(5))
    assert la == lb
    assert _modules_equal(nets_a.actor, nets_b.actor)
    assert _modules_equal(nets_a.encoder, nets_b.encoder)
    assert _modules_equal(nets_a.critic1, nets_b.critic1)
    assert _modules_equal(nets_a.target_critic2, nets_b.target_critic2)
    assert np.array_equal(nets_a.log_alpha.data, nets_b.log_alpha.data)


def test_sac_temperature_moves_toward_entropy_target():
    rng = np.random.default_rng(36)
    hyper = agents.sac_defaults().with_overrides(batch_size=4)
    box = np.column_stack([rng.uniform(0, 1, 4),
                           rng.uniform(-math.pi, math.pi, 4),
                           rng.uniform(0, 1, 4)]).astype(np.float32)
    batch = agents.TransitionBatch(
        obs=_random_pixel_batch(rng, 4, 15, 15, 2), action=box,
        reward=rng.normal(0, 1, 4),
        next_obs=_random_pixel_batch(rng, 4, 15, 15, 2),
        terminal=np.zeros(4, bool), horizon=np.ones(4, np.int64))

    # fresh-policy entropy sits around a few nats: far above -50, below +50
    low = hyper.with_overrides(entropy_target=-50.0)
    nets = agents.build_sac_networks((15, 15, 2), np.random.default_rng(2), low)
    agents.sac_update(batch, nets, low, np.random.default_rng(0))
    assert float(nets.log_alpha.data) < 0.0  # entropy above target: cool down

    high = hyper.with_overrides(entropy_target=50.0)
    nets = agents.build_sac_networks((15, 15, 2), np.random.default_rng(2), high)
    agents.sac_update(batch, nets, high, np.random.default_rng(0))
    assert float(nets.log_alpha.data) > 0.0  # entropy below target: heat up


def test_sac_bandit_converges_to_reward_peak():
    hyper = agents.sac_defaults().with_overrides(
        learning_rate=3e-3, batch_size=64, target_update_rho=0.9,
        min_replay_history=64)
    rng = np.random.default_rng(37)
    nets = _stub_sac_networks(np.random.default_rng(8), hyper)
    obs = np.ones((64, 1, 2, 2), np.float32)

    for _ in range(1200):
        with nn.no_grad():
            feat = nets.encoder(nn.Tensor(obs))
            mu, sigma, _ = agents.actor_forward(nets.actor, feat)
        u = mu.data + sigma.data * rng.standard_normal((64, 3))
        box = agents.squash_to_box(u)
        explore = rng.random(64) < 0.3
        box[explore, 0] = rng.uniform(0, 1, int(explore.sum()))
        reward = -((box[:, 0] - 0.8) ** 2)
        batch = agents.TransitionBatch(
            obs=obs, action=box.astype(np.float32), reward=reward,
            next_obs=obs, terminal=np.ones(64, bool),
            horizon=np.ones(64, np.int64))
        agents.sac_update(batch, nets, hyper, rng)

    with nn.no_grad():
        feat = nets.encoder(nn.Tensor(obs[:1]))
        mu, _, _ = agents.actor_forward(nets.actor, feat)
    greedy = agents.squash_to_box(mu.data[0])
    assert abs(greedy[0] - 0.8) < 0.05


def test_sac_agent_fresh_greedy_is_box_midpoint():
    for kind in ("sac", "dqn"):
        agent = agents.SACAgent((17, 17, 2), encoder_kind=kind, seed=0)
        obs = np.random.default_rng(0).integers(0, 256, (17, 17, 2), np.uint8)
        assert agent.greedy_action(obs).as_tuple() == (0.5, 0.0, 0.5)


def test_sac_agent_validation():
    with pytest.raises(ValueError):
        agents.SACAgent((15, 15, 2), exploration="greedy")
    with pytest.raises(ValueError):
        agents.SACAgent((15, 15, 2), exploration="epsilon")  # needs schedule
    agent = agents.SACAgent((15, 15, 2), hyper=agents.sac_defaults()
                            .with_overrides(min_replay_history=64))
    with pytest.raises(ValueError):
        agent.train_step()  # replay below min history


# ---------------------------------------------------------------------------
# categorical SAC
# ---------------------------------------------------------------------------

def test_sacd_fresh_policy_is_uniform():
    agent = agents.SACDAgent((15, 15, 2), seed=0)
    obs = np.random.default_rng(1).integers(0, 256, (15, 15, 2), np.uint8)
    logp = agent.event_log_probs(obs)
    assert logp.shape == (18,)
    assert np.allclose(logp, -math.log(18), atol=1e-6)


def test_sacd_update_two_event_hand_enumeration():
    # Constant critics and an exactly-uniform two-event actor make every
    # quantity in the update hand-computable.
    hyper = agents.sacd_defaults().with_overrides(
        learning_rate=1e-12, batch_size=2, discount=0.9, entropy_target=0.3)
    nets = _stub_sacd_networks(np.random.default_rng(3), hyper,
                               q1=[1.0, 3.0], q2=[2.0, 2.5])
    obs = np.ones((2, 1, 2, 2), np.float32)
    batch = agents.TransitionBatch(
        obs=obs, action=np.array([0, 1], np.int64),
        reward=np.array([0.5, -1.0]), next_obs=obs,
        terminal=np.array([False, True]), horizon=np.array([1, 2], np.int64))

    ln2 = math.log(2.0)
    v_next = 0.5 * (1.0 + ln2) + 0.5 * (2.5 + ln2)   # min(q1,q2) = [1.0, 2.5]
    y0 = 0.5 + 0.9 * v_next
    y1 = -1.0
    expected_critic = 0.5 * ((1.0 - y0) ** 2 + (3.0 - y1) ** 2) \
        + 0.5 * ((2.0 - y0) ** 2 + (2.5 - y1) ** 2)
    expected_actor = -ln2 - 0.5 * (1.0 + 2.5)

    losses = agents.sacd_update(batch, nets, hyper)
    assert math.isclose(losses["target_mean"], (y0 + y1) / 2.0, rel_tol=1e-5)
    assert math.isclose(losses["critic_loss"], expected_critic, rel_tol=1e-5)
    assert math.isclose(losses["actor_loss"], expected_actor, rel_tol=1e-5)
    assert math.isclose(losses["entropy"], ln2, rel_tol=1e-5)
    assert losses["alpha_loss"] == 0.0  # log_alpha starts at exactly zero


def test_sacd_update_is_deterministic():
    hyper = agents.sacd_defaults().with_overrides(batch_size=4)
    rng = np.random.default_rng(40)
    nets_a = agents.build_sacd_networks((15, 15, 2), 18,
                                        np.random.default_rng(4), hyper)
    nets_b = agents.build_sacd_networks((15, 15, 2), 18,
                                        np.random.default_rng(4), hyper)
    batch = agents.TransitionBatch(
        obs=_random_pixel_batch(rng, 4, 15, 15, 2),
        action=rng.integers(0, 18, 4),
        reward=rng.normal(0, 1, 4),
        next_obs=_random_pixel_batch(rng, 4, 15, 15, 2),
        terminal=np.zeros(4, bool), horizon=np.ones(4, np.int64))
    la = agents.sacd_update(batch, nets_a, hyper)
    lb = agents.sacd_update(batch, nets_b, hyper)
    assert la == lb
    assert _modules_equal(nets_a.actor, nets_b.actor)
    assert _modules_equal(nets_a.critic1, nets_b.critic1)
    assert np.array_equal(nets_a.log_alpha.data, nets_b.log_alpha.data)


def test_sacd_temperature_direction():
    # the fresh policy is uniform over two events: entropy exactly ln 2
    def one_update(entropy_target):
        hyper = agents.sacd_defaults().with_overrides(
            batch_size=2, entropy_target=entropy_target)
        nets = _stub_sacd_networks(np.random.default_rng(3), hyper,
                                   q1=[1.0, 3.0], q2=[2.0, 2.5])
        obs = np.ones((2, 1, 2, 2), np.float32)
        batch = agents.TransitionBatch(
            obs=obs, action=np.array([0, 1], np.int64),
            reward=np.zeros(2), next_obs=obs,
            terminal=np.ones(2, bool), horizon=np.ones(2, np.int64))
        agents.sacd_update(batch, nets, hyper)
        return float(nets.log_alpha.data)

    assert one_update(0.05) < 0.0   # entropy above target: cool down
    assert one_update(5.0) > 0.0    # entropy below target: heat up


def test_sacd_agent_event_restriction():
    events = [JoystickEvent.NOOP, JoystickEvent.FIRE, JoystickEvent.LEFT]
    agent = agents.SACDAgent((15, 15, 2), events=events, seed=1)
    rng = np.random.default_rng(2)
    obs = rng.integers(0, 256, (15, 15, 2), np.uint8)
    assert agent.greedy_action(obs) in events
    for frame in range(30):
        assert agent._behavior_action(obs, frame) in events
    assert agent._stored_action(JoystickEvent.LEFT) == 2
    assert agent.event_log_probs(obs).shape == (3,)
    with pytest.raises(ValueError):
        agents.SACDAgent((15, 15, 2), events=[])


# ---------------------------------------------------------------------------
# DQN-lite
# ---------------------------------------------------------------------------

def test_dqn_update_hand_computed_huber_loss():
    hyper = AgentHyperparams(discount=0.0, learning_rate=1e-12,
                             batch_size=3, min_replay_history=3)
    online = _BiasHead([0.2, 1.4])
    nets = agents.DQNNetworks(online=online, target=copy.deepcopy(online),
                              opt=nn.AdamState.for_params(
                                  online.parameters(), lr=hyper.learning_rate,
                                  eps=hyper.adam_eps))
    obs = np.ones((3, 1, 2, 2), np.float32)
    batch = agents.TransitionBatch(
        obs=obs, action=np.array([0, 1, 0], np.int64),
        reward=np.array([1.0, 1.2, 2.7]), next_obs=obs,
        terminal=np.zeros(3, bool), horizon=np.ones(3, np.int64))
    losses = agents.dqn_update(batch, nets, hyper)
    # deltas are [-0.8, 0.2, -2.5]: two quadratic branches and one linear
    expected = (0.5 * 0.8 ** 2 + 0.5 * 0.2 ** 2 + (2.5 - 0.5)) / 3.0
    assert math.isclose(losses["loss"], expected, rel_tol=1e-6)
    assert math.isclose(losses["q_mean"], (0.2 + 1.4 + 0.2) / 3.0, rel_tol=1e-6)
    assert math.isclose(losses["target_mean"], (1.0 + 1.2 + 2.7) / 3.0,
                        rel_tol=1e-6)


def test_dqn_update_nstep_horizon_and_terminal_math():
    hyper = AgentHyperparams(discount=0.5, learning_rate=1e-12,
                             batch_size=3, min_replay_history=3)
    online = _BiasHead([0.0, 0.0])
    nets = agents.DQNNetworks(online=online, target=_BiasHead([2.0, 5.0]),
                              opt=nn.AdamState.for_params(
                                  online.parameters(), lr=hyper.learning_rate,
                                  eps=hyper.adam_eps))
    obs = np.ones((3, 1, 2, 2), np.float32)
    batch = agents.TransitionBatch(
        obs=obs, action=np.array([0, 1, 0], np.int64),
        reward=np.array([1.0, 2.0, 3.0]), next_obs=obs,
        terminal=np.array([False, False, True]),
        horizon=np.array([1, 3, 2], np.int64))
    losses = agents.dqn_update(batch, nets, hyper)
    # bootstrap from max target-Q = 5 through discount**horizon, unless terminal
    y = np.array([1.0 + 0.5 * 5.0, 2.0 + 0.125 * 5.0, 3.0])
    assert math.isclose(losses["target_mean"], float(y.mean()), rel_tol=1e-6)


def test_dqn_learns_chain_mdp_to_value_iteration_fixpoint():
    # Two states, two actions, deterministic dynamics; solve by value
    # iteration in the test, then check DQN updates reach the same Q.
    R = np.array([[0.0, 1.0], [2.0, 0.5]])
    P = np.array([[0, 1], [0, 1]])
    gamma = 0.8

    Q_star = np.zeros((2, 2))
    for _ in range(500):
        Q_star = R + gamma * Q_star.max(axis=1)[P]

    hyper = AgentHyperparams(discount=gamma, learning_rate=3e-2,
                             batch_size=32, min_replay_history=32)
    rng = np.random.default_rng(50)
    online = _FlatQ(2, 2, np.random.default_rng(6))
    nets = agents.DQNNetworks(online=online, target=copy.deepcopy(online),
                              opt=nn.AdamState.for_params(
                                  online.parameters(), lr=hyper.learning_rate,
                                  eps=hyper.adam_eps))

    def onehot(s):
        out = np.zeros((len(s), 1, 1, 2), np.float32)
        out[np.arange(len(s)), 0, 0, s] = 1.0
        return out

    for step in range(1200):
        s = rng.integers(0, 2, 32)
        a = rng.integers(0, 2, 32)
        batch = agents.TransitionBatch(
            obs=onehot(s), action=a, reward=R[s, a].astype(np.float64),
            next_obs=onehot(P[s, a]), terminal=np.zeros(32, bool),
            horizon=np.ones(32, np.int64))
        agents.dqn_update(batch, nets, hyper)
        if (step + 1) % 30 == 0:
            nn.hard_update(nets.target.parameters(), nets.online.parameters())

    with nn.no_grad():
        q_learned = nets.online(nn.Tensor(onehot(np.array([0, 1])))).data
    assert np.abs(q_learned - Q_star).max() < 0.05


def test_dqn_agent_requires_epsilon_schedule():
    with pytest.raises(ValueError):
        agents.DQNAgent((17, 17, 2),
                        hyper=AgentHyperparams(epsilon=None))


def _drive_synthetic(agent, obs_shape, steps, seed, episode_len=10):
    """Feed an agent random observations/rewards through the loop protocol."""
    rng = np.random.default_rng(seed)
    frames = 0
    in_episode = 0
    agent.begin_episode(rng.integers(0, 256, obs_shape, np.uint8), frames)
    for _ in range(steps):
        frames += 4
        in_episode += 1
        nxt = rng.integers(0, 256, obs_shape, np.uint8)
        action = agent.step(float(rng.normal()), nxt, in_episode >= episode_len,
                            False, frames)
        if action is None:
            agent.begin_episode(rng.integers(0, 256, obs_shape, np.uint8), frames)
            in_episode = 0
    return frames


def test_dqn_agent_hard_sync_cadence():
    hyper = agents.dqn_defaults().with_overrides(
        min_replay_history=24, batch_size=8, replay_capacity=256,
        target_sync_period=3, update_period=10_000, n_step=1,
        epsilon=agents.EpsilonSchedule(1.0, 1.0, 100))
    agent = agents.DQNAgent((17, 17, 2), hyper=hyper, seed=3)
    _drive_synthetic(agent, (17, 17, 2), 40, seed=7)
    assert agent.updates_done == 0  # update_period kept the loop from training
    for k in range(1, 8):
        agent.train_step()
        assert agent.updates_done == k
        synced = _modules_equal(agent.nets.online, agent.nets.target)
        assert synced == (k % 3 == 0)


def test_dqn_agent_emits_only_its_event_set():
    events = [JoystickEvent.LEFT, JoystickEvent.RIGHT]
    hyper = agents.dqn_defaults().with_overrides(
        min_replay_history=32, batch_size=8, replay_capacity=256,
        epsilon=agents.EpsilonSchedule(0.5, 0.5, 100))
    agent = agents.DQNAgent((17, 17, 2), events=events, hyper=hyper, seed=4)
    rng = np.random.default_rng(5)
    obs = rng.integers(0, 256, (17, 17, 2), np.uint8)
    assert agent.q_values(obs).shape == (2,)
    for frame in range(40):
        assert agent._behavior_action(obs, frame) in events
    assert agent._stored_action(JoystickEvent.RIGHT) == 1


# ---------------------------------------------------------------------------
# checkpointing
# ---------------------------------------------------------------------------

def test_agent_checkpoint_roundtrip_bitwise(tmp_path):
    specs = [
        (lambda seed: agents.SACAgent((15, 15, 2), hyper=agents.sac_defaults()
                                      .with_overrides(min_replay_history=16,
                                                      batch_size=8,
                                                      replay_capacity=256),
                                      seed=seed), 40),
        (lambda seed: agents.SACDAgent((15, 15, 2), hyper=agents.sacd_defaults()
                                       .with_overrides(min_replay_history=16,
                                                       batch_size=8,
                                                       replay_capacity=256),
                                       seed=seed), 40),
        (lambda seed: agents.DQNAgent((17, 17, 2), hyper=agents.dqn_defaults()
                                      .with_overrides(min_replay_history=16,
                                                      batch_size=8,
                                                      replay_capacity=256,
                                                      n_step=2),
                                      seed=seed), 40),
    ]
    for i, (make, steps) in enumerate(specs):
        agent = make(seed=11)
        shape = agent.obs_shape
        _drive_synthetic(agent, shape, steps, seed=21)
        path = tmp_path / f"agent{i}.ckpt"
        agent.save(path)

        other = make(seed=999)
        other.load(path)
        ours, theirs = agent._named_arrays(), other._named_arrays()
        assert set(ours) == set(theirs)
        for name in ours:
            assert np.array_equal(ours[name], theirs[name]), name
        assert other.updates_done == agent.updates_done


def test_two_resumes_from_one_checkpoint_are_identical(tmp_path):
    env = WrappedEnv(make_game("mini_seeker"),
                     WrapperConfig(sticky_prob=0.0, continuous=True,
                                   downsample=2))
    hyper = agents.sac_defaults().with_overrides(
        min_replay_history=16, batch_size=4, replay_capacity=512,
        update_period=4)
    agent = agents.SACAgent(env.observation_shape, hyper=hyper, seed=11)
    obs = env.reset(0)
    action = agent.begin_episode(obs, 0)
    for i in range(30):
        result = env.step_continuous(action)
        action = agent.step(result.reward, result.observation,
                            result.terminated, result.truncated,
                            result.info["frames"])
        if action is None:
            action = agent.begin_episode(env.reset(i), result.info["frames"])
    path = tmp_path / "resume.ckpt"
    agent.save(path)

    def resume(seed):
        fresh = agents.SACAgent(env.observation_shape, hyper=hyper, seed=seed)
        fresh.load(path)
        env2 = WrappedEnv(make_game("mini_seeker"),
                          WrapperConfig(sticky_prob=0.0, continuous=True,
                                        downsample=2))
        actions, losses = [], []
        act = fresh.begin_episode(env2.reset(123), 0)
        for i in range(40):
            actions.append(act.as_tuple())
            result = env2.step_continuous(act)
            act = fresh.step(result.reward, result.observation,
                             result.terminated, result.truncated,
                             result.info["frames"])
            losses.append(dict(fresh.last_losses))
            if act is None:
                act = fresh.begin_episode(env2.reset(1000 + i),
                                          result.info["frames"])
        return actions, losses, fresh._named_arrays()

    actions_b, losses_b, arrays_b = resume(seed=500)
    actions_c, losses_c, arrays_c = resume(seed=801)
    assert actions_b == actions_c
    assert losses_b == losses_c
    for name in arrays_b:
        assert np.array_equal(arrays_b[name], arrays_c[name]), name


def test_checkpoint_layout_mismatch_rejected(tmp_path):
    dqn = agents.DQNAgent((17, 17, 2), hyper=agents.dqn_defaults()
                          .with_overrides(min_replay_history=16, batch_size=8,
                                          replay_capacity=256))
    path = tmp_path / "dqn.ckpt"
    dqn.save(path)
    sacd = agents.SACDAgent((17, 17, 2), hyper=agents.sacd_defaults()
                            .with_overrides(min_replay_history=16, batch_size=8,
                                            replay_capacity=256))
    with pytest.raises(ValueError):
        sacd.load(path)
