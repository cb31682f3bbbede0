"""Replay storage that keeps single frames and rebuilds stacked observations.

Storing each frame once (instead of every ``stack``-deep observation) cuts
memory by roughly the stack factor.  Slots form a ring: each episode
contributes one *head* slot holding its first frame, then one slot per
transition holding the action taken, the reward received, the terminal flag,
and the frame the transition produced.  Stacked observations are rebuilt by
walking backward through the ring and repeating the episode's first frame for
the part of the window that precedes the episode — exactly how the
environment wrapper fills its stack at reset, so reconstruction is bit-exact.

Every walk is verified with a per-slot monotonic write counter: a sample
whose context has been overwritten by newer data (or not yet written, for an
n-step window that extends past the newest transition) is rejected and
redrawn rather than silently stitched together across episodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SampledBatch:
    """One uniform sample of (possibly multi-step) transitions.

    ``reward`` holds the discounted sum over ``horizon`` consecutive rewards
    and ``next_obs`` the observation ``horizon`` steps ahead, so a bootstrap
    target is ``reward + discount**horizon * (1 - terminal) * V(next_obs)``.
    ``horizon`` can fall short of the requested n-step when a terminal or an
    episode truncation closed the window early; ``terminal`` is True only for
    genuine termination (truncation still bootstraps).
    """

    obs: np.ndarray        # (B, *frame_shape, stack) uint8
    action: np.ndarray     # (B, *action_shape)
    reward: np.ndarray     # (B,) float64 discounted n-step sum
    next_obs: np.ndarray   # (B, *frame_shape, stack) uint8
    terminal: np.ndarray   # (B,) bool
    horizon: np.ndarray    # (B,) int64
    indices: np.ndarray    # (B,) int64 ring slots (diagnostics)


class FrameRingReplay:
    """Uniform-sampling ring buffer over single frames.

    ``capacity`` counts ring slots (transitions plus one head per episode).
    The driving loop calls ``begin_episode(first_frame)`` after every
    environment reset and ``append(action, reward, terminated, next_frame)``
    after every step, feeding the newest frame of each stacked observation.
    """

    MAX_SAMPLE_ATTEMPTS = 1_000

    def __init__(self, capacity: int, frame_shape: tuple[int, ...], *,
                 stack: int = 4, action_shape: tuple[int, ...] = (),
                 action_dtype=np.float32):
        if capacity < 2 * (stack + 1):
            raise ValueError(f"capacity {capacity} too small for stack {stack}")
        self.capacity = capacity
        self.frame_shape = tuple(frame_shape)
        self.stack = stack
        self._frames = np.zeros((capacity, *frame_shape), dtype=np.uint8)
        self._actions = np.zeros((capacity, *action_shape), dtype=action_dtype)
        self._rewards = np.zeros(capacity, dtype=np.float64)
        self._terminals = np.zeros(capacity, dtype=bool)
        self._steps = np.zeros(capacity, dtype=np.int64)     # frame index in episode
        self._written = np.full(capacity, -1, dtype=np.int64)  # global write counter
        self._cursor = 0
        self._writes = 0
        self._transitions = 0
        self._episode_open = False
        self._step_in_episode = 0

    def __len__(self) -> int:
        """Number of transition slots currently held (heads excluded)."""
        return self._transitions

    # -- writing -------------------------------------------------------------

    def begin_episode(self, first_frame: np.ndarray):
        """Start a new episode; implicitly closes any episode left open."""
        self._episode_open = True
        self._step_in_episode = 0
        self._write_slot(first_frame, step=0)

    def append(self, action, reward: float, terminated: bool,
               next_frame: np.ndarray):
        """Record one transition; the episode must be open."""
        if not self._episode_open:
            raise RuntimeError("call begin_episode before appending transitions")
        self._step_in_episode += 1
        self._write_slot(next_frame, step=self._step_in_episode, action=action,
                         reward=reward, terminal=terminated)
        if terminated:
            self._episode_open = False

    def _write_slot(self, frame: np.ndarray, *, step: int, action=None,
                    reward: float = 0.0, terminal: bool = False):
        frame = np.asarray(frame)
        if frame.shape != self.frame_shape:
            raise ValueError(f"frame shape {frame.shape} != {self.frame_shape}")
        i = self._cursor
        if self._written[i] >= 0 and self._steps[i] > 0:
            self._transitions -= 1
        self._frames[i] = frame
        if action is not None:
            self._actions[i] = action
        self._rewards[i] = reward
        self._terminals[i] = terminal
        self._steps[i] = step
        self._written[i] = self._writes
        self._writes += 1
        self._cursor = (i + 1) % self.capacity
        if step > 0:
            self._transitions += 1

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: np.random.Generator, batch_size: int, *,
               n_step: int = 1, discount: float = 0.99) -> SampledBatch:
        """Uniform batch over sampleable transitions, rejection-sampled.

        A transition is sampleable when its backward stack window and its
        forward n-step window are both still intact in the ring; windows cut
        short by a terminal or by an episode boundary (truncation) are
        complete, windows that would extend past the newest write are not.
        """
        if self._transitions == 0:
            raise ValueError("replay buffer holds no transitions")
        if n_step < 1:
            raise ValueError(f"n_step must be >= 1, got {n_step}")
        filled = min(self._writes, self.capacity)
        rows = []
        attempts = 0
        while len(rows) < batch_size:
            attempts += 1
            if attempts > self.MAX_SAMPLE_ATTEMPTS * batch_size:
                raise RuntimeError(
                    "no sampleable transition found; buffer too young for the "
                    f"requested n_step={n_step} window")
            i = int(rng.integers(filled))
            row = self._try_build(i, n_step, discount)
            if row is not None:
                rows.append(row)
        obs, action, reward, next_obs, terminal, horizon, idx = zip(*rows)
        return SampledBatch(
            obs=np.stack(obs),
            action=np.stack(action),
            reward=np.array(reward, dtype=np.float64),
            next_obs=np.stack(next_obs),
            terminal=np.array(terminal, dtype=bool),
            horizon=np.array(horizon, dtype=np.int64),
            indices=np.array(idx, dtype=np.int64),
        )

    def _try_build(self, i: int, n_step: int, discount: float):
        if self._written[i] < 0 or self._steps[i] == 0:
            return None  # unwritten slot or episode head
        base = self._written[i]
        reward = float(self._rewards[i])
        terminal = bool(self._terminals[i])
        last = i
        horizon = 1
        for k in range(1, n_step):
            if terminal:
                break
            j = (i + k) % self.capacity
            if self._written[j] != base + k:
                return None  # forward window overwritten or not yet written
            if self._steps[j] == 0:
                break  # episode truncated at this boundary; bootstrap from it
            reward += (discount ** k) * float(self._rewards[j])
            terminal = bool(self._terminals[j])
            last = j
            horizon = k + 1
        obs = self._stack_before(i)
        if obs is None:
            return None
        next_obs = self._stack_ending_at(last)
        if next_obs is None:
            return None
        return (obs, self._actions[i].copy(), reward, next_obs, terminal,
                horizon, i)

    def _stack_before(self, i: int):
        """The observation the agent held when taking slot i's action."""
        prev = (i - 1) % self.capacity
        if self._written[prev] != self._written[i] - 1:
            return None
        return self._stack_ending_at(prev)

    def _stack_ending_at(self, i: int):
        """Stacked observation whose newest frame is slot i's frame."""
        out = np.empty((*self.frame_shape, self.stack), dtype=np.uint8)
        cur = i
        for k in range(self.stack - 1, -1, -1):
            out[..., k] = self._frames[cur]
            if k == 0:
                break
            if self._steps[cur] == 0:
                # episode head: the wrapper pads its reset stack with the
                # first frame, so repeat it for the remaining depth
                for kk in range(k - 1, -1, -1):
                    out[..., kk] = self._frames[cur]
                break
            prev = (cur - 1) % self.capacity
            if self._written[prev] != self._written[cur] - 1:
                return None
            cur = prev
        return out
