"""Score aggregation and analysis: anchor normalization, interquartile means,
stratified bootstrap confidence intervals, joystick-event histograms, and
empirical reward quantile functions.

Conventions, stated once here:

* ``normalize`` is the affine map sending a game's random anchor to 0 and
  its oracle anchor to 1; scores above the oracle map above 1 (no clipping).
* ``iqm`` sorts the values and drops ``floor(n / 4)`` from each end before
  averaging, the convention used by the published aggregate-metric
  libraries.  Worked examples: ``[1, 2, 3, 4]`` keeps ``(2, 3)`` giving
  2.5; ``[0, 0, 0, 100]`` keeps ``(0, 0)`` giving 0.0.
* The bootstrap is stratified per game: within each resample, every game's
  runs are redrawn with replacement independently (one ``integers`` call
  per game, in row order), the IQM is recomputed over the flattened
  resampled matrix, and the interval is the percentile pair at the
  requested level (linear interpolation).

All functions are pure; randomness enters only through an explicit seed or
generator, so fixed seeds give identical intervals.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from .envcore import read_trajectory
from .joystick import NUM_EVENTS, JoystickEvent

DEFAULT_RESAMPLES = 2_000
DEFAULT_LEVEL = 0.95


def normalize(score, random_anchor: float, oracle_anchor: float):
    """Anchor-normalize a score (or array of scores) for one game."""
    if not oracle_anchor > random_anchor:
        raise ValueError(
            f"degenerate anchors: oracle ({oracle_anchor}) must exceed "
            f"random ({random_anchor})")
    return (score - random_anchor) / (oracle_anchor - random_anchor)


def iqm(values) -> float:
    """Interquartile mean: the average of the middle half of the values."""
    arr = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if arr.size < 4:
        raise ValueError("the interquartile mean needs at least 4 values")
    cut = arr.size // 4
    return float(arr[cut:arr.size - cut].mean())


@dataclass(frozen=True)
class ScoreTable:
    """Final scores of several independent runs on each of several games.

    ``scores[i, j]`` is the final episode-return average of run ``j`` on
    ``games[i]``; ``anchors[game]`` is that game's ``(random, oracle)``
    normalization pair.  Aggregated reports require every cell present
    (finite), so partial tables are rejected at construction.
    """

    games: tuple[str, ...]
    scores: np.ndarray
    anchors: Mapping[str, tuple[float, float]]

    def __post_init__(self):
        object.__setattr__(self, "games", tuple(self.games))
        scores = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        if scores.ndim != 2 or scores.shape[1] < 1:
            raise ValueError("scores must be a games x runs matrix")
        if len(self.games) != scores.shape[0]:
            raise ValueError(
                f"{len(self.games)} game names for {scores.shape[0]} score rows")
        if not np.isfinite(scores).all():
            raise ValueError("score table has missing or non-finite cells")
        for game in self.games:
            if game not in self.anchors:
                raise ValueError(f"no anchors for game {game!r}")
            random_anchor, oracle_anchor = self.anchors[game]
            if not oracle_anchor > random_anchor:
                raise ValueError(
                    f"degenerate anchors for {game!r}: oracle "
                    f"({oracle_anchor}) must exceed random ({random_anchor})")

    @property
    def n_runs(self) -> int:
        return self.scores.shape[1]

    def normalized(self) -> np.ndarray:
        """Anchor-normalized copy of the score matrix."""
        return np.stack([normalize(self.scores[i], *self.anchors[game])
                         for i, game in enumerate(self.games)])

    def point_iqm(self) -> float:
        """IQM of the normalized scores pooled over all games and runs."""
        return iqm(self.normalized())


def stratified_bootstrap_ci(table, resamples: int = DEFAULT_RESAMPLES,
                            level: float = DEFAULT_LEVEL, *,
                            rng=None) -> tuple[float, float]:
    """Percentile bootstrap interval for the pooled IQM of a score table.

    ``table`` is either a :class:`ScoreTable` (normalized first) or a plain
    games x runs matrix (used as-is).  ``rng`` is a seed or generator; the
    resampling order is documented in the module docstring so independent
    reimplementations can replay the stream.
    """
    if resamples < 1_000:
        raise ValueError("bootstrap intervals need at least 1,000 resamples")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    if isinstance(table, ScoreTable):
        matrix = table.normalized()
    else:
        matrix = np.asarray(table, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("score table must be a games x runs matrix")
    n_games, n_runs = matrix.shape
    if n_runs == 1:
        warnings.warn("single-run table: the bootstrap interval is degenerate",
                      stacklevel=2)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    estimates = np.empty(resamples, dtype=np.float64)
    for b in range(resamples):
        rows = [matrix[g, gen.integers(0, n_runs, size=n_runs)]
                for g in range(n_games)]
        estimates[b] = iqm(np.concatenate(rows))
    low, high = np.percentile(estimates, [50.0 * (1.0 - level),
                                          50.0 * (1.0 + level)])
    return float(low), float(high)


@dataclass
class EventHistogram:
    """Counts of each joystick event over an observed training window.

    The total always equals the number of steps fed in, so proportions are
    exact step frequencies.
    """

    counts: np.ndarray = field(
        default_factory=lambda: np.zeros(NUM_EVENTS, dtype=np.int64))

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (NUM_EVENTS,):
            raise ValueError(f"counts must have shape ({NUM_EVENTS},)")
        if (counts < 0).any():
            raise ValueError("event counts cannot be negative")
        self.counts = counts

    @classmethod
    def from_events(cls, events: Iterable) -> "EventHistogram":
        hist = cls()
        hist.extend(events)
        return hist

    @classmethod
    def from_trajectories(cls, paths: Iterable) -> "EventHistogram":
        hist = cls()
        for path in paths:
            hist.extend(step.event for step in read_trajectory(path))
        return hist

    def add(self, event):
        self.counts[int(JoystickEvent(int(event)))] += 1

    def extend(self, events: Iterable):
        ids = np.asarray([int(JoystickEvent(int(e))) for e in events],
                         dtype=np.int64)
        if ids.size:
            self.counts += np.bincount(ids, minlength=NUM_EVENTS)

    def merge(self, other: "EventHistogram") -> "EventHistogram":
        return EventHistogram(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def proportions(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty histogram has no proportions")
        return self.counts / self.total

    def distinct_events(self) -> list[JoystickEvent]:
        return [JoystickEvent(int(i)) for i in np.nonzero(self.counts)[0]]

    def as_rows(self) -> list[dict]:
        """Plot-ready rows, one per event, in joystick order."""
        total = max(self.total, 1)
        return [{"event": int(e), "name": e.name, "count": int(self.counts[e]),
                 "proportion": float(self.counts[e] / total)}
                for e in JoystickEvent]


@dataclass(frozen=True)
class RewardQuantileFunction:
    """Empirical quantile function of per-step rewards.

    ``rewards`` is sorted ascending and ``proportions[k]`` is the fraction
    of mass at or below ``rewards[k]``, so the final entry is exactly 1.
    """

    rewards: np.ndarray
    proportions: np.ndarray

    def __post_init__(self):
        rewards = np.asarray(self.rewards, dtype=np.float64)
        proportions = np.asarray(self.proportions, dtype=np.float64)
        object.__setattr__(self, "rewards", rewards)
        object.__setattr__(self, "proportions", proportions)
        if rewards.ndim != 1 or rewards.shape != proportions.shape or not rewards.size:
            raise ValueError("rewards and proportions must be equal-length 1-D")
        if (np.diff(rewards) < 0).any() or (np.diff(proportions) < 0).any():
            raise ValueError("quantile function must be nondecreasing")
        if proportions[0] <= 0.0 or proportions[-1] != 1.0:
            raise ValueError("proportions must lie in (0, 1] and end at 1")

    @classmethod
    def from_values(cls, values) -> "RewardQuantileFunction":
        arr = np.sort(np.asarray(values, dtype=np.float64).ravel())
        if not arr.size:
            raise ValueError("no rewards to summarize")
        return cls(rewards=arr,
                   proportions=np.arange(1, arr.size + 1) / arr.size)

    def quantile(self, q: float) -> float:
        """Smallest reward whose cumulative proportion reaches ``q``."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {q}")
        idx = int(np.searchsorted(self.proportions, q, side="left"))
        return float(self.rewards[min(idx, self.rewards.size - 1)])

    @property
    def zero_fraction(self) -> float:
        return float(np.mean(self.rewards == 0.0))

    def as_rows(self) -> list[dict]:
        return [{"proportion": float(p), "reward": float(r)}
                for p, r in zip(self.proportions, self.rewards)]


def reward_quantiles(trajectory_files) -> RewardQuantileFunction:
    """Pool the per-step rewards of trajectory files into a quantile function."""
    paths = [Path(p) for p in trajectory_files]
    if not paths:
        raise ValueError("at least one trajectory file is required")
    rewards: list[float] = []
    for path in paths:
        rewards.extend(step.reward for step in read_trajectory(path))
    if not rewards:
        raise ValueError("trajectory files contain no steps")
    return RewardQuantileFunction.from_values(rewards)


# -- report serialization ----------------------------------------------------

def write_jsonl(path, rows: Iterable[Mapping]) -> int:
    """Write one JSON object per line; returns the number of rows written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(dict(row), sort_keys=True) + "\n")
            count += 1
    return count


def read_jsonl(path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def score_report(table: ScoreTable, resamples: int = DEFAULT_RESAMPLES,
                 level: float = DEFAULT_LEVEL, *, rng=None) -> dict:
    """Aggregate summary of a score table: per-game means, IQM, CI bounds."""
    normalized = table.normalized()
    low, high = stratified_bootstrap_ci(table, resamples, level, rng=rng)
    return {
        "games": list(table.games),
        "runs": table.n_runs,
        "per_game": [
            {"game": game,
             "mean_score": float(table.scores[i].mean()),
             "mean_normalized": float(normalized[i].mean())}
            for i, game in enumerate(table.games)
        ],
        "iqm": table.point_iqm(),
        "ci_low": low,
        "ci_high": high,
        "level": level,
        "resamples": resamples,
    }
