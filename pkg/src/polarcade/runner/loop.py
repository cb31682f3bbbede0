"""Seeded single-run training loop with line-delimited logging and resumable
checkpoints.

Log schema (version 1) — one JSON object per line, ``kind`` discriminated:

* ``header``: schema version, seed, full config echo.  First line of a run.
* ``eval``: greedy-policy evaluation — frame, mean return over
  ``eval_episodes`` episodes, per-event counts.  Written at frame 0 and
  after the final frame (a zero-frame budget gets the initial one only).
* ``train``: one per evaluation interval — frame, episodes finished,
  mean return over episodes completed in the window, the latest losses,
  the exploration rate (when the agent has a schedule), and the window's
  per-event counts.

Records carry no wall-clock fields, so a (config, seed) pair reproduces its
log byte-for-byte.  Checkpoints persist the agent (parameters, optimizer
moments, generator states, counters) plus a cursor file; resuming refills
the replay buffer from fresh experience, which is the one documented
departure from bit-exact continuation.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .. import eval as pe
from ..agents import DQNAgent, SACAgent, SACDAgent
from ..envcore import TrajectoryRecorder, WrappedEnv
from ..games import make_game
from .config import ExperimentConfig

LOG_SCHEMA = 1


def episode_seed(run_seed: int, episode: int, *, evaluation: bool = False) -> int:
    """Stateless per-episode seed: stable across resumes and eval calls."""
    stream = 1_000_000_000 if evaluation else 0
    return int(np.random.SeedSequence([run_seed, stream + episode])
               .generate_state(1)[0])


def build_env(config: ExperimentConfig) -> WrappedEnv:
    return WrappedEnv(make_game(config.game), config.wrapper_for_run())


def build_agent(config: ExperimentConfig, obs_shape, seed: int):
    events = None
    if config.minimal_set:
        events = sorted(make_game(config.game).spec.minimal_set)
    if config.agent == "sac":
        return SACAgent(obs_shape, encoder_kind=config.encoder,
                        hyper=config.hyper, exploration=config.exploration,
                        seed=seed)
    if config.agent == "sacd":
        return SACDAgent(obs_shape, events=events, encoder_kind=config.encoder,
                         hyper=config.hyper, exploration=config.exploration,
                         seed=seed)
    return DQNAgent(obs_shape, events=events, encoder_kind=config.encoder,
                    hyper=config.hyper, seed=seed)


def evaluate_greedy(config: ExperimentConfig, agent, run_seed: int,
                    trajectory_path=None) -> tuple[float, pe.EventHistogram]:
    """Mean greedy return over ``eval_episodes`` fresh episodes."""
    env = build_env(config)
    hist = pe.EventHistogram()
    returns = []
    recorder = (TrajectoryRecorder(trajectory_path)
                if trajectory_path is not None else None)
    try:
        step_index = 0
        for k in range(config.eval_episodes):
            obs = env.reset(episode_seed(run_seed, k, evaluation=True))
            total = 0.0
            while True:
                action = agent.greedy_action(obs)
                if config.continuous:
                    result = env.step_continuous(action)
                else:
                    result = env.step_discrete(action)
                obs = result.observation
                total += result.reward
                hist.add(result.info["event"])
                if recorder is not None:
                    recorder.record(result, step_index)
                step_index += 1
                if result.terminated or result.truncated:
                    break
            returns.append(total)
    finally:
        if recorder is not None:
            recorder.close()
    return float(np.mean(returns)), hist


@dataclasses.dataclass(frozen=True)
class RunResult:
    seed: int
    frames: int
    episodes: int
    final_score: float
    normalized_score: float
    out_dir: Path


def _losses_as_floats(losses: dict) -> dict:
    return {k: float(v) for k, v in losses.items()}


def train_single(config: ExperimentConfig, seed: int, out_dir,
                 *, resume: bool = False) -> RunResult:
    """Run one seed to the frame budget, writing logs/checkpoints/summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "log.jsonl"
    ckpt_path = out_dir / "checkpoint.ckpt"
    state_path = out_dir / "run_state.json"

    env = build_env(config)
    agent = build_agent(config, env.observation_shape, seed)

    frames = 0
    episodes = 0
    resuming = resume and state_path.is_file() and ckpt_path.is_file()
    if resuming:
        agent.load(ckpt_path)
        state = json.loads(state_path.read_text())
        frames, episodes = state["frames"], state["episodes"]

    spec = make_game(config.game).spec
    schedule = config.hyper.epsilon
    track_epsilon = config.agent == "dqn" or config.exploration == "epsilon"

    final_score = None
    with open(log_path, "a" if resuming else "w", encoding="utf-8") as log:
        def emit(record: dict):
            log.write(json.dumps(record, sort_keys=True) + "\n")

        if not resuming:
            emit({"kind": "header", "schema": LOG_SCHEMA, "seed": seed,
                  "config": config.summary()})
            final_score, hist = evaluate_greedy(config, agent, seed)
            emit({"kind": "eval", "frame": 0, "eval_return": final_score,
                  "eval_episodes": config.eval_episodes,
                  "event_counts": hist.counts.tolist()})

        def save_cursor():
            agent.save(ckpt_path)
            state_path.write_text(json.dumps(
                {"frames": frames, "episodes": episodes, "seed": seed},
                sort_keys=True))

        if config.frame_budget > 0:
            window_returns: list[float] = []
            window_hist = pe.EventHistogram()
            next_log = (frames // config.eval_interval + 1) * config.eval_interval
            episode_return = 0.0
            obs = env.reset(episode_seed(seed, episodes))
            action = agent.begin_episode(obs, frames)
            while frames < config.frame_budget:
                before = env.frames_elapsed
                if config.continuous:
                    result = env.step_continuous(action)
                else:
                    result = env.step_discrete(action)
                frames += env.frames_elapsed - before
                episode_return += result.reward
                window_hist.add(result.info["event"])
                action = agent.step(result.reward, result.observation,
                                    result.terminated, result.truncated, frames)
                if action is None:
                    window_returns.append(episode_return)
                    episodes += 1
                    episode_return = 0.0
                    obs = env.reset(episode_seed(seed, episodes))
                    action = agent.begin_episode(obs, frames)
                if frames >= next_log or frames >= config.frame_budget:
                    record = {
                        "kind": "train", "frame": frames, "episodes": episodes,
                        "mean_return": (float(np.mean(window_returns))
                                        if window_returns else None),
                        "losses": _losses_as_floats(agent.last_losses),
                        "event_counts": window_hist.counts.tolist(),
                    }
                    if track_epsilon and schedule is not None:
                        record["epsilon"] = schedule.value(frames)
                    emit(record)
                    window_returns, window_hist = [], pe.EventHistogram()
                    next_log += config.eval_interval
                    save_cursor()

            final_score, final_hist = evaluate_greedy(
                config, agent, seed, trajectory_path=out_dir / "eval.traj")
            emit({"kind": "eval", "frame": frames, "eval_return": final_score,
                  "eval_episodes": config.eval_episodes,
                  "event_counts": final_hist.counts.tolist()})
        if final_score is None:  # resumed run that was already past its budget
            final_score, _ = evaluate_greedy(config, agent, seed)
        save_cursor()

    normalized = pe.normalize(final_score, spec.random_anchor,
                              spec.oracle_anchor)
    summary = {
        "schema": LOG_SCHEMA,
        "game": config.game,
        "agent": config.agent,
        "seed": seed,
        "frames": frames,
        "episodes": episodes,
        "final_score": final_score,
        "random_anchor": spec.random_anchor,
        "oracle_anchor": spec.oracle_anchor,
        "normalized_score": float(normalized),
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, sort_keys=True))
    return RunResult(seed=seed, frames=frames, episodes=episodes,
                     final_score=final_score,
                     normalized_score=float(normalized), out_dir=out_dir)
