"""Command-line front end: ``train``, ``sweep``, ``report``, ``anchors``,
and ``mapviz`` subcommands.

Exit codes: 0 on success, 1 for configuration problems (bad flags, bad
config files, invalid values — nothing has run yet), 2 for failures during
execution.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import eval as pe
from ..games import (ANCHOR_EPISODES, ANCHOR_SEED, GAME_REGISTRY, make_game,
                     oracle_anchor, random_anchor)
from ..joystick import ALL_EVENTS, Threshold, map_events_grid
from .config import (SWEEP_AXES, ConfigError, ExperimentConfig, load_config,
                     parse_seed_list)
from .loop import LOG_SCHEMA, RunResult, train_single


# ---------------------------------------------------------------------------
# multi-seed orchestration
# ---------------------------------------------------------------------------

def _train_worker(payload) -> RunResult:
    config, seed, out_dir, resume = payload
    return train_single(config, seed, out_dir, resume=resume)


def run_seeds(config: ExperimentConfig, out_root, *, workers: int = 1,
              resume: bool = False) -> list[RunResult]:
    """Train every configured seed (serially or across worker processes) and
    write the combined ``scores.json`` manifest."""
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    jobs = [(config, seed, out_root / f"seed_{seed}", resume)
            for seed in config.seeds]
    if workers <= 1:
        results = [_train_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_train_worker, jobs))

    spec = make_game(config.game).spec
    manifest = {
        "schema": LOG_SCHEMA,
        "kind": "train",
        "game": config.game,
        "agent": config.agent,
        "encoder": config.encoder,
        "exploration": config.exploration,
        "tau": config.tau,
        "seeds": [r.seed for r in results],
        "final_scores": [r.final_score for r in results],
        "normalized_scores": [r.normalized_score for r in results],
        "anchors": {"random": spec.random_anchor,
                    "oracle": spec.oracle_anchor},
        "run_dirs": [r.out_dir.name for r in results],
    }
    (out_root / "scores.json").write_text(json.dumps(manifest, sort_keys=True))
    return results


def _format_axis_value(axis: str, value) -> str:
    return f"{value:g}" if axis == "tau" else str(value)


def run_sweep(config: ExperimentConfig, axis: str, values, out_root, *,
              workers: int = 1, resume: bool = False) -> dict:
    """Run the cross product (axis value x seed) and write the sweep manifest."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    if axis == "tau":
        try:
            values = [float(v) for v in values]
        except ValueError as exc:
            raise ConfigError(f"bad tau value: {exc}") from None
    else:
        values = [str(v) for v in values]
    if len(set(values)) != len(values):
        raise ConfigError(f"duplicate sweep values: {values}")
    configs = [config.with_axis_value(axis, v) for v in values]  # validate all

    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    dirs = []
    for value, cfg in zip(values, configs):
        label = f"{axis}_{_format_axis_value(axis, value)}"
        run_seeds(cfg, out_root / label, workers=workers, resume=resume)
        dirs.append(label)
    manifest = {
        "schema": LOG_SCHEMA,
        "kind": "sweep",
        "axis": axis,
        "game": config.game,
        "agent": config.agent,
        "seeds": list(config.seeds),
        "values": values,
        "dirs": dirs,
    }
    (out_root / "sweep_summary.json").write_text(
        json.dumps(manifest, sort_keys=True))
    return manifest


# ---------------------------------------------------------------------------
# report generation
# ---------------------------------------------------------------------------

def _load_manifest(run_dir: Path) -> dict:
    path = run_dir / "scores.json"
    if not path.is_file():
        raise ConfigError(f"{run_dir} has no scores.json (not a train output?)")
    return json.loads(path.read_text())


def _collect_curves(run_dir: Path, game: str) -> list[dict]:
    rows = []
    for seed_dir in sorted(run_dir.glob("seed_*")):
        log_path = seed_dir / "log.jsonl"
        if not log_path.is_file():
            continue
        for record in pe.read_jsonl(log_path):
            if record.get("kind") == "train":
                rows.append({"game": game, "seed": int(seed_dir.name[5:]),
                             "kind": "train", "frame": record["frame"],
                             "mean_return": record["mean_return"],
                             "epsilon": record.get("epsilon")})
            elif record.get("kind") == "eval":
                rows.append({"game": game, "seed": int(seed_dir.name[5:]),
                             "kind": "eval", "frame": record["frame"],
                             "eval_return": record["eval_return"]})
    return rows


def _collect_final_histogram(run_dir: Path) -> pe.EventHistogram:
    hist = pe.EventHistogram()
    for seed_dir in sorted(run_dir.glob("seed_*")):
        log_path = seed_dir / "log.jsonl"
        if not log_path.is_file():
            continue
        last_eval = None
        for record in pe.read_jsonl(log_path):
            if record.get("kind") == "eval":
                last_eval = record
        if last_eval is not None:
            hist = hist.merge(pe.EventHistogram(
                np.asarray(last_eval["event_counts"], dtype=np.int64)))
    return hist


def report_train_runs(run_dirs, out_dir, *, resamples: int = pe.DEFAULT_RESAMPLES,
                      level: float = pe.DEFAULT_LEVEL, seed: int = 0) -> dict:
    """Aggregate one or more single-game train outputs into a report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifests = [(_load_manifest(Path(d)), Path(d)) for d in run_dirs]
    games = [m["game"] for m, _ in manifests]
    if len(set(games)) != len(games):
        raise ConfigError(f"duplicate games across run dirs: {games}")

    run_counts = {len(m["final_scores"]) for m, _ in manifests}
    complete = len(run_counts) == 1
    per_game = [{
        "game": m["game"],
        "runs": len(m["final_scores"]),
        "mean_score": float(np.mean(m["final_scores"])),
        "mean_normalized": float(np.mean(m["normalized_scores"])),
    } for m, _ in manifests]

    if complete:
        table = pe.ScoreTable(
            games=tuple(games),
            scores=np.array([m["final_scores"] for m, _ in manifests]),
            anchors={m["game"]: (m["anchors"]["random"], m["anchors"]["oracle"])
                     for m, _ in manifests})
        report = pe.score_report(table, resamples, level, rng=seed)
        report["partial"] = False
    else:
        report = {"games": games, "per_game": per_game, "partial": True,
                  "iqm": None, "ci_low": None, "ci_high": None}

    report["schema"] = LOG_SCHEMA
    (out_dir / "report.json").write_text(json.dumps(report, sort_keys=True))

    curve_rows = []
    event_rows = []
    quantile_rows = []
    for manifest, run_dir in manifests:
        game = manifest["game"]
        curve_rows.extend(_collect_curves(run_dir, game))
        hist = _collect_final_histogram(run_dir)
        if hist.total:
            event_rows.extend({"game": game, **row} for row in hist.as_rows())
        trajectories = sorted(run_dir.glob("seed_*/eval.traj"))
        if trajectories:
            qf = pe.reward_quantiles(trajectories)
            quantile_rows.extend({"game": game, **row} for row in qf.as_rows())
    pe.write_jsonl(out_dir / "learning_curves.jsonl", curve_rows)
    pe.write_jsonl(out_dir / "event_histograms.jsonl", event_rows)
    pe.write_jsonl(out_dir / "reward_quantiles.jsonl", quantile_rows)
    return report


def report_sweep(sweep_dir, out_dir, *, resamples: int = pe.DEFAULT_RESAMPLES,
                 level: float = pe.DEFAULT_LEVEL, seed: int = 0) -> dict:
    """Per-axis-value aggregates for a sweep, ordered along the axis."""
    sweep_dir = Path(sweep_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = json.loads((sweep_dir / "sweep_summary.json").read_text())
    axis = manifest["axis"]

    pairs = sorted(zip(manifest["values"], manifest["dirs"]),
                   key=lambda pair: pair[0])
    entries = []
    for value, label in pairs:
        scores = _load_manifest(sweep_dir / label)
        normalized = np.asarray(scores["normalized_scores"], dtype=np.float64)
        entry = {
            "axis": axis,
            "value": value,
            "dir": label,
            "runs": int(normalized.size),
            "mean_normalized": float(normalized.mean()),
            "iqm": None, "ci_low": None, "ci_high": None,
        }
        if normalized.size >= 4:
            entry["iqm"] = pe.iqm(normalized)
            table = pe.ScoreTable(
                games=(scores["game"],), scores=normalized[None, :],
                anchors={scores["game"]: (0.0, 1.0)})
            entry["ci_low"], entry["ci_high"] = pe.stratified_bootstrap_ci(
                table, resamples, level, rng=seed)
        entries.append(entry)

    report = {"schema": LOG_SCHEMA, "kind": "sweep_report", "axis": axis,
              "game": manifest["game"], "agent": manifest["agent"],
              "seeds": manifest["seeds"], "entries": entries}
    (out_dir / "report.json").write_text(json.dumps(report, sort_keys=True))
    pe.write_jsonl(out_dir / "sweep_entries.jsonl", entries)
    return report


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_train(args) -> int:
    seeds = parse_seed_list(args.seeds) if args.seeds else None
    config = load_config(args.config, seeds=seeds)
    results = run_seeds(config, args.out, workers=args.workers,
                        resume=args.resume)
    for r in results:
        print(f"seed {r.seed}: frames={r.frames} episodes={r.episodes} "
              f"final={r.final_score:.3f} normalized={r.normalized_score:.3f}")
    return 0


def _cmd_sweep(args) -> int:
    seeds = parse_seed_list(args.seeds) if args.seeds else None
    config = load_config(args.config, seeds=seeds)
    manifest = run_sweep(config, args.axis, args.values, args.out,
                         workers=args.workers, resume=args.resume)
    print(f"swept {manifest['axis']} over {manifest['values']} "
          f"({len(manifest['seeds'])} seeds each)")
    return 0


def _cmd_report(args) -> int:
    if args.resamples < 1_000:
        raise ConfigError("reports need at least 1,000 bootstrap resamples")
    if not 0.0 < args.level < 1.0:
        raise ConfigError(f"confidence level must be in (0, 1), got {args.level}")
    dirs = [Path(d) for d in args.runs]
    for d in dirs:
        if not d.is_dir():
            raise ConfigError(f"run directory not found: {d}")
    if len(dirs) == 1 and (dirs[0] / "sweep_summary.json").is_file():
        report = report_sweep(dirs[0], args.out, resamples=args.resamples,
                              level=args.level, seed=args.seed)
        for entry in report["entries"]:
            print(f"{report['axis']}={entry['value']}: "
                  f"mean normalized={entry['mean_normalized']:.3f}")
    else:
        report = report_train_runs(dirs, args.out, resamples=args.resamples,
                                   level=args.level, seed=args.seed)
        if report["partial"]:
            print("WARNING: unequal run counts; partial report without "
                  "pooled IQM/CI")
        else:
            print(f"IQM={report['iqm']:.3f} "
                  f"CI=[{report['ci_low']:.3f}, {report['ci_high']:.3f}]")
    return 0


def _cmd_anchors(args) -> int:
    unknown = [g for g in args.games if g not in GAME_REGISTRY]
    if unknown:
        raise ConfigError(f"unknown game(s) {unknown}; available: "
                          f"{sorted(GAME_REGISTRY)}")
    if args.episodes < 100:
        raise ConfigError("anchor estimates need at least 100 episodes")
    rows = []
    for name in args.games:
        game = make_game(name)
        measured_random = random_anchor(game, args.episodes, args.seed)
        measured_oracle = oracle_anchor(game, args.episodes, args.seed)
        rows.append({
            "game": name,
            "episodes": args.episodes,
            "seed": args.seed,
            "random_anchor": measured_random,
            "oracle_anchor": measured_oracle,
            "frozen_random": game.spec.random_anchor,
            "frozen_oracle": game.spec.oracle_anchor,
        })
        print(f"{name}: random={measured_random:.3f} "
              f"oracle={measured_oracle:.3f} "
              f"(frozen {game.spec.random_anchor:.3f}/"
              f"{game.spec.oracle_anchor:.3f})")
    if args.out:
        pe.write_jsonl(args.out, rows)
    return 0


def _cmd_mapviz(args) -> int:
    try:
        Threshold(args.tau)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.resolution < 16:
        raise ConfigError("resolution must be at least 16")
    if not 0.0 <= args.fire <= 1.0:
        raise ConfigError(f"fire must be in [0, 1], got {args.fire}")
    axis = np.linspace(-1.0, 1.0, args.resolution)
    x, y = np.meshgrid(axis, axis)
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    ids = map_events_grid(r, theta, np.float64(args.fire), args.tau)
    inside = r <= 1.0
    rows = [{"x": float(xv), "y": float(yv), "event": int(e),
             "name": ALL_EVENTS[int(e)].name}
            for xv, yv, e in zip(x[inside], y[inside], ids[inside])]
    pe.write_jsonl(args.out, rows)
    print(f"wrote {len(rows)} grid points at tau={args.tau} to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarcade",
        description="Train, sweep, and analyze continuous-joystick arcade "
                    "agents.",
        exit_on_error=False)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train one config over its seeds",
                           exit_on_error=False)
    train.add_argument("--config", required=True, help="experiment file")
    train.add_argument("--out", required=True, help="output directory")
    train.add_argument("--seeds", help="comma-separated seed override")
    train.add_argument("--workers", type=int, default=1)
    train.add_argument("--resume", action="store_true",
                       help="continue from per-seed checkpoints if present")
    train.set_defaults(func=_cmd_train)

    sweep = sub.add_parser("sweep", help="train across one comparison axis",
                           exit_on_error=False)
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep.add_argument("--values", required=True, nargs="+")
    sweep.add_argument("--seeds", help="comma-separated seed override")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--resume", action="store_true")
    sweep.set_defaults(func=_cmd_sweep)

    report = sub.add_parser("report",
                            help="aggregate train/sweep outputs into tables "
                                 "and plot-ready series",
                            exit_on_error=False)
    report.add_argument("--runs", required=True, nargs="+",
                        help="train output dirs (or one sweep dir)")
    report.add_argument("--out", required=True)
    report.add_argument("--resamples", type=int, default=pe.DEFAULT_RESAMPLES)
    report.add_argument("--level", type=float, default=pe.DEFAULT_LEVEL)
    report.add_argument("--seed", type=int, default=0,
                        help="bootstrap seed")
    report.set_defaults(func=_cmd_report)

    anchors = sub.add_parser("anchors",
                             help="measure random/oracle normalization "
                                  "anchors",
                             exit_on_error=False)
    anchors.add_argument("--games", required=True, nargs="+")
    anchors.add_argument("--episodes", type=int, default=ANCHOR_EPISODES)
    anchors.add_argument("--seed", type=int, default=ANCHOR_SEED)
    anchors.add_argument("--out", help="JSONL output file")
    anchors.set_defaults(func=_cmd_anchors)

    mapviz = sub.add_parser("mapviz",
                            help="emit the threshold-region grid as "
                                 "plot-ready data",
                            exit_on_error=False)
    mapviz.add_argument("--tau", type=float, default=0.5)
    mapviz.add_argument("--fire", type=float, default=0.0)
    mapviz.add_argument("--resolution", type=int, default=201)
    mapviz.add_argument("--out", required=True)
    mapviz.set_defaults(func=_cmd_mapviz)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse internals: --help is 0, errors are not
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2
