"""Command-line entry point: ``exoretarget <subcommand> ...``.

Angles on the command line and in reports are radians unless a flag says
otherwise. ``EXO_LOG_LEVEL`` (DEBUG, INFO, WARNING, ...) sets diagnostic
verbosity on stderr; all randomness comes from explicit ``--seed`` flags.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from exoretarget.base import BaseParams
from exoretarget.io.dataset import load_episodes, mix_manifest, stats, write_manifest
from exoretarget.io.episode import EpisodeFormatError, read_episode, write_episode
from exoretarget.io.pipeline import build_episode, mirror_episode
from exoretarget.io.streams import (
    StreamFormatError,
    parse_exo_records,
    read_calibration,
    read_jsonl,
    read_odometry,
    write_calibration,
    write_jsonl,
    write_odometry,
)
from exoretarget.robot_model import load_robot_model
from exoretarget.synthetic import SCENARIOS, generate
from exoretarget.trajectory import ValidationThresholds, validate

log = logging.getLogger("exoretarget")

EXO_RAW_NAME = "exo_raw.jsonl"
ODOM_NAME = "odom.jsonl"
CALIB_NAME = "calib.json"
TRUTH_NAME = "truth.json"


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_retarget(args) -> int:
    model = load_robot_model(args.robot)
    recording = parse_exo_records(read_jsonl(args.exo_raw))
    odom = read_odometry(args.odom)
    calib = read_calibration(args.calib) if args.calib else None
    episode = build_episode(
        recording, odom, model, calib, args.rate,
        BaseParams(args.smoothing_alpha, args.standing_height),
        args.task_label, args.source, args.created_at,
    )
    write_episode(episode, args.out)
    log.info("wrote %d frames to %s", len(episode.frames), args.out)
    return 0


def cmd_validate(args) -> int:
    model = load_robot_model(args.robot)
    episode = read_episode(args.episode)
    report = validate(episode.frames, model, ValidationThresholds(args.max_vel, args.max_dt))
    _print_json(report.to_dict(model.joint_names()))
    return 0 if report.is_empty() else 1


def cmd_mirror(args) -> int:
    model = load_robot_model(args.spec)
    write_episode(mirror_episode(read_episode(args.episode), model), args.out)
    return 0


def cmd_mix(args) -> int:
    manifest = mix_manifest(args.teleop_dir, args.exo_dir, args.teleop_n, args.exo_n, args.seed)
    write_manifest(manifest, args.out)
    t = manifest.totals
    log.info("manifest: %d teleop + %d exo episodes (teleop fraction %.4f)",
             t["teleop"].episodes, t["exo"].episodes, manifest.teleop_fraction)
    return 0


def cmd_stats(args) -> int:
    model = load_robot_model(args.robot)
    _print_json(stats(load_episodes(args.input), model, ValidationThresholds(args.max_vel, args.max_dt)))
    return 0


def cmd_gen_synthetic(args) -> int:
    session = generate(args.scenario, args.duration, args.exo_rate, args.odom_rate, load_robot_model(args.robot))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / EXO_RAW_NAME, session.exo_records)
    write_odometry(out / ODOM_NAME, session.odom)
    write_calibration(out / CALIB_NAME, session.calibration)
    truth = {"scenario": session.scenario, "arm_joints": session.arm_truth.tolist(), "base": session.base_truth}
    (out / TRUTH_NAME).write_text(json.dumps(truth) + "\n")
    log.info("wrote %s scenario to %s", args.scenario, out)
    return 0


def _add_thresholds(p) -> None:
    d = ValidationThresholds()
    p.add_argument("--max-vel", type=float, default=d.max_joint_vel, help="joint velocity threshold, rad/s")
    p.add_argument("--max-dt", type=float, default=d.max_dt, help="largest allowed frame gap, s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exoretarget", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("retarget", help="turn raw exoskeleton + odometry streams into an episode")
    p.add_argument("--exo-raw", required=True)
    p.add_argument("--odom", required=True)
    p.add_argument("--calib", help="wrist calibration JSON; optional when the stream flags home frames")
    p.add_argument("--robot", help="robot model JSON (default: shipped placeholder)")
    p.add_argument("--rate", type=float, default=50.0, help="output frame rate, Hz")
    p.add_argument("--out", required=True)
    p.add_argument("--task-label", default="")
    p.add_argument("--source", choices=("exo", "teleop"), default="exo")
    p.add_argument("--smoothing-alpha", type=float, default=BaseParams().smoothing_alpha)
    p.add_argument("--standing-height", type=float, default=BaseParams().standing_height_ref)
    p.add_argument("--created-at", default=None, help="header timestamp; omitted by default to keep output reproducible")
    p.set_defaults(func=cmd_retarget)

    p = sub.add_parser("validate", help="check an episode for feasibility; exit 1 if anything is reported")
    p.add_argument("--episode", required=True)
    p.add_argument("--robot")
    _add_thresholds(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mirror-augment", help="write the x-z mirrored copy of an episode")
    p.add_argument("--episode", required=True)
    p.add_argument("--spec", help="robot model JSON holding the mirror tables")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mirror)

    p = sub.add_parser("mix", help="seeded teleop/exo dataset manifest")
    p.add_argument("--teleop-dir", required=True)
    p.add_argument("--exo-dir", required=True)
    p.add_argument("--teleop-n", type=int, required=True)
    p.add_argument("--exo-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("stats", help="JSON summary of an episode or manifest")
    p.add_argument("--input", required=True)
    p.add_argument("--robot")
    _add_thresholds(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-synthetic", help="write analytic test streams (exo_raw.jsonl, odom.jsonl, calib.json, truth.json)")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--exo-rate", type=float, default=100.0)
    p.add_argument("--odom-rate", type=float, default=100.0)
    p.add_argument("--robot")
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("EXO_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EpisodeFormatError, StreamFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
