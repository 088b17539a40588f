"""Sensor-stream file formats consumed by the pipeline.

Exoskeleton raw stream, JSON Lines, one record per sample::

    {"t": 0.01,
     "left":  {"encoders": [...], "elbow": 0.3,
               "imu_wrist": [w, x, y, z], "imu_forearm": [w, x, y, z]},
     "right": {...},
     "hand": [12 active finger angles, left hand first],
     "home": true,            # optional: operator holds the home pose
     "cams": ["head/000001"]} # optional camera frame identifiers

Odometry, JSON Lines: ``{"t": ..., "q": [w, x, y, z], "p": [x, y, z]}``.

Calibration, JSON: ``{"left": {"q_w0": [...], "q_f0": [...]}, "right": {...}}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from exoretarget.base import OdomSample, odom_from_records, odom_to_record
from exoretarget.retarget import ExoArmFrame, WristCalibration, calibrate_home
from exoretarget.robot_model import SIDES


class StreamFormatError(ValueError):
    pass


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise StreamFormatError(f"{path}: line {lineno}: {exc.msg}") from None
    return out


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r, separators=(",", ":"), allow_nan=False))
            fh.write("\n")


@dataclass(frozen=True, eq=False)
class ExoRecording:
    times: np.ndarray
    arms: dict[str, list[ExoArmFrame]]
    hands: np.ndarray  # (N, 12)
    home: np.ndarray  # (N,) bool
    cams: list[tuple[str, ...]] | None


def _arm_frame(t: float, r: dict) -> ExoArmFrame:
    return ExoArmFrame(t, tuple(r["encoders"]), r["elbow"], r["imu_wrist"], r["imu_forearm"])


def parse_exo_records(records: Sequence[dict]) -> ExoRecording:
    if not records:
        raise StreamFormatError("exoskeleton stream is empty")
    times, hands, home, cams = [], [], [], []
    arms = {side: [] for side in SIDES}
    for k, r in enumerate(records):
        try:
            t = float(r["t"])
            for side in SIDES:
                arms[side].append(_arm_frame(t, r[side]))
            hand = [float(v) for v in r["hand"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StreamFormatError(f"exoskeleton record {k}: {exc}") from None
        if len(hand) != 12:
            raise StreamFormatError(f"exoskeleton record {k}: expected 12 hand angles, got {len(hand)}")
        if times and t <= times[-1]:
            raise StreamFormatError(f"exoskeleton record {k}: timestamps must be strictly increasing")
        times.append(t)
        hands.append(hand)
        home.append(bool(r.get("home", False)))
        cams.append(tuple(r["cams"]) if r.get("cams") is not None else None)
    cam_list = cams if all(c is not None for c in cams) else None
    return ExoRecording(np.array(times), arms, np.array(hands), np.array(home), cam_list)


def exo_record(t: float, arms: dict[str, ExoArmFrame], hand: Sequence[float], home: bool = False,
               cams: Sequence[str] | None = None) -> dict:
    r = {"t": t}
    for side in SIDES:
        f = arms[side]
        r[side] = {
            "encoders": list(f.encoder_angles),
            "elbow": f.elbow_angle,
            "imu_wrist": f.imu_wrist.as_list(),
            "imu_forearm": f.imu_forearm.as_list(),
        }
    r["hand"] = [float(v) for v in hand]
    if home:
        r["home"] = True
    if cams is not None:
        r["cams"] = list(cams)
    return r


def read_odometry(path: str | Path) -> list[OdomSample]:
    try:
        return odom_from_records(read_jsonl(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"{path}: bad odometry record ({exc})") from None


def write_odometry(path: str | Path, samples: Sequence[OdomSample]) -> None:
    write_jsonl(path, (odom_to_record(s) for s in samples))


def read_calibration(path: str | Path) -> dict[str, WristCalibration]:
    data = json.loads(Path(path).read_text())
    try:
        return {side: WristCalibration.from_dict(data[side]) for side in SIDES}
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"{path}: bad calibration ({exc})") from None


def write_calibration(path: str | Path, calib: dict[str, WristCalibration]) -> None:
    Path(path).write_text(json.dumps({side: calib[side].to_dict() for side in SIDES}, indent=2) + "\n")


def calibration_schedule(frames: Sequence[ExoArmFrame], home: Sequence[bool],
                         initial: WristCalibration | None) -> list[WristCalibration]:
    """Calibration in force at every frame.

    Each contiguous run of home-flagged frames is an explicit recalibration
    event: its frames are averaged with ``calibrate_home`` and the result
    applies from the first frame of the run onward.
    """
    out: list[WristCalibration] = []
    current = initial
    k = 0
    n = len(frames)
    while k < n:
        if home[k]:
            end = k
            while end < n and home[end]:
                end += 1
            current = calibrate_home(frames[k:end])
            out.extend([current] * (end - k))
            k = end
            continue
        if current is None:
            raise StreamFormatError(f"frame {k} precedes any calibration; pass a calibration file or flag home frames")
        out.append(current)
        k += 1
    return out
