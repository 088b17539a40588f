"""Episode files: one JSON header line, then one JSON line per frame.

Header keys, in order::

    format, format_version, robot_model_name, source, task_label,
    created_at, mirrored, frame_count

Frame keys, in order::

    t     timestamp, s
    arm   14 arm angles, rad
    hand  12 active hand angles, rad
    cmd   [v_x, omega_z, h]
    q     base orientation [w, x, y, z]
    p     base position [x, y, z], m
    cams  camera frame identifiers or null

Floats are written with Python's shortest round-trip repr, so reading a
written episode returns bit-identical values (negative zero included).
Non-finite numbers are rejected on write.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

from exoretarget.base import BaseCommand
from exoretarget.kinematics import Pose6D, UnitQuaternion
from exoretarget.trajectory import WholeBodyFrame

FORMAT_NAME = "exo-episode"
FORMAT_VERSION = 1
SOURCES = ("teleop", "exo")


class EpisodeFormatError(ValueError):
    """Base class for unreadable or inconsistent episode files."""


class VersionMismatchError(EpisodeFormatError):
    pass


class MalformedFrameError(EpisodeFormatError):
    pass


class TruncatedEpisodeError(EpisodeFormatError):
    pass


@dataclass(frozen=True)
class EpisodeHeader:
    robot_model_name: str
    source: str
    task_label: str = ""
    created_at: str | None = None
    mirrored: bool = False
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"episode source must be one of {SOURCES}, got {self.source!r}")
        if self.format_version != FORMAT_VERSION:
            raise VersionMismatchError(f"unsupported episode format_version {self.format_version}")


@dataclass(frozen=True)
class Episode:
    header: EpisodeHeader
    frames: tuple[WholeBodyFrame, ...] = field(default_factory=tuple)

    def __post_init__(self):
        frames = tuple(self.frames)
        for k in range(1, len(frames)):
            if frames[k].timestamp < frames[k - 1].timestamp:
                raise ValueError(f"episode frames must be time-ordered (frame {k})")
        object.__setattr__(self, "frames", frames)

    @property
    def duration(self) -> float:
        return self.frames[-1].timestamp - self.frames[0].timestamp if self.frames else 0.0

    def with_frames(self, frames: Sequence[WholeBodyFrame], **header_changes) -> Episode:
        return Episode(replace(self.header, **header_changes), tuple(frames))


def frame_to_record(f: WholeBodyFrame) -> dict:
    return {
        "t": f.timestamp,
        "arm": list(f.arm_joints),
        "hand": list(f.hand_joints),
        "cmd": f.base_command.as_list(),
        "q": f.base_pose.rotation.as_list(),
        "p": list(f.base_pose.translation),
        "cams": list(f.camera_refs) if f.camera_refs is not None else None,
    }


def record_to_frame(r: dict) -> WholeBodyFrame:
    return WholeBodyFrame(
        r["t"],
        tuple(r["arm"]),
        tuple(r["hand"]),
        BaseCommand(*r["cmd"]),
        Pose6D(UnitQuaternion.from_array(r["q"]), tuple(r["p"])),
        tuple(r["cams"]) if r.get("cams") is not None else None,
    )


def _header_record(h: EpisodeHeader, frame_count: int) -> dict:
    return {
        "format": FORMAT_NAME,
        "format_version": h.format_version,
        "robot_model_name": h.robot_model_name,
        "source": h.source,
        "task_label": h.task_label,
        "created_at": h.created_at,
        "mirrored": h.mirrored,
        "frame_count": frame_count,
    }


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def episode_lines(episode: Episode) -> Iterator[str]:
    yield _dumps(_header_record(episode.header, len(episode.frames)))
    for f in episode.frames:
        yield _dumps(frame_to_record(f))


def write_episode(episode: Episode, path: str | Path) -> None:
    """Write atomically: a temporary sibling file is renamed over ``path``."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for line in episode_lines(episode):
            fh.write(line)
            fh.write("\n")
    os.replace(tmp, path)


def _parse_header(line: str, path) -> tuple[EpisodeHeader, int]:
    try:
        h = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EpisodeFormatError(f"{path}: header is not valid JSON ({exc.msg})") from None
    if not isinstance(h, dict) or h.get("format") != FORMAT_NAME:
        raise EpisodeFormatError(f"{path}: not an {FORMAT_NAME} file")
    if h.get("format_version") != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: format_version {h.get('format_version')!r} is not supported (expected {FORMAT_VERSION})"
        )
    count = h.get("frame_count")
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise EpisodeFormatError(f"{path}: header frame_count must be a non-negative integer")
    try:
        header = EpisodeHeader(
            h["robot_model_name"], h["source"], h.get("task_label", ""), h.get("created_at"), bool(h.get("mirrored", False))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise EpisodeFormatError(f"{path}: bad header ({exc})") from None
    return header, count


def read_header(path: str | Path) -> tuple[EpisodeHeader, int]:
    try:
        with open(path, encoding="utf-8") as fh:
            return _parse_header(fh.readline(), path)
    except UnicodeDecodeError:
        raise EpisodeFormatError(f"{path}: not UTF-8 text") from None


def read_episode(path: str | Path) -> Episode:
    """Read and fully validate an episode; raises EpisodeFormatError subclasses."""
    try:
        return _read_episode(path)
    except UnicodeDecodeError:
        raise EpisodeFormatError(f"{path}: not UTF-8 text") from None


def _read_episode(path) -> Episode:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise EpisodeFormatError(f"{path}: empty file")
        header, count = _parse_header(first, path)
        frames = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if not line.endswith("\n"):
                # a final line without newline is a write that stopped midway
                raise TruncatedEpisodeError(f"{path}: line {lineno} is incomplete")
            try:
                frames.append(record_to_frame(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedFrameError(f"{path}: line {lineno}: malformed frame ({exc})") from None
    if len(frames) < count:
        raise TruncatedEpisodeError(f"{path}: header announces {count} frames, found {len(frames)}")
    if len(frames) > count:
        raise MalformedFrameError(f"{path}: header announces {count} frames, found {len(frames)}")
    try:
        return Episode(header, tuple(frames))
    except ValueError as exc:
        raise MalformedFrameError(f"{path}: {exc}") from None
