"""Put multi-rate streams on one clock, assemble whole-body frames and check feasibility.

Interpolation mode per channel is fixed by the frame format:

==============  =======
channel         mode
==============  =======
arm joints      linear
hand joints     linear
base command    linear
base position   linear
base rotation   slerp
camera refs     hold
==============  =======
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from exoretarget.base import BaseCommand, OdomSample
from exoretarget.kinematics import Pose6D, UnitQuaternion, slerp

ARM_DOF = 14
HAND_DOF = 12
MODES = ("linear", "slerp", "hold")
# Target times this close to a sample time take the sample's value exactly.
SNAP_TOL = 1e-9


class ResampleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Channel:
    """A timestamped channel.

    ``values`` is an (N, k) float array for ``linear``, (N, 4) ``[w, x, y, z]``
    for ``slerp`` and any length-N sequence for ``hold``.
    """

    times: np.ndarray
    values: Any
    mode: str = "linear"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown interpolation mode {self.mode!r}; expected one of {MODES}")
        t = np.asarray(self.times, dtype=float).reshape(-1)
        object.__setattr__(self, "times", t)
        if self.mode == "hold":
            vals = list(self.values)
        else:
            vals = np.asarray(self.values, dtype=float)
            if vals.ndim == 1:
                vals = vals.reshape(-1, 1)
            if self.mode == "slerp" and vals.shape[1:] != (4,):
                raise ValueError(f"slerp channel needs (N, 4) quaternions, got {vals.shape}")
        if len(vals) != t.shape[0]:
            raise ValueError(f"channel has {t.shape[0]} times but {len(vals)} values")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True, eq=False)
class Resampled:
    times: np.ndarray
    values: Any
    # True where a target fell outside the stream span and the end value was held
    extrapolated: np.ndarray


def _locate(times: np.ndarray, targets: np.ndarray):
    """Index of the left neighbour, snapped exact hits, and interpolation weight."""
    n = times.shape[0]
    idx = np.searchsorted(times, targets, side="right") - 1
    idx = np.clip(idx, 0, n - 1)
    exact = np.full(targets.shape[0], -1)
    scale = np.maximum(1.0, np.abs(targets))
    for cand in (idx, np.minimum(idx + 1, n - 1)):
        hit = (exact < 0) & (np.abs(times[cand] - targets) <= SNAP_TOL * scale)
        exact[hit] = cand[hit]
    left = np.clip(idx, 0, max(n - 2, 0))
    if n > 1:
        w = (targets - times[left]) / (times[left + 1] - times[left])
        w = np.clip(w, 0.0, 1.0)
    else:
        w = np.zeros(targets.shape[0])
    return left, exact, w


def resample(stream: Channel, target_times: Sequence[float], mode: str | None = None) -> Resampled:
    """Evaluate ``stream`` at ``target_times``.

    Targets before the first or after the last sample are allowed by at most
    one sample period (the first or last interval respectively); they hold
    the end value and are flagged in ``extrapolated``.
    """
    mode = mode or stream.mode
    if mode not in MODES:
        raise ValueError(f"unknown interpolation mode {mode!r}")
    if len(stream) == 0:
        raise ResampleError("cannot resample an empty stream")
    t = stream.times
    if np.any(np.diff(t) <= 0):
        raise ResampleError("stream timestamps must be strictly increasing")
    targets = np.asarray(target_times, dtype=float).reshape(-1)
    if not np.all(np.isfinite(targets)):
        raise ResampleError("target times must be finite")
    if np.any(np.diff(targets) < 0):
        raise ResampleError("target times must be sorted")

    n = len(stream)
    first_period = t[1] - t[0] if n > 1 else 0.0
    last_period = t[-1] - t[-2] if n > 1 else 0.0
    tol = SNAP_TOL * np.maximum(1.0, np.abs(targets))
    before = targets < t[0] - tol
    after = targets > t[-1] + tol
    too_far = (before & (t[0] - targets > first_period + tol)) | (after & (targets - t[-1] > last_period + tol))
    if np.any(too_far):
        bad = targets[too_far][0]
        raise ResampleError(f"target time {bad} lies more than one sample period outside [{t[0]}, {t[-1]}]")
    extrapolated = before | after

    left, exact, w = _locate(t, targets)
    w = np.where(before, 0.0, np.where(after, 1.0, w))
    if n == 1:
        exact[:] = 0

    vals = stream.values
    if mode == "hold":
        # zero-order hold: latest sample at or before the target
        idx = np.where(exact >= 0, exact, np.where(w >= 1.0, np.minimum(left + 1, n - 1), left))
        out = [vals[i] for i in idx]
    elif mode == "linear":
        vals = np.asarray(vals, dtype=float)
        v0 = vals[left]
        v1 = vals[np.minimum(left + 1, n - 1)]
        ww = w[:, None]
        out = v0 + ww * (v1 - v0)
        out = np.clip(out, np.minimum(v0, v1), np.maximum(v0, v1))
        out = np.where((w >= 1.0)[:, None], v1, out)
        hit = exact >= 0
        out[hit] = vals[exact[hit]]
    else:
        vals = np.asarray(vals, dtype=float)
        out = np.empty((targets.shape[0], 4))
        for k in range(targets.shape[0]):
            if exact[k] >= 0:
                out[k] = vals[exact[k]]
                continue
            a = UnitQuaternion(*vals[left[k]])
            b = UnitQuaternion(*vals[min(left[k] + 1, n - 1)])
            out[k] = slerp(a, b, float(w[k])).as_array()
    return Resampled(targets, out, extrapolated)


@dataclass(frozen=True)
class WholeBodyFrame:
    timestamp: float
    arm_joints: tuple[float, ...]
    hand_joints: tuple[float, ...]
    base_command: BaseCommand
    base_pose: Pose6D
    camera_refs: tuple[str, ...] | None = None

    def __post_init__(self):
        if not math.isfinite(float(self.timestamp)):
            raise ValueError(f"frame timestamp must be finite, got {self.timestamp}")
        object.__setattr__(self, "timestamp", float(self.timestamp))
        arm = tuple(float(v) for v in self.arm_joints)
        hand = tuple(float(v) for v in self.hand_joints)
        if len(arm) != ARM_DOF:
            raise ValueError(f"frame needs {ARM_DOF} arm joints, got {len(arm)}")
        if len(hand) != HAND_DOF:
            raise ValueError(f"frame needs {HAND_DOF} hand joints, got {len(hand)}")
        if not all(math.isfinite(v) for v in arm + hand):
            raise ValueError("frame joint angles must be finite")
        object.__setattr__(self, "arm_joints", arm)
        object.__setattr__(self, "hand_joints", hand)
        if self.camera_refs is not None:
            object.__setattr__(self, "camera_refs", tuple(str(c) for c in self.camera_refs))

    @property
    def joints(self) -> tuple[float, ...]:
        return self.arm_joints + self.hand_joints


def frame_grid(start: float, end: float, rate_hz: float) -> np.ndarray:
    if not rate_hz > 0:
        raise ValueError(f"rate must be > 0, got {rate_hz}")
    if end < start:
        raise ValueError(f"streams do not overlap: span [{start}, {end}] is empty")
    n = int(math.floor((end - start) * rate_hz + 1e-9)) + 1
    return np.minimum(start + np.arange(n) / rate_hz, end)


def _odom_channels(odom: Sequence[OdomSample]) -> tuple[Channel, Channel]:
    t = [s.timestamp for s in odom]
    return (Channel(t, [s.pose.translation for s in odom], "linear"),
            Channel(t, [s.pose.rotation.as_list() for s in odom], "slerp"))


def _command_channel(commands: Sequence[tuple[float, BaseCommand]]) -> Channel:
    return Channel([t for t, _ in commands], [c.as_list() for _, c in commands], "linear")


def synchronize(arm: Channel, hands: Channel, odom: Sequence[OdomSample],
                commands: Sequence[tuple[float, BaseCommand]], rate_hz: float = 50.0,
                cameras: Channel | None = None) -> list[WholeBodyFrame]:
    """Whole-body frames at ``rate_hz`` over the intersection of all stream spans.

    ``arm`` carries 14 angles per sample (left shoulder, elbow, wrist, then
    right), ``hands`` 12 active finger angles. ``cameras``, when given, is a
    hold-mode channel of identifier tuples.
    """
    if not rate_hz > 0:
        raise ValueError(f"rate must be > 0, got {rate_hz}")
    if not odom or not commands or len(arm) == 0 or len(hands) == 0:
        raise ValueError("synchronize needs non-empty arm, hand, odometry and command streams")
    pos, rot = _odom_channels(odom)
    cmd = _command_channel(commands)
    channels = [arm, hands, pos, rot, cmd] + ([cameras] if cameras is not None else [])
    start = max(c.start for c in channels)
    end = min(c.end for c in channels)
    grid = frame_grid(start, end, rate_hz)

    arm_v = resample(arm, grid, "linear").values
    hand_v = resample(hands, grid, "linear").values
    pos_v = resample(pos, grid, "linear").values
    rot_v = resample(rot, grid, "slerp").values
    cmd_v = resample(cmd, grid, "linear").values
    cam_v = resample(cameras, grid, "hold").values if cameras is not None else [None] * grid.shape[0]
    return [
        WholeBodyFrame(
            float(grid[k]),
            tuple(arm_v[k]),
            tuple(hand_v[k]),
            BaseCommand(*cmd_v[k]),
            Pose6D(UnitQuaternion(*rot_v[k]), tuple(pos_v[k])),
            cam_v[k],
        )
        for k in range(grid.shape[0])
    ]


def frames_to_channels(frames: Sequence[WholeBodyFrame]):
    """Inverse of frame assembly; returns inputs accepted by ``synchronize``."""
    t = [f.timestamp for f in frames]
    arm = Channel(t, [f.arm_joints for f in frames])
    hands = Channel(t, [f.hand_joints for f in frames])
    odom = [OdomSample(f.timestamp, f.base_pose) for f in frames]
    commands = [(f.timestamp, f.base_command) for f in frames]
    cams = None
    if frames and all(f.camera_refs is not None for f in frames):
        cams = Channel(t, [f.camera_refs for f in frames], "hold")
    return arm, hands, odom, commands, cams


@dataclass(frozen=True)
class LimitViolation:
    frame: int
    joint: int
    value: float
    bound: float


@dataclass(frozen=True)
class VelocitySpike:
    frame: int
    joint: int
    velocity: float


@dataclass(frozen=True)
class TimestampGap:
    frame: int
    dt: float


@dataclass
class ValidationReport:
    limit_violations: list[LimitViolation] = field(default_factory=list)
    velocity_spikes: list[VelocitySpike] = field(default_factory=list)
    timestamp_gaps: list[TimestampGap] = field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        return {
            "limit_violations": len(self.limit_violations),
            "velocity_spikes": len(self.velocity_spikes),
            "timestamp_gaps": len(self.timestamp_gaps),
        }

    def is_empty(self) -> bool:
        return not (self.limit_violations or self.velocity_spikes or self.timestamp_gaps)

    def to_dict(self, joint_names: Sequence[str] | None = None) -> dict:
        def name(j):
            return joint_names[j] if joint_names is not None else str(j)

        return {
            "ok": self.is_empty(),
            "summary": self.summary,
            "limit_violations": [
                {"frame": v.frame, "joint": v.joint, "name": name(v.joint), "value": v.value, "bound": v.bound}
                for v in self.limit_violations
            ],
            "velocity_spikes": [
                {"frame": v.frame, "joint": v.joint, "name": name(v.joint), "velocity": v.velocity}
                for v in self.velocity_spikes
            ],
            "timestamp_gaps": [{"frame": g.frame, "dt": g.dt} for g in self.timestamp_gaps],
        }


@dataclass(frozen=True)
class ValidationThresholds:
    max_joint_vel: float = 10.0  # rad/s
    max_dt: float = 0.05  # s


def validate(frames: Sequence[WholeBodyFrame], robot_model, thresholds: ValidationThresholds | None = None) -> ValidationReport:
    """Report joint-limit violations, joint-velocity spikes and timestamp gaps.

    ``robot_model`` must provide ``joint_limits()``, 26 ``(lo, hi)`` pairs in
    frame order (14 arm joints then 12 hand joints). Velocities are backward
    differences and are attributed to the later frame; a non-positive dt is
    reported as a gap.
    """
    th = thresholds or ValidationThresholds()
    limits = list(robot_model.joint_limits())
    report = ValidationReport()
    prev = None
    for k, f in enumerate(frames):
        q = f.joints
        for j, ((lo, hi), v) in enumerate(zip(limits, q)):
            if v < lo:
                report.limit_violations.append(LimitViolation(k, j, v, lo))
            elif v > hi:
                report.limit_violations.append(LimitViolation(k, j, v, hi))
        if prev is not None:
            dt = f.timestamp - prev.timestamp
            if dt > th.max_dt or dt <= 0:
                report.timestamp_gaps.append(TimestampGap(k, dt))
            if dt > 0:
                for j, (a, b) in enumerate(zip(prev.joints, q)):
                    vel = (b - a) / dt
                    if abs(vel) > th.max_joint_vel:
                        report.velocity_spikes.append(VelocitySpike(k, j, vel))
        prev = f
    return report
