"""Exoskeleton arm frames to robot 7-DoF arm joints.

Each arm is aligned in three stages:

1. Upper arm: FK of the exoskeleton chain (encoders plus coupled passive
   joints) gives the upper-arm orientation relative to the torso; IK maps it
   onto the robot's three shoulder joints.
2. Elbow: the human bending angle maps affinely onto the robot elbow.
3. Wrist: two IMUs (glove and forearm) plus a home calibration give the wrist
   rotation relative to the forearm, ``conj(q_f) * q_w * conj(q_w0) * q_f0``;
   IK maps it onto the robot's three wrist joints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from exoretarget.kinematics import (
    IkOptions,
    IkResult,
    KinematicChain,
    UnitQuaternion,
    angular_distance,
    fk_chain,
    ik_orientation,
    quat_conjugate,
    quat_multiply,
    wrap_angle,
)

# Spread allowed inside a calibration window before the home pose is rejected.
MAX_CALIBRATION_SPREAD = math.radians(10.0)


class CalibrationError(ValueError):
    pass


class CalibrationUnstableError(CalibrationError):
    pass


@dataclass(frozen=True)
class ExoArmFrame:
    timestamp: float
    encoder_angles: tuple[float, ...]
    elbow_angle: float
    imu_wrist: UnitQuaternion
    imu_forearm: UnitQuaternion

    def __post_init__(self):
        enc = tuple(float(v) for v in self.encoder_angles)
        for name, v in (("timestamp", self.timestamp), ("elbow_angle", self.elbow_angle)):
            if not math.isfinite(float(v)):
                raise ValueError(f"{name} must be finite, got {v}")
        if not all(math.isfinite(v) for v in enc):
            raise ValueError(f"encoder angles must be finite, got {enc}")
        object.__setattr__(self, "encoder_angles", enc)
        object.__setattr__(self, "timestamp", float(self.timestamp))
        object.__setattr__(self, "elbow_angle", float(self.elbow_angle))
        for name in ("imu_wrist", "imu_forearm"):
            q = getattr(self, name)
            if not isinstance(q, UnitQuaternion):
                object.__setattr__(self, name, UnitQuaternion.from_array(q))


@dataclass(frozen=True)
class WristCalibration:
    q_w0: UnitQuaternion
    q_f0: UnitQuaternion

    @classmethod
    def from_dict(cls, data: dict) -> WristCalibration:
        return cls(UnitQuaternion.from_array(data["q_w0"]), UnitQuaternion.from_array(data["q_f0"]))

    def to_dict(self) -> dict:
        return {"q_w0": self.q_w0.as_list(), "q_f0": self.q_f0.as_list()}


@dataclass(frozen=True)
class ElbowMap:
    gain: float = 1.0
    offset: float = 0.0


@dataclass(frozen=True)
class ArmModel:
    """Everything needed to retarget one arm."""

    exo_chain: KinematicChain
    shoulder: KinematicChain
    elbow_limits: tuple[float, float]
    wrist: KinematicChain
    elbow_map: ElbowMap = field(default_factory=ElbowMap)

    def __post_init__(self):
        if self.shoulder.n_active != 3 or self.wrist.n_active != 3:
            raise ValueError("robot shoulder and wrist subchains must have 3 active joints each")
        lo, hi = (float(v) for v in self.elbow_limits)
        if not lo < hi:
            raise ValueError(f"elbow limits must satisfy lo < hi, got {self.elbow_limits}")
        object.__setattr__(self, "elbow_limits", (lo, hi))

    @property
    def limits(self) -> list[tuple[float, float]]:
        """Joint limits in RobotArmJoints order: shoulder(3), elbow, wrist(3)."""
        return [*self.shoulder.joint_limits, self.elbow_limits, *self.wrist.joint_limits]


@dataclass(frozen=True)
class RobotArmJoints:
    shoulder: tuple[float, float, float]
    elbow: float
    wrist: tuple[float, float, float]
    clamped_mask: tuple[bool, ...] = (False,) * 7
    # orientation residuals of the two IK stages, radians
    shoulder_residual: float = 0.0
    wrist_residual: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([*self.shoulder, self.elbow, *self.wrist])

    @classmethod
    def zeros(cls) -> RobotArmJoints:
        return cls((0.0, 0.0, 0.0), 0.0, (0.0, 0.0, 0.0))


def wrist_relative_rotation(frame: ExoArmFrame, calib: WristCalibration) -> UnitQuaternion:
    """Wrist rotation relative to the forearm, referenced to the home pose."""
    q = quat_multiply(quat_conjugate(frame.imu_forearm), frame.imu_wrist)
    q = quat_multiply(q, quat_conjugate(calib.q_w0))
    return quat_multiply(q, calib.q_f0)


def upper_arm_orientation(frame: ExoArmFrame, exo_chain: KinematicChain) -> UnitQuaternion:
    enc = [wrap_angle(a) for a in frame.encoder_angles]
    if len(enc) != exo_chain.n_active:
        raise ValueError(
            f"exoskeleton chain {exo_chain.name!r} expects {exo_chain.n_active} encoder angles, got {len(enc)}"
        )
    return fk_chain(exo_chain, enc).rotation


def align_upper_arm(frame: ExoArmFrame, exo_chain: KinematicChain, robot_shoulder_chain: KinematicChain,
                    seed: Sequence[float], opts: IkOptions | None = None) -> IkResult:
    target = upper_arm_orientation(frame, exo_chain)
    return ik_orientation(robot_shoulder_chain, target, seed, opts)


def align_elbow(elbow_angle: float, mapping: ElbowMap, robot_limits: tuple[float, float]) -> tuple[float, bool]:
    """Affine elbow map clamped to the robot limits; returns ``(angle, clamped)``."""
    if not math.isfinite(elbow_angle):
        raise ValueError(f"elbow angle must be finite, got {elbow_angle}")
    lo, hi = robot_limits
    raw = mapping.gain * elbow_angle + mapping.offset
    out = min(max(raw, lo), hi)
    return out, out != raw


def align_wrist(frame: ExoArmFrame, calib: WristCalibration, robot_wrist_chain: KinematicChain,
                seed: Sequence[float], opts: IkOptions | None = None) -> IkResult:
    return ik_orientation(robot_wrist_chain, wrist_relative_rotation(frame, calib), seed, opts)


def retarget_frame(frame: ExoArmFrame, calib: WristCalibration, arm: ArmModel,
                   previous: RobotArmJoints | None = None, opts: IkOptions | None = None) -> RobotArmJoints:
    """Run the three alignments for one arm; IK is seeded from ``previous`` when given."""
    prev = previous or RobotArmJoints.zeros()
    upper = align_upper_arm(frame, arm.exo_chain, arm.shoulder, prev.shoulder, opts)
    elbow, elbow_clamped = align_elbow(frame.elbow_angle, arm.elbow_map, arm.elbow_limits)
    wrist = align_wrist(frame, calib, arm.wrist, prev.wrist, opts)
    mask = (*map(bool, upper.clamped), elbow_clamped, *map(bool, wrist.clamped))
    return RobotArmJoints(
        tuple(float(v) for v in upper.q),
        float(elbow),
        tuple(float(v) for v in wrist.q),
        mask,
        upper.residual,
        wrist.residual,
    )


def retarget_stream(frames: Sequence[ExoArmFrame], calib: WristCalibration | Sequence[WristCalibration],
                    arm: ArmModel, opts: IkOptions | None = None) -> list[RobotArmJoints]:
    """Retarget one arm's stream sequentially, chaining IK seeds frame to frame.

    ``calib`` may be a single calibration or one per frame (recalibration events).
    """
    calibs = [calib] * len(frames) if isinstance(calib, WristCalibration) else list(calib)
    if len(calibs) != len(frames):
        raise ValueError(f"{len(frames)} frames but {len(calibs)} calibrations")
    out: list[RobotArmJoints] = []
    prev = None
    last_t = -math.inf
    for frame, c in zip(frames, calibs):
        if frame.timestamp < last_t:
            raise ValueError(f"arm frame timestamps must be non-decreasing: {frame.timestamp} after {last_t}")
        last_t = frame.timestamp
        prev = retarget_frame(frame, c, arm, prev, opts)
        out.append(prev)
    return out


def _mean_quaternion(qs: Sequence[UnitQuaternion]) -> UnitQuaternion:
    ref = qs[0].as_array()
    acc = np.zeros(4)
    for q in qs:
        a = q.as_array()
        acc += a if a @ ref >= 0 else -a
    return UnitQuaternion(*acc)


def _spread(qs: Sequence[UnitQuaternion]) -> float:
    return max((angular_distance(a, b) for i, a in enumerate(qs) for b in qs[i + 1:]), default=0.0)


def calibrate_home(samples: Sequence[ExoArmFrame], window: int | None = None) -> WristCalibration:
    """Home calibration from the first ``window`` frames (all frames by default).

    Each IMU's home quaternion is the sign-aligned component mean over the
    window, renormalized. Raises CalibrationUnstableError when either IMU
    spans more than 10 degrees inside the window.
    """
    if not samples:
        raise CalibrationError("calibration needs at least one sample")
    window = len(samples) if window is None else int(window)
    if window < 1 or window > len(samples):
        raise CalibrationError(f"calibration window {window} needs 1..{len(samples)} samples")
    used = samples[:window]
    out = []
    for name in ("imu_wrist", "imu_forearm"):
        qs = [getattr(s, name) for s in used]
        spread = _spread(qs)
        if spread > MAX_CALIBRATION_SPREAD:
            raise CalibrationUnstableError(
                f"{name} moved {math.degrees(spread):.2f} deg during calibration (limit 10 deg)"
            )
        out.append(_mean_quaternion(qs))
    return WristCalibration(*out)
