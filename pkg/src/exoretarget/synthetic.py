"""Analytic test sessions: known robot motion turned into exoskeleton and odometry streams.

Each scenario defines robot arm joints, hand closure and the torso pose as
closed-form functions of time. Exoskeleton signals are synthesized backward
from them:

- encoders solve the exoskeleton chain for the upper-arm orientation the
  robot shoulder reaches (tight IK, seeded frame to frame),
- the elbow angle is the robot elbow angle (identity map),
- IMU quaternions satisfy ``conj(q_f) q_w conj(q_w0) q_f0 = R_wrist(q)``
  with the forearm IMU following the torso, shoulder and elbow.

Every session opens with a half-second hold at the home pose, flagged as a
calibration window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from exoretarget.base import OdomSample
from exoretarget.kinematics import IkOptions, Pose6D, UnitQuaternion, fk_chain, ik_orientation, quat_conjugate
from exoretarget.retarget import ExoArmFrame, WristCalibration
from exoretarget.robot_model import SIDES, RobotModel, placeholder_g1_model

SCENARIOS = ("home", "reach", "walk", "squat", "turn")
HOME_HOLD = 0.5
STANDING_HEIGHT = 0.75
SQUAT_HEIGHT = 0.55
WALK_SPEED = 0.5
TURN_RATE = 0.3
DEFAULT_DURATION = {"home": 3.0, "reach": 6.0, "walk": 10.0, "squat": 16.0, "turn": 10.0}
# squat: stand, descend on a cosine profile, hold
SQUAT_DESCENT = (2.0, 14.0)
CAMERA_RATE = 30.0

_EXO_IK = IkOptions(damping=1e-3, max_iterations=200, tolerance=1e-12)
# glove and forearm IMU mounting rotations (arbitrary, fixed)
_FOREARM_MOUNT = UnitQuaternion.from_rotvec((0.1, -0.2, 0.05))
_GLOVE_MOUNT = UnitQuaternion.from_rotvec((-0.3, 0.1, 0.2))


@dataclass(frozen=True, eq=False)
class SyntheticSession:
    scenario: str
    exo_records: list[dict]
    odom: list[OdomSample]
    calibration: dict[str, WristCalibration]
    arm_truth: np.ndarray  # (N, 14) robot arm joints at exo sample times
    base_truth: list[dict]  # per odometry sample: t, v_x, omega_z, h


def _ease(t: float, t0: float, t1: float) -> float:
    """Cosine ramp 0 -> 1 between t0 and t1."""
    if t <= t0:
        return 0.0
    if t >= t1:
        return 1.0
    return 0.5 - 0.5 * math.cos(math.pi * (t - t0) / (t1 - t0))


def _left_arm(scenario: str, t: float) -> np.ndarray:
    """Left arm joints: shoulder pitch/roll/yaw, elbow, wrist roll/pitch/yaw."""
    tm = max(0.0, t - HOME_HOLD)
    if scenario == "reach":
        s = _ease(t, HOME_HOLD, HOME_HOLD + 3.0)
        wiggle = 0.1 * math.sin(1.5 * tm)
        return s * np.array([-1.0, 0.3, 0.2, 1.2, 0.4, -0.5, 0.3]) + s * wiggle * np.array([1, 1, 0, 1, 1, 1, 1])
    s = _ease(t, HOME_HOLD, HOME_HOLD + 1.0)
    if scenario == "walk":
        swing = 0.35 * math.sin(2.0 * math.pi * 0.9 * tm)
        return s * np.array([swing, 0.15, 0.0, 0.4 + 0.2 * swing, 0.0, 0.1, 0.0])
    if scenario == "squat":
        return s * np.array([-0.6, 0.2, 0.1, 0.9, 0.2, 0.0, -0.1])
    if scenario == "turn":
        return s * np.array([0.1, 0.2, 0.0, 0.5, 0.0, 0.0, 0.0])
    return np.zeros(7)


def _hand(scenario: str, t: float) -> np.ndarray:
    if scenario == "home":
        return np.full(12, 0.1)
    close = 0.1 + 1.0 * _ease(t, HOME_HOLD + 2.0, HOME_HOLD + 3.5) if scenario == "reach" else 0.3
    one = np.array([close, close, close, close, min(close, 0.45), 0.6])
    return np.concatenate([one, one])


def _torso(scenario: str, t: float) -> Pose6D:
    # walk and turn move at constant rate from t=0; the home hold constrains the arms only
    if scenario == "walk":
        return Pose6D(UnitQuaternion.identity(), (WALK_SPEED * t, 0.0, STANDING_HEIGHT))
    if scenario == "turn":
        return Pose6D(UnitQuaternion.from_axis_angle((0, 0, 1), TURN_RATE * t), (0.0, 0.0, STANDING_HEIGHT))
    if scenario == "squat":
        s = _ease(t, *SQUAT_DESCENT)
        return Pose6D(UnitQuaternion.identity(), (0.0, 0.0, STANDING_HEIGHT + s * (SQUAT_HEIGHT - STANDING_HEIGHT)))
    return Pose6D(UnitQuaternion.identity(), (0.0, 0.0, STANDING_HEIGHT))


def _base_truth(scenario: str, t: float) -> dict:
    return {
        "t": t,
        "v_x": WALK_SPEED if scenario == "walk" else 0.0,
        "omega_z": TURN_RATE if scenario == "turn" else 0.0,
        "h": _torso(scenario, t).translation[2],
    }


def _rot_y(angle: float) -> UnitQuaternion:
    return UnitQuaternion.from_axis_angle((0.0, 1.0, 0.0), angle)


def generate(scenario: str, duration: float | None = None, exo_rate: float = 100.0, odom_rate: float = 100.0,
             model: RobotModel | None = None) -> SyntheticSession:
    """Build one synthetic session (deterministic: no randomness involved)."""
    # local import: io.streams imports robot_model, which this module also needs at import time
    from exoretarget.io.streams import exo_record

    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    model = model or placeholder_g1_model()
    duration = DEFAULT_DURATION[scenario] if duration is None else float(duration)
    if not duration > HOME_HOLD:
        raise ValueError(f"duration must exceed the {HOME_HOLD} s home hold")
    n_exo = int(math.floor(duration * exo_rate + 1e-9)) + 1
    n_odom = int(math.floor(duration * odom_rate + 1e-9)) + 1

    calib = {}
    home_forearm = {}
    for side in SIDES:
        q_f0 = _FOREARM_MOUNT
        home_forearm[side] = q_f0
        calib[side] = WristCalibration(q_f0 * _GLOVE_MOUNT, q_f0)

    exo_seed = {side: np.zeros(model.arms[side].exo_chain.n_active) for side in SIDES}
    records, truth = [], []
    for k in range(n_exo):
        t = k / exo_rate
        left = _left_arm(scenario, t)
        right = model.arm_mirror.apply(np.concatenate([left, left]))[7:]
        q_all = np.concatenate([left, right])
        truth.append(q_all)
        torso = _torso(scenario, t).rotation
        frames = {}
        for i, side in enumerate(SIDES):
            arm = model.arms[side]
            q = q_all[7 * i:7 * i + 7]
            upper = fk_chain(arm.shoulder, q[0:3]).rotation
            sol = ik_orientation(arm.exo_chain, upper, exo_seed[side], _EXO_IK)
            if sol.residual > 1e-9:
                raise RuntimeError(f"exoskeleton encoders unreachable for {side} arm at t={t}: {sol.residual}")
            exo_seed[side] = sol.q
            # forearm IMU rides on the forearm, which the torso rotation carries along
            forearm = torso * upper * _rot_y(q[3]) * home_forearm[side]
            wrist = fk_chain(arm.wrist, q[4:7]).rotation
            c = calib[side]
            imu_wrist = forearm * wrist * quat_conjugate(c.q_f0) * c.q_w0
            frames[side] = ExoArmFrame(t, tuple(sol.q), float(q[3]), imu_wrist, forearm)
        cams = [f"head/{int(math.floor(t * CAMERA_RATE + 1e-9)):06d}"]
        records.append(exo_record(t, frames, _hand(scenario, t), home=t < HOME_HOLD, cams=cams))

    odom = [OdomSample(i / odom_rate, _torso(scenario, i / odom_rate)) for i in range(n_odom)]
    base_truth = [_base_truth(scenario, s.timestamp) for s in odom]
    return SyntheticSession(scenario, records, odom, calib, np.array(truth), base_truth)
