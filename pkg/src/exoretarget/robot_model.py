"""Robot model configuration: arm subchains, hand and lower-body joint tables.

The shipped model (``data/g1_placeholder.json``) mimics a 29-DoF humanoid
with two 6-active-DoF hands. Joint limits follow the real robot's published
ranges loosely, while the DH rows of the exoskeleton and robot subchains are
PLACEHOLDERS: the real exoskeleton geometry (including the two extra
glenohumeral joints) is not public. All chains are built so that the zero
pose has identity orientation, and the IMU axis conventions of the two arms
are taken to match the robot's link frames.

Arm joint order inside a frame, per arm: shoulder pitch (y), shoulder roll
(x), shoulder yaw (z), elbow (y), wrist roll (x), wrist pitch (y), wrist yaw
(z); left arm first. Hands: little, ring, middle, index, thumb bend, thumb
rotation; left hand first. Waist joints are controller-owned and not part of
retargeted frames.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from exoretarget.control import LOWER_BODY_JOINTS, MirrorSpec, PdGains
from exoretarget.kinematics import DHRow, IkOptions, KinematicChain, PassiveCoupling
from exoretarget.retarget import ArmModel, ElbowMap

SIDES = ("left", "right")
ARM_JOINTS = ("shoulder_pitch", "shoulder_roll", "shoulder_yaw", "elbow", "wrist_roll", "wrist_pitch", "wrist_yaw")
HAND_JOINTS = ("little", "ring", "middle", "index", "thumb_bend", "thumb_rotation")
DEFAULT_MODEL_RESOURCE = "g1_placeholder.json"


@dataclass(frozen=True, eq=False)
class LowerBodyModel:
    joint_names: tuple[str, ...]
    q0: np.ndarray
    limits: np.ndarray
    gains: PdGains
    mirror: MirrorSpec


@dataclass(frozen=True, eq=False)
class RobotModel:
    name: str
    arms: dict[str, ArmModel]
    hand_limits: tuple[tuple[float, float], ...]
    lower_body: LowerBodyModel
    arm_mirror: MirrorSpec
    hand_mirror: MirrorSpec
    ik: IkOptions = IkOptions()

    def __post_init__(self):
        if set(self.arms) != set(SIDES):
            raise ValueError(f"robot model needs arms {SIDES}, got {sorted(self.arms)}")
        if len(self.hand_limits) != 12:
            raise ValueError(f"robot model needs 12 hand joint limits, got {len(self.hand_limits)}")
        if self.arm_mirror.n != 14 or self.hand_mirror.n != 12:
            raise ValueError("arm mirror must cover 14 joints and hand mirror 12")

    def arm_limits(self) -> list[tuple[float, float]]:
        return [lim for side in SIDES for lim in self.arms[side].limits]

    def joint_limits(self) -> list[tuple[float, float]]:
        """26 limits in frame order: 14 arm joints then 12 hand joints."""
        return self.arm_limits() + [tuple(l) for l in self.hand_limits]

    def joint_names(self) -> list[str]:
        arm = [f"{side}_{j}" for side in SIDES for j in ARM_JOINTS]
        hand = [f"{side}_hand_{j}" for side in SIDES for j in HAND_JOINTS]
        return arm + hand

    def to_dict(self) -> dict:
        lb = self.lower_body
        return {
            "name": self.name,
            "ik": self.ik.to_dict(),
            "arms": {
                side: {
                    "exo_chain": arm.exo_chain.to_dict(),
                    "shoulder": arm.shoulder.to_dict(),
                    "elbow": {"limits": list(arm.elbow_limits), "gain": arm.elbow_map.gain, "offset": arm.elbow_map.offset},
                    "wrist": arm.wrist.to_dict(),
                }
                for side, arm in self.arms.items()
            },
            "hands": {"limits": [list(l) for l in self.hand_limits]},
            "lower_body": {
                "joints": list(lb.joint_names),
                "q0": lb.q0.tolist(),
                "limits": lb.limits.tolist(),
                "kp": lb.gains.kp.tolist(),
                "kd": lb.gains.kd.tolist(),
            },
            "mirror": {
                "lower_body": lb.mirror.to_dict(),
                "arms": self.arm_mirror.to_dict(),
                "hands": self.hand_mirror.to_dict(),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> RobotModel:
        try:
            arms = {}
            for side in SIDES:
                a = data["arms"][side]
                e = a["elbow"]
                arms[side] = ArmModel(
                    KinematicChain.from_dict(a["exo_chain"]),
                    KinematicChain.from_dict(a["shoulder"]),
                    tuple(e["limits"]),
                    KinematicChain.from_dict(a["wrist"]),
                    ElbowMap(float(e.get("gain", 1.0)), float(e.get("offset", 0.0))),
                )
            lb = data["lower_body"]
            mir = data["mirror"]
            lower = LowerBodyModel(
                tuple(lb["joints"]),
                np.asarray(lb["q0"], dtype=float),
                np.asarray(lb["limits"], dtype=float),
                PdGains(lb["kp"], lb["kd"]),
                MirrorSpec.from_dict(mir["lower_body"]),
            )
            return cls(
                data["name"],
                arms,
                tuple(tuple(map(float, l)) for l in data["hands"]["limits"]),
                lower,
                MirrorSpec.from_dict(mir["arms"]),
                MirrorSpec.from_dict(mir["hands"]),
                IkOptions.from_dict(data.get("ik", {})),
            )
        except KeyError as exc:
            raise ValueError(f"robot model is missing field {exc}") from None


def load_robot_model(path: str | Path | None = None) -> RobotModel:
    """Load a robot model JSON file; ``None`` loads the shipped placeholder."""
    if path is None:
        text = resources.files("exoretarget.data").joinpath(DEFAULT_MODEL_RESOURCE).read_text()
    else:
        text = Path(path).read_text()
    return RobotModel.from_dict(json.loads(text))


def save_robot_model(model: RobotModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


_H = math.pi / 2


def _shoulder_chain(name, limits) -> KinematicChain:
    # axes at zero pose: y, x, z; zero pose is identity
    rows = (
        DHRow(0.0, -_H, 0.0, 0.0, "fixed"),
        DHRow(0.0, _H, 0.0, _H),
        DHRow(0.0, -_H, 0.0, _H),
        DHRow(0.0, 0.0, -0.1, 0.0),
        DHRow(0.0, 0.0, 0.0, -_H, "fixed"),
    )
    return KinematicChain(rows, limits, name)


def _wrist_chain(name, limits) -> KinematicChain:
    # axes at zero pose: x, y, z; zero pose is identity
    rows = (
        DHRow(0.0, _H, 0.0, _H, "fixed"),
        DHRow(0.0, _H, 0.0, _H),
        DHRow(0.0, _H, 0.0, _H),
        DHRow(0.0, 0.0, 0.0, 0.0),
    )
    return KinematicChain(rows, limits, name)


def _exo_chain(name) -> KinematicChain:
    # passive GH joints: elevation about y follows flexion, protraction about z follows abduction
    rows = (
        DHRow(0.0, -_H, 0.05, 0.0, "fixed"),
        DHRow(0.02, 0.0, 0.0, 0.0, "revolute-passive"),
        DHRow(0.0, _H, 0.04, 0.0),
        DHRow(0.0, _H, 0.0, _H, "revolute-passive"),
        DHRow(0.0, -_H, 0.03, 0.0),
        DHRow(0.0, 0.0, -0.12, -_H),
    )
    limits = ((-3.1, 3.1), (-3.1, 3.1), (-3.1, 3.1))
    couplings = (PassiveCoupling(0, 0, 0.25, 0.0), PassiveCoupling(1, 1, 0.3, 0.0))
    return KinematicChain(rows, limits, name, couplings)


def placeholder_g1_model() -> RobotModel:
    """Build the shipped placeholder model (see module docstring)."""
    left_shoulder = ((-3.09, 2.67), (-1.59, 2.25), (-2.62, 2.62))
    right_shoulder = ((-3.09, 2.67), (-2.25, 1.59), (-2.62, 2.62))
    wrist = ((-1.97, 1.97), (-1.61, 1.61), (-1.61, 1.61))
    elbow = (-1.05, 2.09)
    arms = {
        side: ArmModel(
            _exo_chain(f"exo_{side}_upper_arm"),
            _shoulder_chain(f"{side}_shoulder", left_shoulder if side == "left" else right_shoulder),
            elbow,
            _wrist_chain(f"{side}_wrist", wrist),
        )
        for side in SIDES
    }
    hand = ((0.0, 1.7), (0.0, 1.7), (0.0, 1.7), (0.0, 1.7), (0.0, 0.5), (-0.1, 1.3))
    leg_left = [(-2.53, 2.88), (-0.52, 2.97), (-2.76, 2.76), (-0.087, 2.88), (-0.87, 0.52), (-0.26, 0.26)]
    leg_right = [(-2.53, 2.88), (-2.97, 0.52), (-2.76, 2.76), (-0.087, 2.88), (-0.87, 0.52), (-0.26, 0.26)]
    leg_q0 = [-0.1, 0.0, 0.0, 0.3, -0.2, 0.0]
    kp = [100.0, 100.0, 100.0, 150.0, 40.0, 40.0]
    kd = [2.0, 2.0, 2.0, 4.0, 2.0, 2.0]
    lower = LowerBodyModel(
        LOWER_BODY_JOINTS,
        np.array(leg_q0 * 2),
        np.array(leg_left + leg_right),
        PdGains(kp * 2, kd * 2),
        MirrorSpec.from_pairs(12, [(i, i + 6) for i in range(6)], negate=(1, 2, 5, 7, 8, 11)),
    )
    # roll and yaw joints flip sign under the x-z reflection
    arm_mirror = MirrorSpec.from_pairs(14, [(i, i + 7) for i in range(7)], negate=(1, 2, 4, 6, 8, 9, 11, 13))
    hand_mirror = MirrorSpec.from_pairs(12, [(i, i + 6) for i in range(6)])
    return RobotModel("g1_placeholder", arms, hand * 2, lower, arm_mirror, hand_mirror, IkOptions())
