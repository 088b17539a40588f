"""End-to-end glue: raw streams in, whole-body episode out."""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from exoretarget.base import BaseParams, OdomSample, estimate_base_commands
from exoretarget.control import mirror_command
from exoretarget.io.episode import Episode, EpisodeHeader
from exoretarget.io.streams import ExoRecording, calibration_schedule
from exoretarget.kinematics import Pose6D, UnitQuaternion
from exoretarget.retarget import WristCalibration, retarget_stream
from exoretarget.robot_model import SIDES, RobotModel
from exoretarget.trajectory import Channel, WholeBodyFrame, synchronize

log = logging.getLogger(__name__)


def retarget_recording(recording: ExoRecording, model: RobotModel,
                       calib: dict[str, WristCalibration] | None = None) -> np.ndarray:
    """Robot arm joints (N, 14) for every exoskeleton sample, left arm first."""
    cols = []
    for side in SIDES:
        frames = recording.arms[side]
        sched = calibration_schedule(frames, recording.home, calib[side] if calib else None)
        joints = retarget_stream(frames, sched, model.arms[side], model.ik)
        worst = max(max(j.shoulder_residual, j.wrist_residual) for j in joints)
        n_clamped = sum(any(j.clamped_mask) for j in joints)
        log.info("%s arm: %d frames, worst IK residual %.3g rad, %d frames clamped", side, len(joints), worst, n_clamped)
        cols.append(np.array([j.as_array() for j in joints]))
    return np.concatenate(cols, axis=1)


def build_episode(recording: ExoRecording, odom: Sequence[OdomSample], model: RobotModel,
                  calib: dict[str, WristCalibration] | None = None, rate_hz: float = 50.0,
                  params: BaseParams | None = None, task_label: str = "", source: str = "exo",
                  created_at: str | None = None) -> Episode:
    arm = Channel(recording.times, retarget_recording(recording, model, calib))
    hands = Channel(recording.times, recording.hands)
    commands = estimate_base_commands(odom, params)
    cams = Channel(recording.times, recording.cams, "hold") if recording.cams is not None else None
    frames = synchronize(arm, hands, odom, commands, rate_hz, cams)
    header = EpisodeHeader(model.name, source, task_label, created_at)
    return Episode(header, tuple(frames))


def mirror_pose(pose: Pose6D) -> Pose6D:
    """Reflect a world pose across the x-z plane: ``M R M`` and ``(x, -y, z)``."""
    q = pose.rotation
    x, y, z = pose.translation
    return Pose6D(UnitQuaternion(q.w, -q.x, q.y, -q.z), (x, -y, z))


def mirror_frame(f: WholeBodyFrame, model: RobotModel) -> WholeBodyFrame:
    return WholeBodyFrame(
        f.timestamp,
        tuple(model.arm_mirror.apply(f.arm_joints)),
        tuple(model.hand_mirror.apply(f.hand_joints)),
        mirror_command(f.base_command),
        mirror_pose(f.base_pose),
        f.camera_refs,
    )


def mirror_episode(episode: Episode, model: RobotModel) -> Episode:
    frames = [mirror_frame(f, model) for f in episode.frames]
    return episode.with_frames(frames, mirrored=not episode.header.mirrored)
