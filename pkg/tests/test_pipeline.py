import numpy as np
import pytest

from exoretarget.base import BaseCommand
from exoretarget.io.pipeline import build_episode, mirror_episode, mirror_frame, mirror_pose
from exoretarget.io.streams import parse_exo_records
from exoretarget.kinematics import Pose6D, yaw_of
from exoretarget.robot_model import placeholder_g1_model
from exoretarget.synthetic import generate
from exoretarget.trajectory import validate

from conftest import random_quat

MODEL = placeholder_g1_model()
M = np.diag([1.0, -1.0, 1.0])


@pytest.fixture(scope="module")
def session():
    return generate("turn", duration=2.0, exo_rate=50.0, odom_rate=50.0)


@pytest.fixture(scope="module")
def episode(session):
    return build_episode(parse_exo_records(session.exo_records), session.odom, MODEL, session.calibration)


def test_episode_contents(session, episode):
    assert episode.header.source == "exo" and episode.header.created_at is None
    assert validate(episode.frames, MODEL).is_empty()
    # frames start at the first base command (second odometry sample) and run at 50 Hz
    ts = [f.timestamp for f in episode.frames]
    assert ts[0] == session.odom[1].timestamp and np.allclose(np.diff(ts), 0.02)
    for f in episode.frames[10:]:
        assert f.base_command.omega_z == pytest.approx(0.3, abs=1e-9)
    assert all(f.camera_refs for f in episode.frames)


def test_home_frames_give_same_result_as_calibration_file(session, episode):
    from_home = build_episode(parse_exo_records(session.exo_records), session.odom, MODEL, None)
    for a, b in zip(from_home.frames, episode.frames):
        np.testing.assert_allclose(a.arm_joints, b.arm_joints, atol=1e-6)


def test_mirror_pose_is_matrix_reflection(rng):
    for _ in range(50):
        p = Pose6D(random_quat(rng), tuple(rng.normal(size=3)))
        m = mirror_pose(p)
        np.testing.assert_allclose(m.rotation.as_matrix(), M @ p.rotation.as_matrix() @ M, atol=1e-14)
        assert m.translation == (p.translation[0], -p.translation[1], p.translation[2])
        assert yaw_of(m.rotation) == pytest.approx(-yaw_of(p.rotation), abs=1e-12)


def test_mirror_episode_involution_and_feasibility(episode):
    once = mirror_episode(episode, MODEL)
    assert once.header.mirrored and not mirror_episode(once, MODEL).header.mirrored
    assert mirror_episode(once, MODEL) == episode
    assert validate(once.frames, MODEL).is_empty()
    f, g = episode.frames[20], once.frames[20]
    assert g.base_command == BaseCommand(f.base_command.v_x, -f.base_command.omega_z, f.base_command.h)
    assert g.arm_joints[:7] == tuple(MODEL.arm_mirror.apply(f.arm_joints)[:7])
    assert mirror_frame(g, MODEL) == f
