import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_quat
from exoretarget.base import BaseCommand, OdomSample
from exoretarget.kinematics import Pose6D, UnitQuaternion, angular_distance
from exoretarget.robot_model import placeholder_g1_model
from exoretarget.trajectory import (
    Channel,
    ResampleError,
    ValidationThresholds,
    WholeBodyFrame,
    frame_grid,
    frames_to_channels,
    resample,
    synchronize,
    validate,
)

MODEL = placeholder_g1_model()


def ramp_streams(t_arm, t_odom, t_cmd):
    arm = Channel(t_arm, np.outer(t_arm, np.linspace(0.01, 0.14, 14)))
    hands = Channel(t_arm, np.outer(t_arm, np.full(12, 0.05)) + 0.1)
    odom = [OdomSample(t, Pose6D(UnitQuaternion.from_axis_angle((0, 0, 1), 0.2 * t), (0.5 * t, 0.0, 0.75)))
            for t in t_odom]
    cmds = [(t, BaseCommand(0.5, 0.2, 0.75 - 0.01 * t)) for t in t_cmd]
    return arm, hands, odom, cmds


def test_exact_sample_and_midpoint():
    ch = Channel([0.0, 1.0, 2.0], [[0.0], [2.0], [5.0]])
    r = resample(ch, [0.0, 0.5, 1.0, 1.0 + 1e-12, 2.0])
    assert r.values[:, 0].tolist() == [0.0, 1.0, 2.0, 2.0, 5.0]
    assert not r.extrapolated.any()


def test_slerp_midpoint_is_45_degrees():
    q90 = UnitQuaternion.from_axis_angle((0, 0, 1), math.pi / 2)
    ch = Channel([0.0, 1.0], [[1, 0, 0, 0], q90.as_list()], "slerp")
    mid = UnitQuaternion(*resample(ch, [0.5]).values[0])
    assert angular_distance(mid, UnitQuaternion.from_axis_angle((0, 0, 1), math.pi / 4)) < 1e-12


def test_hold_mode():
    ch = Channel([0.0, 1.0, 2.0], ["a", "b", "c"], "hold")
    assert resample(ch, [0.0, 0.99, 1.0, 1.5, 2.0]).values == ["a", "a", "b", "b", "c"]


def test_extrapolation_limited_to_one_period():
    ch = Channel([1.0, 1.1, 1.2], [[0.0], [1.0], [2.0]])
    r = resample(ch, [0.95, 1.25, 1.3])
    assert r.values[:, 0].tolist() == [0.0, 2.0, 2.0]
    assert r.extrapolated.tolist() == [True, True, True]
    with pytest.raises(ResampleError, match="sample period"):
        resample(ch, [1.31])
    with pytest.raises(ResampleError, match="sample period"):
        resample(ch, [0.89])


def test_resample_errors():
    with pytest.raises(ResampleError, match="empty"):
        resample(Channel([], np.zeros((0, 1))), [0.0])
    ch = Channel([0.0, 1.0], [[0.0], [1.0]])
    with pytest.raises(ResampleError, match="sorted"):
        resample(ch, [0.5, 0.2])
    with pytest.raises(ResampleError, match="increasing"):
        resample(Channel([0.0, 0.0], [[0.0], [1.0]]), [0.0])
    with pytest.raises(ValueError):
        Channel([0.0], [[1, 0, 0]], "slerp")
    with pytest.raises(ValueError):
        Channel([0.0, 1.0], [[1.0]])
    with pytest.raises(ValueError):
        resample(ch, [0.5], "cubic")


def test_frame_count_for_mixed_rates():
    t_arm = np.arange(0, 301) / 100.0
    t_odom = np.arange(0, 31) / 10.0
    arm, hands, odom, cmds = ramp_streams(t_arm, t_odom, t_odom[1:])
    frames = synchronize(arm, hands, odom, cmds, 50.0)
    overlap = 3.0 - 0.1
    assert len(frames) == math.floor(overlap * 50) + 1
    assert frames[0].timestamp == 0.1 and frames[-1].timestamp == pytest.approx(3.0)


def test_ramps_match_analytic_values():
    t_arm = np.arange(0, 301) / 100.0
    t_odom = np.arange(0, 31) / 10.0
    arm, hands, odom, cmds = ramp_streams(t_arm, t_odom, t_odom[1:])
    for f in synchronize(arm, hands, odom, cmds, 50.0):
        t = f.timestamp
        np.testing.assert_allclose(f.arm_joints, t * np.linspace(0.01, 0.14, 14), atol=1e-9)
        np.testing.assert_allclose(f.hand_joints, 0.1 + 0.05 * t, atol=1e-9)
        assert f.base_pose.translation[0] == pytest.approx(0.5 * t, abs=1e-9)
        assert angular_distance(f.base_pose.rotation, UnitQuaternion.from_axis_angle((0, 0, 1), 0.2 * t)) < 1e-9
        assert f.base_command.h == pytest.approx(0.75 - 0.01 * t, abs=1e-9)


def test_synchronize_on_target_clock_reproduces_samples():
    t = np.arange(0, 51) / 50.0
    arm, hands, odom, cmds = ramp_streams(t, t, t)
    frames = synchronize(arm, hands, odom, cmds, 50.0)
    assert [f.timestamp for f in frames] == t.tolist()
    for k, f in enumerate(frames):
        assert f.arm_joints == tuple(arm.values[k])
        assert f.base_pose == odom[k].pose
        assert f.base_command == cmds[k][1]


def test_synchronize_idempotent():
    t_arm = np.arange(0, 201) / 100.0
    t_odom = np.arange(0, 21) / 10.0
    frames = synchronize(*ramp_streams(t_arm, t_odom, t_odom), 50.0)
    arm, hands, odom, cmds, cams = frames_to_channels(frames)
    again = synchronize(arm, hands, odom, cmds, 50.0, cams)
    assert again == frames


def test_synchronize_errors():
    t = np.arange(0, 11) / 10.0
    arm, hands, odom, cmds = ramp_streams(t, t, t)
    with pytest.raises(ValueError, match="rate"):
        synchronize(arm, hands, odom, cmds, 0.0)
    late = [(s + 5.0, c) for s, c in cmds]
    with pytest.raises(ValueError, match="overlap"):
        synchronize(arm, hands, odom, late, 50.0)
    with pytest.raises(ValueError, match="non-empty"):
        synchronize(arm, hands, [], cmds, 50.0)


def test_frame_grid():
    assert frame_grid(0.0, 1.0, 4.0).tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert frame_grid(0.0, 0.99, 4.0).tolist() == [0.0, 0.25, 0.5, 0.75]
    assert frame_grid(0.3, 0.3, 50.0).tolist() == [0.3]


def make_frames(n, dt=0.02, joint=None):
    frames = []
    for k in range(n):
        arm = np.zeros(14)
        hand = np.full(12, 0.2)
        if joint is not None:
            arm = joint(k, arm)
        frames.append(WholeBodyFrame(k * dt, tuple(arm), tuple(hand), BaseCommand(0, 0, 0.75), Pose6D.identity()))
    return frames


def test_validate_examples():
    assert validate(make_frames(20), MODEL).is_empty()

    def past_limit(k, arm):
        if k == 5:
            arm[3] = MODEL.arms["left"].elbow_limits[1] + 0.01
        return arm

    r = validate(make_frames(20, dt=1.0), MODEL)
    assert r.summary["timestamp_gaps"] == 19
    r = validate(make_frames(20, dt=0.5, joint=past_limit), MODEL, ValidationThresholds(100, 1))
    assert r.summary == {"limit_violations": 1, "velocity_spikes": 0, "timestamp_gaps": 0}
    assert (r.limit_violations[0].frame, r.limit_violations[0].joint) == (5, 3)

    def step(k, arm):
        arm[0] = 1.0 if k >= 10 else 0.0
        return arm

    r = validate(make_frames(20, joint=step), MODEL, ValidationThresholds(10.0, 0.05))
    assert r.summary == {"limit_violations": 0, "velocity_spikes": 1, "timestamp_gaps": 0}
    assert r.velocity_spikes[0].velocity == pytest.approx(50.0)
    d = r.to_dict(MODEL.joint_names())
    assert d["ok"] is False and d["velocity_spikes"][0]["name"] == MODEL.joint_names()[0]


def test_validate_reports_non_positive_dt():
    frames = make_frames(3)
    frames[2] = WholeBodyFrame(frames[1].timestamp, frames[2].arm_joints, frames[2].hand_joints,
                               frames[2].base_command, frames[2].base_pose)
    r = validate(frames, MODEL)
    assert r.summary["timestamp_gaps"] == 1 and r.timestamp_gaps[0].dt == 0.0


def test_frame_validation():
    with pytest.raises(ValueError, match="14"):
        WholeBodyFrame(0.0, (0.0,) * 13, (0.0,) * 12, BaseCommand(0, 0, 1), Pose6D.identity())
    with pytest.raises(ValueError, match="12"):
        WholeBodyFrame(0.0, (0.0,) * 14, (0.0,) * 11, BaseCommand(0, 0, 1), Pose6D.identity())
    with pytest.raises(ValueError):
        WholeBodyFrame(float("nan"), (0.0,) * 14, (0.0,) * 12, BaseCommand(0, 0, 1), Pose6D.identity())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linear_stays_in_neighbour_hull_and_slerp_unit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 20))
    t = np.cumsum(rng.uniform(0.01, 1.0, n))
    v = rng.normal(size=(n, 3)) * 10.0 ** rng.integers(-3, 6)
    targets = np.sort(rng.uniform(t[0], t[-1], 30))
    out = resample(Channel(t, v), targets).values
    idx = np.clip(np.searchsorted(t, targets, side="right") - 1, 0, n - 2)
    lo = np.minimum(v[idx], v[idx + 1])
    hi = np.maximum(v[idx], v[idx + 1])
    assert np.all(out >= lo) and np.all(out <= hi)
    q = np.array([random_quat(rng).as_list() for _ in range(n)])
    qs = resample(Channel(t, q, "slerp"), targets).values
    np.testing.assert_allclose(np.linalg.norm(qs, axis=1), 1.0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_validate_locality(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    lims = np.array(MODEL.joint_limits())
    frames = []
    t = 0.0
    q = (lims[:, 0] + lims[:, 1]) / 2
    for _ in range(n):
        t += rng.uniform(0.005, 0.03)
        q = np.clip(q + rng.normal(size=26) * 0.02, lims[:, 0], lims[:, 1])
        frames.append(WholeBodyFrame(t, tuple(q[:14]), tuple(q[14:]), BaseCommand(0, 0, 0.75), Pose6D.identity()))
    if not validate(frames, MODEL).is_empty():
        return
    i, j = sorted(rng.integers(0, n + 1, 2))
    assert validate(frames[i:j], MODEL).is_empty()
