import json

import numpy as np
import pytest

from exoretarget.kinematics import fk_chain, jacobian_orientation
from exoretarget.robot_model import (
    SIDES,
    RobotModel,
    load_robot_model,
    placeholder_g1_model,
    save_robot_model,
)

M = np.diag([1.0, -1.0, 1.0])


def test_shipped_file_matches_builder():
    assert load_robot_model().to_dict() == placeholder_g1_model().to_dict()


def test_save_load_round_trip(tmp_path):
    model = placeholder_g1_model()
    save_robot_model(model, tmp_path / "m.json")
    assert load_robot_model(tmp_path / "m.json").to_dict() == model.to_dict()


def test_missing_field_is_value_error():
    d = placeholder_g1_model().to_dict()
    del d["mirror"]
    with pytest.raises(ValueError, match="mirror"):
        RobotModel.from_dict(d)


def test_zero_pose_identity_and_axes():
    model = placeholder_g1_model()
    for side in SIDES:
        arm = model.arms[side]
        for chain in (arm.exo_chain, arm.shoulder, arm.wrist):
            np.testing.assert_allclose(fk_chain(chain, np.zeros(chain.n_active)).rotation.as_matrix(), np.eye(3), atol=1e-12)
        np.testing.assert_allclose(jacobian_orientation(arm.shoulder, np.zeros(3)), np.eye(3)[:, [1, 0, 2]], atol=1e-12)
        np.testing.assert_allclose(jacobian_orientation(arm.wrist, np.zeros(3)), np.eye(3), atol=1e-12)


def test_counts_and_names():
    model = placeholder_g1_model()
    assert len(model.joint_limits()) == 26 == len(model.joint_names())
    assert model.joint_names()[0] == "left_shoulder_pitch" and model.joint_names()[14] == "left_hand_little"
    assert model.lower_body.mirror.n == 12


def test_arm_mirror_is_a_physical_reflection(rng):
    model = placeholder_g1_model()
    L, R = model.arms["left"], model.arms["right"]
    for _ in range(100):
        q_left = rng.uniform(np.array(L.limits)[:, 0], np.array(L.limits)[:, 1])
        q_right = model.arm_mirror.apply(np.concatenate([q_left, np.zeros(7)]))[7:]
        for chain_l, chain_r, sl in ((L.shoulder, R.shoulder, slice(0, 3)), (L.wrist, R.wrist, slice(4, 7))):
            Rl = fk_chain(chain_l, q_left[sl]).rotation.as_matrix()
            Rr = fk_chain(chain_r, q_right[sl]).rotation.as_matrix()
            np.testing.assert_allclose(Rr, M @ Rl @ M, atol=1e-12)
        assert q_right[3] == q_left[3]


def test_mirrored_limits_match_other_side():
    model = placeholder_g1_model()
    lims = np.array(model.arm_limits())
    for i, s in enumerate(model.arm_mirror.joint_sign):
        j = model.arm_mirror.joint_permutation[i]
        lo, hi = lims[j] if s > 0 else -lims[j][::-1]
        assert (lo, hi) == tuple(lims[i])


def test_model_validation():
    d = placeholder_g1_model().to_dict()
    d["hands"]["limits"] = d["hands"]["limits"][:11]
    with pytest.raises(ValueError, match="12 hand"):
        RobotModel.from_dict(json.loads(json.dumps(d)))
