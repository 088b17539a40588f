import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import chain_couplings, chain_rows, random_chain
from oracles import fk_matrix
from exoretarget.kinematics import DHRow, KinematicChain, PassiveCoupling, fk_chain, jacobian_orientation, dh_row_pose
from oracles import dh_matrix


def fd_jacobian(chain, q, h=1e-6):
    J = np.zeros((3, chain.n_active))
    for j in range(chain.n_active):
        dq = np.zeros_like(q)
        dq[j] = h
        Rp = fk_matrix(chain_rows(chain), q + dq, chain_couplings(chain))[:3, :3]
        Rm = fk_matrix(chain_rows(chain), q - dq, chain_couplings(chain))[:3, :3]
        J[:, j] = Rotation.from_matrix(Rp @ Rm.T).as_rotvec() / (2 * h)
    return J


def test_single_row_matches_matrix(rng):
    for _ in range(100):
        row = DHRow(rng.normal(), rng.uniform(-math.pi, math.pi), rng.normal(), 0.0)
        th = rng.uniform(-4, 4)
        np.testing.assert_allclose(dh_row_pose(row, th).as_matrix(), dh_matrix(row.a, row.alpha, row.d, th), atol=1e-14)


def test_fk_matches_oracle_with_fixed_and_passive(rng):
    for _ in range(200):
        chain = random_chain(rng, int(rng.integers(1, 8)), with_fixed=True, with_passive=True)
        q = rng.uniform(chain.lower, chain.upper)
        T = fk_matrix(chain_rows(chain), q, chain_couplings(chain))
        np.testing.assert_allclose(fk_chain(chain, q).as_matrix(), T, atol=1e-10)


def test_zero_chain_is_identity():
    chain = KinematicChain((), ())
    assert fk_chain(chain, []).as_matrix().tolist() == np.eye(4).tolist()
    assert jacobian_orientation(chain, []).shape == (3, 0)


def test_jacobian_matches_finite_differences_with_couplings(rng):
    for _ in range(100):
        chain = random_chain(rng, int(rng.integers(1, 8)), with_fixed=True, with_passive=True)
        q = rng.uniform(chain.lower, chain.upper)
        np.testing.assert_allclose(jacobian_orientation(chain, q), fd_jacobian(chain, q), atol=1e-5)


def test_row_validation():
    with pytest.raises(ValueError):
        DHRow(0, 4.0, 0)
    with pytest.raises(ValueError):
        DHRow(0, -math.pi, 0)
    DHRow(0, math.pi, 0, math.pi)
    with pytest.raises(ValueError):
        DHRow(float("inf"), 0, 0)
    with pytest.raises(ValueError):
        DHRow(0, 0, 0, 0, "prismatic")


def test_chain_validation():
    row = DHRow(0, 0, 0)
    passive = DHRow(0, 0, 0, 0, "revolute-passive")
    with pytest.raises(ValueError, match="limits"):
        KinematicChain((row,), ())
    with pytest.raises(ValueError, match="lo="):
        KinematicChain((row,), ((1, 0),))
    with pytest.raises(ValueError, match="no coupling"):
        KinematicChain((row, passive), ((-1, 1),))
    with pytest.raises(ValueError, match="out of range"):
        KinematicChain((row, passive), ((-1, 1),), "c", (PassiveCoupling(0, 3),))
    with pytest.raises(ValueError, match="twice"):
        KinematicChain((row, passive), ((-1, 1),), "c", (PassiveCoupling(0, 0), PassiveCoupling(0, 0)))
    chain = KinematicChain((row,), ((-1, 1),))
    with pytest.raises(ValueError, match="expects 1"):
        fk_chain(chain, [0, 0])
    with pytest.raises(ValueError, match="finite"):
        fk_chain(chain, [float("nan")])


def test_chain_dict_round_trip(rng):
    chain = random_chain(rng, 5, with_fixed=True, with_passive=True)
    back = KinematicChain.from_dict(chain.to_dict())
    assert back == chain
    q = rng.uniform(chain.lower, chain.upper)
    assert fk_chain(back, q).as_matrix().tolist() == fk_chain(chain, q).as_matrix().tolist()


def test_limits_helpers():
    chain = KinematicChain((DHRow(0, 0, 0), DHRow(0, 0, 0)), ((-1, 1), (0, 2)))
    assert chain.clamp([-5, 5]).tolist() == [-1, 2]
    assert chain.within_limits([1, 0])
    assert not chain.within_limits([1.01, 0])
