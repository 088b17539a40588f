"""Runtime contracts of the lower-body balance controller.

Observation layout, flattened in this fixed order (``n`` controlled joints)::

    offset        length  field
    0             3       command  [v_x, omega_z, h]
    3             3       omega_body (base angular velocity, torso frame)
    6             3       gravity_body (unit gravity, torso frame)
    9             n       q
    9 + n         n       qdot
    9 + 2n        n       a_prev

Total length ``9 + 3n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from exoretarget.base import BaseCommand

BASE_OBS_DIM = 9


def _vec(name: str, v, n: int | None = None) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if n is not None and a.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {a.shape[0]}")
    return a


def _finite(name: str, a: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


@dataclass(frozen=True, eq=False)
class Observation:
    command: np.ndarray  # [v_x, omega_z, h]; a BaseCommand is accepted
    omega_body: np.ndarray
    gravity_body: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    a_prev: np.ndarray

    def __post_init__(self):
        cmd = self.command.as_list() if isinstance(self.command, BaseCommand) else self.command
        object.__setattr__(self, "command", _vec("command", cmd, 3))
        object.__setattr__(self, "omega_body", _vec("omega_body", self.omega_body, 3))
        object.__setattr__(self, "gravity_body", _vec("gravity_body", self.gravity_body, 3))
        q = _vec("q", self.q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", _vec("qdot", self.qdot, q.shape[0]))
        object.__setattr__(self, "a_prev", _vec("a_prev", self.a_prev, q.shape[0]))

    @property
    def n_joints(self) -> int:
        return self.q.shape[0]

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.command, self.omega_body, self.gravity_body, self.q, self.qdot, self.a_prev])

    @classmethod
    def unflatten(cls, vec, n_joints: int) -> Observation:
        v = _vec("observation", vec, observation_dim(n_joints))
        n = n_joints
        return cls(
            v[0:3].copy(),
            v[3:6].copy(),
            v[6:9].copy(),
            v[9:9 + n].copy(),
            v[9 + n:9 + 2 * n].copy(),
            v[9 + 2 * n:9 + 3 * n].copy(),
        )


def observation_dim(n_joints: int) -> int:
    return BASE_OBS_DIM + 3 * n_joints


def build_observation(command, omega, gravity, q, qdot, a_prev) -> np.ndarray:
    return Observation(command, omega, gravity, q, qdot, a_prev).flatten()


def apply_action(q0, a) -> np.ndarray:
    """Desired joint targets ``q0 + a``."""
    q0 = _vec("q0", q0)
    return q0 + _vec("action", a, q0.shape[0])


@dataclass(frozen=True, eq=False)
class PdGains:
    kp: np.ndarray
    kd: np.ndarray

    def __post_init__(self):
        kp = _finite("kp", _vec("kp", self.kp))
        kd = _finite("kd", _vec("kd", self.kd, kp.shape[0]))
        if np.any(kp < 0) or np.any(kd < 0):
            raise ValueError("PD gains must be non-negative")
        object.__setattr__(self, "kp", kp)
        object.__setattr__(self, "kd", kd)


def pd_torque(q_des, q, qdot, gains: PdGains) -> np.ndarray:
    """``tau_i = kp_i * (q_des_i - q_i) - kd_i * qdot_i``."""
    n = gains.kp.shape[0]
    q_des = _finite("q_des", _vec("q_des", q_des, n))
    q = _finite("q", _vec("q", q, n))
    qdot = _finite("qdot", _vec("qdot", qdot, n))
    return gains.kp * (q_des - q) - gains.kd * qdot


@dataclass(frozen=True, eq=False)
class JointRangeCurriculum:
    q0: np.ndarray
    full_limits: np.ndarray
    r: float

    def __post_init__(self):
        q0 = _vec("q0", self.q0)
        lim = np.asarray(self.full_limits, dtype=float).reshape(-1, 2)
        if lim.shape[0] != q0.shape[0]:
            raise ValueError(f"{q0.shape[0]} nominal joints but {lim.shape[0]} limits")
        if np.any(lim[:, 0] > lim[:, 1]):
            raise ValueError("every limit needs lo <= hi")
        if np.any(q0 < lim[:, 0]) or np.any(q0 > lim[:, 1]):
            raise ValueError("nominal pose q0 lies outside the full limits")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"curriculum ratio r must lie in [0, 1], got {self.r}")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "full_limits", lim)


def scaled_limits(curriculum: JointRangeCurriculum) -> np.ndarray:
    """Per-joint ``(lo, hi)`` shrunk toward ``q0`` by the ratio ``r``; shape (n, 2)."""
    c = curriculum
    if not 0.0 <= c.r <= 1.0:
        raise ValueError(f"curriculum ratio r must lie in [0, 1], got {c.r}")
    lo = c.q0 + c.r * (c.full_limits[:, 0] - c.q0)
    hi = c.q0 + c.r * (c.full_limits[:, 1] - c.q0)
    return np.stack([lo, hi], axis=1)


@dataclass(frozen=True, eq=False)
class MirrorSpec:
    """Reflection across the sagittal x-z plane: ``out[i] = sign[i] * x[perm[i]]``.

    Valid specs are involutions: ``perm[perm[i]] == i`` and
    ``sign[i] == sign[perm[i]]``.
    """

    joint_permutation: np.ndarray
    joint_sign: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.joint_permutation, dtype=int).reshape(-1)
        sign = np.asarray(self.joint_sign, dtype=float).reshape(-1)
        n = perm.shape[0]
        if sign.shape[0] != n:
            raise ValueError(f"mirror permutation has {n} entries but sign has {sign.shape[0]}")
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("mirror joint_permutation is not a permutation")
        if np.any(perm[perm] != np.arange(n)):
            raise ValueError("mirror joint_permutation must be an involution")
        if not np.all(np.isin(sign, (-1.0, 1.0))):
            raise ValueError("mirror joint_sign entries must be +1 or -1")
        if np.any(sign != sign[perm]):
            raise ValueError("mirror signs must agree on swapped joint pairs")
        object.__setattr__(self, "joint_permutation", perm)
        object.__setattr__(self, "joint_sign", sign)

    @property
    def n(self) -> int:
        return self.joint_permutation.shape[0]

    def apply(self, x) -> np.ndarray:
        x = _vec("mirrored vector", x, self.n)
        return self.joint_sign * x[self.joint_permutation]

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]], negate: Sequence[int] = ()) -> MirrorSpec:
        perm = list(range(n))
        for i, j in pairs:
            perm[i], perm[j] = j, i
        sign = [1.0] * n
        for i in negate:
            sign[i] = -1.0
        return cls(perm, sign)

    @classmethod
    def from_dict(cls, data: dict) -> MirrorSpec:
        return cls(data["permutation"], data["sign"])

    def to_dict(self) -> dict:
        return {"permutation": self.joint_permutation.tolist(), "sign": self.joint_sign.tolist()}


def mirror_command(command: BaseCommand) -> BaseCommand:
    return BaseCommand(command.v_x, -command.omega_z, command.h)


def mirror(q, qdot, a, command: BaseCommand, spec: MirrorSpec):
    """Mirrored copy ``(q, qdot, a, command)``; inputs are left untouched."""
    return spec.apply(q), spec.apply(qdot), spec.apply(a), mirror_command(command)


def mirror_base_vectors(omega, gravity) -> tuple[np.ndarray, np.ndarray]:
    """Reflect torso-frame vectors across x-z.

    Angular velocity is a pseudovector, so its x and z flip while y is kept;
    gravity is a polar vector, so only its y flips.
    """
    w = _vec("omega", omega, 3)
    g = _vec("gravity", gravity, 3)
    return w * np.array([-1.0, 1.0, -1.0]), g * np.array([1.0, -1.0, 1.0])


def mirror_observation(obs: Observation, spec: MirrorSpec) -> Observation:
    q, qdot, a = spec.apply(obs.q), spec.apply(obs.qdot), spec.apply(obs.a_prev)
    cmd = obs.command * np.array([1.0, -1.0, 1.0])
    w, g = mirror_base_vectors(obs.omega_body, obs.gravity_body)
    return Observation(cmd, w, g, q, qdot, a)


# Default 12-joint lower body, left leg then right leg. Hip pitch, knee and
# ankle pitch keep their sign under the reflection; hip roll, hip yaw and ankle
# roll flip. Convention-dependent placeholder for the real robot's joint table.
LOWER_BODY_JOINTS = (
    "left_hip_pitch", "left_hip_roll", "left_hip_yaw", "left_knee", "left_ankle_pitch", "left_ankle_roll",
    "right_hip_pitch", "right_hip_roll", "right_hip_yaw", "right_knee", "right_ankle_pitch", "right_ankle_roll",
)


def default_lower_body_mirror() -> MirrorSpec:
    return MirrorSpec.from_pairs(12, [(i, i + 6) for i in range(6)], negate=(1, 2, 5, 7, 8, 11))
