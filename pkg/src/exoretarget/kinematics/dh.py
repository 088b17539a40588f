"""Denavit-Hartenberg chains: forward kinematics and orientation Jacobians.

Standard (distal) DH: each row contributes ``Rz(theta) Tz(d) Tx(a) Rx(alpha)``,
and the joint of row ``k`` rotates about the z axis of the frame produced by
rows ``0..k-1``. ``theta`` depends on the row kind:

- ``revolute-active``: ``theta_offset + q[i]`` for the next active index ``i``.
- ``revolute-passive``: ``theta_offset + gain * q[active_index] + offset``
  through the chain's coupling map (linkage or timing-belt joint).
- ``fixed``: ``theta_offset``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from exoretarget.kinematics.quaternion import Pose6D, UnitQuaternion


class JointKind(str, Enum):
    ACTIVE = "revolute-active"
    PASSIVE = "revolute-passive"
    FIXED = "fixed"


def _in_half_open_pi(v: float) -> bool:
    return -math.pi < v <= math.pi


@dataclass(frozen=True)
class DHRow:
    a: float
    alpha: float
    d: float
    theta_offset: float = 0.0
    kind: JointKind = JointKind.ACTIVE

    def __post_init__(self):
        object.__setattr__(self, "kind", JointKind(self.kind))
        for name in ("a", "alpha", "d", "theta_offset"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"DH {name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if not _in_half_open_pi(self.alpha):
            raise ValueError(f"DH alpha must lie in (-pi, pi], got {self.alpha}")
        if not _in_half_open_pi(self.theta_offset):
            raise ValueError(f"DH theta_offset must lie in (-pi, pi], got {self.theta_offset}")


@dataclass(frozen=True)
class PassiveCoupling:
    """``passive angle = gain * q[active_index] + offset``.

    ``passive_index`` counts passive rows in chain order; ``active_index``
    counts active rows.
    """

    passive_index: int
    active_index: int
    gain: float = 1.0
    offset: float = 0.0


@dataclass(frozen=True)
class KinematicChain:
    rows: tuple[DHRow, ...]
    joint_limits: tuple[tuple[float, float], ...]
    name: str = "chain"
    passive_couplings: tuple[PassiveCoupling, ...] = ()
    # row index -> (kind, active index or coupling); derived
    _plan: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        limits = tuple((float(lo), float(hi)) for lo, hi in self.joint_limits)
        object.__setattr__(self, "joint_limits", limits)
        object.__setattr__(self, "passive_couplings", tuple(self.passive_couplings))

        n_active = sum(r.kind is JointKind.ACTIVE for r in self.rows)
        n_passive = sum(r.kind is JointKind.PASSIVE for r in self.rows)
        if len(limits) != n_active:
            raise ValueError(f"chain {self.name!r}: {n_active} active joints but {len(limits)} limits")
        for i, (lo, hi) in enumerate(limits):
            if not lo < hi:
                raise ValueError(f"chain {self.name!r}: joint {i} limit lo={lo} must be < hi={hi}")

        by_passive = {}
        for c in self.passive_couplings:
            if not 0 <= c.passive_index < n_passive:
                raise ValueError(f"chain {self.name!r}: coupling passive_index {c.passive_index} out of range")
            if not 0 <= c.active_index < n_active:
                raise ValueError(f"chain {self.name!r}: coupling active_index {c.active_index} out of range")
            if c.passive_index in by_passive:
                raise ValueError(f"chain {self.name!r}: passive joint {c.passive_index} coupled twice")
            by_passive[c.passive_index] = c
        if len(by_passive) != n_passive:
            missing = sorted(set(range(n_passive)) - set(by_passive))
            raise ValueError(f"chain {self.name!r}: passive joints {missing} have no coupling")

        plan = []
        ia = ip = 0
        for row in self.rows:
            if row.kind is JointKind.ACTIVE:
                plan.append((row, ia, None))
                ia += 1
            elif row.kind is JointKind.PASSIVE:
                plan.append((row, None, by_passive[ip]))
                ip += 1
            else:
                plan.append((row, None, None))
        object.__setattr__(self, "_plan", tuple(plan))

    @property
    def n_active(self) -> int:
        return len(self.joint_limits)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.joint_limits])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.joint_limits])

    def clamp(self, q) -> np.ndarray:
        return np.clip(np.asarray(q, dtype=float), self.lower, self.upper)

    def within_limits(self, q) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.lower) and np.all(q <= self.upper))

    def row_angles(self, q) -> list[float]:
        """Per-row theta for active joint vector ``q``."""
        q = _check_q(self, q)
        out = []
        for row, ia, coupling in self._plan:
            if ia is not None:
                out.append(row.theta_offset + q[ia])
            elif coupling is not None:
                out.append(row.theta_offset + coupling.gain * q[coupling.active_index] + coupling.offset)
            else:
                out.append(row.theta_offset)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> KinematicChain:
        rows = [
            DHRow(r["a"], r["alpha"], r["d"], r.get("theta_offset", 0.0), r.get("kind", JointKind.ACTIVE.value))
            for r in data["dh_rows"]
        ]
        couplings = [
            PassiveCoupling(int(c["passive_index"]), int(c["active_index"]), float(c.get("gain", 1.0)), float(c.get("offset", 0.0)))
            for c in data.get("passive_couplings", [])
        ]
        return cls(tuple(rows), tuple(tuple(lim) for lim in data["limits"]), data.get("name", "chain"), tuple(couplings))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dh_rows": [
                {"a": r.a, "alpha": r.alpha, "d": r.d, "theta_offset": r.theta_offset, "kind": r.kind.value}
                for r in self.rows
            ],
            "limits": [[lo, hi] for lo, hi in self.joint_limits],
            "passive_couplings": [
                {"passive_index": c.passive_index, "active_index": c.active_index, "gain": c.gain, "offset": c.offset}
                for c in self.passive_couplings
            ],
        }


def _check_q(chain: KinematicChain, q) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != chain.n_active:
        raise ValueError(f"chain {chain.name!r} expects {chain.n_active} joint angles, got {q.shape[0]}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"joint angles must be finite, got {q}")
    return q


def dh_row_pose(row: DHRow, theta: float) -> Pose6D:
    """Transform of one row: ``Rz(theta) Tz(d) Tx(a) Rx(alpha)``."""
    ct, st = math.cos(0.5 * theta), math.sin(0.5 * theta)
    ca, sa = math.cos(0.5 * row.alpha), math.sin(0.5 * row.alpha)
    rot = UnitQuaternion(ct * ca, ct * sa, st * sa, st * ca)
    return Pose6D(rot, (row.a * math.cos(theta), row.a * math.sin(theta), row.d))


def fk_chain(chain: KinematicChain, q) -> Pose6D:
    """Pose of the distal frame relative to the chain base."""
    pose = Pose6D.identity()
    for row, theta in zip(chain.rows, chain.row_angles(q)):
        pose = pose.compose(dh_row_pose(row, theta))
    return pose


def jacobian_orientation(chain: KinematicChain, q) -> np.ndarray:
    """3 x n geometric Jacobian mapping active joint rates to base-frame angular velocity."""
    thetas = chain.row_angles(q)
    J = np.zeros((3, chain.n_active))
    rot = UnitQuaternion.identity()
    for (row, ia, coupling), theta in zip(chain._plan, thetas):
        if ia is not None or coupling is not None:
            axis = rot.rotate((0.0, 0.0, 1.0))
            if ia is not None:
                J[:, ia] += axis
            else:
                J[:, coupling.active_index] += coupling.gain * axis
        rot = rot * dh_row_pose(row, theta).rotation
    return J
