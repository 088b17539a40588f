"""Unit quaternions and rigid transforms.

Conventions (every module in the package inherits these):

- Hamilton product, scalar-first ``(w, x, y, z)``, right-handed frames.
- Active rotations: ``q`` maps a vector ``v`` to ``q * (0, v) * conj(q)``.
  In a product ``a * b`` the rotation ``b`` is applied first, so
  ``R(a * b) = R(a) @ R(b)``.
- Canonical sign: ``w >= 0``. When ``w == 0`` exactly (a rotation by pi) the
  vector component with the largest magnitude is made positive, ties broken
  by index order.
- Angles are radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Constructor renormalizes only beyond this drift so already-unit inputs keep their exact bits.
_RENORM_TOL = 1e-12
# below this angle linear blending is exact to rounding
_SLERP_MIN_ANGLE = 1e-9


@dataclass(frozen=True, slots=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        comps = (float(self.w), float(self.x), float(self.y), float(self.z))
        if not all(math.isfinite(c) for c in comps):
            raise ValueError(f"quaternion components must be finite, got {comps}")
        n = math.sqrt(sum(c * c for c in comps))
        if n == 0.0:
            raise ValueError("zero quaternion has no rotation")
        if abs(n - 1.0) > _RENORM_TOL:
            comps = tuple(c / n for c in comps)
        for name, c in zip("wxyz", comps):
            object.__setattr__(self, name, c)

    @classmethod
    def identity(cls) -> UnitQuaternion:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, q: Sequence[float]) -> UnitQuaternion:
        if len(q) != 4:
            raise ValueError(f"quaternion needs 4 components [w, x, y, z], got {len(q)}")
        return cls(*map(float, q))

    @classmethod
    def from_axis_angle(cls, axis: Sequence[float], angle: float) -> UnitQuaternion:
        ax = np.asarray(axis, dtype=float)
        n = float(np.linalg.norm(ax))
        if n == 0.0:
            raise ValueError("rotation axis must be non-zero")
        s = math.sin(0.5 * angle) / n
        return cls(math.cos(0.5 * angle), ax[0] * s, ax[1] * s, ax[2] * s)

    @classmethod
    def from_rotvec(cls, rotvec: Sequence[float]) -> UnitQuaternion:
        rv = np.asarray(rotvec, dtype=float)
        angle = float(np.linalg.norm(rv))
        if angle == 0.0:
            return cls.identity()
        return cls.from_axis_angle(rv / angle, angle)

    @classmethod
    def from_matrix(cls, R) -> UnitQuaternion:
        """Shepperd's method; picks the numerically largest pivot."""
        m = np.asarray(R, dtype=float)
        tr = m[0, 0] + m[1, 1] + m[2, 2]
        pivots = (tr, m[0, 0], m[1, 1], m[2, 2])
        k = int(np.argmax(pivots))
        if k == 0:
            s = 2.0 * math.sqrt(1.0 + tr)
            q = (0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s)
        elif k == 1:
            s = 2.0 * math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
            q = ((m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s)
        elif k == 2:
            s = 2.0 * math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
            q = ((m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s)
        else:
            s = 2.0 * math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
            q = ((m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s)
        return cls(*q).canonical()

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def as_list(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    def as_matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def canonical(self) -> UnitQuaternion:
        if self.w > 0.0:
            return self
        if self.w < 0.0:
            return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)
        v = (self.x, self.y, self.z)
        k = max(range(3), key=lambda i: (abs(v[i]), -i))
        if v[k] < 0.0:
            return UnitQuaternion(0.0, -self.x, -self.y, -self.z)
        return UnitQuaternion(0.0, *v)

    def conjugate(self) -> UnitQuaternion:
        return quat_conjugate(self)

    def __mul__(self, other: UnitQuaternion) -> UnitQuaternion:
        if not isinstance(other, UnitQuaternion):
            return NotImplemented
        return quat_multiply(self, other)

    def rotate(self, v: Sequence[float]) -> np.ndarray:
        """Rotate a 3-vector: ``R(q) @ v``."""
        w, x, y, z = self.w, self.x, self.y, self.z
        vx, vy, vz = (float(c) for c in v)
        tx = 2.0 * (y * vz - z * vy)
        ty = 2.0 * (z * vx - x * vz)
        tz = 2.0 * (x * vy - y * vx)
        return np.array([
            vx + w * tx + (y * tz - z * ty),
            vy + w * ty + (z * tx - x * tz),
            vz + w * tz + (x * ty - y * tx),
        ])

    def angle(self) -> float:
        """Rotation magnitude in [0, pi]."""
        s = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        return 2.0 * math.atan2(s, abs(self.w))

    def to_rotvec(self) -> np.ndarray:
        """Axis * angle, magnitude in [0, pi], computed from the canonical sign."""
        c = self.canonical()
        v = np.array([c.x, c.y, c.z])
        s = float(np.linalg.norm(v))
        if s == 0.0:
            return np.zeros(3)
        return v * (2.0 * math.atan2(s, c.w) / s)


def _hamilton(a: UnitQuaternion, b: UnitQuaternion) -> tuple[float, float, float, float]:
    return (
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def quat_multiply(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product ``a * b``, renormalized and canonicalized."""
    return UnitQuaternion(*_hamilton(a, b)).canonical()


def quat_conjugate(q: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(q.w, -q.x, -q.y, -q.z).canonical()


def orientation_error(current: UnitQuaternion, target: UnitQuaternion) -> np.ndarray:
    """Rotation vector of ``target * conj(current)``, expressed in the base frame.

    This is the rotation that carries ``current`` onto ``target`` when applied on
    the left, which is what a spatial (base-frame) angular Jacobian predicts.
    """
    return UnitQuaternion(*_hamilton(target, UnitQuaternion(current.w, -current.x, -current.y, -current.z))).to_rotvec()


def angular_distance(a: UnitQuaternion, b: UnitQuaternion) -> float:
    """Geodesic angle between two rotations, in [0, pi]."""
    return _half_angle_between(a.as_array(), b.as_array()) * 2.0


def _half_angle_between(qa: np.ndarray, qb: np.ndarray) -> float:
    """Angle between unit 4-vectors modulo sign, in [0, pi/2].

    The ``atan2(|a - b|, |a + b|)`` form keeps full precision for nearby
    inputs, where ``acos`` of the dot product bottoms out near 1e-8.
    """
    if float(qa @ qb) < 0.0:
        qb = -qb
    return 2.0 * math.atan2(float(np.linalg.norm(qa - qb)), float(np.linalg.norm(qa + qb)))


def slerp(a: UnitQuaternion, b: UnitQuaternion, t: float) -> UnitQuaternion:
    """Shortest-path spherical interpolation; ``t=0`` gives ``a``, ``t=1`` gives ``b``."""
    qa = a.as_array()
    qb = b.as_array()
    if float(qa @ qb) < 0.0:
        qb = -qb
    theta = _half_angle_between(qa, qb)
    if theta < _SLERP_MIN_ANGLE:
        out = qa + t * (qb - qa)
    else:
        s = math.sin(theta)
        out = (math.sin((1.0 - t) * theta) / s) * qa + (math.sin(t * theta) / s) * qb
    return UnitQuaternion(*(out / np.linalg.norm(out)))


def yaw_of(q: UnitQuaternion) -> float:
    """ZYX Euler yaw in (-pi, pi]."""
    return wrap_angle(math.atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z)))


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(a, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True, slots=True)
class Pose6D:
    """Rigid transform: ``p -> rotation.rotate(p) + translation`` (meters)."""

    rotation: UnitQuaternion
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        t = tuple(float(v) for v in self.translation)
        if len(t) != 3:
            raise ValueError(f"translation needs 3 components, got {len(t)}")
        if not all(math.isfinite(v) for v in t):
            raise ValueError(f"translation must be finite, got {t}")
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> Pose6D:
        return cls(UnitQuaternion.identity())

    @classmethod
    def from_matrix(cls, T) -> Pose6D:
        T = np.asarray(T, dtype=float)
        return cls(UnitQuaternion.from_matrix(T[:3, :3]), tuple(T[:3, 3]))

    def as_matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation.as_matrix()
        T[:3, 3] = self.translation
        return T

    def compose(self, other: Pose6D) -> Pose6D:
        """``self * other``: apply ``other`` first, then ``self``."""
        t = self.rotation.rotate(other.translation) + np.asarray(self.translation)
        return Pose6D(quat_multiply(self.rotation, other.rotation), tuple(t))

    def __matmul__(self, other: Pose6D) -> Pose6D:
        return self.compose(other)

    def inverse(self) -> Pose6D:
        r = quat_conjugate(self.rotation)
        return Pose6D(r, tuple(-r.rotate(self.translation)))

    def apply(self, point: Sequence[float]) -> np.ndarray:
        return self.rotation.rotate(point) + np.asarray(self.translation)
