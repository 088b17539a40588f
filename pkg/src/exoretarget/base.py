"""Base commands and torso-frame quantities from a 6D torso pose stream.

The pose stream comes from an external LiDAR-inertial odometry estimator and
is consumed as world-frame torso poses (z up). Sign conventions:

- ``angular_velocity_body`` uses the body-frame left difference
  ``log(conj(R_prev) * R_next) / dt``.
- ``gravity_in_torso`` returns the world down-vector ``(0, 0, -1)``
  expressed in the torso frame, ``R^T @ (0, 0, -1)``. With x forward and
  z up, pitching nose-down by +90 deg about body y gives ``(+1, 0, 0)``:
  the forward axis now points at the ground.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from exoretarget.kinematics import Pose6D, UnitQuaternion, quat_conjugate, quat_multiply, wrap_angle, yaw_of


@dataclass(frozen=True)
class OdomSample:
    timestamp: float
    pose: Pose6D

    def __post_init__(self):
        if not math.isfinite(float(self.timestamp)):
            raise ValueError(f"odometry timestamp must be finite, got {self.timestamp}")
        object.__setattr__(self, "timestamp", float(self.timestamp))


@dataclass(frozen=True)
class BaseCommand:
    v_x: float
    omega_z: float
    h: float

    def __post_init__(self):
        vals = tuple(float(v) for v in (self.v_x, self.omega_z, self.h))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"base command must be finite, got {vals}")
        if vals[2] <= 0:
            raise ValueError(f"base command height must be > 0, got {vals[2]}")
        for name, v in zip(("v_x", "omega_z", "h"), vals):
            object.__setattr__(self, name, v)

    def as_list(self) -> list[float]:
        return [self.v_x, self.omega_z, self.h]


@dataclass(frozen=True)
class BaseState:
    omega_body: tuple[float, float, float]
    gravity_body: tuple[float, float, float]


@dataclass(frozen=True)
class BaseParams:
    smoothing_alpha: float = 0.3
    # kept for downstream height normalization; the command itself uses absolute z
    standing_height_ref: float = 0.75

    def __post_init__(self):
        if not 0 < self.smoothing_alpha <= 1:
            raise ValueError(f"smoothing_alpha must lie in (0, 1], got {self.smoothing_alpha}")


def gravity_in_torso(orientation: UnitQuaternion) -> np.ndarray:
    g = quat_conjugate(orientation).rotate((0.0, 0.0, -1.0))
    return g / np.linalg.norm(g)


def angular_velocity_body(prev: OdomSample, next: OdomSample) -> np.ndarray:
    dt = next.timestamp - prev.timestamp
    if not dt > 0:
        raise ValueError(f"odometry dt must be > 0, got {dt}")
    delta = quat_multiply(quat_conjugate(prev.pose.rotation), next.pose.rotation)
    return delta.to_rotvec() / dt


def base_state(prev: OdomSample, next: OdomSample) -> BaseState:
    w = angular_velocity_body(prev, next)
    g = gravity_in_torso(next.pose.rotation)
    return BaseState(tuple(map(float, w)), tuple(map(float, g)))


class BaseCommandEstimator:
    """Causal per-stream estimator: backward difference followed by an EMA per channel.

    Owns the EMA state for one stream; feed samples in time order with
    ``update``. The first sample only primes the estimator.
    """

    def __init__(self, params: BaseParams | None = None):
        self.params = params or BaseParams()
        self._last: OdomSample | None = None
        self._ema: np.ndarray | None = None
        self.lateral_velocity = 0.0

    def update(self, sample: OdomSample) -> tuple[float, BaseCommand] | None:
        prev, self._last = self._last, sample
        if prev is None:
            return None
        dt = sample.timestamp - prev.timestamp
        if not dt > 0:
            self._last = prev
            raise ValueError(
                f"odometry timestamps must be strictly increasing: {sample.timestamp} after {prev.timestamp}"
            )
        p0 = np.asarray(prev.pose.translation)
        p1 = np.asarray(sample.pose.translation)
        v_body = quat_conjugate(sample.pose.rotation).rotate((p1 - p0) / dt)
        yaw_rate = wrap_angle(yaw_of(sample.pose.rotation) - yaw_of(prev.pose.rotation)) / dt
        raw = np.array([v_body[0], yaw_rate, p1[2], v_body[1]])
        a = self.params.smoothing_alpha
        self._ema = raw if self._ema is None else a * raw + (1.0 - a) * self._ema
        self.lateral_velocity = float(self._ema[3])
        return sample.timestamp, BaseCommand(*map(float, self._ema[:3]))


def estimate_base_commands(stream: Sequence[OdomSample], params: BaseParams | None = None) -> list[tuple[float, BaseCommand]]:
    """Command triple ``(v_x, omega_z, h)`` for every sample after the first."""
    if len(stream) < 2:
        raise ValueError(f"need at least 2 odometry samples, got {len(stream)}")
    est = BaseCommandEstimator(params)
    out = []
    for s in stream:
        r = est.update(s)
        if r is not None:
            out.append(r)
    return out


def base_states(stream: Sequence[OdomSample]) -> list[tuple[float, BaseState]]:
    return [(b.timestamp, base_state(a, b)) for a, b in zip(stream, stream[1:])]


def odom_from_records(records: Iterable[dict]) -> list[OdomSample]:
    """Parse ``{t, q: [w,x,y,z], p: [x,y,z]}`` records."""
    return [OdomSample(r["t"], Pose6D(UnitQuaternion.from_array(r["q"]), tuple(r["p"]))) for r in records]


def odom_to_record(s: OdomSample) -> dict:
    return {"t": s.timestamp, "q": s.pose.rotation.as_list(), "p": list(s.pose.translation)}
