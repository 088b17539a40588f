"""Damped-least-squares inverse kinematics for orientation targets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from exoretarget.kinematics.dh import KinematicChain, fk_chain, jacobian_orientation
from exoretarget.kinematics.quaternion import UnitQuaternion, orientation_error

_MAX_DAMPING = 1e6
_MIN_DAMPING = 1e-9


@dataclass(frozen=True)
class IkOptions:
    damping: float = 1e-2
    max_iterations: int = 100
    tolerance: float = 1e-6
    step_scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.damping) and self.damping >= 0):
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be an integer >= 1, got {self.max_iterations}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if not 0 < self.step_scale <= 1:
            raise ValueError(f"step_scale must lie in (0, 1], got {self.step_scale}")

    @classmethod
    def from_dict(cls, data: dict) -> IkOptions:
        return cls(**{k: data[k] for k in ("damping", "max_iterations", "tolerance", "step_scale") if k in data})

    def to_dict(self) -> dict:
        return {"damping": self.damping, "max_iterations": self.max_iterations,
                "tolerance": self.tolerance, "step_scale": self.step_scale}


class IkResult(NamedTuple):
    q: np.ndarray
    residual: float
    iterations: int
    converged: bool
    # joints held on a limit by clamping in the step that produced q
    clamped: np.ndarray


def _dls_step(J: np.ndarray, err: np.ndarray, lam: float, free: np.ndarray) -> np.ndarray:
    dq = np.zeros(J.shape[1])
    if not free.any():
        return dq
    Jf = J[:, free]
    A = Jf @ Jf.T + (lam * lam) * np.eye(3)
    try:
        dq[free] = Jf.T @ np.linalg.solve(A, err)
    except np.linalg.LinAlgError:
        dq[free] = np.linalg.pinv(Jf) @ err
    return dq


def _bounded_step(J, err, lam, q, lo, hi):
    """DLS step with joints pinned on a bound removed while the step pushes them outward."""
    free = np.ones(q.shape[0], dtype=bool)
    while True:
        dq = _dls_step(J, err, lam, free)
        outward = free & (((q >= hi) & (dq > 0)) | ((q <= lo) & (dq < 0)))
        if not outward.any():
            return dq, ~free
        free &= ~outward


def ik_orientation(chain: KinematicChain, target: UnitQuaternion, seed, opts: IkOptions | None = None) -> IkResult:
    """Solve ``fk_chain(chain, q).rotation == target`` for ``q`` inside the joint limits.

    Levenberg-style damped least squares: the damping starts at
    ``opts.damping``, grows when a step fails to reduce the residual and decays
    back after successful steps. Joints on a limit whose step points outward
    are frozen, which keeps the iteration a descent method on the limit box.
    Non-convergence is reported through ``residual``, never raised.

    Returns:
        IkResult with the best joints found (always within limits), the
        orientation-error magnitude there, and the number of iterations spent.
    """
    opts = opts or IkOptions()
    seed = np.asarray(seed, dtype=float).reshape(-1)
    if seed.shape[0] != chain.n_active:
        raise ValueError(f"chain {chain.name!r} expects {chain.n_active} seed angles, got {seed.shape[0]}")
    if not np.all(np.isfinite(seed)):
        raise ValueError(f"IK seed must be finite, got {seed}")
    if not isinstance(target, UnitQuaternion):
        target = UnitQuaternion.from_array(target)

    lo, hi = chain.lower, chain.upper
    q = np.clip(seed, lo, hi)
    clamped = np.zeros(q.shape[0], dtype=bool)
    err = orientation_error(fk_chain(chain, q).rotation, target)
    res = float(np.linalg.norm(err))
    lam = opts.damping
    it = 0
    while it < opts.max_iterations and res > opts.tolerance and chain.n_active:
        it += 1
        J = jacobian_orientation(chain, q)
        dq, frozen = _bounded_step(J, err, lam, q, lo, hi)
        raw = q + opts.step_scale * dq
        q_new = np.clip(raw, lo, hi)
        err_new = orientation_error(fk_chain(chain, q_new).rotation, target)
        res_new = float(np.linalg.norm(err_new))
        if res_new < res:
            q, err, res = q_new, err_new, res_new
            clamped = frozen | (raw != q_new)
            lam = max(0.5 * lam, _MIN_DAMPING)
        else:
            lam = max(4.0 * lam, 1e-6)
            if lam > _MAX_DAMPING:
                break
    return IkResult(q, res, it, res <= opts.tolerance, clamped)
