"""Random but valid domain objects for round-trip and bookkeeping tests."""
import numpy as np

from exoretarget.base import BaseCommand
from exoretarget.io.episode import Episode, EpisodeHeader
from exoretarget.kinematics import Pose6D, UnitQuaternion
from exoretarget.trajectory import WholeBodyFrame


def awkward_floats(rng, n):
    """Doubles spread over many magnitudes, including exact zeros and negative zero."""
    v = rng.normal(size=n) * 10.0 ** rng.integers(-12, 4, size=n)
    v[rng.random(n) < 0.05] = 0.0
    v[rng.random(n) < 0.05] = -0.0
    return v


def random_frame(rng, t, with_cams=True):
    q = rng.normal(size=4)
    h = float(abs(awkward_floats(rng, 1)[0])) + 0.1
    cams = tuple(f"cam{k}/{int(rng.integers(1_000_000)):06d}" for k in range(int(rng.integers(0, 3)))) if with_cams else None
    return WholeBodyFrame(
        t,
        tuple(awkward_floats(rng, 14)),
        tuple(awkward_floats(rng, 12)),
        BaseCommand(float(awkward_floats(rng, 1)[0]), float(awkward_floats(rng, 1)[0]), h),
        Pose6D(UnitQuaternion(*(q / np.linalg.norm(q))), tuple(awkward_floats(rng, 3))),
        cams,
    )


def random_episode(rng, n_frames=None, source="exo", task_label=None):
    n = int(rng.integers(0, 40)) if n_frames is None else n_frames
    times = np.cumsum(rng.uniform(1e-3, 0.1, size=n)) + rng.uniform(-5, 5)
    with_cams = bool(rng.random() < 0.7)
    frames = tuple(random_frame(rng, float(t), with_cams) for t in times)
    label = task_label if task_label is not None else rng.choice(["", "pick", "place box", "ünïcode \"quoted\""])
    header = EpisodeHeader("g1_placeholder", source, str(label),
                           None if rng.random() < 0.5 else "2026-10-14T12:00:00Z", bool(rng.random() < 0.5))
    return Episode(header, frames)
