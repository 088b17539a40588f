"""Dataset manifests, seeded teleop/exo mixing and episode statistics.

Mixing is reproducible across platforms and implementations: episode files
(``*.jsonl``) are sorted by path, then a partial Fisher-Yates shuffle draws
the requested count using SplitMix64 (Steele, Lea & Flood 2014) with
rejection sampling for unbiased bounded integers. One generator is seeded
with ``seed`` and draws the teleop subset first, then the exo subset.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from exoretarget.io.episode import Episode, read_episode
from exoretarget.trajectory import ValidationThresholds, validate

MANIFEST_FORMAT = "exo-manifest"
_MASK64 = (1 << 64) - 1


class InsufficientEpisodesError(ValueError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def sample_without_replacement(items: Sequence, k: int, rng: SplitMix64) -> list:
    pool = list(items)
    if k > len(pool):
        raise InsufficientEpisodesError(f"cannot draw {k} items from {len(pool)}")
    for i in range(k):
        j = i + rng.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    source: str
    task_label: str
    frame_count: int
    duration: float


@dataclass(frozen=True)
class SourceTotals:
    episodes: int = 0
    frames: int = 0
    duration: float = 0.0


@dataclass(frozen=True)
class DatasetManifest:
    episodes: tuple[ManifestEntry, ...]
    seed: int | None = None
    totals: dict[str, SourceTotals] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "episodes", tuple(self.episodes))
        totals = {}
        for src in ("teleop", "exo"):
            es = [e for e in self.episodes if e.source == src]
            totals[src] = SourceTotals(len(es), sum(e.frame_count for e in es), math.fsum(e.duration for e in es))
        object.__setattr__(self, "totals", totals)

    @property
    def teleop_fraction(self) -> float:
        n = len(self.episodes)
        return self.totals["teleop"].episodes / n if n else 0.0

    def to_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "seed": self.seed,
            "episodes": [
                {"path": e.path, "source": e.source, "task_label": e.task_label,
                 "frame_count": e.frame_count, "duration": e.duration}
                for e in self.episodes
            ],
            "totals": {
                src: {"episodes": t.episodes, "frames": t.frames, "duration": t.duration}
                for src, t in self.totals.items()
            },
            "teleop_fraction": self.teleop_fraction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> DatasetManifest:
        if data.get("format") != MANIFEST_FORMAT:
            raise ValueError("not an exo-manifest document")
        entries = tuple(
            ManifestEntry(e["path"], e["source"], e.get("task_label", ""), int(e["frame_count"]), float(e["duration"]))
            for e in data["episodes"]
        )
        m = cls(entries, data.get("seed"))
        stored = data.get("totals")
        if stored is not None and stored != m.to_dict()["totals"]:
            raise ValueError("manifest totals do not match its episode list")
        return m


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    Path(path).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")


def read_manifest(path: str | Path) -> DatasetManifest:
    return DatasetManifest.from_dict(json.loads(Path(path).read_text()))


def is_manifest_file(path: str | Path) -> bool:
    try:
        with open(path, encoding="utf-8") as fh:
            head = fh.read(4096)
    except OSError:
        return False
    return f'"format": "{MANIFEST_FORMAT}"' in head or f'"format":"{MANIFEST_FORMAT}"' in head


def list_episodes(directory: str | Path) -> list[Path]:
    return sorted(Path(directory).glob("*.jsonl"))


def _entry(path: Path, expected_source: str) -> ManifestEntry:
    ep = read_episode(path)
    if ep.header.source != expected_source:
        raise ValueError(f"{path}: source {ep.header.source!r} found in the {expected_source} directory")
    return ManifestEntry(str(path), ep.header.source, ep.header.task_label, len(ep.frames), ep.duration)


def mix_manifest(teleop_dir, exo_dir, teleop_n: int, exo_n: int, seed: int) -> DatasetManifest:
    """Seeded sample of ``teleop_n`` teleop and ``exo_n`` exo episodes."""
    rng = SplitMix64(seed)
    chosen = []
    for directory, n, src in ((teleop_dir, teleop_n, "teleop"), (exo_dir, exo_n, "exo")):
        if n < 0:
            raise ValueError(f"{src} count must be >= 0, got {n}")
        available = list_episodes(directory) if n else []
        if n > len(available):
            raise InsufficientEpisodesError(f"{src}: requested {n} episodes but {directory} holds {len(available)}")
        picked = sorted(sample_without_replacement(available, n, rng))
        chosen.extend(_entry(p, src) for p in picked)
    return DatasetManifest(tuple(chosen), seed)


def _range(vals: list[float]) -> dict:
    return {"min": min(vals), "max": max(vals)} if vals else {"min": None, "max": None}


def stats(episodes: Sequence[Episode], robot_model, thresholds: ValidationThresholds | None = None,
          joint_names: Sequence[str] | None = None) -> dict:
    """Summary over all frames of ``episodes``.

    Frame-level entries (per-joint min/max/mean, command ranges, frame and
    limit-violation counts) depend only on the multiset of frames, so they
    are unchanged when an episode is split into pieces. Means use exactly
    rounded sums. ``duration`` and the velocity/gap counts are per-episode
    quantities; splitting drops the transition at each cut.
    """
    names = list(joint_names) if joint_names is not None else robot_model.joint_names()
    columns: list[list[float]] = [[] for _ in names]
    cmd: list[list[float]] = [[], [], []]
    counts = {"limit_violations": 0, "velocity_spikes": 0, "timestamp_gaps": 0}
    n_frames = 0
    for ep in episodes:
        for f in ep.frames:
            n_frames += 1
            for col, v in zip(columns, f.joints):
                col.append(v)
            for col, v in zip(cmd, f.base_command.as_list()):
                col.append(v)
        for k, v in validate(ep.frames, robot_model, thresholds).summary.items():
            counts[k] += v
    return {
        "episodes": len(episodes),
        "frames": n_frames,
        "duration": math.fsum(ep.duration for ep in episodes),
        "joints": [
            {"name": name, "min": min(col), "max": max(col), "mean": math.fsum(col) / len(col)}
            if col else {"name": name, "min": None, "max": None, "mean": None}
            for name, col in zip(names, columns)
        ],
        "command": {k: _range(v) for k, v in zip(("v_x", "omega_z", "h"), cmd)},
        "violations": counts,
    }


def load_episodes(path: str | Path) -> list[Episode]:
    """Episodes named by a manifest file, or the single episode at ``path``.

    Manifest entries with relative paths resolve against the manifest's directory.
    """
    path = Path(path)
    if is_manifest_file(path):
        m = read_manifest(path)
        out = []
        for e in m.episodes:
            p = Path(e.path)
            if not p.is_absolute() and not p.exists():
                p = path.parent / p
            out.append(read_episode(p))
        return out
    return [read_episode(path)]
