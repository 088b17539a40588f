"""Episode files, datasets, sensor-stream formats and the CLI."""
from exoretarget.io.episode import (
    Episode,
    EpisodeFormatError,
    EpisodeHeader,
    MalformedFrameError,
    TruncatedEpisodeError,
    VersionMismatchError,
    read_episode,
    write_episode,
)
from exoretarget.io.dataset import DatasetManifest, mix_manifest, read_manifest, stats, write_manifest

__all__ = [
    "DatasetManifest", "Episode", "EpisodeFormatError", "EpisodeHeader", "MalformedFrameError",
    "TruncatedEpisodeError", "VersionMismatchError", "mix_manifest", "read_episode", "read_manifest",
    "stats", "write_episode", "write_manifest",
]
