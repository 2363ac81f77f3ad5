"""Windowed per-frame repetition counting.

Each frame of a prediction track carries a period length (in frames of the
track's own timebase), a periodicity score, and a period confidence. A frame
contributes ``1 / period_len`` repetitions; in ``"gated"`` mode that
contribution is kept only when ``sqrt(periodicity * period_score)`` strictly
exceeds a threshold ``tau``, which suppresses frames that do not belong to a
repetition. ``"segmented"`` mode disables the gate for pre-trimmed clips where
every frame is known to repeat.

Tracks are split into consecutive non-overlapping windows before counting. An
incomplete tail is dropped; a track shorter than one window is an error unless
``pad_short`` is set, in which case the final frame's prediction is repeated to
fill a single window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._validation import (
    check_mode,
    check_non_negative,
    check_positive_int,
    check_unit_interval,
    check_window_size,
)

__all__ = [
    "COUNTING_MODES",
    "FramePrediction",
    "CountingConfig",
    "PredictionTrack",
    "CountEstimate",
    "per_frame_count",
    "window_partition",
    "count_track",
    "track_period_score",
]

COUNTING_MODES = ("segmented", "gated")


@dataclass(frozen=True)
class FramePrediction:
    """Per-frame periodicity, period length and period confidence."""

    periodicity: float
    period_len: float
    period_score: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "periodicity", check_unit_interval("periodicity", self.periodicity))
        object.__setattr__(self, "period_score", check_unit_interval("period_score", self.period_score))
        period_len = float(self.period_len)
        if not math.isfinite(period_len) or period_len < 2.0:
            raise ValueError(f"period_len must be finite and >= 2, got {self.period_len!r}")
        object.__setattr__(self, "period_len", period_len)


@dataclass(frozen=True)
class CountingConfig:
    """Counting behaviour: gate threshold, mode, and short-track padding."""

    tau: float = 0.5
    mode: str = "gated"
    pad_short: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", check_unit_interval("tau", self.tau))
        check_mode("mode", self.mode, COUNTING_MODES)
        object.__setattr__(self, "pad_short", bool(self.pad_short))


@dataclass(frozen=True)
class PredictionTrack:
    """A video's per-frame predictions at a single playback speed.

    ``speed`` is the subsampling stride the predictions were computed at, and
    ``period_len`` values are expressed in that variant timebase.
    """

    video_id: str
    speed: int
    window_size: int
    frames: tuple[FramePrediction, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "speed", check_positive_int("speed", self.speed))
        object.__setattr__(self, "window_size", check_window_size(self.window_size))
        frames = tuple(self.frames)
        half = self.window_size / 2
        for i, fp in enumerate(frames):
            if fp.period_len > half:
                raise ValueError(
                    f"frame {i}: period_len {fp.period_len} exceeds window_size/2 = {half}"
                )
        object.__setattr__(self, "frames", frames)


@dataclass(frozen=True)
class CountEstimate:
    """Estimated repetition count for one video, with selection diagnostics."""

    video_id: str
    count: float
    speed_chosen: int
    period_score_mean: float
    per_frame_counts: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "count", check_non_negative("count", self.count))
        object.__setattr__(self, "speed_chosen", check_positive_int("speed_chosen", self.speed_chosen))
        object.__setattr__(
            self, "period_score_mean", check_unit_interval("period_score_mean", self.period_score_mean)
        )
        if self.per_frame_counts is not None:
            pfc = tuple(float(c) for c in self.per_frame_counts)
            object.__setattr__(self, "per_frame_counts", pfc)
            total = math.fsum(pfc)
            if abs(total - self.count) > 1e-9 * max(1.0, abs(self.count)):
                raise ValueError(
                    f"count {self.count} does not match the sum of per-frame counts {total}"
                )


def per_frame_count(frame: FramePrediction, config: CountingConfig | None = None) -> float:
    """Repetition contribution of one frame: ``1/period_len``, gated by mode.

    The gate is strict: a frame whose ``sqrt(periodicity * period_score)``
    equals ``tau`` exactly contributes nothing.
    """
    config = CountingConfig() if config is None else config
    if frame.period_len < 2.0:
        raise ValueError(f"period_len must be >= 2, got {frame.period_len!r}")
    if config.mode == "gated":
        gate = math.sqrt(frame.periodicity * frame.period_score)
        if not gate > config.tau:
            return 0.0
    return 1.0 / frame.period_len


def window_partition(
    track: PredictionTrack, config: CountingConfig | None = None
) -> list[tuple[FramePrediction, ...]]:
    """Split a track into consecutive non-overlapping full windows.

    Frames beyond the last full window are dropped. A track shorter than one
    window raises unless ``config.pad_short`` is set, in which case the last
    frame's prediction is repeated to fill exactly one window.
    """
    config = CountingConfig() if config is None else config
    n = len(track.frames)
    w = track.window_size
    if n == 0:
        raise ValueError(f"empty track for video {track.video_id!r}")
    if n < w:
        if not config.pad_short:
            raise ValueError(
                f"track too short for video {track.video_id!r}: {n} frames < "
                f"window size {w} (set pad_short to pad)"
            )
        return [track.frames + (track.frames[-1],) * (w - n)]
    return [track.frames[i * w : (i + 1) * w] for i in range(n // w)]


def _retained_frames(track: PredictionTrack, config: CountingConfig) -> list[FramePrediction]:
    return [fp for window in window_partition(track, config) for fp in window]


def count_track(
    track: PredictionTrack,
    config: CountingConfig | None = None,
    keep_per_frame: bool = False,
) -> CountEstimate:
    """Sum gated per-frame counts over a track's retained windows."""
    config = CountingConfig() if config is None else config
    frames = _retained_frames(track, config)
    counts = [per_frame_count(fp, config) for fp in frames]
    total = math.fsum(counts)
    score_mean = math.fsum(fp.period_score for fp in frames) / len(frames)
    return CountEstimate(
        video_id=track.video_id,
        count=total,
        speed_chosen=track.speed,
        period_score_mean=score_mean,
        per_frame_counts=tuple(counts) if keep_per_frame else None,
    )


def track_period_score(track: PredictionTrack, config: CountingConfig | None = None) -> float:
    """Mean period confidence over the track's retained frames."""
    config = CountingConfig() if config is None else config
    frames = _retained_frames(track, config)
    return math.fsum(fp.period_score for fp in frames) / len(frames)
