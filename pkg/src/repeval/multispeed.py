"""Multi-speed counting: subsample, count per stride, keep the best-scoring one.

Long repetition periods overflow the per-window period range (at most half a
window), so the video is re-counted at several integer subsampling strides and
the stride whose track has the highest mean period confidence wins. Counts are
expressed in repetitions, not frames, so the winning count needs no timebase
correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from ._validation import check_positive_int
from .counting import CountEstimate, CountingConfig, PredictionTrack, count_track

# Two strides reading the same structure produce near-identical confidence
# (subsampling a clean signal evaluates the same values at shifted phases, and
# measurement noise jitters the means by far less than this), so a higher
# stride must win by a material margin; anything closer is a tie. Lower
# strides also keep more frames, which damps per-frame estimation noise.
SCORE_TIE_TOLERANCE = 0.02

__all__ = [
    "SCORE_TIE_TOLERANCE",
    "SpeedConfig",
    "SpeedScore",
    "SpeedSelection",
    "subsample",
    "select_speed",
    "multispeed_count",
]


@dataclass(frozen=True)
class SpeedConfig:
    """Strides to evaluate, in the order they should be reported."""

    strides: tuple[int, ...] = (1, 2, 3, 4, 5)

    def __post_init__(self) -> None:
        strides = tuple(check_positive_int("stride", s) for s in self.strides)
        if not strides:
            raise ValueError("strides must be non-empty")
        if len(set(strides)) != len(strides):
            raise ValueError(f"strides must be distinct, got {strides}")
        object.__setattr__(self, "strides", strides)


class SpeedScore(NamedTuple):
    stride: int
    period_score_mean: float
    count: float


@dataclass(frozen=True)
class SpeedSelection:
    """Outcome of speed selection, with every candidate's score preserved."""

    chosen_stride: int
    scores: tuple[SpeedScore, ...]

    def __post_init__(self) -> None:
        strides = [s.stride for s in self.scores]
        if self.chosen_stride not in strides:
            raise ValueError(f"chosen stride {self.chosen_stride} not among candidates {strides}")
        expected = _scan_for_best(sorted(self.scores, key=lambda s: s.stride))
        if self.chosen_stride != expected:
            raise ValueError(
                "chosen stride must be the lowest stride with the highest period score"
            )


def _scan_for_best(entries_by_stride: Sequence[SpeedScore]) -> int:
    best = entries_by_stride[0]
    for entry in entries_by_stride[1:]:
        if entry.period_score_mean > best.period_score_mean + SCORE_TIE_TOLERANCE:
            best = entry
    return best.stride


def subsample(sequence, stride: int):
    """Every ``stride``-th element of a sequence, starting at index 0.

    Works on numpy arrays (rows are frames) and on plain sequences; the result
    has ``ceil(len(sequence) / stride)`` frames.
    """
    stride = check_positive_int("stride", stride)
    n = sequence.shape[0] if isinstance(sequence, np.ndarray) else len(sequence)
    if n == 0:
        raise ValueError("cannot subsample an empty sequence")
    return sequence[::stride]


def select_speed(
    candidates: Iterable[tuple[PredictionTrack, CountEstimate]],
) -> SpeedSelection:
    """Pick the stride with the highest mean period confidence.

    Ties (scores within ``SCORE_TIE_TOLERANCE``) resolve to the lowest stride.
    The returned selection lists all candidates ordered by stride, so the
    decision is independent of the order candidates were supplied in.
    """
    entries = []
    seen: set[int] = set()
    for track, estimate in candidates:
        stride = track.speed
        if stride in seen:
            raise ValueError(f"duplicate stride {stride} among speed candidates")
        seen.add(stride)
        entries.append(SpeedScore(stride, estimate.period_score_mean, estimate.count))
    if not entries:
        raise ValueError("no speed candidates")
    entries.sort(key=lambda e: e.stride)
    return SpeedSelection(chosen_stride=_scan_for_best(entries), scores=tuple(entries))


def multispeed_count(
    tracks_by_stride: Mapping[int, PredictionTrack],
    counting_config: CountingConfig | None = None,
    speed_config: SpeedConfig | None = None,
    keep_per_frame: bool = False,
) -> CountEstimate:
    """Count one video from its per-stride tracks and return the winning estimate.

    Every configured stride must have a track; all tracks must agree on video
    and window size. Counting errors (for example a track shorter than one
    window without ``pad_short``) propagate.
    """
    counting_config = CountingConfig() if counting_config is None else counting_config
    speed_config = SpeedConfig() if speed_config is None else speed_config

    candidates: list[tuple[PredictionTrack, CountEstimate]] = []
    video_id: str | None = None
    window_size: int | None = None
    for stride in speed_config.strides:
        track = tracks_by_stride.get(stride)
        if track is None:
            raise ValueError(f"missing prediction track for stride {stride}")
        if track.speed != stride:
            raise ValueError(
                f"track keyed by stride {stride} reports speed {track.speed}"
            )
        if video_id is None:
            video_id, window_size = track.video_id, track.window_size
        elif track.video_id != video_id:
            raise ValueError(
                f"mixed videos in one multi-speed count: {video_id!r} vs {track.video_id!r}"
            )
        elif track.window_size != window_size:
            raise ValueError(
                f"mixed window sizes in one multi-speed count: {window_size} vs {track.window_size}"
            )
        candidates.append((track, count_track(track, counting_config, keep_per_frame)))

    selection = select_speed(candidates)
    for track, estimate in candidates:
        if track.speed == selection.chosen_stride:
            return estimate
    raise AssertionError("unreachable: chosen stride vanished from candidates")
