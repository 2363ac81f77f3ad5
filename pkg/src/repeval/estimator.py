"""Reference period predictor built on temporal self-similarity.

This is a deliberately non-learned stand-in for a neural period predictor: it
exists so the counting and evaluation stages can be exercised end-to-end at
desk scale. For each window of frame embeddings it builds a self-similarity
matrix of negative squared euclidean distances, then reads each frame's period
from the discrete spectrum of that frame's mean-removed similarity row.

Three readings of the same row are combined:

* The period length is the integer lag in ``[2, window/2]`` whose
  frequency, mapped to the nearest bin of a zero-padded spectrum, carries the
  largest magnitude. Zero-padding refines the bin grid enough that every
  candidate lag owns a distinct bin, which keeps long periods from collapsing
  onto a handful of coarse frequencies.
* The period confidence (``period_score``) is how well the chosen lag folds
  the row onto itself: the cosine similarity between the row and its
  lag-shifted self over their overlap, rectified to ``[0, 1]``. A lag that
  truly explains the row scores 1 even when the window holds a fractional
  number of cycles; a lag forced by the search range onto a slower or misfit
  signal scores near or at 0. A spectral peak-share statistic cannot make
  this distinction, because a window holds too few cycles of a long period
  to separate neighboring lags, and a share is blind to how much of the row
  the peak explains.
* The periodicity score is peak power over total non-DC power in the plain
  unpadded spectrum, clamped to ``[0, 1]``. The narrow unpadded peak keeps
  slowly drifting non-repeating content from masquerading as periodic.

A constant row has no spectrum to read: it degrades to periodicity 0, period
length 2, and a uniform period confidence rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import check_embedding_matrix, check_window_size
from .counting import FramePrediction, PredictionTrack
from .multispeed import subsample

__all__ = [
    "EmbeddingSequence",
    "tsm",
    "estimate_frame_periods",
    "predict_track",
]


@dataclass(frozen=True, eq=False)
class EmbeddingSequence:
    """A video's per-frame embedding vectors, one row per frame."""

    video_id: str
    data: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "data", check_embedding_matrix(self.data))


def tsm(embeddings: EmbeddingSequence | np.ndarray) -> np.ndarray:
    """Temporal self-similarity matrix: ``S[i, j] = -||e_i - e_j||^2``.

    Symmetric with an exactly zero diagonal, so each row's maximum sits on the
    diagonal.
    """
    data = embeddings.data if isinstance(embeddings, EmbeddingSequence) else check_embedding_matrix(embeddings)
    if data.shape[0] < 2:
        raise ValueError(f"need at least 2 frames for a self-similarity matrix, got {data.shape[0]}")
    sim = -cdist(data, data, "sqeuclidean")
    np.fill_diagonal(sim, 0.0)
    return sim


def _fine_grid(window_size: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Candidate lags, their nearest fine-grid bins, and the padded FFT length.

    The padded length is the next power of two past ``(W/2)(W/2 + 1)`` so
    consecutive lags can never share a bin.
    """
    lags = np.arange(2, window_size // 2 + 1)
    need = max(256, (window_size // 2) * (window_size // 2 + 1) + 1)
    padded = 1 << (need - 1).bit_length()
    bins = np.rint(padded / lags).astype(np.intp)
    return lags, bins, padded


_GRID_CACHE: dict[int, tuple[np.ndarray, np.ndarray, int]] = {}


def _grid(window_size: int) -> tuple[np.ndarray, np.ndarray, int]:
    got = _GRID_CACHE.get(window_size)
    if got is None:
        got = _GRID_CACHE[window_size] = _fine_grid(window_size)
    return got


def estimate_frame_periods(window_tsm: np.ndarray, window_size: int) -> list[FramePrediction]:
    """Estimate (periodicity, period_len, period_score) for each frame of one window.

    ``window_tsm`` must be the square ``window_size x window_size``
    self-similarity slice for the window.
    """
    w = check_window_size(window_size)
    sim = np.asarray(window_tsm, dtype=np.float64)
    if sim.shape != (w, w):
        raise ValueError(f"window_tsm must have shape ({w}, {w}), got {sim.shape}")

    lags, bins, padded = _grid(w)
    rows = sim - sim.mean(axis=1, keepdims=True)

    coarse_power = np.abs(np.fft.rfft(rows, axis=1)) ** 2
    # The taper keeps the argmax honest near on-grid tones: an untapered
    # transform leaks a negative-frequency image strong enough that a
    # neighboring lag's bin can edge out the exact one.
    fine_mag = np.abs(np.fft.rfft(rows * np.hanning(w), n=padded, axis=1))

    lag_mags = fine_mag[:, bins]
    best_idx = np.argmax(lag_mags, axis=1)
    rows_idx = np.arange(w)
    period_len = lags[best_idx]

    # Fold consistency: cosine similarity between the row and its lag-shifted
    # self over their overlap. An exact fit scores 1 no matter how many whole
    # cycles the window holds, so scores are comparable across lags and
    # strides without partial-cycle bias.
    uniform = 1.0 / lags.size
    period_score = np.empty(w, dtype=np.float64)
    for lag in np.unique(period_len):
        sel = period_len == lag
        head = rows[sel, : w - lag]
        shifted = rows[sel, lag:]
        dot = np.einsum("ij,ij->i", head, shifted)
        norm = np.einsum("ij,ij->i", head, head) * np.einsum("ij,ij->i", shifted, shifted)
        good = norm > 0.0
        period_score[sel] = np.where(good, dot / np.sqrt(np.where(good, norm, 1.0)), uniform)

    coarse_bin = np.rint(w / period_len).astype(np.intp)
    peak_power = coarse_power[rows_idx, coarse_bin]
    total_power = coarse_power[:, 1:].sum(axis=1)
    periodicity = np.where(total_power > 0.0, peak_power / np.where(total_power > 0.0, total_power, 1.0), 0.0)

    periodicity = np.clip(periodicity, 0.0, 1.0)
    period_score = np.clip(period_score, 0.0, 1.0)
    return [
        FramePrediction(float(periodicity[i]), float(period_len[i]), float(period_score[i]))
        for i in range(w)
    ]


def predict_track(
    embeddings: EmbeddingSequence,
    stride: int = 1,
    window_size: int = 64,
) -> PredictionTrack:
    """Predict per-frame periods for one video at one subsampling stride.

    The embedding sequence is subsampled, split into consecutive windows, and
    estimated window by window. Frames past the last full window (including the
    whole track when it is shorter than a window) are estimated from a window
    padded with repeats of the final frame, so the returned track always has
    ``ceil(frames / stride)`` predictions.
    """
    w = check_window_size(window_size)
    variant = subsample(embeddings.data, stride)
    n = variant.shape[0]

    frames: list[FramePrediction] = []
    full = n // w
    for i in range(full):
        block = variant[i * w : (i + 1) * w]
        frames.extend(estimate_frame_periods(tsm(block), w))
    tail = n - full * w
    if tail:
        pad = np.repeat(variant[-1:], w - tail, axis=0)
        block = np.concatenate([variant[full * w :], pad], axis=0)
        frames.extend(estimate_frame_periods(tsm(block), w)[:tail])

    return PredictionTrack(
        video_id=embeddings.video_id,
        speed=int(stride),
        window_size=w,
        frames=tuple(frames),
    )
