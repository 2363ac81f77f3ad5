"""Scikit-learn style facades over the prediction and counting pipeline.

Both estimators are stateless: ``fit`` only validates parameters, so they
compose with ``clone``, ``get_params``/``set_params`` and pipeline tooling
without pretending to learn anything.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positive_int, check_window_size
from .counting import CountEstimate, CountingConfig, PredictionTrack
from .estimator import EmbeddingSequence, predict_track
from .multispeed import SpeedConfig, multispeed_count

__all__ = ["PeriodPredictor", "MultiSpeedCounter"]


def _as_sequence(X, index: int = 0) -> EmbeddingSequence:
    if isinstance(X, EmbeddingSequence):
        return X
    return EmbeddingSequence(f"sequence-{index}", np.asarray(X, dtype=np.float64))


def _is_single(X) -> bool:
    return isinstance(X, EmbeddingSequence) or (
        hasattr(X, "ndim") and getattr(X, "ndim") == 2
    )


class PeriodPredictor(BaseEstimator):
    """Per-frame period predictions from embeddings, one stride at a time.

    Parameters
    ----------
    window_size : int, default=64
        Frames per analysis window; periods up to half of it are representable.
    stride : int, default=1
        Subsampling stride applied before windowing.
    """

    def __init__(self, window_size: int = 64, stride: int = 1):
        self.window_size = window_size
        self.stride = stride

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def predict(self, X) -> PredictionTrack | list[PredictionTrack]:
        """Predict a track per embedding sequence (or a single one)."""
        self._check_params()
        if _is_single(X):
            return predict_track(_as_sequence(X), self.stride, self.window_size)
        return [
            predict_track(_as_sequence(item, i), self.stride, self.window_size)
            for i, item in enumerate(X)
        ]

    def _check_params(self) -> None:
        check_positive_int("stride", self.stride)
        check_window_size(self.window_size)


class MultiSpeedCounter(BaseEstimator):
    """End-to-end repetition counter: predict at several strides, gate, count.

    ``predict`` returns plain counts; ``estimate`` returns the full
    :class:`~repeval.counting.CountEstimate` diagnostics.
    """

    def __init__(
        self,
        strides: tuple[int, ...] = (1, 2, 3, 4, 5),
        window_size: int = 64,
        tau: float = 0.5,
        mode: str = "gated",
        pad_short: bool = False,
    ):
        self.strides = strides
        self.window_size = window_size
        self.tau = tau
        self.mode = mode
        self.pad_short = pad_short

    def fit(self, X=None, y=None):
        self._configs()
        return self

    def predict(self, X):
        """Counts for one embedding sequence (float) or a list (ndarray)."""
        if _is_single(X):
            return self.estimate(X).count
        return np.asarray([est.count for est in self.estimate(X)], dtype=np.float64)

    def estimate(self, X) -> CountEstimate | list[CountEstimate]:
        counting, speeds = self._configs()
        if _is_single(X):
            return self._estimate_one(_as_sequence(X), counting, speeds)
        return [
            self._estimate_one(_as_sequence(item, i), counting, speeds)
            for i, item in enumerate(X)
        ]

    def _estimate_one(
        self, seq: EmbeddingSequence, counting: CountingConfig, speeds: SpeedConfig
    ) -> CountEstimate:
        tracks = {
            s: predict_track(seq, stride=s, window_size=self.window_size)
            for s in speeds.strides
        }
        return multispeed_count(tracks, counting, speeds)

    def _configs(self) -> tuple[CountingConfig, SpeedConfig]:
        counting = CountingConfig(tau=self.tau, mode=self.mode, pad_short=self.pad_short)
        speeds = SpeedConfig(strides=tuple(self.strides))
        check_window_size(self.window_size)
        return counting, speeds
