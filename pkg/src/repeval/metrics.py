"""Count-accuracy metrics for repetition counting benchmarks.

Off-by-one accuracy (``oboa``) is the fraction of videos whose predicted count
lands within one repetition of the true count, boundary included; ``oboe`` is
its exact complement. ``mae`` is the count-normalized absolute error
``|gt - pred| / (alpha + gt)`` averaged over videos. Published harnesses
disagree on ``alpha``: some divide by the raw count (``alpha = 0``), others add
0.1 to keep zero-count videos finite, and the choice changes reported numbers.
Every result therefore carries the alpha it was computed with, and
``alpha_sweep`` recomputes MAE across offsets so runs can be compared honestly.

Accumulation is compensated (``math.fsum``) in input order, so metric values do
not depend on pair ordering beyond the set itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from ._validation import check_non_negative

__all__ = [
    "CountPair",
    "MetricConfig",
    "MetricReport",
    "PerVideoMetric",
    "oboa",
    "oboe",
    "mae",
    "alpha_sweep",
    "build_report",
]


@dataclass(frozen=True)
class CountPair:
    """One video's ground-truth repetition count paired with a predicted count."""

    video_id: str
    gt_count: float
    pred_count: float

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "gt_count", check_non_negative("gt_count", self.gt_count))
        object.__setattr__(self, "pred_count", check_non_negative("pred_count", self.pred_count))


@dataclass(frozen=True)
class MetricConfig:
    """Evaluation settings.

    Parameters
    ----------
    alpha:
        Offset added to the ground-truth count in the MAE denominator.
        ``0.0`` reproduces the raw-count convention and rejects zero-count
        videos; ``0.1`` keeps them finite.
    round_predictions:
        Round predicted counts to the nearest integer (ties round up) before
        computing any metric. Off by default: fractional counts are compared
        as-is so the metric reflects what the counter actually produced.
    """

    alpha: float = 0.0
    round_predictions: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_non_negative("alpha", self.alpha))
        object.__setattr__(self, "round_predictions", bool(self.round_predictions))


class PerVideoMetric(NamedTuple):
    video_id: str
    gt: float
    pred: float
    abs_err: float
    within_one: bool


@dataclass(frozen=True)
class MetricReport:
    """Aggregate metrics plus the per-video rows they were computed from."""

    n_videos: int
    oboa: float
    oboe: float
    mae: float
    alpha_used: float
    per_video: tuple[PerVideoMetric, ...]

    def __post_init__(self) -> None:
        if self.n_videos != len(self.per_video) or self.n_videos < 1:
            raise ValueError("n_videos must equal the number of per-video rows")
        if not 0.0 <= self.oboa <= 1.0:
            raise ValueError(f"oboa out of range: {self.oboa!r}")
        if self.oboe != 1.0 - self.oboa:
            raise ValueError("oboe must equal 1 - oboa exactly")
        if not math.isfinite(self.mae) or self.mae < 0.0:
            raise ValueError(f"mae out of range: {self.mae!r}")


def _checked_pairs(pairs: Iterable[CountPair]) -> list[CountPair]:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty evaluation set")
    seen: set[str] = set()
    for pair in pairs:
        if pair.video_id in seen:
            raise ValueError(f"duplicate video_id {pair.video_id!r} in evaluation set")
        seen.add(pair.video_id)
    return pairs


def _effective_pred(pair: CountPair, config: MetricConfig) -> float:
    if config.round_predictions:
        return float(math.floor(pair.pred_count + 0.5))
    return pair.pred_count


def oboa(pairs: Iterable[CountPair], config: MetricConfig | None = None) -> float:
    """Fraction of videos whose predicted count is within one of the truth.

    The boundary is inclusive: an absolute error of exactly 1.0 still counts
    as a hit.
    """
    config = MetricConfig() if config is None else config
    pairs = _checked_pairs(pairs)
    hits = sum(1 for p in pairs if abs(p.gt_count - _effective_pred(p, config)) <= 1.0)
    return hits / len(pairs)


def oboe(pairs: Iterable[CountPair], config: MetricConfig | None = None) -> float:
    """Off-by-one error rate, defined as ``1 - oboa`` so the identity is exact."""
    return 1.0 - oboa(pairs, config)


def _mae_terms(pairs: Sequence[CountPair], config: MetricConfig) -> list[float]:
    terms = []
    for pair in pairs:
        if config.alpha == 0.0 and pair.gt_count == 0.0:
            raise ValueError(
                f"division by zero for video {pair.video_id!r}: gt_count is 0 with "
                "alpha=0; set alpha>0 or filter zero-count videos"
            )
        pred = _effective_pred(pair, config)
        terms.append(abs(pair.gt_count - pred) / (config.alpha + pair.gt_count))
    return terms


def mae(pairs: Iterable[CountPair], config: MetricConfig | None = None) -> float:
    """Mean absolute count error, normalized by ``alpha + gt_count`` per video."""
    config = MetricConfig() if config is None else config
    pairs = _checked_pairs(pairs)
    return math.fsum(_mae_terms(pairs, config)) / len(pairs)


def alpha_sweep(
    pairs: Iterable[CountPair],
    alphas: Sequence[float],
    round_predictions: bool = False,
) -> list[tuple[float, float]]:
    """Recompute MAE for each denominator offset in ``alphas``.

    Returns ``(alpha, mae)`` tuples in input order. An empty ``alphas`` yields
    an empty sweep.
    """
    pairs = _checked_pairs(pairs)
    out = []
    for alpha in alphas:
        config = MetricConfig(alpha=alpha, round_predictions=round_predictions)
        try:
            value = mae(pairs, config)
        except ValueError as exc:
            raise ValueError(f"alpha={alpha!r}: {exc}") from exc
        out.append((config.alpha, value))
    return out


def build_report(pairs: Iterable[CountPair], config: MetricConfig | None = None) -> MetricReport:
    """Evaluate a set of count pairs into a :class:`MetricReport`.

    Per-video rows record the effective prediction (after optional rounding),
    so the aggregate numbers can be recomputed from the rows alone.
    """
    config = MetricConfig() if config is None else config
    pairs = _checked_pairs(pairs)
    rows = []
    for pair in pairs:
        pred = _effective_pred(pair, config)
        err = abs(pair.gt_count - pred)
        rows.append(PerVideoMetric(pair.video_id, pair.gt_count, pred, err, err <= 1.0))
    n = len(rows)
    acc = sum(1 for r in rows if r.within_one) / n
    err_mean = math.fsum(_mae_terms(pairs, config)) / n
    return MetricReport(
        n_videos=n,
        oboa=acc,
        oboe=1.0 - acc,
        mae=err_mean,
        alpha_used=config.alpha,
        per_video=tuple(rows),
    )
