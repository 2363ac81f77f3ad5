"""Synthetic periodic embedding sequences with known repetition counts.

Periodic frames trace a closed loop in embedding space: paired cosine/sine
coordinates at the fundamental frequency plus two harmonics with decaying
amplitude, so the fundamental dominates the self-similarity spectrum. Gap
frames replace that loop with a slowly drifting vector of matched norm in a
separate pair of coordinates; within any one window the drift is far below the
shortest countable period, so gap frames read as non-periodic. Gaussian noise
of scale ``noise_sigma`` is added to every frame.

Ground truth is exact by construction: ``gt_count`` equals the number of
periodic frames divided by the period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_mode, check_non_negative, check_positive_int, check_window_size
from .counting import CountingConfig, count_track
from .estimator import EmbeddingSequence, predict_track
from .multispeed import SpeedConfig, select_speed

__all__ = [
    "DATASET_MODES",
    "SynthSpec",
    "SynthTruth",
    "SynthVideo",
    "synth_periodic",
    "make_dataset",
]

DATASET_MODES = ("segmented", "gapped")

# The fundamental must dominate decisively: subsampling can alias a strong
# harmonic onto an exact integer lag of the variant timebase, which reads as a
# clean period at the wrong stride. Weak harmonics keep that aliased tone
# below the spectral shoulder of the true fundamental at every stride.
_HARMONIC_AMPS = (1.0, 0.15, 0.1)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic video."""

    total_frames: int
    period: int
    dims: int = 8
    noise_sigma: float = 0.0
    gaps: tuple[tuple[int, int], ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "total_frames", check_positive_int("total_frames", self.total_frames))
        period = check_positive_int("period", self.period)
        if period < 2:
            raise ValueError(f"period must be >= 2, got {period}")
        object.__setattr__(self, "period", period)
        dims = check_positive_int("dims", self.dims)
        if dims < 2:
            raise ValueError(f"dims must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "noise_sigma", check_non_negative("noise_sigma", self.noise_sigma))
        gaps = tuple((int(a), int(b)) for a, b in self.gaps)
        last_end = 0
        for a, b in gaps:
            if not 0 <= a < b <= self.total_frames:
                raise ValueError(f"gap [{a}, {b}) out of range for {self.total_frames} frames")
            if a < last_end:
                raise ValueError(f"gaps must be disjoint and sorted, offending gap [{a}, {b})")
            last_end = b
        object.__setattr__(self, "gaps", gaps)
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True, eq=False)
class SynthTruth:
    """Exact ground truth for a synthetic video."""

    gt_count: float
    periodic_mask: np.ndarray


@dataclass(frozen=True, eq=False)
class SynthVideo:
    """One generated video: its recipe, embeddings, and ground truth."""

    video_id: str
    spec: SynthSpec
    embeddings: EmbeddingSequence
    truth: SynthTruth
    mode: str


def synth_periodic(spec: SynthSpec, video_id: str = "synth") -> tuple[EmbeddingSequence, SynthTruth]:
    """Generate one synthetic embedding sequence and its exact ground truth.

    Deterministic: the same spec always produces bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    t = np.arange(spec.total_frames, dtype=np.float64)
    data = np.zeros((spec.total_frames, spec.dims), dtype=np.float64)

    harmonic_pairs = min(len(_HARMONIC_AMPS), spec.dims // 2)
    for h in range(1, harmonic_pairs + 1):
        amp = _HARMONIC_AMPS[h - 1]
        angle = 2.0 * np.pi * h * t / spec.period
        data[:, 2 * h - 2] = amp * np.cos(angle)
        data[:, 2 * h - 1] = amp * np.sin(angle)

    mask = np.ones(spec.total_frames, dtype=bool)
    for a, b in spec.gaps:
        mask[a:b] = False

    if spec.gaps:
        # Matched norm keeps the similarity level of gap rows in line with the
        # periodic baseline, so gaps read as flat rather than as a step edge.
        level = math.sqrt(math.fsum(a * a for a in _HARMONIC_AMPS[:harmonic_pairs]))
        phase = rng.uniform(0.0, 2.0 * np.pi)
        direction = 1.0 if rng.random() < 0.5 else -1.0
        theta = phase + direction * 2.0 * np.pi * t / (8.0 * spec.total_frames)
        gap = ~mask
        data[gap, :] = 0.0
        if spec.dims >= 4:
            d0, d1 = spec.dims - 2, spec.dims - 1
        else:
            d0, d1 = 0, 1
        data[gap, d0] = level * np.cos(theta[gap])
        data[gap, d1] = level * np.sin(theta[gap])

    if spec.noise_sigma > 0.0:
        data = data + rng.normal(0.0, spec.noise_sigma, size=data.shape)

    gt_count = int(mask.sum()) / spec.period
    return EmbeddingSequence(video_id, data), SynthTruth(gt_count=gt_count, periodic_mask=mask)


_PROBE_CACHE: dict[tuple[int, tuple[int, ...], int, int], int] = {}


def _preferred_stride(period: int, strides: tuple[int, ...], window_size: int, dims: int) -> int:
    """Which stride the pipeline itself picks for a clean video of this period.

    Probed on a noiseless sequence long enough that every stride divides it
    into whole windows, so the choice reflects spectral fit alone.
    """
    key = (period, strides, window_size, dims)
    got = _PROBE_CACHE.get(key)
    if got is not None:
        return got
    probe_frames = window_size * math.lcm(*strides)
    spec = SynthSpec(total_frames=probe_frames, period=period, dims=dims, noise_sigma=0.0, seed=0)
    emb, _ = synth_periodic(spec, "probe")
    config = CountingConfig(mode="segmented")
    candidates = []
    for s in strides:
        track = predict_track(emb, stride=s, window_size=window_size)
        candidates.append((track, count_track(track, config)))
    chosen = select_speed(candidates).chosen_stride
    _PROBE_CACHE[key] = chosen
    return chosen


def make_dataset(
    n_videos: int,
    seed: int = 0,
    mode: str = "segmented",
    period_range: tuple[int, int] = (2, 160),
    max_frames: int = 1024,
    dims: int = 8,
    noise_range: tuple[float, float] = (0.0, 0.05),
    gap_frac_range: tuple[float, float] = (0.3, 0.5),
    strides: tuple[int, ...] = (1, 2, 3, 4, 5),
    window_size: int = 64,
) -> list[SynthVideo]:
    """Generate a dataset the multi-speed pipeline can count without protocol loss.

    Windowed counting drops incomplete tails, so each video's length is drawn
    as a whole number of windows at the stride the pipeline prefers for its
    period; gap runs are likewise window-aligned. Per-video seeds derive from
    ``(seed, index)``, so any prefix of the dataset is reproducible
    independently of generation order.
    """
    check_positive_int("n_videos", n_videos)
    check_mode("mode", mode, DATASET_MODES)
    window_size = check_window_size(window_size)
    strides = SpeedConfig(strides=tuple(strides)).strides
    lo_p, hi_p = int(period_range[0]), int(period_range[1])
    if lo_p < 2 or hi_p < lo_p:
        raise ValueError(f"invalid period_range {period_range}")
    max_stride = max(strides)
    if hi_p > (window_size // 2) * max_stride:
        raise ValueError(
            f"period_range upper bound {hi_p} exceeds the largest representable period "
            f"{(window_size // 2) * max_stride} at strides {strides}"
        )

    videos: list[SynthVideo] = []
    for i in range(n_videos):
        ss = np.random.SeedSequence(entropy=(int(seed), i))
        rng = np.random.default_rng(ss)
        child_seed = int(ss.generate_state(1, np.uint64)[0])

        period = int(rng.integers(lo_p, hi_p + 1))
        chosen = _preferred_stride(period, strides, window_size, dims)
        unit = window_size * chosen
        # Every stride must yield at least one full window.
        m_min = max(1, -(-(window_size * max_stride) // unit))
        if mode == "gapped":
            m_min = max(m_min, 2)
        m_max = max_frames // unit
        if m_max < m_min:
            raise ValueError(
                f"max_frames {max_frames} too small for period {period} at window {window_size}"
            )
        m = int(rng.integers(m_min, m_max + 1))
        total = unit * m

        sigma = float(rng.uniform(noise_range[0], noise_range[1]))
        gaps: tuple[tuple[int, int], ...] = ()
        if mode == "gapped":
            gw_lo = max(1, math.ceil(gap_frac_range[0] * m))
            gw_hi = min(m - 1, math.floor(gap_frac_range[1] * m))
            if gw_hi < gw_lo:
                gw_hi = gw_lo
            gw = int(rng.integers(gw_lo, gw_hi + 1))
            g0 = int(rng.integers(0, m - gw + 1))
            gaps = ((g0 * unit, (g0 + gw) * unit),)

        spec = SynthSpec(
            total_frames=total,
            period=period,
            dims=dims,
            noise_sigma=sigma,
            gaps=gaps,
            seed=child_seed,
        )
        video_id = f"synth-{i:05d}"
        emb, truth = synth_periodic(spec, video_id)
        videos.append(SynthVideo(video_id, spec, emb, truth, mode))
    return videos
