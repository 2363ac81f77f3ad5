"""Self-similarity period estimation, checked against exact synthetic truth.

The synthetic generator provides the oracle: its ground truth is constructed,
not estimated, so every expectation here is derived from the recipe rather
than from the estimator's own output.
"""

import numpy as np
import pytest
from sklearn.base import clone

from repeval.counting import CountingConfig, count_track
from repeval.estimator import (
    EmbeddingSequence,
    estimate_frame_periods,
    predict_track,
    tsm,
)
from repeval.pipeline import MultiSpeedCounter, PeriodPredictor
from repeval.synthetic import SynthSpec, synth_periodic

W = 64


def clean(period, total_frames=W, **kwargs):
    emb, truth = synth_periodic(SynthSpec(total_frames=total_frames, period=period, **kwargs))
    return emb, truth


# --- self-similarity matrix -------------------------------------------------


def test_tsm_symmetric_with_zero_diagonal():
    emb, _ = clean(8, noise_sigma=0.03, seed=5)
    S = tsm(emb)
    assert np.array_equal(S, S.T)
    assert np.all(np.diag(S) == 0.0)
    assert np.all(S <= 0.0)


def test_tsm_is_negative_squared_distance():
    pair = EmbeddingSequence("pair", np.array([[0.0, 0.0], [2.0, 0.0]]))
    S = tsm(pair)
    assert S[0, 1] == -4.0
    assert S[1, 0] == -4.0


def test_tsm_identical_frames_give_zero_matrix():
    same = EmbeddingSequence("same", np.ones((6, 3)))
    assert np.all(tsm(same) == 0.0)


def test_tsm_invariant_under_orthogonal_transform():
    emb, _ = clean(8, noise_sigma=0.02, seed=9)
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.normal(size=(emb.data.shape[1],) * 2))
    rotated = EmbeddingSequence("rot", emb.data @ Q)
    assert np.allclose(tsm(emb), tsm(rotated), atol=1e-12)


def test_tsm_needs_at_least_two_frames():
    with pytest.raises(ValueError, match="2 frames"):
        tsm(EmbeddingSequence("one", np.ones((1, 3))))


# --- per-frame estimation ---------------------------------------------------


def test_recovers_known_period_with_high_periodicity():
    emb, _ = clean(8)
    preds = estimate_frame_periods(tsm(emb), W)
    assert [fp.period_len for fp in preds] == [8.0] * W
    assert all(fp.periodicity > 0.9 for fp in preds)
    assert all(fp.period_score > 0.99 for fp in preds)


@pytest.mark.parametrize("period", [2, 4, 8, 16, 32])
def test_exact_recovery_for_periods_dividing_the_window(period):
    emb, _ = clean(period)
    preds = estimate_frame_periods(tsm(emb), W)
    interior = [fp.period_len for i, fp in enumerate(preds) if period <= i < W - period]
    assert interior == [float(period)] * len(interior)


def test_subsampled_long_period_reads_in_variant_timebase():
    emb, _ = clean(16, total_frames=128)
    track = predict_track(emb, stride=2, window_size=W)
    assert {fp.period_len for fp in track.frames} == {8.0}


def test_constant_input_degrades_gracefully():
    preds = estimate_frame_periods(tsm(EmbeddingSequence("flat", np.ones((W, 4)))), W)
    for fp in preds:
        assert fp.periodicity == 0.0
        assert fp.period_len == 2.0
        assert fp.period_score == pytest.approx(1 / 31)


def test_phase_shift_leaves_period_estimates_unchanged():
    emb, _ = clean(8, total_frames=96)
    a = estimate_frame_periods(tsm(EmbeddingSequence("a", emb.data[:W])), W)
    b = estimate_frame_periods(tsm(EmbeddingSequence("b", emb.data[16 : 16 + W])), W)
    assert [fp.period_len for fp in a] == [fp.period_len for fp in b]


def test_gap_frames_read_as_non_periodic():
    emb, truth = clean(8, total_frames=128, gaps=((32, 96),), seed=3)
    track = predict_track(emb, stride=1, window_size=W)
    gap_scores = [fp.periodicity for i, fp in enumerate(track.frames) if not truth.periodic_mask[i]]
    assert gap_scores
    assert max(gap_scores) < 0.5


def test_estimation_is_deterministic():
    emb, _ = clean(12, total_frames=192, noise_sigma=0.05, seed=21)
    one = predict_track(emb, stride=1, window_size=W)
    two = predict_track(emb, stride=1, window_size=W)
    assert one == two


def test_window_slice_shape_is_checked():
    with pytest.raises(ValueError, match="shape"):
        estimate_frame_periods(np.zeros((W, W - 2)), W)


# --- track assembly ---------------------------------------------------------


def test_track_has_one_prediction_per_subsampled_frame():
    emb, _ = clean(8, total_frames=200)
    for stride in (1, 2, 3):
        track = predict_track(emb, stride=stride, window_size=W)
        assert len(track.frames) == -(-200 // stride)
        assert track.speed == stride


def test_short_track_counts_only_with_padding():
    emb, _ = clean(8)
    track = predict_track(emb, stride=5, window_size=W)
    assert len(track.frames) == 13
    with pytest.raises(ValueError, match="too short"):
        count_track(track, CountingConfig(mode="segmented"))
    est = count_track(track, CountingConfig(mode="segmented", pad_short=True))
    assert est.count > 0.0


def test_segmented_count_matches_truth_end_to_end():
    emb, truth = clean(8, total_frames=128)
    track = predict_track(emb, stride=1, window_size=W)
    est = count_track(track, CountingConfig(mode="segmented"))
    assert abs(est.count - 16.0) <= 1.0
    assert truth.gt_count == 16.0


def test_gated_count_suppresses_gap_frames_exactly():
    emb, truth = clean(8, total_frames=128, gaps=((32, 96),), seed=3)
    track = predict_track(emb, stride=1, window_size=W)
    est = count_track(track, CountingConfig(tau=0.5, mode="gated"), keep_per_frame=True)
    assert abs(est.count - truth.gt_count) <= 1.0
    contributions = np.asarray(est.per_frame_counts)
    assert np.all(contributions[~truth.periodic_mask] == 0.0)


# --- estimator facades ------------------------------------------------------


def test_period_predictor_round_trips_params():
    predictor = PeriodPredictor(window_size=32, stride=2)
    assert predictor.get_params() == {"window_size": 32, "stride": 2}
    cloned = clone(predictor)
    assert cloned.get_params() == predictor.get_params()
    assert predictor.fit() is predictor


def test_period_predictor_predicts_tracks():
    emb, _ = clean(8, total_frames=128)
    track = PeriodPredictor().fit().predict(emb)
    assert track.video_id == emb.video_id
    assert len(track.frames) == 128
    tracks = PeriodPredictor().predict([emb.data, emb.data])
    assert [len(t.frames) for t in tracks] == [128, 128]


def test_multispeed_counter_counts_close_to_truth():
    emb, truth = clean(8, total_frames=320)
    counter = MultiSpeedCounter().fit()
    assert abs(counter.predict(emb) - truth.gt_count) <= 1.0
    estimate = counter.estimate(emb)
    assert estimate.speed_chosen in (1, 2, 3, 4, 5)


def test_multispeed_counter_invalid_params_fail_at_fit():
    with pytest.raises(ValueError, match="tau"):
        MultiSpeedCounter(tau=1.5).fit()
    with pytest.raises(ValueError, match="window_size"):
        MultiSpeedCounter(window_size=63).fit()
