"""Evaluation toolkit for video repetition counting.

The pipeline runs in stages, each usable on its own:

* :mod:`repeval.estimator` turns frame embeddings into per-frame period
  predictions via self-similarity spectra;
* :mod:`repeval.multispeed` runs the estimator at several temporal strides and
  keeps the best-scoring one;
* :mod:`repeval.counting` reduces per-frame predictions to a repetition count,
  optionally gating out non-periodic stretches;
* :mod:`repeval.metrics` scores predicted counts (off-by-one accuracy and
  normalized mean absolute error, with the alpha convention made explicit);
* :mod:`repeval.synthetic` generates datasets with exact ground truth;
* :mod:`repeval.io_formats` defines the on-disk interchange files;
* :mod:`repeval.pipeline` wraps the stages as scikit-learn style estimators;
* :mod:`repeval.cli` ties everything into a command-line tool.
"""

from .counting import (
    COUNTING_MODES,
    CountEstimate,
    CountingConfig,
    FramePrediction,
    PredictionTrack,
    count_track,
    per_frame_count,
    track_period_score,
    window_partition,
)
from .estimator import (
    EmbeddingSequence,
    estimate_frame_periods,
    predict_track,
    tsm,
)
from .io_formats import (
    MANIFEST_COLUMNS,
    MANIFEST_MODES,
    EstimateRecord,
    EvalConfig,
    FormatError,
    ManifestEntry,
    PredictionRecord,
    ResultRow,
    ResultsDocument,
    build_results_document,
    parse_manifest,
    read_embeddings,
    read_estimates,
    read_manifest,
    read_predictions,
    read_results,
    record_from_track,
    render_metrics_table,
    track_from_record,
    write_embeddings,
    write_estimates,
    write_manifest,
    write_predictions,
    write_results,
)
from .metrics import (
    CountPair,
    MetricConfig,
    MetricReport,
    PerVideoMetric,
    alpha_sweep,
    build_report,
    mae,
    oboa,
    oboe,
)
from .multispeed import (
    SpeedConfig,
    SpeedScore,
    SpeedSelection,
    multispeed_count,
    select_speed,
    subsample,
)
from .pipeline import MultiSpeedCounter, PeriodPredictor
from .synthetic import (
    DATASET_MODES,
    SynthSpec,
    SynthTruth,
    SynthVideo,
    make_dataset,
    synth_periodic,
)

__version__ = "0.1.0"

__all__ = [
    "COUNTING_MODES",
    "CountEstimate",
    "CountingConfig",
    "FramePrediction",
    "PredictionTrack",
    "count_track",
    "per_frame_count",
    "track_period_score",
    "window_partition",
    "EmbeddingSequence",
    "estimate_frame_periods",
    "predict_track",
    "tsm",
    "MANIFEST_COLUMNS",
    "MANIFEST_MODES",
    "EstimateRecord",
    "EvalConfig",
    "FormatError",
    "ManifestEntry",
    "PredictionRecord",
    "ResultRow",
    "ResultsDocument",
    "build_results_document",
    "parse_manifest",
    "read_embeddings",
    "read_estimates",
    "read_manifest",
    "read_predictions",
    "read_results",
    "record_from_track",
    "render_metrics_table",
    "track_from_record",
    "write_embeddings",
    "write_estimates",
    "write_manifest",
    "write_predictions",
    "write_results",
    "CountPair",
    "MetricConfig",
    "MetricReport",
    "PerVideoMetric",
    "alpha_sweep",
    "build_report",
    "mae",
    "oboa",
    "oboe",
    "SpeedConfig",
    "SpeedScore",
    "SpeedSelection",
    "multispeed_count",
    "select_speed",
    "subsample",
    "MultiSpeedCounter",
    "PeriodPredictor",
    "DATASET_MODES",
    "SynthSpec",
    "SynthTruth",
    "SynthVideo",
    "make_dataset",
    "synth_periodic",
    "__version__",
]
