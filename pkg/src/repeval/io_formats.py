"""On-disk interchange formats for the evaluation pipeline.

The pipeline's file surface is deliberately plain so other tools can produce
or consume any stage:

* manifest: flat CSV listing videos, ground-truth counts, dataset protocol
  (``segmented`` or ``gapped``) and data paths;
* embeddings, predictions, estimates: line-delimited JSON, one record per
  line, numbers carried at full double precision;
* results: a single JSON document with ``config``, ``metrics`` and
  ``per_video`` blocks, plus a rendered markdown metrics table.

Validation is strict and cites the offending line; a results document must be
internally consistent (its aggregate metrics recomputable from its per-video
rows) both when built and when read back.
"""

from __future__ import annotations

import csv
import io
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .counting import CountEstimate, FramePrediction, PredictionTrack
from .estimator import EmbeddingSequence
from .metrics import MetricReport, PerVideoMetric
from ._validation import check_non_negative, check_positive_int, check_unit_interval, check_window_size

__all__ = [
    "FormatError",
    "ManifestEntry",
    "MANIFEST_COLUMNS",
    "MANIFEST_MODES",
    "parse_manifest",
    "read_manifest",
    "write_manifest",
    "PredictionRecord",
    "record_from_track",
    "track_from_record",
    "read_predictions",
    "write_predictions",
    "read_embeddings",
    "write_embeddings",
    "EstimateRecord",
    "read_estimates",
    "write_estimates",
    "EvalConfig",
    "ResultRow",
    "ResultsDocument",
    "build_results_document",
    "render_metrics_table",
    "write_results",
    "read_results",
]

MANIFEST_COLUMNS = ("video_id", "gt_count", "mode", "embedding_path", "prediction_path")
MANIFEST_MODES = ("segmented", "gapped")


class FormatError(ValueError):
    """A file failed validation; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@contextmanager
def _opened(dest, mode: str):
    if isinstance(dest, (str, Path)):
        with open(dest, mode, encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield dest


def _dump(obj) -> str:
    return json.dumps(obj, allow_nan=False, separators=(", ", ": "))


# --- manifest ---------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    """One manifest row: a video, its ground truth, and where its data lives."""

    video_id: str
    gt_count: float
    mode: str
    embedding_path: str | None = None
    prediction_path: str | None = None


def parse_manifest(text: str) -> list[ManifestEntry]:
    """Parse manifest CSV text; any defect raises with the offending line."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty manifest", line=1) from None
    if tuple(header) != MANIFEST_COLUMNS:
        raise FormatError(
            f"bad header {header!r}, expected {','.join(MANIFEST_COLUMNS)}", line=1
        )
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(MANIFEST_COLUMNS):
            raise FormatError(f"expected {len(MANIFEST_COLUMNS)} fields, got {len(row)}", line)
        video_id, gt_text, mode, emb_path, pred_path = (f.strip() for f in row)
        if not video_id:
            raise FormatError("empty video_id", line)
        if video_id in seen:
            raise FormatError(f"duplicate video_id {video_id!r}", line)
        seen.add(video_id)
        try:
            gt_count = float(gt_text)
        except ValueError:
            raise FormatError(f"gt_count {gt_text!r} is not a number", line) from None
        if not math.isfinite(gt_count) or gt_count < 0:
            raise FormatError(f"gt_count must be finite and >= 0, got {gt_text}", line)
        if mode not in MANIFEST_MODES:
            raise FormatError(
                f"mode {mode!r} not recognized; allowed: {', '.join(MANIFEST_MODES)}", line
            )
        if not emb_path and not pred_path:
            raise FormatError("at least one of embedding_path/prediction_path is required", line)
        entries.append(
            ManifestEntry(video_id, gt_count, mode, emb_path or None, pred_path or None)
        )
    if not entries:
        raise FormatError("manifest lists no videos", line=1)
    return entries


def read_manifest(path) -> list[ManifestEntry]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_manifest(fh.read())


def write_manifest(entries: Sequence[ManifestEntry], dest) -> None:
    with _opened(dest, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for e in entries:
            writer.writerow(
                [e.video_id, repr(float(e.gt_count)), e.mode, e.embedding_path or "", e.prediction_path or ""]
            )


# --- prediction tracks ------------------------------------------------------


@dataclass(frozen=True)
class PredictionRecord:
    """Serialized form of one prediction track (arrays are parallel per frame)."""

    video_id: str
    speed: int
    window_size: int
    periodicity: tuple[float, ...]
    period_length: tuple[float, ...]
    period_score: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "speed", check_positive_int("speed", self.speed))
        object.__setattr__(self, "window_size", check_window_size(self.window_size))
        arrays = {}
        for name in ("periodicity", "period_length", "period_score"):
            arrays[name] = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, arrays[name])
        lengths = {name: len(a) for name, a in arrays.items()}
        if len(set(lengths.values())) != 1:
            raise ValueError(f"per-frame arrays must have equal lengths, got {lengths}")
        if lengths["periodicity"] == 0:
            raise ValueError("per-frame arrays must be non-empty")
        half = self.window_size / 2
        for name in ("periodicity", "period_score"):
            for v in arrays[name]:
                check_unit_interval(name, v)
        for v in arrays["period_length"]:
            if not math.isfinite(v) or not 2.0 <= v <= half:
                raise ValueError(f"period_length {v!r} outside [2, {half}]")


def record_from_track(track: PredictionTrack) -> PredictionRecord:
    return PredictionRecord(
        video_id=track.video_id,
        speed=track.speed,
        window_size=track.window_size,
        periodicity=tuple(f.periodicity for f in track.frames),
        period_length=tuple(f.period_len for f in track.frames),
        period_score=tuple(f.period_score for f in track.frames),
    )


def track_from_record(record: PredictionRecord) -> PredictionTrack:
    frames = tuple(
        FramePrediction(p, l, s)
        for p, l, s in zip(record.periodicity, record.period_length, record.period_score)
    )
    return PredictionTrack(record.video_id, record.speed, record.window_size, frames)


_PREDICTION_FIELDS = ("video_id", "speed", "window_size", "periodicity", "period_length", "period_score")


def write_predictions(records: Iterable[PredictionRecord], dest) -> None:
    with _opened(dest, "w") as fh:
        for r in records:
            fh.write(
                _dump(
                    {
                        "video_id": r.video_id,
                        "speed": r.speed,
                        "window_size": r.window_size,
                        "periodicity": list(r.periodicity),
                        "period_length": list(r.period_length),
                        "period_score": list(r.period_score),
                    }
                )
                + "\n"
            )


def _parse_json_line(raw: str, line: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON ({exc.msg})", line) from None
    if not isinstance(obj, dict):
        raise FormatError(f"expected an object, got {type(obj).__name__}", line)
    return obj


def read_predictions(src) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    with _opened(src, "r") as fh:
        for line, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = _parse_json_line(raw, line)
            missing = [k for k in _PREDICTION_FIELDS if k not in obj]
            if missing:
                raise FormatError(f"missing fields {missing}", line)
            extra = [k for k in obj if k not in _PREDICTION_FIELDS]
            if extra:
                raise FormatError(f"unknown fields {extra}", line)
            try:
                records.append(
                    PredictionRecord(
                        video_id=obj["video_id"],
                        speed=obj["speed"],
                        window_size=obj["window_size"],
                        periodicity=tuple(obj["periodicity"]),
                        period_length=tuple(obj["period_length"]),
                        period_score=tuple(obj["period_score"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise FormatError(str(exc), line) from None
    return records


# --- embeddings -------------------------------------------------------------


def write_embeddings(sequences: Iterable[EmbeddingSequence], dest) -> None:
    with _opened(dest, "w") as fh:
        for seq in sequences:
            fh.write(
                _dump(
                    {
                        "video_id": seq.video_id,
                        "dims": int(seq.data.shape[1]),
                        "rows": [[float(v) for v in row] for row in seq.data],
                    }
                )
                + "\n"
            )


def read_embeddings(src) -> list[EmbeddingSequence]:
    out: list[EmbeddingSequence] = []
    with _opened(src, "r") as fh:
        for line, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = _parse_json_line(raw, line)
            for key in ("video_id", "dims", "rows"):
                if key not in obj:
                    raise FormatError(f"missing field {key!r}", line)
            rows = obj["rows"]
            if not isinstance(rows, list) or not rows:
                raise FormatError("rows must be a non-empty list", line)
            dims = obj["dims"]
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != dims:
                    raise FormatError(f"row {i} does not have dims={dims} values", line)
            try:
                out.append(EmbeddingSequence(obj["video_id"], rows))
            except (TypeError, ValueError) as exc:
                raise FormatError(str(exc), line) from None
    return out


# --- count estimates --------------------------------------------------------


@dataclass(frozen=True)
class EstimateRecord:
    """Serialized count estimate for one video."""

    video_id: str
    count: float
    speed_chosen: int
    period_score_mean: float

    @classmethod
    def from_estimate(cls, est: CountEstimate) -> "EstimateRecord":
        return cls(est.video_id, est.count, est.speed_chosen, est.period_score_mean)

    def __post_init__(self) -> None:
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValueError("video_id must be a non-empty string")
        object.__setattr__(self, "count", check_non_negative("count", self.count))
        object.__setattr__(self, "speed_chosen", check_positive_int("speed_chosen", self.speed_chosen))
        object.__setattr__(
            self, "period_score_mean", check_unit_interval("period_score_mean", self.period_score_mean)
        )


def write_estimates(records: Iterable[EstimateRecord], dest, run_config: Mapping | None = None) -> None:
    """Write estimates, one JSON line per video, after an optional config echo line."""
    with _opened(dest, "w") as fh:
        if run_config is not None:
            fh.write(_dump({"config": dict(run_config)}) + "\n")
        for r in records:
            fh.write(
                _dump(
                    {
                        "video_id": r.video_id,
                        "count": r.count,
                        "speed_chosen": r.speed_chosen,
                        "period_score_mean": r.period_score_mean,
                    }
                )
                + "\n"
            )


def read_estimates(src) -> tuple[dict, list[EstimateRecord]]:
    """Read an estimates file; returns (config echo, records)."""
    config: dict = {}
    records: list[EstimateRecord] = []
    with _opened(src, "r") as fh:
        for line, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = _parse_json_line(raw, line)
            if "config" in obj:
                if records or config:
                    raise FormatError("config line must come first and appear once", line)
                if not isinstance(obj["config"], dict):
                    raise FormatError("config must be an object", line)
                config = obj["config"]
                continue
            try:
                records.append(
                    EstimateRecord(
                        video_id=obj["video_id"],
                        count=obj["count"],
                        speed_chosen=obj["speed_chosen"],
                        period_score_mean=obj["period_score_mean"],
                    )
                )
            except KeyError as exc:
                raise FormatError(f"missing field {exc.args[0]!r}", line) from None
            except (TypeError, ValueError) as exc:
                raise FormatError(str(exc), line) from None
    return config, records


# --- results document -------------------------------------------------------


@dataclass(frozen=True)
class EvalConfig:
    """Configuration echoed into a results document."""

    tau: float
    alpha: float
    strides: tuple[int, ...]
    window: int
    mode: str
    round_predictions: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", check_unit_interval("tau", self.tau))
        object.__setattr__(self, "alpha", check_non_negative("alpha", self.alpha))
        object.__setattr__(self, "strides", tuple(check_positive_int("stride", s) for s in self.strides))
        object.__setattr__(self, "window", check_window_size(self.window))
        if not isinstance(self.mode, str) or not self.mode:
            raise ValueError("mode must be a non-empty string")
        object.__setattr__(self, "round_predictions", bool(self.round_predictions))


@dataclass(frozen=True)
class ResultRow:
    video_id: str
    gt: float
    pred: float
    abs_err: float
    within_one: bool
    speed_chosen: int


@dataclass(frozen=True)
class ResultsDocument:
    """Aggregate metrics plus the per-video rows they derive from.

    Construction re-derives the aggregates from the rows and rejects any
    mismatch beyond 1e-9, so a tampered or truncated document cannot load.
    """

    config: EvalConfig
    n_videos: int
    oboa: float
    oboe: float
    mae: float
    alpha: float
    per_video: tuple[ResultRow, ...]

    def __post_init__(self) -> None:
        rows = tuple(self.per_video)
        object.__setattr__(self, "per_video", rows)
        if self.n_videos != len(rows) or self.n_videos < 1:
            raise ValueError("n_videos must equal the number of per_video rows")
        if self.alpha != self.config.alpha:
            raise ValueError("metrics alpha differs from config alpha")
        if self.oboe != 1.0 - self.oboa:
            raise ValueError("oboe must equal 1 - oboa exactly")
        for row in rows:
            if abs(abs(row.gt - row.pred) - row.abs_err) > 1e-9:
                raise ValueError(f"row {row.video_id!r}: abs_err inconsistent")
            if row.within_one != (row.abs_err <= 1.0):
                raise ValueError(f"row {row.video_id!r}: within_one flag inconsistent")
        acc = sum(1 for r in rows if r.within_one) / len(rows)
        if abs(acc - self.oboa) > 1e-9:
            raise ValueError(f"oboa {self.oboa} not recomputable from rows (got {acc})")
        terms = []
        for row in rows:
            if self.alpha == 0.0 and row.gt == 0.0:
                raise ValueError(f"row {row.video_id!r}: zero gt with alpha=0")
            terms.append(row.abs_err / (self.alpha + row.gt))
        err = math.fsum(terms) / len(rows)
        if abs(err - self.mae) > 1e-9 * max(1.0, abs(self.mae)):
            raise ValueError(f"mae {self.mae} not recomputable from rows (got {err})")


def build_results_document(
    report: MetricReport,
    estimates: Mapping[str, EstimateRecord] | Mapping[str, CountEstimate],
    config: EvalConfig,
) -> ResultsDocument:
    """Join a metric report with per-video speed choices into a results document."""
    if config.alpha != report.alpha_used:
        raise ValueError(
            f"config alpha {config.alpha} does not match report alpha {report.alpha_used}"
        )
    rows = []
    for pv in report.per_video:
        est = estimates.get(pv.video_id)
        if est is None:
            raise ValueError(f"no estimate for video {pv.video_id!r}")
        rows.append(ResultRow(pv.video_id, pv.gt, pv.pred, pv.abs_err, pv.within_one, est.speed_chosen))
    return ResultsDocument(
        config=config,
        n_videos=report.n_videos,
        oboa=report.oboa,
        oboe=report.oboe,
        mae=report.mae,
        alpha=report.alpha_used,
        per_video=tuple(rows),
    )


def _doc_to_json(doc: ResultsDocument) -> dict:
    return {
        "config": {
            "tau": doc.config.tau,
            "alpha": doc.config.alpha,
            "strides": list(doc.config.strides),
            "window": doc.config.window,
            "mode": doc.config.mode,
            "round_predictions": doc.config.round_predictions,
        },
        "metrics": {
            "oboa": doc.oboa,
            "oboe": doc.oboe,
            "mae": doc.mae,
            "alpha": doc.alpha,
            "n_videos": doc.n_videos,
        },
        "per_video": [
            {
                "video_id": r.video_id,
                "gt": r.gt,
                "pred": r.pred,
                "abs_err": r.abs_err,
                "within_one": r.within_one,
                "speed_chosen": r.speed_chosen,
            }
            for r in doc.per_video
        ],
    }


def render_metrics_table(entries: Sequence[tuple[str, ResultsDocument]]) -> str:
    """Render labeled results as a markdown table.

    Columns: ``Model | MAE α | MAE | OBOA | OBOE`` with metric values at four
    decimals and the alpha shown verbatim. Runs whose window or counting mode
    differ are still listed on one table but flagged in a footnote instead of
    being silently merged.
    """
    if not entries:
        raise ValueError("no results to render")
    lines = [
        "| Model | MAE α | MAE | OBOA | OBOE |",
        "| --- | --- | --- | --- | --- |",
    ]
    for label, doc in entries:
        lines.append(
            f"| {label} | {str(float(doc.alpha))} | {doc.mae:.4f} | {doc.oboa:.4f} | {doc.oboe:.4f} |"
        )
    setups = {(doc.config.window, doc.config.mode) for _, doc in entries}
    if len(setups) > 1:
        details = "; ".join(
            f"{label}: window={doc.config.window}, mode={doc.config.mode}" for label, doc in entries
        )
        lines.append("")
        lines.append(f"Note: runs use different counting setups ({details}).")
    return "\n".join(lines) + "\n"


def write_results(doc: ResultsDocument, json_dest, markdown_dest=None, label: str = "run") -> str:
    """Write the JSON document (and optionally the rendered table); returns the table."""
    payload = json.dumps(_doc_to_json(doc), allow_nan=False, indent=2) + "\n"
    with _opened(json_dest, "w") as fh:
        fh.write(payload)
    table = render_metrics_table([(label, doc)])
    if markdown_dest is not None:
        with _opened(markdown_dest, "w") as fh:
            fh.write(table)
    return table


def read_results(path) -> ResultsDocument:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid results JSON: {exc.msg}", line=exc.lineno) from None
    try:
        config = obj["config"]
        metrics = obj["metrics"]
        rows = obj["per_video"]
        doc = ResultsDocument(
            config=EvalConfig(
                tau=config["tau"],
                alpha=config["alpha"],
                strides=tuple(config["strides"]),
                window=config["window"],
                mode=config["mode"],
                round_predictions=config.get("round_predictions", False),
            ),
            n_videos=metrics["n_videos"],
            oboa=metrics["oboa"],
            oboe=metrics["oboe"],
            mae=metrics["mae"],
            alpha=metrics["alpha"],
            per_video=tuple(
                ResultRow(
                    video_id=r["video_id"],
                    gt=r["gt"],
                    pred=r["pred"],
                    abs_err=r["abs_err"],
                    within_one=r["within_one"],
                    speed_chosen=r["speed_chosen"],
                )
                for r in rows
            ),
        )
    except KeyError as exc:
        raise FormatError(f"results document missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"inconsistent results document: {exc}") from None
    return doc
