"""Command-line surface for the counting evaluation pipeline.

Subcommands cover the full loop: ``synth`` writes a manifest plus embeddings,
``predict`` turns embeddings into per-frame prediction tracks at each stride,
``count`` reduces tracks to per-video count estimates, ``eval`` scores
estimates against the manifest, ``audit-alpha`` tabulates MAE across alpha
values, and ``report`` renders one or more results documents as a table.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. Every
subcommand validates all inputs and computes its full output in memory before
writing anything, so a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .counting import COUNTING_MODES, CountingConfig
from .estimator import predict_track
from .io_formats import (
    EstimateRecord,
    EvalConfig,
    ManifestEntry,
    build_results_document,
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
from .metrics import CountPair, MetricConfig, alpha_sweep, build_report
from .multispeed import SpeedConfig, multispeed_count
from .synthetic import DATASET_MODES, make_dataset

__all__ = ["cli", "main", "console_main"]


def _parse_int_list(ctx, param, value: str) -> tuple[int, ...]:
    try:
        items = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of integers")
    if not items:
        raise click.BadParameter("list must not be empty")
    return items


def _parse_float_list(ctx, param, value: str) -> tuple[float, ...]:
    try:
        items = tuple(float(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of numbers")
    if not items:
        raise click.BadParameter("list must not be empty")
    return items


@click.group()
def cli() -> None:
    """Repetition-count evaluation pipeline."""


@cli.command()
@click.option("--videos", type=int, required=True, help="Number of videos to generate.")
@click.option("--seed", type=int, default=0, show_default=True, help="RNG seed; same seed, same bytes.")
@click.option("--mode", type=click.Choice(DATASET_MODES), default="segmented", show_default=True)
@click.option("--period-min", type=int, default=2, show_default=True)
@click.option("--period-max", type=int, default=160, show_default=True)
@click.option("--max-frames", type=int, default=1024, show_default=True)
@click.option("--dims", type=int, default=8, show_default=True)
@click.option("--noise-max", type=float, default=0.05, show_default=True)
@click.option("--strides", default="1,2,3,4,5", show_default=True, callback=_parse_int_list)
@click.option("--window", type=int, default=64, show_default=True)
@click.option("--out-manifest", default="manifest.csv", show_default=True)
@click.option("--out-embeddings", default="embeddings.jsonl", show_default=True)
def synth(
    videos: int,
    seed: int,
    mode: str,
    period_min: int,
    period_max: int,
    max_frames: int,
    dims: int,
    noise_max: float,
    strides: tuple[int, ...],
    window: int,
    out_manifest: str,
    out_embeddings: str,
) -> None:
    """Generate a synthetic dataset: a manifest plus an embeddings file."""
    dataset = make_dataset(
        videos,
        seed=seed,
        mode=mode,
        period_range=(period_min, period_max),
        max_frames=max_frames,
        dims=dims,
        noise_range=(0.0, noise_max),
        strides=strides,
        window_size=window,
    )
    entries = [
        ManifestEntry(v.video_id, v.truth.gt_count, v.mode, embedding_path=out_embeddings)
        for v in dataset
    ]
    write_manifest(entries, out_manifest)
    write_embeddings((v.embeddings for v in dataset), out_embeddings)
    click.echo(f"wrote {len(entries)} videos to {out_manifest} and {out_embeddings}")


@cli.command()
@click.option("--embeddings", "embeddings_path", required=True, help="Embeddings file to read.")
@click.option("--out", "out_path", default="predictions.jsonl", show_default=True)
@click.option("--strides", default="1,2,3,4,5", show_default=True, callback=_parse_int_list)
@click.option("--window", type=int, default=64, show_default=True)
def predict(embeddings_path: str, out_path: str, strides: tuple[int, ...], window: int) -> None:
    """Predict per-frame period structure at every configured stride."""
    sequences = read_embeddings(embeddings_path)
    records = []
    for seq in sequences:
        for stride in strides:
            records.append(record_from_track(predict_track(seq, stride=stride, window_size=window)))
    write_predictions(records, out_path)
    click.echo(f"wrote {len(records)} prediction tracks to {out_path}")


@cli.command()
@click.option("--predictions", "predictions_path", required=True, help="Prediction file to read.")
@click.option("--out", "out_path", default="estimates.jsonl", show_default=True)
@click.option("--tau", type=float, default=0.5, show_default=True)
@click.option("--mode", type=click.Choice(COUNTING_MODES), default="gated", show_default=True)
@click.option("--pad-short", is_flag=True, help="Pad tracks shorter than one window.")
def count(predictions_path: str, out_path: str, tau: float, mode: str, pad_short: bool) -> None:
    """Reduce prediction tracks to one count estimate per video."""
    records = read_predictions(predictions_path)
    if not records:
        raise ValueError(f"no prediction tracks in {predictions_path}")
    by_video: dict[str, dict[int, object]] = {}
    for record in records:
        tracks = by_video.setdefault(record.video_id, {})
        if record.speed in tracks:
            raise ValueError(
                f"duplicate track for video {record.video_id!r} at stride {record.speed}"
            )
        tracks[record.speed] = track_from_record(record)
    strides = tuple(sorted(next(iter(by_video.values())).keys()))
    window = records[0].window_size
    counting_config = CountingConfig(tau=tau, mode=mode, pad_short=pad_short)
    speed_config = SpeedConfig(strides=strides)
    estimates = []
    for video_id, tracks in by_video.items():
        estimate = multispeed_count(tracks, counting_config=counting_config, speed_config=speed_config)
        estimates.append(EstimateRecord.from_estimate(estimate))
    run_config = {
        "tau": tau,
        "mode": mode,
        "strides": list(strides),
        "window_size": window,
        "pad_short": pad_short,
    }
    write_estimates(estimates, out_path, run_config=run_config)
    click.echo(f"wrote {len(estimates)} count estimates to {out_path}")


def _pairs_from(entries, estimates) -> list[CountPair]:
    by_id = {e.video_id: e for e in estimates}
    missing = [e.video_id for e in entries if e.video_id not in by_id]
    if missing:
        raise ValueError(f"manifest videos with no estimate: {missing}")
    extra = sorted(set(by_id) - {e.video_id for e in entries})
    if extra:
        raise ValueError(f"estimates for videos not in manifest: {extra}")
    return [CountPair(e.video_id, e.gt_count, by_id[e.video_id].count) for e in entries]


@cli.command("eval")
@click.option("--manifest", "manifest_path", required=True, help="Manifest with ground truth.")
@click.option("--estimates", "estimates_path", required=True, help="Count estimates to score.")
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--round-predictions", is_flag=True, help="Round counts to integers before scoring.")
@click.option("--out", "out_path", default=None, help="Write the results document here.")
@click.option("--table", "table_path", default=None, help="Write the rendered table here.")
@click.option("--label", default="run", show_default=True, help="Row label for the table.")
def eval_cmd(
    manifest_path: str,
    estimates_path: str,
    alpha: float,
    round_predictions: bool,
    out_path: str | None,
    table_path: str | None,
    label: str,
) -> None:
    """Score count estimates against manifest ground truth."""
    entries = read_manifest(manifest_path)
    run_config, estimates = read_estimates(estimates_path)
    required = ("tau", "mode", "strides", "window_size")
    missing = [k for k in required if k not in run_config]
    if missing:
        raise ValueError(
            f"estimates file {estimates_path} lacks config fields {missing}; "
            "regenerate it with the count subcommand"
        )
    pairs = _pairs_from(entries, estimates)
    report = build_report(pairs, MetricConfig(alpha=alpha, round_predictions=round_predictions))
    config = EvalConfig(
        tau=run_config["tau"],
        alpha=alpha,
        strides=tuple(run_config["strides"]),
        window=run_config["window_size"],
        mode=run_config["mode"],
        round_predictions=round_predictions,
    )
    doc = build_results_document(report, {e.video_id: e for e in estimates}, config)
    if out_path is not None:
        table = write_results(doc, out_path, markdown_dest=table_path, label=label)
    else:
        table = render_metrics_table([(label, doc)])
        if table_path is not None:
            with open(table_path, "w", encoding="utf-8") as fh:
                fh.write(table)
    click.echo(table, nl=False)
    click.echo(f"n_videos={doc.n_videos} oboa={doc.oboa:.4f} oboe={doc.oboe:.4f} mae={doc.mae:.4f}")


@cli.command("audit-alpha")
@click.option("--manifest", "manifest_path", required=True, help="Manifest with ground truth.")
@click.option("--estimates", "estimates_path", required=True, help="Count estimates to score.")
@click.option("--alphas", default="0,0.1", show_default=True, callback=_parse_float_list)
@click.option("--round-predictions", is_flag=True, help="Round counts to integers before scoring.")
@click.option("--out", "out_path", default=None, help="Also write the table here.")
def audit_alpha(
    manifest_path: str,
    estimates_path: str,
    alphas: tuple[float, ...],
    round_predictions: bool,
    out_path: str | None,
) -> None:
    """Tabulate MAE across alpha values to expose the convention's effect."""
    entries = read_manifest(manifest_path)
    _, estimates = read_estimates(estimates_path)
    pairs = _pairs_from(entries, estimates)
    rows = alpha_sweep(pairs, alphas, round_predictions=round_predictions)
    lines = ["| alpha | MAE |", "| --- | --- |"]
    for alpha, mae in rows:
        lines.append(f"| {str(float(alpha))} | {mae:.4f} |")
    table = "\n".join(lines) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(table)
    click.echo(table, nl=False)


@cli.command()
@click.option(
    "--results",
    "results_specs",
    multiple=True,
    required=True,
    help="Results document to include, as label=path or a bare path.",
)
@click.option("--out", "out_path", default=None, help="Write the rendered table here.")
def report(results_specs: tuple[str, ...], out_path: str | None) -> None:
    """Render one or more results documents as a single comparison table."""
    entries = []
    for spec_text in results_specs:
        label, sep, path = spec_text.partition("=")
        if not sep:
            label, path = Path(spec_text).stem, spec_text
        entries.append((label, read_results(path)))
    table = render_metrics_table(entries)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(table)
    click.echo(table, nl=False)


def main(argv: list[str] | None = None) -> int:
    """Run the CLI; returns the exit code instead of raising SystemExit."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
