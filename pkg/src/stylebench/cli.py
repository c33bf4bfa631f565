"""Command-line front-end.

Exit codes: 0 on success (including runs with per-clip rejections),
1 for usage or configuration errors, 2 for I/O failures.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from .fusion import ReviewPolicy
from .models import StyleLabel, write_corpus
from .pipeline import (
    ConfigBundle,
    ConfigError,
    InputError,
    load_config_bundle,
    resolve_thresholds,
    run_annotate,
    run_calibrate,
    run_evaluate,
    run_review_export,
)
from .rules import CalibrationConfig
from .synthetic import NATURAL_STYLE_WEIGHTS, mixed_corpus

_PATH = click.Path(path_type=Path)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["debug", "info", "warning", "error"]),
    default="warning",
    show_default=True,
)
@click.option(
    "--config",
    "config_path",
    type=_PATH,
    envvar="STYLEBENCH_CONFIG",
    default=None,
    help="JSON bundle with thresholds/eval/review_policy/calibration sections.",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str, config_path: Path | None) -> None:
    """Driving-style annotation and style-conditioned trajectory scoring."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = load_config_bundle(config_path) if config_path else ConfigBundle()


@cli.command()
@click.argument("corpus", type=_PATH)
@click.option("--out", type=_PATH, required=True, help="Output directory.")
@click.option("--thresholds", "thresholds_path", type=_PATH, default=None)
@click.option("--external-labels", type=_PATH, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.pass_obj
def annotate(
    bundle: ConfigBundle,
    corpus: Path,
    out: Path,
    thresholds_path: Path | None,
    external_labels: Path | None,
    jobs: int,
) -> None:
    """Classify corpus clips and write the label log."""
    if jobs < 1:
        raise click.UsageError("--jobs must be >= 1")
    thresholds = resolve_thresholds(thresholds_path, bundle)
    result = run_annotate(
        corpus,
        out,
        thresholds=thresholds,
        thresholds_path=thresholds_path,
        external_labels_path=external_labels,
        policy=bundle.policy,
        jobs=jobs,
    )
    click.echo(
        f"annotated {result.valid} clips, {result.rejected} rejected -> {result.labels_path}"
    )


@cli.command()
@click.argument("corpus", type=_PATH)
@click.option("--out", type=_PATH, required=True, help="Output directory.")
@click.option("--thresholds", "thresholds_path", type=_PATH, default=None, help="Base set.")
@click.option("--upper-percentile", type=float, default=None)
@click.option("--lower-percentile", type=float, default=None)
@click.option("--min-clips", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.pass_obj
def calibrate(
    bundle: ConfigBundle,
    corpus: Path,
    out: Path,
    thresholds_path: Path | None,
    upper_percentile: float | None,
    lower_percentile: float | None,
    min_clips: int | None,
    jobs: int,
) -> None:
    """Fit scenario thresholds from corpus feature percentiles."""
    base = resolve_thresholds(thresholds_path, bundle)
    defaults = bundle.calibration or CalibrationConfig()
    try:
        config = CalibrationConfig(
            upper_percentile=(
                upper_percentile if upper_percentile is not None else defaults.upper_percentile
            ),
            lower_percentile=(
                lower_percentile if lower_percentile is not None else defaults.lower_percentile
            ),
            min_clips=min_clips if min_clips is not None else defaults.min_clips,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _, report = run_calibrate(corpus, out, config=config, base=base, jobs=jobs)
    calibrated = sum(1 for entry in report["scenarios"].values() if entry["calibrated"])
    click.echo(f"calibrated {calibrated} scenarios -> {out / 'thresholds.json'}")


@cli.command()
@click.argument("rollouts", type=_PATH)
@click.argument("reference", type=_PATH)
@click.option(
    "--style-source",
    required=True,
    help="fixed:<A|N|C> or from-labels:<label log path>.",
)
@click.option("--out", type=_PATH, required=True, help="Output directory.")
@click.pass_obj
def evaluate(
    bundle: ConfigBundle, rollouts: Path, reference: Path, style_source: str, out: Path
) -> None:
    """Score rollouts against reference clips under a target style."""
    summary = run_evaluate(
        rollouts, reference, style_source, out, config=bundle.eval_config
    )
    click.echo(
        f"scored {summary['clips_scored']} clips, "
        f"{summary['clips_errored']} errors -> {out / 'summary.csv'}"
    )


@cli.command("review-export")
@click.argument("labels", type=_PATH)
@click.option("--out", type=_PATH, required=True, help="Queue JSON file.")
@click.option("--disagreements/--no-disagreements", default=None)
@click.option("--conservative-finals/--no-conservative-finals", default=None)
@click.option("--rule-normal-fused-aggressive/--no-rule-normal-fused-aggressive", default=None)
@click.pass_obj
def review_export(
    bundle: ConfigBundle,
    labels: Path,
    out: Path,
    disagreements: bool | None,
    conservative_finals: bool | None,
    rule_normal_fused_aggressive: bool | None,
) -> None:
    """Export the ordered human-review queue from a label log."""
    base = bundle.policy or ReviewPolicy()
    policy = ReviewPolicy(
        include_disagreements=(
            disagreements if disagreements is not None else base.include_disagreements
        ),
        include_conservative_finals=(
            conservative_finals
            if conservative_finals is not None
            else base.include_conservative_finals
        ),
        include_rule_normal_fused_aggressive=(
            rule_normal_fused_aggressive
            if rule_normal_fused_aggressive is not None
            else base.include_rule_normal_fused_aggressive
        ),
    )
    count = run_review_export(labels, out, policy)
    click.echo(f"queued {count} clips -> {out}")


@cli.command()
@click.option("--labels", type=_PATH, required=True, help="Label log (appended on verdicts).")
@click.option("--corpus", type=_PATH, default=None, help="Clip corpus for display data.")
@click.option("--thresholds", "thresholds_path", type=_PATH, default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
@click.option("--ui-dir", type=_PATH, default=None, help="Override the bundled UI assets.")
@click.pass_obj
def serve(
    bundle: ConfigBundle,
    labels: Path,
    corpus: Path | None,
    thresholds_path: Path | None,
    host: str,
    port: int,
    ui_dir: Path | None,
) -> None:
    """Run the review service (and UI, when assets are present)."""
    import uvicorn

    from .service import create_app

    thresholds = resolve_thresholds(thresholds_path, bundle)
    app = create_app(
        labels_path=labels,
        corpus_path=corpus,
        thresholds=thresholds,
        policy=bundle.policy,
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


@cli.command()
@click.option("--out", type=_PATH, required=True, help="Output directory.")
@click.option("--per-scenario", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--weights",
    type=click.Choice(["natural", "uniform"]),
    default="natural",
    show_default=True,
)
@click.option(
    "--external-noise",
    type=float,
    default=0.0,
    show_default=True,
    help="Probability an emitted external label disagrees with construction.",
)
def synth(
    out: Path, per_scenario: int, seed: int, weights: str, external_noise: float
) -> None:
    """Generate a synthetic demo corpus with construction labels."""
    if per_scenario < 1:
        raise click.UsageError("--per-scenario must be >= 1")
    if not 0.0 <= external_noise <= 1.0:
        raise click.UsageError("--external-noise must be in [0, 1]")
    style_weights = (
        NATURAL_STYLE_WEIGHTS
        if weights == "natural"
        else {s: 1.0 / 3.0 for s in StyleLabel}
    )
    pairs = mixed_corpus(per_scenario, seed, weights=style_weights)
    pairs.sort(key=lambda p: p[0].clip_id)

    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.ndjson"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        write_corpus((clip for clip, _ in pairs), fh)
    with open(out / "construction_labels.ndjson", "w", encoding="utf-8") as fh:
        for clip, style in pairs:
            fh.write(json.dumps({"clip_id": clip.clip_id, "label": style.value}) + "\n")

    if external_noise > 0.0:
        rng = np.random.default_rng(seed + 7919)
        others = {
            StyleLabel.AGGRESSIVE: [StyleLabel.NORMAL, StyleLabel.CONSERVATIVE],
            StyleLabel.NORMAL: [StyleLabel.AGGRESSIVE, StyleLabel.CONSERVATIVE],
            StyleLabel.CONSERVATIVE: [StyleLabel.AGGRESSIVE, StyleLabel.NORMAL],
        }
        with open(out / "external.ndjson", "w", encoding="utf-8") as fh:
            for clip, style in pairs:
                label = style
                if rng.random() < external_noise:
                    label = others[style][int(rng.integers(2))]
                fh.write(
                    json.dumps({"clip_id": clip.clip_id, "label": label.value}) + "\n"
                )
    click.echo(f"wrote {len(pairs)} clips -> {corpus_path}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
