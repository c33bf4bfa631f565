"""Batch runs: annotate, calibrate, evaluate, review-export.

Every run is deterministic for identical inputs and configuration:
records are emitted in sorted clip_id order, data files carry no
timestamps, and parallel workers feed a single ordered merge. Run
metadata (timestamps, run id, config hash) lives only in the manifest.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import uuid
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import __version__
from .fusion import (
    LabelRecord,
    ReviewPolicy,
    make_record,
    read_records,
    review_queue_entries,
    write_records,
)
from .kinematics import KinematicFeatures, extract_features
from .metrics import EvalConfig, eval_config_from_dict, evaluate_clip
from .models import Clip, StyleLabel, clip_from_dict, validate_clip
from .rules import CalibrationConfig, calibrate, classify
from .thresholds import ThresholdSet, load_thresholds, save_thresholds, thresholds_to_dict

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    """Bad configuration or usage; maps to exit code 1."""


class InputError(Exception):
    """Unreadable or unusable input file; maps to exit code 2."""


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def config_hash(parts: dict) -> str:
    """Stable digest over every configuration input of a run."""
    canonical = json.dumps(parts, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _read_lines(path: Path) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write_json(path: Path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- parallel clip processing ----------------------------------------------
# Workers receive raw corpus lines and parse them locally; only small,
# picklable results travel back. Globals are set once per worker process.

_WORKER_THRESHOLDS: ThresholdSet | None = None


def _init_worker(thresholds: ThresholdSet) -> None:
    global _WORKER_THRESHOLDS
    _WORKER_THRESHOLDS = thresholds


@dataclass(frozen=True)
class ClipOutcome:
    """Worker result for one corpus line."""

    lineno: int
    clip_id: str | None
    rule_label: StyleLabel | None = None
    scenario: str | None = None
    fired_rules: tuple[str, ...] = ()
    features: KinematicFeatures | None = None
    errors: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def _process_line(item: tuple[int, str]) -> ClipOutcome | None:
    lineno, line = item
    line = line.strip()
    if not line:
        return None
    thresholds = _WORKER_THRESHOLDS
    assert thresholds is not None
    try:
        clip = clip_from_dict(json.loads(line))
    except (json.JSONDecodeError, ValueError) as exc:
        return ClipOutcome(lineno=lineno, clip_id=None, errors=(f"malformed: {exc}",))
    report = validate_clip(clip.trajectory, clip.agents, clip.context)
    if not report.ok:
        return ClipOutcome(lineno=lineno, clip_id=clip.clip_id, errors=tuple(report.codes()))
    feats = extract_features(clip.trajectory, clip.agents, thresholds)
    decision = classify(clip.context, feats, thresholds)
    return ClipOutcome(
        lineno=lineno,
        clip_id=clip.clip_id,
        rule_label=decision.label,
        scenario=decision.scenario.value,
        fired_rules=decision.fired_rules,
        features=feats,
    )


def _map_lines(
    lines: Sequence[str], thresholds: ThresholdSet, jobs: int
) -> Iterator[ClipOutcome]:
    items = list(enumerate(lines, start=1))
    if jobs <= 1:
        _init_worker(thresholds)
        results: Iterable[ClipOutcome | None] = map(_process_line, items)
        yield from (r for r in results if r is not None)
        return
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(thresholds,)
    ) as pool:
        for result in pool.map(_process_line, items, chunksize=chunk):
            if result is not None:
                yield result


# --- annotate ----------------------------------------------------------------

def load_external_labels(path: Path) -> dict[str, StyleLabel]:
    """NDJSON of {clip_id, label} pairs from the external channel."""
    labels: dict[str, StyleLabel] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
            labels[doc["clip_id"]] = StyleLabel.parse(doc["label"])
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ConfigError(f"external labels line {lineno}: {exc}") from exc
    return labels


@dataclass(frozen=True)
class AnnotateResult:
    total: int
    valid: int
    rejected: int
    labels_path: Path
    manifest_path: Path
    rejections_path: Path


def run_annotate(
    corpus_path: Path,
    out_dir: Path,
    thresholds: ThresholdSet | None = None,
    thresholds_path: Path | None = None,
    external_labels_path: Path | None = None,
    policy: ReviewPolicy | None = None,
    jobs: int = 1,
) -> AnnotateResult:
    """Classify every valid corpus clip and write the label log.

    Per-clip failures (malformed lines, validation errors, duplicate clip
    ids) become rejection entries, never abort the batch.
    """
    started = _utc_now()
    thresholds = thresholds or ThresholdSet()
    policy = policy or ReviewPolicy()
    lines = _read_lines(corpus_path)
    external = load_external_labels(external_labels_path) if external_labels_path else {}

    accepted: dict[str, ClipOutcome] = {}
    rejections: list[dict] = []
    outcomes = sorted(_map_lines(lines, thresholds, jobs), key=lambda o: o.lineno)
    for outcome in outcomes:
        if not outcome.ok:
            rejections.append(
                {
                    "lineno": outcome.lineno,
                    "clip_id": outcome.clip_id,
                    "errors": list(outcome.errors),
                }
            )
            continue
        assert outcome.clip_id is not None
        if outcome.clip_id in accepted:
            rejections.append(
                {
                    "lineno": outcome.lineno,
                    "clip_id": outcome.clip_id,
                    "errors": ["duplicate-clip-id"],
                }
            )
            continue
        accepted[outcome.clip_id] = outcome

    records: list[LabelRecord] = []
    for clip_id in sorted(accepted):
        outcome = accepted[clip_id]
        assert outcome.rule_label is not None
        records.append(
            make_record(clip_id, outcome.rule_label, external.get(clip_id), policy)
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    labels_path = out_dir / "labels.ndjson"
    with open(labels_path, "w", encoding="utf-8") as fh:
        write_records(records, fh)
    rejections_path = out_dir / "rejections.json"
    _write_json(rejections_path, {"rejections": rejections})

    manifest_path = out_dir / "manifest.json"
    manifest = {
        "run_id": uuid.uuid4().hex,
        "tool_version": __version__,
        "command": "annotate",
        "inputs": {
            "corpus": str(corpus_path),
            "thresholds": str(thresholds_path) if thresholds_path else None,
            "external_labels": str(external_labels_path) if external_labels_path else None,
        },
        "config_hash": config_hash(
            {
                "thresholds": thresholds_to_dict(thresholds),
                "policy": dataclasses.asdict(policy),
            }
        ),
        "started": started,
        "finished": _utc_now(),
        "counts": {
            "total": len(records) + len(rejections),
            "valid": len(records),
            "rejected": len(rejections),
        },
    }
    _write_json(manifest_path, manifest)
    return AnnotateResult(
        total=len(records) + len(rejections),
        valid=len(records),
        rejected=len(rejections),
        labels_path=labels_path,
        manifest_path=manifest_path,
        rejections_path=rejections_path,
    )


# --- calibrate ----------------------------------------------------------------

def run_calibrate(
    corpus_path: Path,
    out_dir: Path,
    config: CalibrationConfig | None = None,
    base: ThresholdSet | None = None,
    jobs: int = 1,
) -> tuple[ThresholdSet, dict]:
    """Fit per-scenario thresholds from corpus percentiles; writes the
    threshold file and a per-scenario calibration report."""
    config = config or CalibrationConfig()
    base = base or ThresholdSet()
    lines = _read_lines(corpus_path)
    observations = []
    skipped = 0
    for outcome in _map_lines(lines, base, jobs):
        if not outcome.ok or outcome.features is None or outcome.scenario is None:
            skipped += 1
            continue
        observations.append((outcome.scenario, outcome.features))

    # group via real SceneContext objects to reuse the library entry point
    from .models import SceneContext, ScenarioType

    corpus = [
        (SceneContext(scenario=ScenarioType(scenario)), feats)
        for scenario, feats in observations
    ]
    calibrated, report = calibrate(corpus, config, base)

    out_dir.mkdir(parents=True, exist_ok=True)
    thresholds_path = out_dir / "thresholds.json"
    save_thresholds(calibrated, thresholds_path)
    report_doc = {
        "percentiles": {
            "upper": config.upper_percentile,
            "lower": config.lower_percentile,
        },
        "min_clips": config.min_clips,
        "skipped_clips": skipped,
        "scenarios": report,
    }
    _write_json(out_dir / "calibration_report.json", report_doc)
    return calibrated, report_doc


# --- evaluate ----------------------------------------------------------------

def _parse_style_source(spec: str) -> tuple[str, str]:
    kind, _, arg = spec.partition(":")
    if kind == "fixed":
        try:
            StyleLabel.parse(arg)
        except ValueError as exc:
            raise ConfigError(f"bad style source {spec!r}: {exc}") from exc
        return "fixed", arg
    if kind == "from-labels":
        if not arg:
            raise ConfigError("style source 'from-labels:' needs a label log path")
        return "from-labels", arg
    raise ConfigError(
        f"unknown style source {spec!r} (expected fixed:<A|N|C> or from-labels:<path>)"
    )


def _load_corpus_map(path: Path) -> dict[str, Clip]:
    clips: dict[str, Clip] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            clip = clip_from_dict(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            logger.warning("%s line %d skipped: %s", path, lineno, exc)
            continue
        if clip.clip_id not in clips:
            clips[clip.clip_id] = clip
    return clips


def run_evaluate(
    rollouts_path: Path,
    reference_path: Path,
    style_source: str,
    out_dir: Path,
    config: EvalConfig | None = None,
) -> dict:
    """Score agent rollouts against reference clips.

    The scene (agents, corridor) always comes from the reference clip;
    rollouts contribute only the trajectory under test. Missing
    references or style labels produce per-clip error entries.
    """
    config = config or EvalConfig()
    kind, arg = _parse_style_source(style_source)
    rollouts = _load_corpus_map(rollouts_path)
    if not rollouts:
        raise ConfigError(f"no usable rollout clips in {rollouts_path}")
    references = _load_corpus_map(reference_path)

    styles: dict[str, StyleLabel] = {}
    if kind == "from-labels":
        with open(arg, "r", encoding="utf-8") as fh:
            for record in read_records(fh):
                styles[record.clip_id] = record.final_label
    fixed_style = StyleLabel.parse(arg) if kind == "fixed" else None

    rows = []
    reports = []
    for clip_id in sorted(rollouts):
        rollout = rollouts[clip_id]
        reference = references.get(clip_id)
        if reference is None:
            reports.append({"clip_id": clip_id, "error": "missing-reference"})
            continue
        style = fixed_style if fixed_style is not None else styles.get(clip_id)
        if style is None:
            reports.append({"clip_id": clip_id, "error": "missing-style-label"})
            continue
        report = evaluate_clip(
            rollout.trajectory,
            reference.trajectory,
            reference.agents,
            reference.corridor,
            style,
            config,
        )
        reports.append({"clip_id": clip_id, **report.to_dict()})
        rows.append(
            {
                "clip_id": clip_id,
                "style": style.value,
                "nc": report.nc,
                "dac": report.dac,
                "ttc": report.ttc,
                "comfort": report.comfort,
                "ep": report.ep,
                "sm_pdms": report.sm_pdms,
            }
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "reports.ndjson", "w", encoding="utf-8") as fh:
        for doc in reports:
            fh.write(json.dumps(doc, sort_keys=True) + "\n")

    fields = ["clip_id", "style", "nc", "dac", "ttc", "comfort", "ep", "sm_pdms"]
    with open(out_dir / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)

    aggregates: dict[str, dict] = {}
    def _mean(vals: list[float]) -> float:
        return sum(vals) / len(vals)

    by_style: dict[str, list[dict]] = {}
    for row in rows:
        by_style.setdefault(row["style"], []).append(row)
    for style_value in sorted(by_style):
        group = by_style[style_value]
        aggregates[style_value] = {
            "count": len(group),
            **{
                key: _mean([r[key] for r in group])
                for key in ("nc", "dac", "ttc", "comfort", "ep", "sm_pdms")
            },
        }
    summary = {
        "clips_scored": len(rows),
        "clips_errored": len(reports) - len(rows),
        "by_style": aggregates,
    }
    _write_json(out_dir / "aggregates.json", summary)
    return summary


# --- review export -------------------------------------------------------------

def run_review_export(
    labels_path: Path, out_path: Path, policy: ReviewPolicy | None = None
) -> int:
    """Write the ordered review queue derived from a label log."""
    try:
        with open(labels_path, "r", encoding="utf-8") as fh:
            records = list(read_records(fh))
    except OSError as exc:
        raise InputError(f"cannot read {labels_path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    entries = review_queue_entries(records, policy)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_json(out_path, {"items": [e.to_dict() for e in entries]})
    return len(entries)


# --- config bundle --------------------------------------------------------------

@dataclass(frozen=True)
class ConfigBundle:
    """Optional JSON bundle: thresholds, eval config, review policy,
    calibration settings in one file."""

    thresholds: ThresholdSet | None = None
    eval_config: EvalConfig | None = None
    policy: ReviewPolicy | None = None
    calibration: CalibrationConfig | None = None


def load_config_bundle(path: Path) -> ConfigBundle:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    try:
        from .thresholds import thresholds_from_dict

        thresholds = (
            thresholds_from_dict(doc["thresholds"]) if "thresholds" in doc else None
        )
        eval_config = eval_config_from_dict(doc["eval"]) if "eval" in doc else None
        policy = ReviewPolicy(**doc["review_policy"]) if "review_policy" in doc else None
        calibration = (
            CalibrationConfig(**doc["calibration"]) if "calibration" in doc else None
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
    return ConfigBundle(
        thresholds=thresholds,
        eval_config=eval_config,
        policy=policy,
        calibration=calibration,
    )


def resolve_thresholds(
    thresholds_path: Path | None, bundle: ConfigBundle | None
) -> ThresholdSet:
    if thresholds_path is not None:
        try:
            return load_thresholds(thresholds_path)
        except OSError as exc:
            raise InputError(f"cannot read thresholds {thresholds_path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"thresholds {thresholds_path}: {exc}") from exc
    if bundle is not None and bundle.thresholds is not None:
        return bundle.thresholds
    return ThresholdSet()
