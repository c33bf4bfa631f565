"""Risk-aware label fusion, review queue construction, and the label log.

Fusing an objective rule label with an external subjective label follows
a strict asymmetry: aggressive evidence from either source wins, while a
conservative call needs both sources to agree. Everything else is
normal. Clips where the sources conflict (or that hit an edge-case
policy) go to a human review queue; a human verdict is final and is
never re-fused.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .models import StyleLabel


class Provenance(enum.Enum):
    RULE_ONLY = "RuleOnly"
    FUSED = "Fused"
    HUMAN_VERIFIED = "HumanVerified"


def fuse(rule_label: StyleLabel, external_label: StyleLabel) -> StyleLabel:
    """Combine rule and external labels; aggressive-inclusive, conservative-strict."""
    if StyleLabel.AGGRESSIVE in (rule_label, external_label):
        return StyleLabel.AGGRESSIVE
    if rule_label is StyleLabel.CONSERVATIVE and external_label is StyleLabel.CONSERVATIVE:
        return StyleLabel.CONSERVATIVE
    return StyleLabel.NORMAL


@dataclass(frozen=True)
class ReviewPolicy:
    """Which clips the human queue includes; each component toggles independently."""

    include_disagreements: bool = True
    include_conservative_finals: bool = True
    include_rule_normal_fused_aggressive: bool = True


@dataclass(frozen=True)
class LabelRecord:
    """One clip's labels across the pipeline, plus review bookkeeping.

    final_label is derived: human verdict wins, then the fused label,
    then the raw rule label. reviewer/at/prior_final_label are only
    populated on human-verdict records.
    """

    clip_id: str
    rule_label: StyleLabel
    final_label: StyleLabel
    provenance: Provenance
    external_label: StyleLabel | None = None
    fused_label: StyleLabel | None = None
    human_label: StyleLabel | None = None
    needs_review: bool = False
    reviewer: str | None = None
    at: str | None = None
    prior_final_label: StyleLabel | None = None

    def __post_init__(self) -> None:
        if self.human_label is not None:
            expected = self.human_label
        elif self.fused_label is not None:
            expected = self.fused_label
        else:
            expected = self.rule_label
        if self.final_label is not expected:
            raise ValueError(
                f"final_label {self.final_label} inconsistent with precedence "
                f"(expected {expected})"
            )


def review_reasons(record: LabelRecord, policy: ReviewPolicy) -> tuple[str, ...]:
    """Why a record belongs in the review queue; empty means it does not."""
    reasons = []
    if (
        policy.include_disagreements
        and record.external_label is not None
        and record.external_label is not record.rule_label
    ):
        reasons.append("disagreement")
    if (
        policy.include_conservative_finals
        and record.final_label is StyleLabel.CONSERVATIVE
    ):
        reasons.append("conservative_final")
    if (
        policy.include_rule_normal_fused_aggressive
        and record.rule_label is StyleLabel.NORMAL
        and record.fused_label is StyleLabel.AGGRESSIVE
    ):
        reasons.append("rule_normal_fused_aggressive")
    return tuple(reasons)


def make_record(
    clip_id: str,
    rule_label: StyleLabel,
    external_label: StyleLabel | None = None,
    policy: ReviewPolicy | None = None,
) -> LabelRecord:
    """Build the annotate-time record for a clip, fusing when an external
    label is available and flagging it for review per policy."""
    policy = policy or ReviewPolicy()
    if external_label is None:
        fused = None
        final = rule_label
        provenance = Provenance.RULE_ONLY
    else:
        fused = fuse(rule_label, external_label)
        final = fused
        provenance = Provenance.FUSED
    record = LabelRecord(
        clip_id=clip_id,
        rule_label=rule_label,
        external_label=external_label,
        fused_label=fused,
        final_label=final,
        provenance=provenance,
    )
    reasons = review_reasons(record, policy)
    if reasons:
        record = dataclasses.replace(record, needs_review=True)
    return record


_SEVERITY = {
    frozenset({StyleLabel.AGGRESSIVE, StyleLabel.CONSERVATIVE}): 0,
    frozenset({StyleLabel.AGGRESSIVE, StyleLabel.NORMAL}): 1,
    frozenset({StyleLabel.CONSERVATIVE, StyleLabel.NORMAL}): 2,
}

EDGE_CASE_SEVERITY = 3


def severity_rank(record: LabelRecord) -> int:
    """0 for A-vs-C conflicts down to 3 for agreement-only edge cases."""
    if record.external_label is not None and record.external_label is not record.rule_label:
        return _SEVERITY[frozenset({record.rule_label, record.external_label})]
    return EDGE_CASE_SEVERITY


@dataclass(frozen=True)
class QueueEntry:
    """One review-queue line: the clip, its conflict severity, and why."""

    clip_id: str
    severity: int
    reasons: tuple[str, ...]
    rule_label: StyleLabel
    external_label: StyleLabel | None
    fused_label: StyleLabel | None
    final_label: StyleLabel

    def to_dict(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "severity": self.severity,
            "reasons": list(self.reasons),
            "rule_label": self.rule_label.value,
            "external_label": self.external_label.value if self.external_label else None,
            "fused_label": self.fused_label.value if self.fused_label else None,
            "final_label": self.final_label.value,
        }


def review_queue_entries(
    records: Iterable[LabelRecord], policy: ReviewPolicy | None = None
) -> list[QueueEntry]:
    """Pending review items in severity-then-clip_id order.

    Takes the latest record per clip (the log is append-only) and skips
    clips that already carry a human verdict.
    """
    policy = policy or ReviewPolicy()
    latest = snapshot(records)
    entries = []
    for record in latest.values():
        if record.human_label is not None:
            continue
        reasons = review_reasons(record, policy)
        if not reasons:
            continue
        entries.append(
            QueueEntry(
                clip_id=record.clip_id,
                severity=severity_rank(record),
                reasons=reasons,
                rule_label=record.rule_label,
                external_label=record.external_label,
                fused_label=record.fused_label,
                final_label=record.final_label,
            )
        )
    entries.sort(key=lambda e: (e.severity, e.clip_id))
    return entries


def build_review_queue(
    records: Iterable[LabelRecord], policy: ReviewPolicy | None = None
) -> list[str]:
    return [entry.clip_id for entry in review_queue_entries(records, policy)]


def apply_human_verdict(
    record: LabelRecord, verdict: StyleLabel, reviewer: str, at: str
) -> LabelRecord:
    """Produce the verdict record; the prior final label is kept for audit."""
    if not isinstance(verdict, StyleLabel):
        raise ValueError(f"invalid verdict {verdict!r}")
    return dataclasses.replace(
        record,
        human_label=verdict,
        final_label=verdict,
        provenance=Provenance.HUMAN_VERIFIED,
        needs_review=False,
        reviewer=reviewer,
        at=at,
        prior_final_label=record.final_label,
    )


# ---------------------------------------------------------------------------
# Label log: append-only NDJSON. One record per line; the latest line for
# a clip is its current state. Rewriting history is never allowed.

def _label(value: StyleLabel | None) -> str | None:
    return value.value if value is not None else None


def record_to_dict(record: LabelRecord) -> dict:
    return {
        "clip_id": record.clip_id,
        "rule_label": record.rule_label.value,
        "external_label": _label(record.external_label),
        "fused_label": _label(record.fused_label),
        "human_label": _label(record.human_label),
        "final_label": record.final_label.value,
        "provenance": record.provenance.value,
        "needs_review": record.needs_review,
        "reviewer": record.reviewer,
        "at": record.at,
        "prior_final_label": _label(record.prior_final_label),
    }


def record_from_dict(doc: dict) -> LabelRecord:
    def parse(key: str) -> StyleLabel | None:
        raw = doc.get(key)
        return StyleLabel.parse(raw) if raw is not None else None

    try:
        return LabelRecord(
            clip_id=doc["clip_id"],
            rule_label=StyleLabel.parse(doc["rule_label"]),
            final_label=StyleLabel.parse(doc["final_label"]),
            provenance=Provenance(doc["provenance"]),
            external_label=parse("external_label"),
            fused_label=parse("fused_label"),
            human_label=parse("human_label"),
            needs_review=bool(doc.get("needs_review", False)),
            reviewer=doc.get("reviewer"),
            at=doc.get("at"),
            prior_final_label=parse("prior_final_label"),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed label record: {exc}") from exc


def dump_record(record: LabelRecord) -> str:
    return json.dumps(record_to_dict(record), sort_keys=True)


def write_records(records: Iterable[LabelRecord], stream: IO[str]) -> int:
    count = 0
    for record in records:
        stream.write(dump_record(record) + "\n")
        count += 1
    return count


def read_records(stream: IO[str]) -> Iterator[LabelRecord]:
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield record_from_dict(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            raise ValueError(f"label log line {lineno}: {exc}") from exc


def snapshot(records: Iterable[LabelRecord]) -> dict[str, LabelRecord]:
    """Latest record per clip, in first-seen clip order."""
    latest: dict[str, LabelRecord] = {}
    for record in records:
        latest[record.clip_id] = record
    return latest


class LabelLog:
    """File-backed append-only label log."""

    def __init__(self, path) -> None:
        self.path = path

    def append(self, record: LabelRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(dump_record(record) + "\n")

    def read_all(self) -> list[LabelRecord]:
        try:
            with open(self.path, "r", encoding="utf-8") as fh:
                return list(read_records(fh))
        except FileNotFoundError:
            return []

    def load_snapshot(self) -> dict[str, LabelRecord]:
        return snapshot(self.read_all())
