"""HTTP review service.

Serves the pending-review queue, per-clip display data, and verdict
submission over a small JSON API, plus the bundled single-page UI when
its static assets are present. All verdict state lives in the
append-only label log, so restarts lose nothing.
"""

from __future__ import annotations

import dataclasses
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .fusion import (
    LabelLog,
    LabelRecord,
    ReviewPolicy,
    apply_human_verdict,
    record_to_dict,
    review_queue_entries,
)
from .kinematics import extract_features
from .models import Clip, StyleLabel, read_corpus
from .thresholds import ThresholdSet

logger = logging.getLogger(__name__)

MAX_DISPLAY_POINTS = 100


class VerdictBody(BaseModel):
    label: str
    reviewer: str


def _downsample(values: list, limit: int = MAX_DISPLAY_POINTS) -> list:
    """Thin a sequence to at most `limit` entries, keeping both endpoints."""
    if len(values) <= limit:
        return values
    idx = np.unique(np.linspace(0, len(values) - 1, limit).round().astype(int))
    return [values[i] for i in idx]


def _clip_display(clip: Clip, thresholds: ThresholdSet) -> dict:
    traj = clip.trajectory
    path = _downsample([[round(s.x, 3), round(s.y, 3)] for s in traj.samples])
    speeds = _downsample([round(s.speed, 3) for s in traj.samples])
    agents = []
    for track in clip.agents:
        agents.append(
            {
                "agent_id": track.agent_id,
                "kind": track.kind.value,
                "half_length": track.half_length,
                "half_width": track.half_width,
                "path": _downsample(
                    [[round(st.x, 3), round(st.y, 3)] for st in track.states]
                ),
            }
        )
    features = None
    try:
        feats = extract_features(traj, clip.agents, thresholds)
        features = {
            "v_avg": feats.v_avg,
            "v_std": feats.v_std,
            "a_max": feats.a_max,
            "sigma_a": feats.sigma_a,
            "ay_max": feats.ay_max,
            "delta_psi": feats.delta_psi,
            "trend": feats.trend.value,
            "unsafe_ratio": feats.unsafe_ratio,
            "safe_ratio": feats.safe_ratio,
            "min_ttc": None if feats.min_ttc == float("inf") else feats.min_ttc,
        }
    except ValueError:
        logger.warning("feature extraction failed for clip %s", clip.clip_id)
    context = dataclasses.asdict(clip.context)
    context = {k: (v.value if hasattr(v, "value") else v) for k, v in context.items()}
    return {
        "scenario": clip.context.scenario.value,
        "duration_s": round(traj.duration, 3),
        "n_samples": len(traj.samples),
        "path": path,
        "speeds": speeds,
        "agents": agents,
        "corridor": [list(p) for p in clip.corridor] if clip.corridor else None,
        "features": features,
        "context": context,
    }


class ReviewState:
    """Label-log snapshot plus clip display docs, guarded by one lock."""

    def __init__(
        self,
        labels_path: Path,
        corpus_path: Path | None,
        thresholds: ThresholdSet | None,
        policy: ReviewPolicy | None,
    ) -> None:
        self._lock = threading.Lock()
        self._log = LabelLog(labels_path)
        self._policy = policy or ReviewPolicy()
        self._records: dict[str, LabelRecord] = self._log.load_snapshot()
        self._displays: dict[str, dict] = {}
        if corpus_path is not None:
            thresholds = thresholds or ThresholdSet()
            with open(corpus_path, "r", encoding="utf-8") as fh:
                for lineno, clip, error in read_corpus(fh):
                    if clip is None:
                        logger.warning("skipping corpus line %d: %s", lineno, error)
                        continue
                    self._displays[clip.clip_id] = _clip_display(clip, thresholds)

    def queue(self, offset: int, limit: int) -> dict:
        with self._lock:
            entries = review_queue_entries(self._records.values(), self._policy)
        page = entries[offset : offset + limit]
        return {
            "total": len(entries),
            "offset": offset,
            "limit": limit,
            "items": [e.to_dict() for e in page],
        }

    def clip(self, clip_id: str) -> dict:
        with self._lock:
            record = self._records.get(clip_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown clip {clip_id!r}")
        return {
            "clip_id": clip_id,
            "record": record_to_dict(record),
            "display": self._displays.get(clip_id),
        }

    def submit_verdict(self, clip_id: str, body: VerdictBody) -> dict:
        try:
            verdict = StyleLabel.parse(body.label)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if not body.reviewer.strip():
            raise HTTPException(status_code=422, detail="reviewer must be non-empty")
        with self._lock:
            record = self._records.get(clip_id)
            if record is None:
                raise HTTPException(status_code=404, detail=f"unknown clip {clip_id!r}")
            if record.human_label is not None:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "message": f"clip {clip_id!r} already verdicted",
                        "record": record_to_dict(record),
                    },
                )
            updated = apply_human_verdict(
                record,
                verdict,
                reviewer=body.reviewer.strip(),
                at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            )
            self._log.append(updated)
            self._records[clip_id] = updated
        return {"clip_id": clip_id, "record": record_to_dict(updated)}

    def stats(self) -> dict:
        with self._lock:
            records = list(self._records.values())
            pending = len(review_queue_entries(records, self._policy))
        verdicted = [r for r in records if r.human_label is not None]
        histogram = {label.value: 0 for label in StyleLabel}
        for record in records:
            histogram[record.final_label.value] += 1
        matches = sum(1 for r in verdicted if r.human_label == r.rule_label)
        return {
            "total": len(records),
            "pending": pending,
            "verdicted": len(verdicted),
            "final_labels": histogram,
            "agreement": {
                "count": len(verdicted),
                "matches": matches,
                "rate": matches / len(verdicted) if verdicted else None,
            },
        }


def create_app(
    labels_path: Path,
    corpus_path: Path | None = None,
    thresholds: ThresholdSet | None = None,
    policy: ReviewPolicy | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    state = ReviewState(labels_path, corpus_path, thresholds, policy)
    app = FastAPI(title="stylebench review", docs_url=None, redoc_url=None)

    @app.get("/api/queue")
    def get_queue(
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
    ) -> dict:
        return state.queue(offset, limit)

    @app.get("/api/clips/{clip_id}")
    def get_clip(clip_id: str) -> dict:
        return state.clip(clip_id)

    @app.post("/api/clips/{clip_id}/verdict")
    def post_verdict(clip_id: str, body: VerdictBody) -> dict:
        return state.submit_verdict(clip_id, body)

    @app.get("/api/stats")
    def get_stats() -> dict:
        return state.stats()

    static_dir = ui_dir if ui_dir is not None else Path(__file__).parent / "static"
    if static_dir.is_dir() and (static_dir / "index.html").is_file():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
