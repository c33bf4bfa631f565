"""Canonical data types for clips, scene semantics, and style labels.

Everything here is an immutable value object: clips can be shared freely
across worker processes without coordination. Construction performs cheap
shape checks only; full invariant checking lives in :func:`validate_clip`,
which returns a report instead of raising so that batch runs can record
rejections and keep going.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)

TAU = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(theta, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


class StyleLabel(str, Enum):
    """Closed three-valued driving style label."""

    AGGRESSIVE = "A"
    NORMAL = "N"
    CONSERVATIVE = "C"

    @classmethod
    def parse(cls, raw: str) -> "StyleLabel":
        try:
            return cls(raw)
        except ValueError:
            raise ValueError(f"unknown style label {raw!r}; expected one of A/N/C") from None


class ScenarioType(str, Enum):
    """Coarse static traffic situation a clip belongs to."""

    LANE_FOLLOWING = "lane_following"
    PROTECTED_INTERSECTION = "protected_intersection"
    UNPROTECTED_INTERSECTION = "unprotected_intersection"
    LANE_CHANGE = "lane_change"
    CROSSWALK = "crosswalk"
    SIDE_TO_MAIN_EGO_MERGING = "side_to_main_ego_merging"
    SIDE_TO_MAIN_EGO_MAIN = "side_to_main_ego_main"
    SPECIAL_INTERIOR_ROAD = "special_interior_road"
    ROUNDABOUT_ENTRANCE = "roundabout_entrance"
    ROUNDABOUT_INTERIOR = "roundabout_interior"
    COUNTRYSIDE_ROAD = "countryside_road"
    CARPARK = "carpark"


class LeadState(str, Enum):
    NONE = "none"
    FAR = "far"
    CLOSE = "close"


class RoadShape(str, Enum):
    STRAIGHT = "straight"
    CURVE = "curve"


class AgentKind(str, Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"


@dataclass(frozen=True)
class TrajectorySample:
    """One timestamped ego state.

    Velocities are body-frame (vx longitudinal, vy lateral); yaw is kept
    in (-pi, pi].
    """

    t: float
    x: float
    y: float
    yaw: float
    vx: float
    vy: float
    ax: float
    ay: float

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    @property
    def accel(self) -> float:
        return math.hypot(self.ax, self.ay)


@dataclass(frozen=True)
class Trajectory:
    """Ordered ego motion record of one clip."""

    clip_id: str
    samples: tuple[TrajectorySample, ...]
    dt_nominal: float

    def __post_init__(self) -> None:
        if len(self.samples) < 2:
            raise ValueError(f"clip {self.clip_id!r}: trajectory needs at least 2 samples")
        if self.dt_nominal <= 0:
            raise ValueError(f"clip {self.clip_id!r}: dt_nominal must be positive")

    @property
    def duration(self) -> float:
        return self.samples[-1].t - self.samples[0].t

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.samples]


@dataclass(frozen=True)
class AgentState:
    """Pose and speed of a surrounding agent at one timestamp."""

    t: float
    x: float
    y: float
    yaw: float
    speed: float


@dataclass(frozen=True)
class AgentTrack:
    """Track of one surrounding agent with a rectangular footprint."""

    agent_id: str
    kind: AgentKind
    half_length: float
    half_width: float
    states: tuple[AgentState, ...]

    def __post_init__(self) -> None:
        if self.half_length <= 0 or self.half_width <= 0:
            raise ValueError(f"agent {self.agent_id!r}: footprint extents must be positive")


@dataclass(frozen=True)
class SceneContext:
    """Scenario type plus the semantic flags the rule engine consults.

    Flags irrelevant to a scenario may be set; each rule documents which
    ones it reads and ignores the rest.
    """

    scenario: ScenarioType
    lead: LeadState = LeadState.NONE
    road_shape: RoadShape = RoadShape.STRAIGHT
    pedestrians: bool = False
    has_merging: bool = False
    merge_risk: bool = False
    main_road_vehicles: bool = False
    has_left_rear: bool = False
    has_right_rear: bool = False
    signal_protected: bool = False


@dataclass(frozen=True)
class Clip:
    """One annotation/scoring unit: ego trajectory, agents, context.

    ``corridor`` is the optional drivable-area polygon consumed by the
    drivable-area-compliance sub-score; clips without one skip that gate.
    """

    trajectory: Trajectory
    agents: tuple[AgentTrack, ...]
    context: SceneContext
    corridor: tuple[tuple[float, float], ...] | None = None

    @property
    def clip_id(self) -> str:
        return self.trajectory.clip_id


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    clip_id: str
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


def validate_clip(
    traj: Trajectory,
    agents: Iterable[AgentTrack] = (),
    ctx: SceneContext | None = None,
) -> ValidationReport:
    """Check clip invariants and report all violations found.

    Pure and idempotent: the same inputs always yield the same report.
    Checks timestamp monotonicity, sample spacing against dt_nominal,
    yaw range, and agent-state alignment with the ego timeline
    (nearest-sample association within dt_nominal / 2).
    """
    violations: list[Violation] = []
    times = traj.times

    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            violations.append(
                Violation(
                    "non-monotone-timestamps",
                    f"non-monotone timestamps at index {i}: {times[i - 1]} -> {times[i]}",
                )
            )
        else:
            dt = times[i] - times[i - 1]
            if not (0.5 * traj.dt_nominal <= dt <= 1.5 * traj.dt_nominal):
                violations.append(
                    Violation(
                        "irregular-spacing",
                        f"sample spacing {dt:.4f}s at index {i} outside +/-50% of "
                        f"dt_nominal={traj.dt_nominal}",
                    )
                )

    if traj.duration <= 0:
        violations.append(Violation("non-positive-duration", "clip duration must be positive"))

    for i, s in enumerate(traj.samples):
        if not (-math.pi < s.yaw <= math.pi):
            violations.append(
                Violation("yaw-out-of-range", f"yaw {s.yaw} at index {i} outside (-pi, pi]")
            )

    half_step = traj.dt_nominal / 2.0
    for track in agents:
        for state in track.states:
            nearest = min(abs(state.t - t) for t in times)
            if nearest > half_step:
                violations.append(
                    Violation(
                        "unaligned-agent-sample",
                        f"unaligned agent sample: agent {track.agent_id!r} at t={state.t} "
                        f"is {nearest:.4f}s from the nearest ego sample (limit {half_step:.4f}s)",
                    )
                )
                break

    return ValidationReport(clip_id=traj.clip_id, violations=tuple(violations))


# --- JSON clip format -------------------------------------------------------
#
# One JSON document per clip:
#   {"clip_id": ..., "dt_nominal": ..., "samples": [...], "agents": [...],
#    "context": {...}, "corridor": [[x, y], ...]?}
# Corpora are newline-delimited streams of such documents.

_SAMPLE_FIELDS = ("t", "x", "y", "yaw", "vx", "vy", "ax", "ay")
_AGENT_STATE_FIELDS = ("t", "x", "y", "yaw", "speed")
_CLIP_FIELDS = ("clip_id", "dt_nominal", "samples", "agents", "context", "corridor")
_CONTEXT_FIELDS = (
    "scenario",
    "lead",
    "road_shape",
    "pedestrians",
    "has_merging",
    "merge_risk",
    "main_road_vehicles",
    "has_left_rear",
    "has_right_rear",
    "signal_protected",
)


class _UnknownFieldWarner:
    """Warn once per unknown field name within one decode session."""

    def __init__(self) -> None:
        self._seen: set[str] = set()

    def check(self, obj: dict[str, Any], known: tuple[str, ...], where: str) -> None:
        for key in obj:
            if key not in known and key not in self._seen:
                self._seen.add(key)
                logger.warning("ignoring unknown field %r in %s", key, where)


def clip_from_dict(doc: dict[str, Any], warner: _UnknownFieldWarner | None = None) -> Clip:
    """Decode one clip document; raises ValueError on malformed input."""
    warner = warner or _UnknownFieldWarner()
    warner.check(doc, _CLIP_FIELDS, "clip")

    try:
        clip_id = str(doc["clip_id"])
        dt_nominal = float(doc["dt_nominal"])
        samples = tuple(
            TrajectorySample(**{k: float(s[k]) for k in _SAMPLE_FIELDS}) for s in doc["samples"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed clip document: {exc}") from exc

    agents = []
    for a in doc.get("agents", []):
        try:
            agents.append(
                AgentTrack(
                    agent_id=str(a["agent_id"]),
                    kind=AgentKind(a["kind"]),
                    half_length=float(a["half_length"]),
                    half_width=float(a["half_width"]),
                    states=tuple(
                        AgentState(**{k: float(s[k]) for k in _AGENT_STATE_FIELDS})
                        for s in a["states"]
                    ),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed agent track in clip {clip_id!r}: {exc}") from exc

    raw_ctx = doc.get("context", {})
    warner.check(raw_ctx, _CONTEXT_FIELDS, "context")
    try:
        context = SceneContext(
            scenario=ScenarioType(raw_ctx["scenario"]),
            lead=LeadState(raw_ctx.get("lead", "none")),
            road_shape=RoadShape(raw_ctx.get("road_shape", "straight")),
            pedestrians=bool(raw_ctx.get("pedestrians", False)),
            has_merging=bool(raw_ctx.get("has_merging", False)),
            merge_risk=bool(raw_ctx.get("merge_risk", False)),
            main_road_vehicles=bool(raw_ctx.get("main_road_vehicles", False)),
            has_left_rear=bool(raw_ctx.get("has_left_rear", False)),
            has_right_rear=bool(raw_ctx.get("has_right_rear", False)),
            signal_protected=bool(raw_ctx.get("signal_protected", False)),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed context in clip {clip_id!r}: {exc}") from exc

    corridor = None
    if doc.get("corridor") is not None:
        corridor = tuple((float(p[0]), float(p[1])) for p in doc["corridor"])

    return Clip(
        trajectory=Trajectory(clip_id=clip_id, samples=samples, dt_nominal=dt_nominal),
        agents=tuple(agents),
        context=context,
        corridor=corridor,
    )


def clip_to_dict(clip: Clip) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "clip_id": clip.clip_id,
        "dt_nominal": clip.trajectory.dt_nominal,
        "samples": [
            {k: getattr(s, k) for k in _SAMPLE_FIELDS} for s in clip.trajectory.samples
        ],
        "agents": [
            {
                "agent_id": a.agent_id,
                "kind": a.kind.value,
                "half_length": a.half_length,
                "half_width": a.half_width,
                "states": [
                    {k: getattr(s, k) for k in _AGENT_STATE_FIELDS} for s in a.states
                ],
            }
            for a in clip.agents
        ],
        "context": {
            "scenario": clip.context.scenario.value,
            "lead": clip.context.lead.value,
            "road_shape": clip.context.road_shape.value,
            "pedestrians": clip.context.pedestrians,
            "has_merging": clip.context.has_merging,
            "merge_risk": clip.context.merge_risk,
            "main_road_vehicles": clip.context.main_road_vehicles,
            "has_left_rear": clip.context.has_left_rear,
            "has_right_rear": clip.context.has_right_rear,
            "signal_protected": clip.context.signal_protected,
        },
    }
    if clip.corridor is not None:
        doc["corridor"] = [[x, y] for x, y in clip.corridor]
    return doc


def dump_clip(clip: Clip) -> str:
    return json.dumps(clip_to_dict(clip), sort_keys=True)


def load_clip(text: str) -> Clip:
    return clip_from_dict(json.loads(text))


def write_corpus(clips: Iterable[Clip], stream: TextIO) -> int:
    """Write clips as newline-delimited JSON; returns the number written."""
    n = 0
    for clip in clips:
        stream.write(dump_clip(clip))
        stream.write("\n")
        n += 1
    return n


def read_corpus(stream: TextIO) -> Iterator[tuple[int, Clip | None, str | None]]:
    """Stream (line_number, clip, error) triples from an NDJSON corpus.

    Malformed lines yield (lineno, None, message) so callers can record
    rejections without aborting the batch.
    """
    warner = _UnknownFieldWarner()
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield lineno, clip_from_dict(json.loads(line), warner), None
        except (ValueError, json.JSONDecodeError) as exc:
            yield lineno, None, str(exc)
