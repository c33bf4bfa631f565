"""Motion statistics and semantic-motion features derived from clips.

All operations are pure functions over immutable inputs, so corpora can
be processed embarrassingly parallel. Velocity trend classification uses
least-squares linear and quadratic fits over the speed sequence; headway
and time-to-collision quantities are computed framewise against agent
tracks aligned to the ego timeline by nearest timestamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .models import AgentKind, AgentState, AgentTrack, Trajectory, wrap_angle
from .thresholds import ThresholdSet

# Forward cone half-width for TTC qualification, roughly half a lane.
TTC_CONE_HALF_WIDTH = 2.0
# Ego speed floor below which headway is undefined (avoids gap/0 blow-ups).
HEADWAY_SPEED_FLOOR = 0.5
# Interior-vertex margin and minimum RSS improvement for quadratic trends.
QUAD_VERTEX_MARGIN = 0.10
QUAD_RSS_IMPROVEMENT = 0.20


class TrendClass(str, Enum):
    """Longitudinal speed trend of a clip."""

    ACCELERATING = "accelerating"
    DECELERATING = "decelerating"
    ACCEL_THEN_DECEL = "accel_then_decel"
    DECEL_THEN_ACCEL = "decel_then_accel"
    QUASI_CONSTANT = "quasi_constant"


class Maneuver(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    STRAIGHT = "straight"


@dataclass(frozen=True)
class KinematicFeatures:
    """Derived per-clip motion statistics consumed by rules and metrics.

    min_ttc is +inf when no agent ever qualifies as a closing hazard.
    """

    v_avg: float
    v_std: float
    a_max: float
    sigma_a: float
    ay_max: float
    vy_max: float
    delta_psi: float
    trend: TrendClass
    unsafe_ratio: float
    safe_ratio: float
    min_ttc: float

    def __post_init__(self) -> None:
        if self.v_avg < 0 or self.sigma_a < 0:
            raise ValueError("v_avg and sigma_a must be non-negative")
        if self.unsafe_ratio + self.safe_ratio > 1.0 + 1e-12:
            raise ValueError("unsafe_ratio + safe_ratio must not exceed 1")

    def to_dict(self) -> dict:
        return {
            "v_avg": self.v_avg,
            "v_std": self.v_std,
            "a_max": self.a_max,
            "sigma_a": self.sigma_a,
            "ay_max": self.ay_max,
            "vy_max": self.vy_max,
            "delta_psi": self.delta_psi,
            "trend": self.trend.value,
            "unsafe_ratio": self.unsafe_ratio,
            "safe_ratio": self.safe_ratio,
            "min_ttc": None if math.isinf(self.min_ttc) else self.min_ttc,
        }


def fit_velocity_trend(
    speeds: Sequence[tuple[float, float]], thresholds: ThresholdSet
) -> TrendClass:
    """Classify the speed profile into one of the five trend classes.

    Precedence: the quasi-constant check runs first so noise-dominated
    clips never classify as non-monotonic; then the quadratic
    non-monotonic test (interior vertex with a 10% edge margin plus at
    least 20% residual improvement over the linear fit); then the linear
    slope test.
    """
    if len(speeds) < 2:
        raise ValueError("trend fit needs at least 2 samples")
    t = np.asarray([p[0] for p in speeds], dtype=float)
    v = np.asarray([p[1] for p in speeds], dtype=float)

    slope, intercept = np.polyfit(t, v, 1)
    if float(np.std(v)) < thresholds.v_std_max and abs(slope) < thresholds.slope_min:
        return TrendClass.QUASI_CONSTANT

    if len(speeds) >= 3:
        rss_lin = float(np.sum((v - (slope * t + intercept)) ** 2))
        c2, c1, c0 = np.polyfit(t, v, 2)
        rss_quad = float(np.sum((v - (c2 * t * t + c1 * t + c0)) ** 2))
        if abs(c2) > 1e-12 and rss_lin > 0:
            vertex = -c1 / (2.0 * c2)
            span = t[-1] - t[0]
            lo = t[0] + QUAD_VERTEX_MARGIN * span
            hi = t[-1] - QUAD_VERTEX_MARGIN * span
            improved = (rss_lin - rss_quad) / rss_lin >= QUAD_RSS_IMPROVEMENT
            if lo < vertex < hi and improved:
                return TrendClass.ACCEL_THEN_DECEL if c2 < 0 else TrendClass.DECEL_THEN_ACCEL

    if slope >= thresholds.slope_min:
        return TrendClass.ACCELERATING
    if slope <= -thresholds.slope_min:
        return TrendClass.DECELERATING
    return TrendClass.QUASI_CONSTANT


def compute_motion_stats(traj: Trajectory) -> dict:
    """Scalar motion statistics of one trajectory.

    Speed is sqrt(vx^2 + vy^2) per sample, acceleration sqrt(ax^2 + ay^2);
    delta_psi is the wrapped end-minus-start yaw.
    """
    vx = np.asarray([s.vx for s in traj.samples])
    vy = np.asarray([s.vy for s in traj.samples])
    ax = np.asarray([s.ax for s in traj.samples])
    ay = np.asarray([s.ay for s in traj.samples])
    speed = np.hypot(vx, vy)
    accel = np.hypot(ax, ay)
    return {
        "v_avg": float(np.mean(speed)),
        "v_std": float(np.std(speed)),
        "a_max": float(np.max(accel)),
        "sigma_a": float(np.std(accel)),
        "ay_max": float(np.max(np.abs(ay))),
        "vy_max": float(np.max(np.abs(vy))),
        "delta_psi": wrap_angle(traj.samples[-1].yaw - traj.samples[0].yaw),
    }


def _align_states(traj: Trajectory, track: AgentTrack) -> list[tuple[int, AgentState]]:
    """Associate agent states to ego sample indices by nearest timestamp.

    States farther than dt_nominal / 2 from every ego sample are dropped;
    at most one state is kept per ego frame (the closest in time).
    """
    times = np.asarray(traj.times)
    half_step = traj.dt_nominal / 2.0
    chosen: dict[int, tuple[float, AgentState]] = {}
    for state in track.states:
        idx = int(np.argmin(np.abs(times - state.t)))
        gap = abs(times[idx] - state.t)
        if gap > half_step:
            continue
        if idx not in chosen or gap < chosen[idx][0]:
            chosen[idx] = (gap, state)
    return [(idx, chosen[idx][1]) for idx in sorted(chosen)]


def headway_ratios(
    traj: Trajectory, lead: AgentTrack | None, thresholds: ThresholdSet
) -> tuple[float, float]:
    """Unsafe- and safe-following frame fractions against a lead track.

    A frame qualifies when the lead is ahead (positive gap projected on
    the ego heading) and the ego moves faster than the speed floor. Time
    headway is gap / ego speed. With no qualifying frame both ratios are 0.
    """
    if lead is None:
        return 0.0, 0.0
    qualifying = 0
    unsafe = 0
    safe = 0
    for idx, state in _align_states(traj, lead):
        ego = traj.samples[idx]
        heading = (math.cos(ego.yaw), math.sin(ego.yaw))
        gap = (state.x - ego.x) * heading[0] + (state.y - ego.y) * heading[1]
        v_ego = ego.speed
        if gap <= 0 or v_ego <= HEADWAY_SPEED_FLOOR:
            continue
        qualifying += 1
        h = gap / v_ego
        if h < thresholds.unsafe_headway_s:
            unsafe += 1
        elif h > thresholds.safe_headway_s:
            safe += 1
    if qualifying == 0:
        return 0.0, 0.0
    return unsafe / qualifying, safe / qualifying


def compute_min_ttc(traj: Trajectory, agents: Sequence[AgentTrack]) -> float:
    """Minimum time-to-collision over all frames and forward-cone agents.

    Agents qualify in a frame when ahead of the ego with lateral offset
    under TTC_CONE_HALF_WIDTH in the ego frame. Closing speed is the
    relative speed projected on the ego-to-agent direction; only positive
    closing yields a TTC. Returns +inf when never defined.
    """
    best = math.inf
    for track in agents:
        for idx, state in _align_states(traj, track):
            ego = traj.samples[idx]
            dx = state.x - ego.x
            dy = state.y - ego.y
            cos_y = math.cos(ego.yaw)
            sin_y = math.sin(ego.yaw)
            longitudinal = dx * cos_y + dy * sin_y
            lateral = -dx * sin_y + dy * cos_y
            if longitudinal <= 0 or abs(lateral) >= TTC_CONE_HALF_WIDTH:
                continue
            gap = math.hypot(dx, dy)
            if gap <= 0:
                return 0.0
            ux, uy = dx / gap, dy / gap
            ego_vx = ego.vx * cos_y - ego.vy * sin_y
            ego_vy = ego.vx * sin_y + ego.vy * cos_y
            agent_vx = state.speed * math.cos(state.yaw)
            agent_vy = state.speed * math.sin(state.yaw)
            closing = (ego_vx - agent_vx) * ux + (ego_vy - agent_vy) * uy
            if closing > 0:
                best = min(best, gap / closing)
    return best


def detect_maneuver(delta_psi: float, thresholds: ThresholdSet, intersection: bool = False) -> Maneuver:
    """Classify the yaw change as a left/right maneuver or straight.

    Intersections use the turn-detection threshold; lane changes use the
    fixed 0.25 rad convention.
    """
    trigger = thresholds.yaw_turn_min if intersection else thresholds.yaw_lane_change
    if delta_psi > trigger:
        return Maneuver.LEFT
    if delta_psi < -trigger:
        return Maneuver.RIGHT
    return Maneuver.STRAIGHT


def lead_track(traj: Trajectory, agents: Sequence[AgentTrack]) -> AgentTrack | None:
    """Pick the vehicle track that spends the most frames directly ahead.

    Used when the scene context says a lead is present but does not name
    the track: candidate frames require positive longitudinal gap and
    lateral offset inside the TTC cone.
    """
    best_track = None
    best_frames = 0
    for track in agents:
        if track.kind is not AgentKind.VEHICLE:
            continue
        frames = 0
        for idx, state in _align_states(traj, track):
            ego = traj.samples[idx]
            dx = state.x - ego.x
            dy = state.y - ego.y
            cos_y = math.cos(ego.yaw)
            sin_y = math.sin(ego.yaw)
            longitudinal = dx * cos_y + dy * sin_y
            lateral = -dx * sin_y + dy * cos_y
            if longitudinal > 0 and abs(lateral) < TTC_CONE_HALF_WIDTH:
                frames += 1
        if frames > best_frames:
            best_frames = frames
            best_track = track
    return best_track


def extract_features(
    traj: Trajectory, agents: Sequence[AgentTrack], thresholds: ThresholdSet
) -> KinematicFeatures:
    """Full feature vector for one clip: motion stats, trend, ratios, TTC."""
    stats = compute_motion_stats(traj)
    speeds = [(s.t, s.speed) for s in traj.samples]
    trend = fit_velocity_trend(speeds, thresholds)
    unsafe, safe = headway_ratios(traj, lead_track(traj, agents), thresholds)
    min_ttc = compute_min_ttc(traj, agents)
    return KinematicFeatures(
        trend=trend,
        unsafe_ratio=unsafe,
        safe_ratio=safe,
        min_ttc=min_ttc,
        **stats,
    )
