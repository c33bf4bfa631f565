"""Style-modulated trajectory scoring.

Scores an agent rollout against a human reference under a target driving
style. Binary gates (collision, drivable-area compliance) multiply a
weighted mean of graded sub-scores (time-to-collision margin, comfort,
ego progress). Style enters through the minimum acceptable TTC, scaled
comfort limits, and the progress target taken from the human reference.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Point, point_in_polygon, rectangle_corners, rectangles_overlap
from .kinematics import _align_states, compute_min_ttc
from .models import AgentTrack, StyleLabel, Trajectory, wrap_angle

logger = logging.getLogger(__name__)

EPS = 1e-9


@dataclass(frozen=True)
class StyleParams:
    """Per-style tolerances: TTC floor, comfort scaling, progress sensitivity."""

    ttc_min: dict[StyleLabel, float] = field(
        default_factory=lambda: {
            StyleLabel.AGGRESSIVE: 0.8,
            StyleLabel.NORMAL: 1.0,
            StyleLabel.CONSERVATIVE: 1.2,
        }
    )
    comfort_scale: dict[StyleLabel, float] = field(
        default_factory=lambda: {
            StyleLabel.AGGRESSIVE: 1.2,
            StyleLabel.NORMAL: 1.0,
            StyleLabel.CONSERVATIVE: 0.8,
        }
    )
    alpha: float = 1.2

    def __post_init__(self) -> None:
        for style in StyleLabel:
            if style not in self.ttc_min or style not in self.comfort_scale:
                raise ValueError(f"missing style params for {style}")
        a, n, c = StyleLabel.AGGRESSIVE, StyleLabel.NORMAL, StyleLabel.CONSERVATIVE
        if not (self.ttc_min[c] > self.ttc_min[n] > self.ttc_min[a] > 0):
            raise ValueError("ttc_min must satisfy C > N > A > 0")
        if not (self.comfort_scale[a] > self.comfort_scale[n] > self.comfort_scale[c] > 0):
            raise ValueError("comfort_scale must satisfy A > N > C > 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class ComfortLimits:
    """Baseline comfort envelope; style scaling widens or tightens it."""

    max_lon_accel: float = 2.40
    max_lon_decel: float = 4.05
    max_lat_accel: float = 4.89
    max_jerk: float = 8.37
    max_yaw_rate: float = 0.95

    def __post_init__(self) -> None:
        for name in (
            "max_lon_accel",
            "max_lon_decel",
            "max_lat_accel",
            "max_jerk",
            "max_yaw_rate",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class Weights:
    ttc: float = 5.0
    comfort: float = 2.0
    ep: float = 5.0

    def __post_init__(self) -> None:
        if min(self.ttc, self.comfort, self.ep) <= 0:
            raise ValueError("weights must be positive")


@dataclass(frozen=True)
class EvalConfig:
    style_params: StyleParams = field(default_factory=StyleParams)
    comfort_limits: ComfortLimits = field(default_factory=ComfortLimits)
    weights: Weights = field(default_factory=Weights)
    horizon_s: float = 4.0
    ego_half_length: float = 2.4
    ego_half_width: float = 0.95
    # "footprint" additionally requires all four ego corners inside the corridor
    dac_mode: str = "center"

    def __post_init__(self) -> None:
        if self.horizon_s <= 0:
            raise ValueError("horizon_s must be positive")
        if self.ego_half_length <= 0 or self.ego_half_width <= 0:
            raise ValueError("ego half-extents must be positive")
        if self.dac_mode not in ("center", "footprint"):
            raise ValueError(f"unknown dac_mode {self.dac_mode!r}")


@dataclass(frozen=True)
class SmPdmsReport:
    """All sub-scores plus the composite for one (clip, style) evaluation."""

    nc: int
    dac: int
    ttc: float
    comfort: float
    ep: float
    sm_pdms: float
    style: StyleLabel
    ep_agent: float
    ep_target: float
    ref_used: float
    ep_raw: float
    min_ttc: float

    def to_dict(self) -> dict:
        return {
            "style": self.style.value,
            "nc": self.nc,
            "dac": self.dac,
            "ttc": self.ttc,
            "comfort": self.comfort,
            "ep": self.ep,
            "sm_pdms": self.sm_pdms,
            "ep_agent": self.ep_agent,
            "ep_target": self.ep_target,
            "ref_used": self.ref_used,
            "ep_raw": self.ep_raw,
            "min_ttc": None if math.isinf(self.min_ttc) else self.min_ttc,
        }


def ref_tolerance(ep_target: float) -> float:
    """Progress tolerance band for a given target progress. Non-decreasing;
    the 24 m boundary goes to the 6 m band and targets at or below 3 m
    keep the smallest band so short clips stay scoreable."""
    if ep_target < 0:
        raise ValueError("ep_target must be non-negative")
    if ep_target < 10:
        return 3.0
    if ep_target < 24:
        return 5.0
    if ep_target < 40:
        return 6.0
    return 7.0


def ep_score(ep_agent: float, ep_target: float, alpha: float) -> float:
    """Quadratic progress-deviation penalty, clamped to [0, 1]."""
    raw = ep_score_raw(ep_agent, ep_target, alpha)
    return max(raw, 0.0)


def ep_score_raw(ep_agent: float, ep_target: float, alpha: float) -> float:
    if ep_agent < 0 or ep_target < 0:
        raise ValueError("progress values must be non-negative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    ref = ref_tolerance(ep_target)
    deviation = ep_agent - ep_target
    return 1.0 - alpha * deviation * deviation / (ref * ref)


def progress_along(traj: Trajectory, horizon: float) -> float:
    """Polyline length of the trajectory over its first `horizon` seconds."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    t0 = traj.samples[0].t
    if traj.duration < horizon - EPS:
        logger.warning(
            "clip %s covers %.2fs < %.2fs horizon; truncating progress window",
            traj.clip_id,
            traj.duration,
            horizon,
        )
    total = 0.0
    prev = traj.samples[0]
    for sample in traj.samples[1:]:
        if sample.t > t0 + horizon + EPS:
            break
        total += math.hypot(sample.x - prev.x, sample.y - prev.y)
        prev = sample
    return total


def ttc_score(min_ttc: float, style: StyleLabel, params: StyleParams) -> float:
    """1 when the clip's minimum TTC clears the style floor, else the
    shortfall ratio."""
    if min_ttc < 0:
        raise ValueError("min_ttc must be non-negative")
    floor = params.ttc_min[style]
    if min_ttc >= floor:
        return 1.0
    return min_ttc / floor


def _comfort_flags(
    traj: Trajectory, style: StyleLabel, limits: ComfortLimits, params: StyleParams
) -> list[bool]:
    """Per-frame comfort verdicts under style-scaled limits.

    Jerk is the backward difference of total acceleration magnitude and
    yaw rate the backward difference of heading, so the first frame
    carries no derivative constraints.
    """
    scale = params.comfort_scale[style]
    lon_hi = limits.max_lon_accel * scale
    lon_lo = limits.max_lon_decel * scale
    lat_hi = limits.max_lat_accel * scale
    jerk_hi = limits.max_jerk * scale
    yaw_hi = limits.max_yaw_rate * scale

    flags = []
    prev = None
    for sample in traj.samples:
        # ax is the longitudinal and ay the lateral body-frame component
        ok = -lon_lo <= sample.ax <= lon_hi and abs(sample.ay) <= lat_hi
        if prev is not None:
            dt = sample.t - prev.t
            jerk = (sample.accel - prev.accel) / dt
            yaw_rate = wrap_angle(sample.yaw - prev.yaw) / dt
            ok = ok and abs(jerk) <= jerk_hi and abs(yaw_rate) <= yaw_hi
        flags.append(ok)
        prev = sample
    return flags


def comfort_score(
    traj: Trajectory, style: StyleLabel, limits: ComfortLimits, params: StyleParams
) -> float:
    """Fraction of frames where every comfort quantity is within the
    style-scaled envelope (all-or-nothing per frame)."""
    flags = _comfort_flags(traj, style, limits, params)
    return sum(flags) / len(flags)


def nc_score(
    ego: Trajectory,
    agents: Sequence[AgentTrack],
    half_length: float,
    half_width: float,
) -> int:
    """1 unless the ego footprint overlaps any agent footprint at any
    aligned frame; touching counts as collision."""
    if half_length <= 0 or half_width <= 0:
        raise ValueError("ego half-extents must be positive")
    for track in agents:
        for idx, state in _align_states(ego, track):
            sample = ego.samples[idx]
            ego_rect = rectangle_corners(
                sample.x, sample.y, sample.yaw, half_length, half_width
            )
            agent_rect = rectangle_corners(
                state.x, state.y, state.yaw, track.half_length, track.half_width
            )
            if rectangles_overlap(ego_rect, agent_rect):
                return 0
    return 1


def dac_score(
    ego: Trajectory,
    corridor: Sequence[Point],
    half_length: float = 0.0,
    half_width: float = 0.0,
    mode: str = "center",
) -> int:
    """1 if every ego sample stays within the corridor polygon (boundary
    counts as inside); footprint mode also checks the four footprint
    corners."""
    polygon = list(corridor)
    if len(polygon) < 3:
        raise ValueError("corridor must have at least 3 vertices")
    for sample in ego.samples:
        if not point_in_polygon(sample.x, sample.y, polygon):
            return 0
        if mode == "footprint":
            corners = rectangle_corners(
                sample.x, sample.y, sample.yaw, half_length, half_width
            )
            for cx, cy in corners:
                if not point_in_polygon(cx, cy, polygon):
                    return 0
    return 1


def aggregate_sm_pdms(
    nc: int, dac: int, ttc: float, comfort: float, ep: float, weights: Weights
) -> float:
    """Binary gates times the weighted mean of the graded sub-scores."""
    total = weights.ttc + weights.comfort + weights.ep
    graded = (weights.ttc * ttc + weights.comfort * comfort + weights.ep * ep) / total
    return nc * dac * graded


def evaluate_clip(
    agent_traj: Trajectory,
    human_traj: Trajectory,
    agents: Sequence[AgentTrack],
    corridor: Sequence[Point] | None,
    style: StyleLabel,
    config: EvalConfig | None = None,
) -> SmPdmsReport:
    """Score an agent rollout against its human reference under a style.

    A missing corridor skips the drivable-area gate (scored 1): the clip
    simply carries no compliance geometry.
    """
    config = config or EvalConfig()
    params = config.style_params

    ep_agent = progress_along(agent_traj, config.horizon_s)
    ep_target = progress_along(human_traj, config.horizon_s)
    ref = ref_tolerance(ep_target)
    raw = ep_score_raw(ep_agent, ep_target, params.alpha)
    ep = max(raw, 0.0)

    min_ttc = compute_min_ttc(agent_traj, agents)
    ttc = ttc_score(min_ttc, style, params)
    comfort = comfort_score(agent_traj, style, config.comfort_limits, params)
    nc = nc_score(agent_traj, agents, config.ego_half_length, config.ego_half_width)
    if corridor is None:
        dac = 1
    else:
        dac = dac_score(
            agent_traj,
            corridor,
            config.ego_half_length,
            config.ego_half_width,
            config.dac_mode,
        )
    score = aggregate_sm_pdms(nc, dac, ttc, comfort, ep, config.weights)
    return SmPdmsReport(
        nc=nc,
        dac=dac,
        ttc=ttc,
        comfort=comfort,
        ep=ep,
        sm_pdms=score,
        style=style,
        ep_agent=ep_agent,
        ep_target=ep_target,
        ref_used=ref,
        ep_raw=raw,
        min_ttc=min_ttc,
    )


# --- config serialization -------------------------------------------------

def eval_config_to_dict(config: EvalConfig) -> dict:
    return {
        "style_params": {
            "ttc_min": {s.value: config.style_params.ttc_min[s] for s in StyleLabel},
            "comfort_scale": {
                s.value: config.style_params.comfort_scale[s] for s in StyleLabel
            },
            "alpha": config.style_params.alpha,
        },
        "comfort_limits": {
            "max_lon_accel": config.comfort_limits.max_lon_accel,
            "max_lon_decel": config.comfort_limits.max_lon_decel,
            "max_lat_accel": config.comfort_limits.max_lat_accel,
            "max_jerk": config.comfort_limits.max_jerk,
            "max_yaw_rate": config.comfort_limits.max_yaw_rate,
        },
        "weights": {
            "ttc": config.weights.ttc,
            "comfort": config.weights.comfort,
            "ep": config.weights.ep,
        },
        "horizon_s": config.horizon_s,
        "ego_half_length": config.ego_half_length,
        "ego_half_width": config.ego_half_width,
        "dac_mode": config.dac_mode,
    }


def eval_config_from_dict(doc: dict) -> EvalConfig:
    try:
        kwargs: dict = {}
        if "style_params" in doc:
            sp = doc["style_params"]
            defaults = StyleParams()
            kwargs["style_params"] = StyleParams(
                ttc_min={
                    s: float(sp.get("ttc_min", {}).get(s.value, defaults.ttc_min[s]))
                    for s in StyleLabel
                },
                comfort_scale={
                    s: float(
                        sp.get("comfort_scale", {}).get(
                            s.value, defaults.comfort_scale[s]
                        )
                    )
                    for s in StyleLabel
                },
                alpha=float(sp.get("alpha", defaults.alpha)),
            )
        if "comfort_limits" in doc:
            kwargs["comfort_limits"] = ComfortLimits(**doc["comfort_limits"])
        if "weights" in doc:
            kwargs["weights"] = Weights(**doc["weights"])
        for key in ("horizon_s", "ego_half_length", "ego_half_width"):
            if key in doc:
                kwargs[key] = float(doc[key])
        if "dac_mode" in doc:
            kwargs["dac_mode"] = doc["dac_mode"]
        return EvalConfig(**kwargs)
    except (TypeError, ValueError, KeyError) as exc:
        raise ValueError(f"malformed evaluation config: {exc}") from exc
