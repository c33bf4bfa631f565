"""Synthetic clip generator with style-by-construction labels.

Builds per-scenario clips whose kinematics land decisively in one
style's rule region under the default thresholds: aggressive clips get
sub-second headways, top-band speeds, hard acceleration bursts, or
erratic acceleration; conservative clips get bottom-band speeds with
smooth, steady profiles; normal clips sit in the middle with margins on
both sides. Bands are placed against the *effective* thresholds implied
by the sampled scene context (curve, close lead, unprotected, turn,
pedestrians), so context tightening never flips a constructed label.

Carpark clips are always constructed Normal; roundabout interiors never
Conservative (neither has such behavior in the reference statistics).
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .models import (
    AgentKind,
    AgentState,
    AgentTrack,
    Clip,
    LeadState,
    RoadShape,
    SceneContext,
    ScenarioType,
    StyleLabel,
    Trajectory,
    TrajectorySample,
    wrap_angle,
)
from .thresholds import ThresholdSet

DT = 0.1
N_SAMPLES = 41
HORIZON = DT * (N_SAMPLES - 1)

# Construction share of a "natural" mixed corpus.
NATURAL_STYLE_WEIGHTS: dict[StyleLabel, float] = {
    StyleLabel.AGGRESSIVE: 0.10,
    StyleLabel.NORMAL: 0.85,
    StyleLabel.CONSERVATIVE: 0.05,
}

# std(|amp * sin|) / amp for a dense sinusoid; used to size erratic
# acceleration amplitudes from a sigma_a target.
_SIN_STD = 0.308


def _times() -> np.ndarray:
    return np.arange(N_SAMPLES) * DT


def _pick(rng: np.random.Generator, options: list, p: list | None = None):
    """Choose one option without numpy coercing it to an array scalar."""
    return options[int(rng.choice(len(options), p=p))]


def _quasi(rng: np.random.Generator, v0: float) -> np.ndarray:
    return np.maximum(v0 + rng.normal(0.0, 0.03, N_SAMPLES), 0.05)


def _linear(rng: np.random.Generator, v0: float, slope: float) -> np.ndarray:
    v = v0 + slope * _times() + rng.normal(0.0, 0.03, N_SAMPLES)
    return np.maximum(v, 0.05)


def _valley(rng: np.random.Generator, v_vertex: float, k: float) -> np.ndarray:
    t = _times()
    v = v_vertex + k * (t - HORIZON / 2.0) ** 2 + rng.normal(0.0, 0.03, N_SAMPLES)
    return np.maximum(v, 0.05)


def _burst(rng: np.random.Generator, amplitude: float) -> np.ndarray:
    """Gaussian acceleration bump peaking at `amplitude` mid-clip."""
    t = _times()
    center = rng.uniform(HORIZON * 0.35, HORIZON * 0.65)
    width = rng.uniform(0.25, 0.4)
    return amplitude * np.exp(-0.5 * ((t - center) / width) ** 2)


def _erratic(rng: np.random.Generator, sigma_target: float) -> np.ndarray:
    """Sinusoidal longitudinal acceleration sized to hit a sigma_a target."""
    t = _times()
    amp = sigma_target / _SIN_STD
    freq = rng.uniform(0.8, 1.4)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return amp * np.sin(2.0 * math.pi * freq * t + phase)


class _ClipBuilder:
    """Assembles samples, agents, and context for one synthetic clip."""

    def __init__(self, rng: np.random.Generator) -> None:
        self.rng = rng
        self.speeds = _quasi(rng, 5.0)
        self.a_lon = np.zeros(N_SAMPLES)
        self.yaw0 = rng.uniform(-math.pi, math.pi)
        self.delta_psi = 0.0
        self.yaw_rate = 0.0
        self.lead_headway: float | None = None
        self.pedestrian = False

    def yaws(self) -> np.ndarray:
        t = _times()
        if self.yaw_rate:
            raw = self.yaw0 + self.yaw_rate * t
        else:
            raw = self.yaw0 + self.delta_psi * (t / HORIZON)
        return np.asarray([wrap_angle(y) for y in raw])

    def build(self, clip_id: str, ctx: SceneContext) -> Clip:
        rng = self.rng
        t = _times()
        yaws = self.yaws()
        if self.yaw_rate:
            a_lat = self.speeds * self.yaw_rate
        elif self.delta_psi:
            a_lat = self.speeds * (self.delta_psi / HORIZON)
        else:
            a_lat = np.zeros(N_SAMPLES)

        xs = np.empty(N_SAMPLES)
        ys = np.empty(N_SAMPLES)
        xs[0] = rng.uniform(-50.0, 50.0)
        ys[0] = rng.uniform(-50.0, 50.0)
        for i in range(1, N_SAMPLES):
            xs[i] = xs[i - 1] + self.speeds[i - 1] * math.cos(yaws[i - 1]) * DT
            ys[i] = ys[i - 1] + self.speeds[i - 1] * math.sin(yaws[i - 1]) * DT

        samples = tuple(
            TrajectorySample(
                t=float(t[i]),
                x=float(xs[i]),
                y=float(ys[i]),
                yaw=float(yaws[i]),
                vx=float(self.speeds[i]),
                vy=0.0,
                ax=float(self.a_lon[i]),
                ay=float(a_lat[i]),
            )
            for i in range(N_SAMPLES)
        )
        traj = Trajectory(clip_id=clip_id, samples=samples, dt_nominal=DT)

        agents = []
        if self.lead_headway is not None:
            states = tuple(
                AgentState(
                    t=float(t[i]),
                    x=float(xs[i] + self._gap(i) * math.cos(yaws[i])),
                    y=float(ys[i] + self._gap(i) * math.sin(yaws[i])),
                    yaw=float(yaws[i]),
                    speed=float(self.speeds[i]),
                )
                for i in range(N_SAMPLES)
            )
            agents.append(
                AgentTrack(
                    agent_id="lead-0",
                    kind=AgentKind.VEHICLE,
                    half_length=2.3,
                    half_width=1.0,
                    states=states,
                )
            )
        if self.pedestrian:
            side = rng.choice([-1.0, 1.0]) * rng.uniform(3.0, 6.0)
            px = xs[0] + side * -math.sin(yaws[0])
            py = ys[0] + side * math.cos(yaws[0])
            states = tuple(
                AgentState(t=float(t[i]), x=float(px), y=float(py), yaw=0.0, speed=0.0)
                for i in range(N_SAMPLES)
            )
            agents.append(
                AgentTrack(
                    agent_id="ped-0",
                    kind=AgentKind.PEDESTRIAN,
                    half_length=0.3,
                    half_width=0.3,
                    states=states,
                )
            )

        margin = rng.uniform(3.0, 6.0)
        lo_x, hi_x = float(np.min(xs)) - margin, float(np.max(xs)) + margin
        lo_y, hi_y = float(np.min(ys)) - margin, float(np.max(ys)) + margin
        corridor = ((lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y))

        return Clip(trajectory=traj, agents=tuple(agents), context=ctx, corridor=corridor)

    def _gap(self, i: int) -> float:
        assert self.lead_headway is not None
        return self.lead_headway * max(float(self.speeds[i]), 0.6)


def _normal_band(rng: np.random.Generator, low: float, high: float) -> float:
    """Sample between the conservative and aggressive triggers with margin."""
    lo = low * 1.15
    hi = high * 0.92
    if lo >= hi:
        return (low + high) / 2.0
    return rng.uniform(lo, hi)


def _above(rng: np.random.Generator, threshold: float) -> float:
    return threshold * rng.uniform(1.15, 1.4)


def _below(rng: np.random.Generator, threshold: float) -> float:
    return threshold * rng.uniform(0.35, 0.88)


# --- per-scenario constructors ---------------------------------------------
# Each returns (builder, ctx, actual_style). Bands reference the default
# thresholds through `th` so recalibrated sets still shape sane corpora.


def _gen_lane_following(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.LANE_FOLLOWING)
    b = _ClipBuilder(rng)
    shape = RoadShape.CURVE if rng.random() < 0.3 else RoadShape.STRAIGHT
    lead = _pick(rng, [LeadState.NONE, LeadState.FAR, LeadState.CLOSE], p=[0.4, 0.35, 0.25])
    factor = (th.curve_factor if shape is RoadShape.CURVE else 1.0) * (
        th.close_lead_factor if lead is LeadState.CLOSE else 1.0
    )
    eff = st.scaled(factor)
    if shape is RoadShape.CURVE:
        b.yaw_rate = rng.uniform(0.04, 0.08) * rng.choice([-1.0, 1.0])

    if style is StyleLabel.AGGRESSIVE:
        mech = rng.choice(["headway", "speed", "accel", "erratic"])
        if mech == "headway" and lead is LeadState.NONE:
            mech = "speed"
        if mech == "headway":
            b.speeds = _quasi(rng, rng.uniform(6.0, 11.0))
            b.lead_headway = rng.uniform(0.4, 0.7)
        elif mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        elif mech == "accel":
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
            b.a_lon = _erratic(rng, _above(rng, st.sigma_a_aggressive))
        if lead is not LeadState.NONE and b.lead_headway is None:
            b.lead_headway = rng.uniform(1.4, 2.2)
    elif style is StyleLabel.CONSERVATIVE:
        b.speeds = _quasi(rng, rng.uniform(2.5, st.v_avg_low * 0.87))
        b.a_lon = _burst(rng, rng.uniform(0.1, 0.5))
        if lead is not LeadState.NONE:
            b.lead_headway = rng.uniform(3.2, 5.0)
    else:
        b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
        b.a_lon = _burst(rng, rng.uniform(0.3, eff.a_max_aggressive * 0.7))
        if lead is not LeadState.NONE:
            b.lead_headway = rng.uniform(1.4, 2.2)

    ctx = SceneContext(scenario=ScenarioType.LANE_FOLLOWING, lead=lead, road_shape=shape)
    return b, ctx, style


def _gen_intersection(
    scenario: ScenarioType,
    style: StyleLabel,
    rng: np.random.Generator,
    th: ThresholdSet,
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(scenario)
    b = _ClipBuilder(rng)
    turning = bool(rng.random() < 0.5)
    pedestrians = bool(rng.random() < 0.25)
    lead = _pick(rng, [LeadState.NONE, LeadState.FAR, LeadState.CLOSE], p=[0.5, 0.25, 0.25])
    if turning:
        b.delta_psi = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 0.9)

    factor = 1.0
    if scenario is ScenarioType.UNPROTECTED_INTERSECTION:
        factor *= th.unprotected_factor
    if turning:
        factor *= th.turn_factor
    v_eff = st.v_avg_aggressive * factor
    if pedestrians:
        v_eff *= th.pedestrian_speed_factor
    a_eff = st.a_max_aggressive * factor

    if style is StyleLabel.AGGRESSIVE:
        mech = rng.choice(["headway", "speed", "accel"])
        if mech == "headway" and lead is LeadState.NONE:
            mech = "speed"
        if mech == "headway":
            b.speeds = _quasi(rng, rng.uniform(4.0, 8.0))
            b.lead_headway = rng.uniform(0.4, 0.7)
        elif mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, v_eff))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        if lead is not LeadState.NONE and b.lead_headway is None:
            b.lead_headway = rng.uniform(1.4, 2.2)
    elif style is StyleLabel.CONSERVATIVE:
        if lead is not LeadState.NONE and rng.random() < 0.5:
            # safe headway wins, but stay under the tightest speed trigger
            b.speeds = _quasi(rng, rng.uniform(2.0, min(6.0, v_eff * 0.88)))
            b.lead_headway = rng.uniform(3.2, 5.0)
        else:
            b.speeds = _quasi(rng, rng.uniform(1.2, st.v_avg_low * 0.88))
            if lead is not LeadState.NONE:
                b.lead_headway = rng.uniform(1.4, 2.2)
    else:
        v0 = _normal_band(rng, st.v_avg_low, v_eff)
        b.speeds = _quasi(rng, v0)
        # leave room for the steady lateral accel of the turn in |a|
        a_lat_est = abs(b.delta_psi) / HORIZON * v0 * 1.05
        amp_cap = math.sqrt(max((a_eff * 0.88) ** 2 - a_lat_est**2, 0.01))
        b.a_lon = _burst(rng, rng.uniform(0.1, max(amp_cap * 0.9, 0.15)))
        if lead is not LeadState.NONE:
            b.lead_headway = rng.uniform(1.4, 2.2)

    ctx = SceneContext(
        scenario=scenario,
        lead=lead,
        pedestrians=pedestrians,
        signal_protected=scenario is ScenarioType.PROTECTED_INTERSECTION,
    )
    return b, ctx, style


def _gen_lane_change(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.LANE_CHANGE)
    b = _ClipBuilder(rng)
    direction = float(rng.choice([-1.0, 1.0]))
    left = direction > 0
    rear = bool(rng.random() < 0.5)

    if style is StyleLabel.AGGRESSIVE:
        b.delta_psi = direction * rng.uniform(0.34, 0.5)
        mech = rng.choice(["accel", "erratic", "yank"])
        b.speeds = _quasi(rng, rng.uniform(7.0, 10.5))
        if mech == "accel":
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        elif mech == "erratic":
            b.a_lon = _erratic(rng, _above(rng, st.sigma_a_aggressive))
        else:
            b.delta_psi = direction * rng.uniform(0.7, 0.9)
        if not rear:
            # without a rear vehicle, abruptness alone is not enough
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        ctx = SceneContext(
            scenario=ScenarioType.LANE_CHANGE,
            has_left_rear=left and rear,
            has_right_rear=(not left) and rear,
        )
        return b, ctx, style

    if style is StyleLabel.CONSERVATIVE:
        b.delta_psi = direction * rng.uniform(0.265, st.delta_psi_low * 0.95)
        if left:
            b.speeds = _quasi(rng, rng.uniform(6.5, 9.0))
            b.a_lon = _burst(rng, rng.uniform(0.1, 0.4))
        else:
            b.speeds = _quasi(rng, rng.uniform(2.5, st.v_avg_low * 0.87))
            b.a_lon = _burst(rng, rng.uniform(0.1, 0.4))
    else:
        b.delta_psi = direction * rng.uniform(0.34, st.delta_psi_aggressive * 0.83)
        b.speeds = _quasi(rng, rng.uniform(6.5, st.v_avg_aggressive * 0.9))
        b.a_lon = _burst(rng, rng.uniform(0.3, st.a_max_aggressive * 0.7))

    ctx = SceneContext(
        scenario=ScenarioType.LANE_CHANGE,
        has_left_rear=left and rear,
        has_right_rear=(not left) and rear,
    )
    return b, ctx, style


def _gen_crosswalk(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.CROSSWALK)
    b = _ClipBuilder(rng)
    b.pedestrian = True

    if style is StyleLabel.CONSERVATIVE:
        b.speeds = _quasi(rng, rng.uniform(0.8, th.crosswalk_v_conservative * 0.85))
    elif style is StyleLabel.AGGRESSIVE:
        mech = rng.choice(["speed", "accel", "erratic", "trend"])
        if mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        elif mech == "accel":
            b.speeds = _quasi(rng, rng.uniform(3.0, st.v_avg_aggressive * 0.85))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        elif mech == "erratic":
            b.speeds = _quasi(rng, rng.uniform(3.0, st.v_avg_aggressive * 0.85))
            b.a_lon = _erratic(rng, _above(rng, st.sigma_a_aggressive))
        else:
            slope = rng.uniform(0.35, 0.7)
            b.speeds = _linear(rng, rng.uniform(2.8, 4.5), slope)
            b.a_lon = np.full(N_SAMPLES, slope)
    else:
        b.speeds = _quasi(
            rng, rng.uniform(th.crosswalk_v_conservative * 1.3, st.v_avg_aggressive * 0.85)
        )
        b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_aggressive * 0.7))

    ctx = SceneContext(scenario=ScenarioType.CROSSWALK, pedestrians=True)
    return b, ctx, style


def _gen_side_to_main_merging(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.SIDE_TO_MAIN_EGO_MERGING)
    b = _ClipBuilder(rng)
    has_merging = bool(rng.random() < 0.6)

    if style is StyleLabel.AGGRESSIVE:
        mechs = ["speed", "accel"] + (["trend"] if has_merging else [])
        mech = rng.choice(mechs)
        if mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        elif mech == "accel":
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        else:
            slope = rng.uniform(0.4, 0.8)
            b.speeds = _linear(rng, rng.uniform(3.8, 5.5), slope)
            b.a_lon = np.full(N_SAMPLES, slope)
    elif style is StyleLabel.CONSERVATIVE:
        b.speeds = _quasi(rng, rng.uniform(1.4, st.v_avg_low * 0.86))
    else:
        b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
        b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_aggressive * 0.7))

    ctx = SceneContext(
        scenario=ScenarioType.SIDE_TO_MAIN_EGO_MERGING,
        has_merging=has_merging,
        main_road_vehicles=bool(rng.random() < 0.6),
    )
    return b, ctx, style


def _gen_side_to_main_main(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.SIDE_TO_MAIN_EGO_MAIN)
    b = _ClipBuilder(rng)

    if style is StyleLabel.AGGRESSIVE:
        # the main-road rule requires BOTH high speed and hard acceleration
        b.speeds = _quasi(rng, _above(rng, st.v_avg_high))
        b.a_lon = _burst(rng, _above(rng, st.a_max_high))
    elif style is StyleLabel.CONSERVATIVE:
        b.speeds = _quasi(rng, rng.uniform(2.3, st.v_avg_low * 0.88))
        b.a_lon = _burst(rng, rng.uniform(0.1, 0.4))
    else:
        variant = rng.random()
        if variant < 0.2:
            # fast but gentle: high speed alone stays normal here
            b.speeds = _quasi(rng, _above(rng, st.v_avg_high))
            b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_high * 0.7))
        elif variant < 0.4:
            # hard braking burst at moderate speed
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_high))
            b.a_lon = -_burst(rng, _above(rng, st.a_max_high))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_high))
            b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_high * 0.7))

    ctx = SceneContext(
        scenario=ScenarioType.SIDE_TO_MAIN_EGO_MAIN,
        has_merging=bool(rng.random() < 0.5),
        main_road_vehicles=True,
    )
    return b, ctx, style


def _gen_special_interior(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.SPECIAL_INTERIOR_ROAD)
    b = _ClipBuilder(rng)
    merge_risk = bool(rng.random() < 0.3)
    lead = LeadState.NONE
    pedestrians = False
    if not merge_risk and rng.random() < 0.4:
        if rng.random() < 0.6:
            lead = _pick(rng, [LeadState.FAR, LeadState.CLOSE])
        else:
            pedestrians = True

    interaction = lead is not LeadState.NONE or pedestrians

    if style is StyleLabel.AGGRESSIVE:
        mechs = ["speed", "accel"]
        if interaction and lead is not LeadState.NONE:
            mechs.append("headway")
        if not merge_risk:
            mechs.append("erratic")
        mech = rng.choice(mechs)
        if mech == "headway":
            b.speeds = _quasi(rng, rng.uniform(3.5, 6.0))
            b.lead_headway = rng.uniform(0.4, 0.7)
        elif mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        elif mech == "accel":
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
            b.a_lon = _erratic(rng, _above(rng, st.sigma_a_aggressive))
        if lead is not LeadState.NONE and b.lead_headway is None:
            b.lead_headway = rng.uniform(1.4, 2.2)
    elif style is StyleLabel.CONSERVATIVE:
        if lead is not LeadState.NONE and rng.random() < 0.5:
            b.speeds = _quasi(rng, rng.uniform(2.0, 5.5))
            b.lead_headway = rng.uniform(3.2, 5.0)
        else:
            b.speeds = _quasi(rng, rng.uniform(1.2, st.v_avg_low * 0.87))
            if lead is not LeadState.NONE:
                b.lead_headway = rng.uniform(1.4, 2.2)
    else:
        b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
        b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_aggressive * 0.7))
        if lead is not LeadState.NONE:
            b.lead_headway = rng.uniform(1.4, 2.2)

    ctx = SceneContext(
        scenario=ScenarioType.SPECIAL_INTERIOR_ROAD,
        lead=lead,
        pedestrians=pedestrians,
        merge_risk=merge_risk,
    )
    return b, ctx, style


def _gen_roundabout_entrance(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.ROUNDABOUT_ENTRANCE)
    b = _ClipBuilder(rng)
    merge_risk = bool(rng.random() < 0.5)

    if merge_risk:
        if style is StyleLabel.AGGRESSIVE:
            if rng.random() < 0.5:
                # decelerate-then-gun entry: parabolic valley, hard endpoints
                k = rng.uniform(0.70, 0.85)
                b.speeds = _valley(rng, rng.uniform(2.5, 4.0), k)
                b.a_lon = 2.0 * k * (_times() - HORIZON / 2.0)
            else:
                slope = rng.uniform(0.55, 0.8)
                v0 = rng.uniform(3.5, 5.0)
                b.speeds = _linear(rng, v0, slope)
                b.a_lon = np.full(N_SAMPLES, slope)
                v_end = v0 + slope * HORIZON
                b.yaw_rate = rng.choice([-1.0, 1.0]) * _above(rng, st.a_max_aggressive) / v_end
        elif style is StyleLabel.CONSERVATIVE:
            if rng.random() < 0.5:
                b.speeds = _quasi(rng, rng.uniform(1.3, st.v_avg_low * 0.85))
            else:
                slope = -rng.uniform(0.5, 0.85)
                b.speeds = _linear(rng, rng.uniform(4.5, 7.0), slope)
                b.a_lon = np.full(N_SAMPLES, slope)
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
            b.yaw_rate = rng.choice([-1.0, 1.0]) * rng.uniform(0.08, 0.18)
    else:
        if style is StyleLabel.AGGRESSIVE:
            if rng.random() < 0.5:
                b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
            else:
                b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
                b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        elif style is StyleLabel.CONSERVATIVE:
            b.speeds = _quasi(rng, rng.uniform(1.3, st.v_avg_low * 0.85))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, st.v_avg_aggressive))
            b.a_lon = _burst(rng, rng.uniform(0.2, st.a_max_aggressive * 0.7))

    ctx = SceneContext(scenario=ScenarioType.ROUNDABOUT_ENTRANCE, merge_risk=merge_risk)
    return b, ctx, style


def _gen_roundabout_interior(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.ROUNDABOUT_INTERIOR)
    b = _ClipBuilder(rng)
    if style is StyleLabel.CONSERVATIVE:
        style = StyleLabel.NORMAL  # interiors have no conservative region

    if style is StyleLabel.AGGRESSIVE:
        if rng.random() < 0.7:
            v0 = rng.uniform(7.0, 9.0)
            b.speeds = _quasi(rng, v0)
            b.yaw_rate = rng.choice([-1.0, 1.0]) * _above(rng, st.lat_accel_aggressive) / v0
        else:
            v0 = rng.uniform(4.0, 6.0)
            b.speeds = _quasi(rng, v0)
            # keep lateral accel small: a constant offset inside the hypot
            # compresses the sigma of the erratic component
            b.yaw_rate = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 0.12)
            b.a_lon = _erratic(rng, st.sigma_a_aggressive * rng.uniform(1.5, 1.9))
    else:
        v0 = rng.uniform(3.5, 6.0)
        b.speeds = _quasi(rng, v0)
        # keep peak lateral accel safely under the stability trigger
        max_rate = st.lat_accel_aggressive * 0.8 / (v0 + 0.5)
        b.yaw_rate = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, max_rate)

    ctx = SceneContext(scenario=ScenarioType.ROUNDABOUT_INTERIOR, road_shape=RoadShape.CURVE)
    return b, ctx, style


def _gen_countryside(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    st = th.for_scenario(ScenarioType.COUNTRYSIDE_ROAD)
    b = _ClipBuilder(rng)
    shape = RoadShape.CURVE if rng.random() < 0.35 else RoadShape.STRAIGHT
    eff = st.scaled(th.curve_factor) if shape is RoadShape.CURVE else st
    if shape is RoadShape.CURVE:
        b.yaw_rate = rng.choice([-1.0, 1.0]) * rng.uniform(0.03, 0.06)

    if style is StyleLabel.AGGRESSIVE:
        mech = rng.choice(["speed", "accel", "erratic"])
        if mech == "speed":
            b.speeds = _quasi(rng, _above(rng, st.v_avg_aggressive))
        elif mech == "accel":
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
            b.a_lon = _burst(rng, _above(rng, st.a_max_aggressive))
        else:
            b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
            b.a_lon = _erratic(rng, _above(rng, st.sigma_a_aggressive))
    elif style is StyleLabel.CONSERVATIVE:
        b.speeds = _quasi(rng, rng.uniform(3.0, st.v_avg_low * 0.88))
        b.a_lon = _burst(rng, rng.uniform(0.1, 0.5))
    else:
        b.speeds = _quasi(rng, _normal_band(rng, st.v_avg_low, eff.v_avg_aggressive))
        b.a_lon = _burst(rng, rng.uniform(0.3, eff.a_max_aggressive * 0.7))

    ctx = SceneContext(scenario=ScenarioType.COUNTRYSIDE_ROAD, road_shape=shape)
    return b, ctx, style


def _gen_carpark(
    style: StyleLabel, rng: np.random.Generator, th: ThresholdSet
) -> tuple[_ClipBuilder, SceneContext, StyleLabel]:
    b = _ClipBuilder(rng)
    b.speeds = _quasi(rng, rng.uniform(1.0, 3.2))
    b.a_lon = _burst(rng, rng.uniform(0.1, 0.8))
    ctx = SceneContext(scenario=ScenarioType.CARPARK)
    # carpark behavior is uniformly normal by construction
    return b, ctx, StyleLabel.NORMAL


_GENERATORS: dict[ScenarioType, Callable] = {
    ScenarioType.LANE_FOLLOWING: _gen_lane_following,
    ScenarioType.LANE_CHANGE: _gen_lane_change,
    ScenarioType.CROSSWALK: _gen_crosswalk,
    ScenarioType.SIDE_TO_MAIN_EGO_MERGING: _gen_side_to_main_merging,
    ScenarioType.SIDE_TO_MAIN_EGO_MAIN: _gen_side_to_main_main,
    ScenarioType.SPECIAL_INTERIOR_ROAD: _gen_special_interior,
    ScenarioType.ROUNDABOUT_ENTRANCE: _gen_roundabout_entrance,
    ScenarioType.ROUNDABOUT_INTERIOR: _gen_roundabout_interior,
    ScenarioType.COUNTRYSIDE_ROAD: _gen_countryside,
    ScenarioType.CARPARK: _gen_carpark,
}


def generate_clip(
    scenario: ScenarioType,
    style: StyleLabel,
    index: int,
    rng: np.random.Generator,
    thresholds: ThresholdSet | None = None,
) -> tuple[Clip, StyleLabel]:
    """One synthetic clip; returns it with its actual construction label
    (carpark coerces to Normal, roundabout interiors never Conservative)."""
    th = thresholds or ThresholdSet()
    if scenario in (ScenarioType.PROTECTED_INTERSECTION, ScenarioType.UNPROTECTED_INTERSECTION):
        builder, ctx, actual = _gen_intersection(scenario, style, rng, th)
    else:
        builder, ctx, actual = _GENERATORS[scenario](style, rng, th)
    clip_id = f"{scenario.value}-{index:05d}-{actual.value.lower()}"
    return builder.build(clip_id, ctx), actual


def scenario_corpus(
    scenario: ScenarioType,
    n: int,
    seed: int,
    weights: dict[StyleLabel, float] | None = None,
    thresholds: ThresholdSet | None = None,
) -> list[tuple[Clip, StyleLabel]]:
    """n clips of one scenario with styles drawn from `weights`
    (default: uniform across A/N/C)."""
    rng = np.random.default_rng(seed)
    weights = weights or {s: 1.0 / 3.0 for s in StyleLabel}
    styles = list(StyleLabel)
    probs = np.asarray([weights[s] for s in styles], dtype=float)
    probs /= probs.sum()
    out = []
    for i in range(n):
        style = styles[int(rng.choice(len(styles), p=probs))]
        out.append(generate_clip(scenario, style, i, rng, thresholds))
    return out


def mixed_corpus(
    n_per_scenario: int,
    seed: int,
    weights: dict[StyleLabel, float] | None = None,
    thresholds: ThresholdSet | None = None,
    scenarios: Sequence[ScenarioType] | None = None,
) -> list[tuple[Clip, StyleLabel]]:
    """A corpus spanning all scenarios, weighted like natural driving by
    default."""
    weights = weights or NATURAL_STYLE_WEIGHTS
    out = []
    for offset, scenario in enumerate(scenarios or list(ScenarioType)):
        out.extend(scenario_corpus(scenario, n_per_scenario, seed + offset, weights, thresholds))
    return out
