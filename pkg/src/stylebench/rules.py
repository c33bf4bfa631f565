"""Per-scenario driving-style heuristics and threshold calibration.

Each scenario classifier maps (SceneContext, KinematicFeatures) to an
Aggressive/Normal/Conservative label under a ThresholdSet. Predicate
order: the crosswalk rule evaluates its conservative condition first
(low speed wins regardless of other indicators); every other scenario
evaluates aggressive conditions first so risky behavior is never
overlooked. The fired_rules of a decision identify exactly the
predicates that produced the label, so a replay over the recorded
features reproduces it.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .kinematics import KinematicFeatures, Maneuver, TrendClass, detect_maneuver
from .models import LeadState, RoadShape, SceneContext, ScenarioType, StyleLabel
from .thresholds import ThresholdSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuleDecision:
    """Outcome of one classification with its audit trail."""

    label: StyleLabel
    scenario: ScenarioType
    fired_rules: tuple[str, ...]
    features_used: KinematicFeatures

    def __post_init__(self) -> None:
        if not self.fired_rules:
            raise ValueError("fired_rules must not be empty")


def replay_label(fired_rules: Iterable[str]) -> StyleLabel:
    """Re-derive the label implied by a set of fired rule identifiers."""
    rules = list(fired_rules)
    if any(".aggressive." in r for r in rules):
        return StyleLabel.AGGRESSIVE
    if any(".conservative." in r for r in rules):
        return StyleLabel.CONSERVATIVE
    return StyleLabel.NORMAL


class _RuleTrace:
    """Collects fired predicate ids while a rule evaluates."""

    def __init__(self, scenario: str) -> None:
        self.scenario = scenario
        self.fired: list[str] = []

    def check(self, name: str, condition: bool) -> bool:
        if condition:
            self.fired.append(f"{self.scenario}.{name}")
        return condition

    def finish(self, label: StyleLabel) -> tuple[StyleLabel, list[str]]:
        if not self.fired:
            self.fired.append(f"{self.scenario}.normal.default")
        return label, self.fired


def classify_lane_following(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Lane following, 6 sub-conditions: lead none/far/close x straight/curve.

    Curved roads and close leads tighten the aggressive-side thresholds;
    with no lead, classification relies purely on motion statistics.
    """
    trace = _RuleTrace("lane_following")
    st = thresholds.for_scenario(ScenarioType.LANE_FOLLOWING)
    factor = 1.0
    if ctx.road_shape is RoadShape.CURVE:
        factor *= thresholds.curve_factor
    if ctx.lead is LeadState.CLOSE:
        factor *= thresholds.close_lead_factor
    st = st.scaled(factor)
    has_lead = ctx.lead is not LeadState.NONE

    aggressive = False
    if has_lead:
        aggressive |= trace.check(
            "aggressive.unsafe_ratio", feats.unsafe_ratio > thresholds.unsafe_ratio_max
        )
    aggressive |= trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
    aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
    aggressive |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)

    if has_lead:
        if trace.check(
            "conservative.safe_gap_low_speed",
            feats.safe_ratio > thresholds.safe_ratio_min and feats.v_avg < st.v_avg_low,
        ):
            return trace.finish(StyleLabel.CONSERVATIVE)
    elif trace.check(
        "conservative.slow_smooth",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)

    return trace.finish(StyleLabel.NORMAL)


def classify_intersection(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Protected and unprotected junctions.

    Unprotected junctions tighten aggressive thresholds to 0.85x the
    protected values; turning maneuvers tighten them further, and
    pedestrian presence lowers the aggressive speed threshold.
    """
    name = ctx.scenario.value
    trace = _RuleTrace(name)
    st = thresholds.for_scenario(ctx.scenario)
    maneuver = detect_maneuver(feats.delta_psi, thresholds, intersection=True)

    factor = 1.0
    if ctx.scenario is ScenarioType.UNPROTECTED_INTERSECTION:
        factor *= thresholds.unprotected_factor
    if maneuver is not Maneuver.STRAIGHT:
        factor *= thresholds.turn_factor
    v_threshold = st.v_avg_aggressive * factor
    a_threshold = st.a_max_aggressive * factor
    if ctx.pedestrians:
        v_threshold *= thresholds.pedestrian_speed_factor

    aggressive = trace.check(
        "aggressive.unsafe_ratio", feats.unsafe_ratio > thresholds.unsafe_ratio_max
    )
    aggressive |= trace.check(f"aggressive.v_avg_{maneuver.value}", feats.v_avg > v_threshold)
    aggressive |= trace.check(f"aggressive.a_max_{maneuver.value}", feats.a_max > a_threshold)
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)

    if trace.check("conservative.safe_ratio", feats.safe_ratio > thresholds.safe_ratio_min):
        return trace.finish(StyleLabel.CONSERVATIVE)
    if trace.check(
        "conservative.slow_smooth",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)

    return trace.finish(StyleLabel.NORMAL)


def classify_lane_change(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Lane changes, split by direction and rear-vehicle presence.

    With a rear vehicle in the target lane any abrupt-motion indicator is
    aggressive regardless of speed; without one, high speed must also
    hold. Callers route clips whose yaw change never crosses the 0.25 rad
    trigger to the lane-following rule instead.
    """
    trace = _RuleTrace("lane_change")
    st = thresholds.for_scenario(ScenarioType.LANE_CHANGE)
    direction = detect_maneuver(feats.delta_psi, thresholds, intersection=False)
    rear = ctx.has_left_rear if direction is Maneuver.LEFT else ctx.has_right_rear
    abs_dpsi = abs(feats.delta_psi)

    abrupt = trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
    abrupt |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
    abrupt |= trace.check("aggressive.delta_psi", abs_dpsi > st.delta_psi_aggressive)
    if rear:
        if abrupt:
            trace.fired.append(f"lane_change.aggressive.rear_{direction.value}")
            return trace.finish(StyleLabel.AGGRESSIVE)
    elif abrupt and trace.check("aggressive.v_avg_no_rear", feats.v_avg > st.v_avg_aggressive):
        return trace.finish(StyleLabel.AGGRESSIVE)
    # Abrupt-motion predicates that fired without completing the aggressive
    # rule must not leak into the replay trail.
    trace.fired = [r for r in trace.fired if ".aggressive." not in r]

    if direction is Maneuver.LEFT:
        if trace.check(
            "conservative.left_smooth",
            abs_dpsi < st.delta_psi_low and feats.sigma_a < st.sigma_a_low,
        ):
            return trace.finish(StyleLabel.CONSERVATIVE)
    elif direction is Maneuver.RIGHT:
        if trace.check(
            "conservative.right_gentle",
            abs_dpsi < st.delta_psi_low and feats.v_avg < st.v_avg_low,
        ):
            return trace.finish(StyleLabel.CONSERVATIVE)

    return trace.finish(StyleLabel.NORMAL)


def classify_crosswalk(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Crosswalk zones: significantly low speed is conservative regardless
    of other indicators, so that branch runs first."""
    trace = _RuleTrace("crosswalk")
    st = thresholds.for_scenario(ScenarioType.CROSSWALK)

    if trace.check(
        "conservative.low_speed", feats.v_avg < thresholds.crosswalk_v_conservative
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)

    aggressive = trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
    aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
    aggressive |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
    aggressive |= trace.check(
        "aggressive.accelerating_trend", feats.trend is TrendClass.ACCELERATING
    )
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)

    return trace.finish(StyleLabel.NORMAL)


def classify_side_to_main(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Side-to-main merges, for the merging ego and the main-road ego.

    Merging ego: assertive speed/acceleration (or an accelerating trend
    under merging pressure) is aggressive; low speed is a yielding,
    conservative merge regardless of pressure. Main-road ego: aggressive
    needs both high speed and high peak acceleration; conservative needs
    both low speed and stable acceleration.
    """
    name = ctx.scenario.value
    trace = _RuleTrace(name)
    st = thresholds.for_scenario(ctx.scenario)

    if ctx.scenario is ScenarioType.SIDE_TO_MAIN_EGO_MERGING:
        aggressive = trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
        aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
        if ctx.has_merging:
            aggressive |= trace.check(
                "aggressive.accelerating_under_merge",
                feats.trend is TrendClass.ACCELERATING,
            )
        if aggressive:
            return trace.finish(StyleLabel.AGGRESSIVE)
        if trace.check("conservative.yielding_speed", feats.v_avg < st.v_avg_low):
            return trace.finish(StyleLabel.CONSERVATIVE)
        return trace.finish(StyleLabel.NORMAL)

    if trace.check(
        "aggressive.fast_and_hard",
        feats.v_avg > st.v_avg_high and feats.a_max > st.a_max_high,
    ):
        return trace.finish(StyleLabel.AGGRESSIVE)
    if trace.check(
        "conservative.slow_stable",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)
    return trace.finish(StyleLabel.NORMAL)


def classify_special_interior(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Special interior roads: merge-risk, interaction, and isolated branches."""
    trace = _RuleTrace("special_interior_road")
    st = thresholds.for_scenario(ScenarioType.SPECIAL_INTERIOR_ROAD)
    non_monotonic = feats.trend in (TrendClass.ACCEL_THEN_DECEL, TrendClass.DECEL_THEN_ACCEL)

    if ctx.merge_risk:
        aggressive = trace.check("aggressive.merge_a_max", feats.a_max > st.a_max_aggressive)
        aggressive |= trace.check("aggressive.merge_v_avg", feats.v_avg > st.v_avg_aggressive)
        aggressive |= trace.check(
            "aggressive.merge_erratic",
            non_monotonic and feats.sigma_a > st.sigma_a_aggressive,
        )
        if aggressive:
            return trace.finish(StyleLabel.AGGRESSIVE)
        if trace.check(
            "conservative.merge_slow_steady",
            feats.v_avg < st.v_avg_low
            and feats.trend in (TrendClass.QUASI_CONSTANT, TrendClass.DECELERATING),
        ):
            return trace.finish(StyleLabel.CONSERVATIVE)
        return trace.finish(StyleLabel.NORMAL)

    if ctx.lead is not LeadState.NONE or ctx.pedestrians:
        aggressive = trace.check(
            "aggressive.unsafe_ratio", feats.unsafe_ratio > thresholds.unsafe_ratio_max
        )
        aggressive |= trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
        aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
        aggressive |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
        if aggressive:
            return trace.finish(StyleLabel.AGGRESSIVE)
        if trace.check("conservative.safe_ratio", feats.safe_ratio > thresholds.safe_ratio_min):
            return trace.finish(StyleLabel.CONSERVATIVE)
        if trace.check("conservative.low_speed", feats.v_avg < st.v_avg_low):
            return trace.finish(StyleLabel.CONSERVATIVE)
        return trace.finish(StyleLabel.NORMAL)

    aggressive = trace.check("aggressive.isolated_v_avg", feats.v_avg > st.v_avg_aggressive)
    aggressive |= trace.check("aggressive.isolated_a_max", feats.a_max > st.a_max_aggressive)
    aggressive |= trace.check("aggressive.isolated_sigma_a", feats.sigma_a > st.sigma_a_aggressive)
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)
    if trace.check(
        "conservative.isolated_slow_smooth",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)
    return trace.finish(StyleLabel.NORMAL)


def classify_countryside(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Countryside roads; curve sub-condition tightens aggressive thresholds."""
    trace = _RuleTrace("countryside_road")
    st = thresholds.for_scenario(ScenarioType.COUNTRYSIDE_ROAD)
    if ctx.road_shape is RoadShape.CURVE:
        st = st.scaled(thresholds.curve_factor)

    aggressive = trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
    aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
    aggressive |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)

    if trace.check(
        "conservative.slow_smooth",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)
    return trace.finish(StyleLabel.NORMAL)


def classify_roundabout(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    """Roundabout entrances and interiors.

    Entrances weigh merge risk: assertive or decel-then-gun entry trends
    with hard acceleration are aggressive, slow steady or clearly
    decelerating approaches conservative. Interiors judge circular
    stability only (lateral acceleration and smoothness) and never emit
    a conservative label.
    """
    name = ctx.scenario.value
    trace = _RuleTrace(name)
    st = thresholds.for_scenario(ctx.scenario)

    if ctx.scenario is ScenarioType.ROUNDABOUT_INTERIOR:
        aggressive = trace.check("aggressive.lat_accel", feats.ay_max > st.lat_accel_aggressive)
        aggressive |= trace.check("aggressive.sigma_a", feats.sigma_a > st.sigma_a_aggressive)
        if aggressive:
            return trace.finish(StyleLabel.AGGRESSIVE)
        return trace.finish(StyleLabel.NORMAL)

    if ctx.merge_risk:
        if trace.check(
            "aggressive.fast_entry",
            feats.trend in (TrendClass.ACCELERATING, TrendClass.DECEL_THEN_ACCEL)
            and feats.a_max > st.a_max_aggressive,
        ):
            return trace.finish(StyleLabel.AGGRESSIVE)
        conservative = trace.check(
            "conservative.slow_steady",
            feats.v_avg < st.v_avg_low and feats.trend is TrendClass.QUASI_CONSTANT,
        )
        conservative |= trace.check(
            "conservative.decelerating", feats.trend is TrendClass.DECELERATING
        )
        if conservative:
            return trace.finish(StyleLabel.CONSERVATIVE)
        return trace.finish(StyleLabel.NORMAL)

    aggressive = trace.check("aggressive.v_avg", feats.v_avg > st.v_avg_aggressive)
    aggressive |= trace.check("aggressive.a_max", feats.a_max > st.a_max_aggressive)
    if aggressive:
        return trace.finish(StyleLabel.AGGRESSIVE)
    if trace.check(
        "conservative.slow_smooth",
        feats.v_avg < st.v_avg_low and feats.sigma_a < st.sigma_a_low,
    ):
        return trace.finish(StyleLabel.CONSERVATIVE)
    return trace.finish(StyleLabel.NORMAL)


def classify_carpark(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> tuple[StyleLabel, list[str]]:
    # Constant Normal by convention, not a heuristic: carpark behavior is
    # uniformly normal in the reference statistics.
    return StyleLabel.NORMAL, ["carpark.normal.convention"]


_CLASSIFIERS: dict[ScenarioType, Callable] = {
    ScenarioType.LANE_FOLLOWING: classify_lane_following,
    ScenarioType.PROTECTED_INTERSECTION: classify_intersection,
    ScenarioType.UNPROTECTED_INTERSECTION: classify_intersection,
    ScenarioType.LANE_CHANGE: classify_lane_change,
    ScenarioType.CROSSWALK: classify_crosswalk,
    ScenarioType.SIDE_TO_MAIN_EGO_MERGING: classify_side_to_main,
    ScenarioType.SIDE_TO_MAIN_EGO_MAIN: classify_side_to_main,
    ScenarioType.SPECIAL_INTERIOR_ROAD: classify_special_interior,
    ScenarioType.ROUNDABOUT_ENTRANCE: classify_roundabout,
    ScenarioType.ROUNDABOUT_INTERIOR: classify_roundabout,
    ScenarioType.COUNTRYSIDE_ROAD: classify_countryside,
    ScenarioType.CARPARK: classify_carpark,
}


def classify(
    ctx: SceneContext, feats: KinematicFeatures, thresholds: ThresholdSet
) -> RuleDecision:
    """Dispatch to the scenario classifier; total and deterministic.

    Lane-change clips whose yaw change never crosses the 0.25 rad trigger
    are re-routed to the lane-following rule (the maneuver never
    materialized); the decision records the re-route.
    """
    if ctx.scenario not in _CLASSIFIERS:
        raise ValueError(f"unsupported scenario {ctx.scenario!r}")

    if (
        ctx.scenario is ScenarioType.LANE_CHANGE
        and abs(feats.delta_psi) <= thresholds.yaw_lane_change
    ):
        label, fired = classify_lane_following(ctx, feats, thresholds)
        fired = ["lane_change.reroute.lane_following", *fired]
    else:
        label, fired = _CLASSIFIERS[ctx.scenario](ctx, feats, thresholds)

    return RuleDecision(
        label=label,
        scenario=ctx.scenario,
        fired_rules=tuple(fired),
        features_used=feats,
    )


@dataclass(frozen=True)
class CalibrationConfig:
    """Percentile settings for data-driven threshold calibration."""

    upper_percentile: float = 85.0
    lower_percentile: float = 15.0
    min_clips: int = 30

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower_percentile < self.upper_percentile <= 100.0:
            raise ValueError(
                "percentiles must satisfy 0 <= lower < upper <= 100, got "
                f"lower={self.lower_percentile}, upper={self.upper_percentile}"
            )
        if self.min_clips < 1:
            raise ValueError(f"min_clips must be >= 1, got {self.min_clips}")


def calibrate(
    corpus: Sequence[tuple[SceneContext, KinematicFeatures]],
    config: CalibrationConfig = CalibrationConfig(),
    base: ThresholdSet | None = None,
) -> tuple[ThresholdSet, dict]:
    """Derive per-scenario thresholds from corpus feature percentiles.

    Aggressive-side thresholds take the upper percentile of each feature,
    conservative-side the lower percentile. Scenarios with fewer than
    ``min_clips`` clips keep their current values, as do the fixed
    conventions (0.25 rad lane-change trigger, 2.0 m/s crosswalk speed)
    and the yaw/lateral knobs. Returns the new set plus a report of
    sample counts and chosen values per scenario.
    """
    base = base or ThresholdSet()
    grouped: dict[ScenarioType, list[KinematicFeatures]] = {}
    for ctx, feats in corpus:
        grouped.setdefault(ctx.scenario, []).append(feats)

    if not corpus:
        logger.warning("calibration corpus is empty; keeping default thresholds")

    scenarios = dict(base.scenarios)
    report: dict[str, dict] = {}
    for scenario in ScenarioType:
        feats_list = grouped.get(scenario, [])
        entry: dict = {"clips": len(feats_list), "calibrated": False}
        if len(feats_list) < config.min_clips:
            if feats_list:
                logger.warning(
                    "scenario %s has %d clips (< %d); keeping current thresholds",
                    scenario.value,
                    len(feats_list),
                    config.min_clips,
                )
            report[scenario.value] = entry
            continue

        v_avg = np.asarray([f.v_avg for f in feats_list])
        a_max = np.asarray([f.a_max for f in feats_list])
        sigma_a = np.asarray([f.sigma_a for f in feats_list])
        up = config.upper_percentile
        lo = config.lower_percentile
        try:
            # replace() re-runs validation; degenerate corpora (e.g. all
            # clips at one speed) fail it and keep the current values
            candidate = dataclasses.replace(
                scenarios[scenario],
                v_avg_aggressive=float(np.percentile(v_avg, up)),
                a_max_aggressive=float(np.percentile(a_max, up)),
                sigma_a_aggressive=float(np.percentile(sigma_a, up)),
                v_avg_high=float(np.percentile(v_avg, up)),
                a_max_high=float(np.percentile(a_max, up)),
                v_avg_low=float(np.percentile(v_avg, lo)),
                sigma_a_low=float(np.percentile(sigma_a, lo)),
            )
            scenarios[scenario] = candidate
            entry.update(
                calibrated=True,
                v_avg_aggressive=candidate.v_avg_aggressive,
                a_max_aggressive=candidate.a_max_aggressive,
                sigma_a_aggressive=candidate.sigma_a_aggressive,
                v_avg_low=candidate.v_avg_low,
                sigma_a_low=candidate.sigma_a_low,
            )
        except ValueError as exc:
            logger.warning(
                "calibration for %s produced invalid thresholds (%s); keeping current",
                scenario.value,
                exc,
            )
        report[scenario.value] = entry

    calibrated = dataclasses.replace(base, scenarios=scenarios)
    return calibrated, report


def calibrate_thresholds(
    corpus: Sequence[tuple[SceneContext, KinematicFeatures]],
    config: CalibrationConfig = CalibrationConfig(),
    base: ThresholdSet | None = None,
) -> ThresholdSet:
    return calibrate(corpus, config, base)[0]
