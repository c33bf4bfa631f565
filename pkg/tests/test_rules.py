"""Scenario rule heuristics, replay soundness, and threshold calibration."""

import math

import numpy as np
import pytest

from stylebench.kinematics import KinematicFeatures, TrendClass, extract_features
from stylebench.models import (
    LeadState,
    RoadShape,
    SceneContext,
    ScenarioType,
    StyleLabel,
)
from stylebench.rules import (
    CalibrationConfig,
    calibrate,
    calibrate_thresholds,
    classify,
    replay_label,
)
from stylebench.synthetic import mixed_corpus
from stylebench.thresholds import ThresholdSet

A, NRM, C = StyleLabel.AGGRESSIVE, StyleLabel.NORMAL, StyleLabel.CONSERVATIVE
TS = ThresholdSet()


def feats(**kw) -> KinematicFeatures:
    base = dict(
        v_avg=8.0,
        v_std=0.1,
        a_max=0.5,
        sigma_a=0.2,
        ay_max=0.3,
        vy_max=0.0,
        delta_psi=0.0,
        trend=TrendClass.QUASI_CONSTANT,
        unsafe_ratio=0.0,
        safe_ratio=0.0,
        min_ttc=math.inf,
    )
    base.update(kw)
    return KinematicFeatures(**base)


def ctx(scenario=ScenarioType.LANE_FOLLOWING, **kw) -> SceneContext:
    return SceneContext(scenario=scenario, **kw)


def label_of(context, features) -> StyleLabel:
    return classify(context, features, TS).label


# --- lane following ---------------------------------------------------------------

def test_lane_following_speed_threshold():
    assert label_of(ctx(), feats(v_avg=13.5)) is A
    assert label_of(ctx(), feats(v_avg=12.5)) is NRM


def test_lane_following_curve_tightens_thresholds():
    f = feats(v_avg=11.5)  # between 13 * 0.85 = 11.05 and 13
    assert label_of(ctx(), f) is NRM
    assert label_of(ctx(road_shape=RoadShape.CURVE), f) is A


def test_lane_following_close_lead_tightens_thresholds():
    f = feats(v_avg=12.0)  # above 13 * 0.9 = 11.7
    assert label_of(ctx(lead=LeadState.FAR), f) is NRM
    assert label_of(ctx(lead=LeadState.CLOSE), f) is A


def test_lane_following_unsafe_ratio_needs_lead():
    f = feats(unsafe_ratio=0.7)
    assert label_of(ctx(lead=LeadState.CLOSE), f) is A
    # a stale ratio with no lead in context cannot fire the headway rule
    assert label_of(ctx(), f) is NRM


def test_lane_following_conservative_branches():
    with_lead = ctx(lead=LeadState.FAR)
    assert label_of(with_lead, feats(v_avg=5.0, safe_ratio=0.9)) is C
    assert label_of(with_lead, feats(v_avg=7.0, safe_ratio=0.9)) is NRM
    assert label_of(ctx(), feats(v_avg=5.0, sigma_a=0.3)) is C
    assert label_of(ctx(), feats(v_avg=5.0, sigma_a=0.7)) is NRM


# --- intersections -----------------------------------------------------------------

def test_intersection_unprotected_factor():
    f = feats(v_avg=8.2)  # between 9 * 0.85 = 7.65 and 9
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION, signal_protected=True), f) is NRM
    assert label_of(ctx(ScenarioType.UNPROTECTED_INTERSECTION), f) is A


def test_intersection_turn_factor():
    f = feats(v_avg=8.5, delta_psi=0.5)  # turning: 9 * 0.9 = 8.1
    straight = feats(v_avg=8.5)
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), straight) is NRM
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), f) is A


def test_intersection_pedestrian_lowers_speed_threshold_only():
    f = feats(v_avg=7.5)  # 9 * 0.8 = 7.2 with pedestrians
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), f) is NRM
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION, pedestrians=True), f) is A
    # acceleration threshold is untouched by pedestrians
    g = feats(v_avg=5.0, a_max=2.1)
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION, pedestrians=True), g) is NRM
    h = feats(v_avg=5.0, a_max=2.5)
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION, pedestrians=True), h) is A


def test_intersection_conservative():
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), feats(safe_ratio=0.9)) is C
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), feats(v_avg=3.0, sigma_a=0.3)) is C
    assert label_of(ctx(ScenarioType.PROTECTED_INTERSECTION), feats(v_avg=3.0, sigma_a=0.8)) is NRM


def test_intersection_maneuver_marker_in_fired_rules():
    decision = classify(
        ctx(ScenarioType.PROTECTED_INTERSECTION),
        feats(v_avg=9.5, delta_psi=0.6),
        TS,
    )
    assert decision.label is A
    assert any("v_avg_left" in r for r in decision.fired_rules)


# --- lane change --------------------------------------------------------------------

def test_lane_change_reroutes_when_no_maneuver():
    decision = classify(ctx(ScenarioType.LANE_CHANGE), feats(delta_psi=0.1, v_avg=14.0), TS)
    assert decision.fired_rules[0] == "lane_change.reroute.lane_following"
    assert decision.label is A  # judged by the lane-following rule


def test_lane_change_rear_vehicle_makes_abrupt_aggressive():
    f = feats(delta_psi=0.4, a_max=3.5, v_avg=8.0)
    assert label_of(ctx(ScenarioType.LANE_CHANGE, has_left_rear=True), f) is A
    # same motion without the rear vehicle needs high speed too
    assert label_of(ctx(ScenarioType.LANE_CHANGE), f) is NRM
    assert label_of(ctx(ScenarioType.LANE_CHANGE), feats(delta_psi=0.4, a_max=3.5, v_avg=12.5)) is A


def test_lane_change_rear_is_direction_specific():
    f = feats(delta_psi=-0.4, a_max=3.5, v_avg=8.0)  # rightward change
    assert label_of(ctx(ScenarioType.LANE_CHANGE, has_left_rear=True), f) is NRM
    assert label_of(ctx(ScenarioType.LANE_CHANGE, has_right_rear=True), f) is A


def test_lane_change_yank_alone_with_rear():
    f = feats(delta_psi=0.65, v_avg=8.0)
    assert label_of(ctx(ScenarioType.LANE_CHANGE, has_left_rear=True), f) is A


def test_lane_change_conservative_split():
    left = feats(delta_psi=0.28, sigma_a=0.3, v_avg=8.0)
    assert label_of(ctx(ScenarioType.LANE_CHANGE), left) is C
    right_slow = feats(delta_psi=-0.28, v_avg=4.0)
    assert label_of(ctx(ScenarioType.LANE_CHANGE), right_slow) is C
    right_fast = feats(delta_psi=-0.28, v_avg=8.0)
    assert label_of(ctx(ScenarioType.LANE_CHANGE), right_fast) is NRM


def test_lane_change_normal_trace_has_no_aggressive_residue():
    # sigma_a fires the abrupt predicate, but without rear or speed the
    # label is Normal; the trail must replay to Normal as well
    decision = classify(
        ctx(ScenarioType.LANE_CHANGE), feats(delta_psi=0.4, sigma_a=1.8, v_avg=8.0), TS
    )
    assert decision.label is NRM
    assert not any(".aggressive." in r for r in decision.fired_rules)


# --- crosswalk ----------------------------------------------------------------------

def test_crosswalk_conservative_precedes_aggressive_indicators():
    creeping = feats(v_avg=1.5, trend=TrendClass.ACCELERATING, a_max=3.0)
    assert label_of(ctx(ScenarioType.CROSSWALK, pedestrians=True), creeping) is C


def test_crosswalk_aggressive_indicators():
    cw = ctx(ScenarioType.CROSSWALK, pedestrians=True)
    assert label_of(cw, feats(v_avg=8.5)) is A
    assert label_of(cw, feats(v_avg=5.0, trend=TrendClass.ACCELERATING)) is A
    assert label_of(cw, feats(v_avg=5.0, a_max=2.6)) is A
    assert label_of(cw, feats(v_avg=5.0)) is NRM


# --- side-to-main -------------------------------------------------------------------

def test_merging_ego_rules():
    merging = ctx(ScenarioType.SIDE_TO_MAIN_EGO_MERGING, has_merging=True)
    assert label_of(merging, feats(v_avg=9.5)) is A
    assert label_of(merging, feats(trend=TrendClass.ACCELERATING)) is A
    # the trend rule needs merging pressure in context
    calm = ctx(ScenarioType.SIDE_TO_MAIN_EGO_MERGING)
    assert label_of(calm, feats(trend=TrendClass.ACCELERATING)) is NRM
    assert label_of(calm, feats(v_avg=3.0)) is C


def test_main_road_ego_needs_both_for_aggressive():
    main = ctx(ScenarioType.SIDE_TO_MAIN_EGO_MAIN, main_road_vehicles=True)
    assert label_of(main, feats(v_avg=13.0, a_max=2.8)) is A
    assert label_of(main, feats(v_avg=13.0, a_max=1.5)) is NRM
    assert label_of(main, feats(v_avg=8.0, a_max=2.8)) is NRM
    assert label_of(main, feats(v_avg=4.0, sigma_a=0.3)) is C
    assert label_of(main, feats(v_avg=4.0, sigma_a=0.8)) is NRM


# --- special interior road ----------------------------------------------------------

def test_special_interior_merge_branch():
    # the interior-road speed gate is 7.0, so these cases hold v_avg at 5
    merge = ctx(ScenarioType.SPECIAL_INTERIOR_ROAD, merge_risk=True)
    assert label_of(merge, feats(v_avg=7.5)) is A
    assert label_of(merge, feats(v_avg=5.0, trend=TrendClass.ACCEL_THEN_DECEL, sigma_a=1.3)) is A
    # erratic needs both the reversal and the spread
    assert label_of(merge, feats(v_avg=5.0, trend=TrendClass.ACCEL_THEN_DECEL, sigma_a=0.5)) is NRM
    assert label_of(merge, feats(v_avg=2.5, trend=TrendClass.DECELERATING)) is C
    assert label_of(merge, feats(v_avg=2.5, trend=TrendClass.ACCELERATING)) is NRM


def test_special_interior_interaction_branch():
    crowded = ctx(ScenarioType.SPECIAL_INTERIOR_ROAD, pedestrians=True)
    assert label_of(crowded, feats(v_avg=5.0, unsafe_ratio=0.6)) is A
    assert label_of(crowded, feats(v_avg=5.0, safe_ratio=0.9)) is C
    assert label_of(crowded, feats(v_avg=2.5)) is C
    assert label_of(crowded, feats(v_avg=5.0)) is NRM


def test_special_interior_isolated_branch():
    alone = ctx(ScenarioType.SPECIAL_INTERIOR_ROAD)
    assert label_of(alone, feats(v_avg=7.5)) is A
    assert label_of(alone, feats(v_avg=2.5, sigma_a=0.3)) is C
    assert label_of(alone, feats(v_avg=2.5, sigma_a=0.8)) is NRM


# --- roundabouts --------------------------------------------------------------------

def test_roundabout_interior_judges_lateral_stability_only():
    inner = ctx(ScenarioType.ROUNDABOUT_INTERIOR)
    assert label_of(inner, feats(ay_max=2.7)) is A
    assert label_of(inner, feats(sigma_a=1.4)) is A
    # interiors never emit conservative, however slow and smooth
    assert label_of(inner, feats(v_avg=1.0, sigma_a=0.05)) is NRM


def test_roundabout_entrance_merge_risk():
    entry = ctx(ScenarioType.ROUNDABOUT_ENTRANCE, merge_risk=True)
    assert label_of(entry, feats(trend=TrendClass.ACCELERATING, a_max=2.5)) is A
    assert label_of(entry, feats(trend=TrendClass.DECEL_THEN_ACCEL, a_max=2.5)) is A
    # hard acceleration with a flat trend is not a gunned entry
    assert label_of(entry, feats(a_max=2.5)) is NRM
    assert label_of(entry, feats(v_avg=3.0)) is C
    assert label_of(entry, feats(trend=TrendClass.DECELERATING, v_avg=6.0)) is C


def test_roundabout_entrance_without_merge_risk():
    entry = ctx(ScenarioType.ROUNDABOUT_ENTRANCE)
    assert label_of(entry, feats(v_avg=8.5)) is A
    assert label_of(entry, feats(v_avg=3.0, sigma_a=0.3)) is C
    assert label_of(entry, feats(v_avg=6.0)) is NRM


def test_carpark_is_always_normal():
    car = ctx(ScenarioType.CARPARK)
    decision = classify(car, feats(v_avg=30.0, a_max=9.0, sigma_a=5.0), TS)
    assert decision.label is NRM
    assert decision.fired_rules == ("carpark.normal.convention",)


# --- replay soundness ----------------------------------------------------------------

def test_replay_label_rules():
    assert replay_label(["x.aggressive.v_avg"]) is A
    assert replay_label(["x.conservative.slow", "x.aggressive.v_avg"]) is A
    assert replay_label(["x.conservative.slow"]) is C
    assert replay_label(["x.normal.default"]) is NRM
    assert replay_label([]) is NRM


def test_decisions_replay_to_their_label_on_synthetic_corpus():
    pairs = mixed_corpus(12, seed=77)
    assert len(pairs) == 144
    for clip, _ in pairs:
        features = extract_features(clip.trajectory, clip.agents, TS)
        decision = classify(clip.context, features, TS)
        assert decision.fired_rules, clip.clip_id
        assert replay_label(decision.fired_rules) is decision.label, clip.clip_id


def test_rule_decision_requires_fired_rules():
    from stylebench.rules import RuleDecision

    with pytest.raises(ValueError):
        RuleDecision(
            label=NRM,
            scenario=ScenarioType.LANE_FOLLOWING,
            fired_rules=(),
            features_used=feats(),
        )


# --- calibration ----------------------------------------------------------------------

def _lane_corpus(values):
    return [
        (ctx(), feats(v_avg=v, a_max=a, sigma_a=s))
        for v, a, s in values
    ]


def test_calibrate_matches_percentile_oracle():
    rng = np.random.default_rng(13)
    v = rng.uniform(2, 20, 50)
    a = rng.uniform(0.2, 4, 50)
    s = rng.uniform(0.05, 2, 50)
    corpus = _lane_corpus(zip(v, a, s))
    calibrated, report = calibrate(corpus, CalibrationConfig())

    st = calibrated.for_scenario(ScenarioType.LANE_FOLLOWING)
    assert st.v_avg_aggressive == pytest.approx(np.percentile(v, 85), abs=1e-12)
    assert st.a_max_aggressive == pytest.approx(np.percentile(a, 85), abs=1e-12)
    assert st.sigma_a_aggressive == pytest.approx(np.percentile(s, 85), abs=1e-12)
    assert st.v_avg_low == pytest.approx(np.percentile(v, 15), abs=1e-12)
    assert st.sigma_a_low == pytest.approx(np.percentile(s, 15), abs=1e-12)
    assert report["lane_following"]["calibrated"] is True
    assert report["lane_following"]["clips"] == 50
    # untouched scenarios keep their defaults and report zero clips
    assert calibrated.for_scenario(ScenarioType.CARPARK) == TS.for_scenario(ScenarioType.CARPARK)
    assert report["carpark"] == {"clips": 0, "calibrated": False}


def test_calibrate_respects_min_clips():
    corpus = _lane_corpus([(5.0 + i, 1.0, 0.3) for i in range(10)])
    calibrated, report = calibrate(corpus, CalibrationConfig(min_clips=30))
    assert calibrated.for_scenario(ScenarioType.LANE_FOLLOWING) == TS.for_scenario(
        ScenarioType.LANE_FOLLOWING
    )
    assert report["lane_following"] == {"clips": 10, "calibrated": False}


def test_calibrate_degenerate_corpus_keeps_current():
    # every clip identical: upper and lower percentiles coincide, which
    # fails threshold validation, so the scenario keeps its defaults
    corpus = _lane_corpus([(8.0, 1.0, 0.3)] * 40)
    calibrated, report = calibrate(corpus)
    assert calibrated.for_scenario(ScenarioType.LANE_FOLLOWING) == TS.for_scenario(
        ScenarioType.LANE_FOLLOWING
    )
    assert report["lane_following"]["calibrated"] is False


def test_calibrate_deterministic_and_alias():
    corpus = _lane_corpus([(2.0 + 0.5 * i, 0.2 + 0.1 * i, 0.05 + 0.04 * i) for i in range(40)])
    first, _ = calibrate(corpus)
    second, _ = calibrate(corpus)
    assert first == second
    assert calibrate_thresholds(corpus) == first
