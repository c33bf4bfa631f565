"""Threshold configuration for the rule engine.

A :class:`ThresholdSet` bundles the global knobs (trend significance,
headway bounds, yaw triggers) with one :class:`ScenarioThresholds` entry
per scenario. All "high"/"low" qualifiers in the per-scenario rules
resolve to these values; shipped defaults are editable via the JSON
config format below and recalibratable from corpus statistics (see
``rules.calibrate_thresholds``). Two constants are fixed by convention
and never recalibrated: the 0.25 rad lane-change yaw trigger and the
2.0 m/s crosswalk conservative speed.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

from .models import ScenarioType


@dataclass(frozen=True)
class ScenarioThresholds:
    """Per-scenario rule thresholds, all in SI units.

    aggressive-side:
      v_avg_aggressive (m/s), a_max_aggressive (m/s^2), sigma_a_aggressive
      (m/s^2): any-exceeds triggers for the "high" predicates;
      v_avg_high / a_max_high: the paired both-exceed triggers used by the
      side-to-main (ego on main road) rule;
      delta_psi_aggressive (rad): abrupt-yaw trigger for lane changes;
      lat_accel_aggressive (m/s^2): lateral-stability trigger for
      roundabout interiors.
    conservative-side:
      v_avg_low (m/s), sigma_a_low (m/s^2), delta_psi_low (rad).
    """

    v_avg_aggressive: float
    a_max_aggressive: float
    sigma_a_aggressive: float
    v_avg_high: float
    a_max_high: float
    v_avg_low: float
    sigma_a_low: float
    delta_psi_aggressive: float = 0.60
    delta_psi_low: float = 0.32
    lat_accel_aggressive: float = 2.5

    def __post_init__(self) -> None:
        for name, value in dataclasses.asdict(self).items():
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"threshold {name} must be finite and positive, got {value}")
        if self.v_avg_high <= self.v_avg_low:
            raise ValueError(
                f"v_avg_high ({self.v_avg_high}) must exceed v_avg_low ({self.v_avg_low})"
            )

    def scaled(self, factor: float) -> "ScenarioThresholds":
        """Return a copy with the aggressive-side triggers multiplied by factor."""
        return dataclasses.replace(
            self,
            v_avg_aggressive=self.v_avg_aggressive * factor,
            a_max_aggressive=self.a_max_aggressive * factor,
            sigma_a_aggressive=self.sigma_a_aggressive * factor,
        )


def _default_scenario_table() -> dict[ScenarioType, ScenarioThresholds]:
    def st(v, a, s, v_low, s_low, **kw) -> ScenarioThresholds:
        return ScenarioThresholds(
            v_avg_aggressive=v,
            a_max_aggressive=a,
            sigma_a_aggressive=s,
            v_avg_high=kw.pop("v_high", v),
            a_max_high=kw.pop("a_high", a),
            v_avg_low=v_low,
            sigma_a_low=s_low,
            **kw,
        )

    return {
        ScenarioType.LANE_FOLLOWING: st(13.0, 2.5, 1.2, 6.0, 0.5),
        ScenarioType.PROTECTED_INTERSECTION: st(9.0, 2.4, 1.2, 3.5, 0.5),
        ScenarioType.UNPROTECTED_INTERSECTION: st(9.0, 2.4, 1.2, 3.5, 0.5),
        ScenarioType.LANE_CHANGE: st(12.0, 3.0, 1.5, 6.0, 0.5),
        ScenarioType.CROSSWALK: st(8.0, 2.4, 1.2, 2.0, 0.5),
        ScenarioType.SIDE_TO_MAIN_EGO_MERGING: st(9.0, 2.5, 1.2, 3.5, 0.5),
        ScenarioType.SIDE_TO_MAIN_EGO_MAIN: st(12.0, 2.5, 1.2, 5.0, 0.5),
        ScenarioType.SPECIAL_INTERIOR_ROAD: st(7.0, 2.2, 1.1, 3.0, 0.5),
        ScenarioType.ROUNDABOUT_ENTRANCE: st(8.0, 2.2, 1.1, 3.5, 0.5),
        ScenarioType.ROUNDABOUT_INTERIOR: st(8.0, 2.4, 1.2, 3.0, 0.5),
        ScenarioType.COUNTRYSIDE_ROAD: st(16.0, 2.5, 1.2, 7.0, 0.5),
        ScenarioType.CARPARK: st(4.0, 1.5, 0.8, 1.0, 0.3),
    }


@dataclass(frozen=True)
class ThresholdSet:
    """Global rule-engine knobs plus per-scenario threshold sections."""

    # trend fit
    slope_min: float = 0.15  # m/s^2, minimum significant linear slope
    v_std_max: float = 0.5  # m/s, quasi-constant speed spread
    # time-headway bounds and frame-fraction triggers
    unsafe_headway_s: float = 1.0
    safe_headway_s: float = 2.5
    unsafe_ratio_max: float = 0.5
    safe_ratio_min: float = 0.8
    # yaw triggers
    yaw_turn_min: float = 0.35  # rad, intersection turn detection
    yaw_lane_change: float = 0.25  # rad, fixed convention
    # crosswalk conservative speed, fixed convention
    crosswalk_v_conservative: float = 2.0
    # contextual tightening factors applied to aggressive-side thresholds
    curve_factor: float = 0.85
    unprotected_factor: float = 0.85
    turn_factor: float = 0.90
    pedestrian_speed_factor: float = 0.80
    close_lead_factor: float = 0.90
    scenarios: dict[ScenarioType, ScenarioThresholds] = field(
        default_factory=_default_scenario_table
    )

    def __post_init__(self) -> None:
        scalars = {
            name: getattr(self, name)
            for name in (
                "slope_min",
                "v_std_max",
                "unsafe_headway_s",
                "safe_headway_s",
                "unsafe_ratio_max",
                "safe_ratio_min",
                "yaw_turn_min",
                "yaw_lane_change",
                "crosswalk_v_conservative",
                "curve_factor",
                "unprotected_factor",
                "turn_factor",
                "pedestrian_speed_factor",
                "close_lead_factor",
            )
        }
        for name, value in scalars.items():
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"threshold {name} must be finite and positive, got {value}")
        if self.safe_headway_s <= self.unsafe_headway_s:
            raise ValueError(
                f"safe_headway_s ({self.safe_headway_s}) must exceed "
                f"unsafe_headway_s ({self.unsafe_headway_s})"
            )
        missing = [s.value for s in ScenarioType if s not in self.scenarios]
        if missing:
            raise ValueError(f"missing scenario threshold sections: {missing}")

    def for_scenario(self, scenario: ScenarioType) -> ScenarioThresholds:
        return self.scenarios[scenario]


_GLOBAL_FIELDS = (
    "slope_min",
    "v_std_max",
    "unsafe_headway_s",
    "safe_headway_s",
    "unsafe_ratio_max",
    "safe_ratio_min",
    "yaw_turn_min",
    "yaw_lane_change",
    "crosswalk_v_conservative",
    "curve_factor",
    "unprotected_factor",
    "turn_factor",
    "pedestrian_speed_factor",
    "close_lead_factor",
)


def thresholds_to_dict(ts: ThresholdSet) -> dict:
    doc = {name: getattr(ts, name) for name in _GLOBAL_FIELDS}
    doc["scenarios"] = {
        scenario.value: dataclasses.asdict(ts.scenarios[scenario])
        for scenario in ScenarioType
    }
    return doc


def thresholds_from_dict(doc: dict) -> ThresholdSet:
    """Build a ThresholdSet from a config dict; absent entries keep defaults."""
    kwargs = {name: float(doc[name]) for name in _GLOBAL_FIELDS if name in doc}
    scenarios = _default_scenario_table()
    for key, section in doc.get("scenarios", {}).items():
        scenario = ScenarioType(key)
        base = dataclasses.asdict(scenarios[scenario])
        base.update({k: float(v) for k, v in section.items()})
        scenarios[scenario] = ScenarioThresholds(**base)
    return ThresholdSet(scenarios=scenarios, **kwargs)


def save_thresholds(ts: ThresholdSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(thresholds_to_dict(ts), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_thresholds(path) -> ThresholdSet:
    with open(path, encoding="utf-8") as fh:
        return thresholds_from_dict(json.load(fh))
