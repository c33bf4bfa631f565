"""Kinematic feature extraction against closed-form oracles."""

import math
import statistics

import numpy as np
import pytest

from stylebench.kinematics import (
    Maneuver,
    TrendClass,
    _align_states,
    compute_min_ttc,
    compute_motion_stats,
    detect_maneuver,
    extract_features,
    fit_velocity_trend,
    headway_ratios,
    lead_track,
)
from stylebench.models import AgentKind, AgentState, AgentTrack
from stylebench.thresholds import ThresholdSet
from tests.conftest import DT, N, build_traj, const_traj, vehicle_ahead
from tests.trend_cases import ANALYTIC_CASES, NOISE_LEVELS, sample_speeds

TS = ThresholdSet()


def _profile(fn, sigma, rng):
    return sample_speeds(fn, sigma, rng, n=N, dt=DT)


@pytest.mark.parametrize("name,fn,expected", ANALYTIC_CASES, ids=lambda c: str(c)[:16])
@pytest.mark.parametrize("sigma", NOISE_LEVELS)
def test_trend_analytic_suite(name, fn, expected, sigma):
    rng = np.random.default_rng(hash((name, sigma)) % 2**32)
    got = fit_velocity_trend(_profile(fn, sigma, rng), TS)
    assert got is expected, f"{name} @ sigma={sigma}: {got} != {expected}"


def test_trend_quasi_takes_precedence_over_quadratic():
    # tiny perfect parabola: std 0.13 m/s sits inside the quasi band
    speeds = _profile(lambda t: 8.0 - 0.1 * (t - 2.0) ** 2, 0.0, None)
    assert fit_velocity_trend(speeds, TS) is TrendClass.QUASI_CONSTANT


def test_trend_edge_vertex_is_not_non_monotonic():
    # vertex at t=0.2, inside the 10% edge margin: treated as monotone rise
    speeds = _profile(lambda t: 3.0 + 0.9 * (t - 0.2) ** 2, 0.0, None)
    assert fit_velocity_trend(speeds, TS) is TrendClass.ACCELERATING


def test_trend_two_samples_linear_only():
    assert fit_velocity_trend([(0.0, 1.0), (1.0, 3.0)], TS) is TrendClass.ACCELERATING
    with pytest.raises(ValueError):
        fit_velocity_trend([(0.0, 1.0)], TS)


def test_motion_stats_against_statistics_module():
    rng = np.random.default_rng(5)
    speeds = rng.uniform(2.0, 12.0, N).tolist()
    a_lon = rng.normal(0.0, 1.0, N).tolist()
    a_lat = rng.normal(0.0, 0.5, N).tolist()
    traj = build_traj(speeds, a_lon=a_lon, a_lat=a_lat, yaw0=0.4)
    stats = compute_motion_stats(traj)

    assert stats["v_avg"] == pytest.approx(statistics.fmean(speeds), abs=1e-12)
    assert stats["v_std"] == pytest.approx(statistics.pstdev(speeds), abs=1e-12)
    accel = [math.hypot(a, b) for a, b in zip(a_lon, a_lat)]
    assert stats["a_max"] == pytest.approx(max(accel), abs=1e-12)
    assert stats["sigma_a"] == pytest.approx(statistics.pstdev(accel), abs=1e-12)
    assert stats["ay_max"] == pytest.approx(max(abs(a) for a in a_lat), abs=1e-12)
    assert stats["delta_psi"] == pytest.approx(0.0, abs=1e-12)


def test_delta_psi_wraps():
    traj = build_traj([5.0] * N, yaw0=math.pi - 0.05, yaw_rate=0.05)
    # ends past +pi, so the wrapped difference stays small and positive
    stats = compute_motion_stats(traj)
    assert stats["delta_psi"] == pytest.approx(0.05 * (N - 1) * DT, abs=1e-9)


# --- headway -----------------------------------------------------------------

def test_headway_all_unsafe():
    traj = const_traj(10.0)
    lead = vehicle_ahead(traj, 8.0)  # h = 0.8 s < 1.0 s
    assert headway_ratios(traj, lead, TS) == (1.0, 0.0)


def test_headway_all_safe():
    traj = const_traj(10.0)
    lead = vehicle_ahead(traj, 30.0)  # h = 3.0 s > 2.5 s
    assert headway_ratios(traj, lead, TS) == (0.0, 1.0)


def test_headway_neutral_band():
    traj = const_traj(10.0)
    lead = vehicle_ahead(traj, 15.0)  # h = 1.5 s, between the bounds
    assert headway_ratios(traj, lead, TS) == (0.0, 0.0)


def test_headway_no_lead_or_stationary_ego():
    traj = const_traj(10.0)
    assert headway_ratios(traj, None, TS) == (0.0, 0.0)
    crawl = const_traj(0.3)  # below the 0.5 m/s speed floor
    assert headway_ratios(crawl, vehicle_ahead(crawl, 5.0), TS) == (0.0, 0.0)


def test_headway_mixed_fraction():
    # speed up mid-clip so the same 12 m gap flips from neutral to unsafe
    speeds = [8.0] * 20 + [16.0] * 21
    traj = const_traj(8.0)
    samples = traj.samples
    lead = vehicle_ahead(traj, 12.0)
    traj2 = build_traj(speeds)
    lead2 = vehicle_ahead(traj2, 12.0)
    unsafe, safe = headway_ratios(traj2, lead2, TS)
    # 12/8 = 1.5 neutral for 20 frames, 12/16 = 0.75 unsafe for 21
    assert unsafe == pytest.approx(21 / 41)
    assert safe == 0.0
    del samples, lead


# --- TTC ----------------------------------------------------------------------

def _static_agent(x, y, yaw=0.0, times=None, agent_id="obst", kind=AgentKind.VEHICLE):
    times = times if times is not None else [i * DT for i in range(N)]
    states = tuple(AgentState(t=t, x=x, y=y, yaw=yaw, speed=0.0) for t in times)
    return AgentTrack(
        agent_id=agent_id, kind=kind, half_length=2.3, half_width=1.0, states=states
    )


def test_min_ttc_static_obstacle_closed_form():
    traj = const_traj(10.0)
    agent = _static_agent(50.0, 0.0)
    # gap shrinks to 50 - 10 * 4 = 10 m at the final frame; closing 10 m/s
    assert compute_min_ttc(traj, [agent]) == pytest.approx(1.0, abs=1e-9)


def test_min_ttc_body_frame_heading_north():
    traj = const_traj(10.0, yaw0=math.pi / 2)
    agent = _static_agent(0.0, 50.0, yaw=math.pi / 2)
    assert compute_min_ttc(traj, [agent]) == pytest.approx(1.0, abs=1e-9)


def test_min_ttc_ignores_behind_lateral_and_opening():
    traj = const_traj(10.0)
    behind = _static_agent(-20.0, 0.0, agent_id="rear")
    lateral = _static_agent(30.0, 2.5, agent_id="side")  # outside the 2 m cone
    fleeing = vehicle_ahead(traj, 20.0, speed=15.0, agent_id="fast")
    assert compute_min_ttc(traj, [behind, lateral, fleeing]) == math.inf


def test_min_ttc_same_speed_lead_is_inf():
    traj = const_traj(10.0)
    assert compute_min_ttc(traj, [vehicle_ahead(traj, 15.0)]) == math.inf


def test_min_ttc_slower_lead_relative_closure():
    traj = const_traj(12.0)
    # builder holds the gap at 30 m, so every frame sees the same
    # instantaneous closure: 30 / (12 - 6) = 5 s
    lead = vehicle_ahead(traj, 30.0, speed=6.0)
    assert compute_min_ttc(traj, [lead]) == pytest.approx(5.0, abs=1e-9)


# --- alignment ------------------------------------------------------------------

def test_align_states_nearest_within_half_step():
    traj = const_traj(5.0)
    on_grid = _static_agent(100.0, 0.0, times=[0.0, 0.1, 0.2])
    assert [i for i, _ in _align_states(traj, on_grid)] == [0, 1, 2]

    offset = _static_agent(100.0, 0.0, times=[0.13])
    aligned = _align_states(traj, offset)
    assert [i for i, _ in aligned] == [1]

    stray = _static_agent(100.0, 0.0, times=[57.0])
    assert _align_states(traj, stray) == []


def test_align_states_closest_wins_per_frame():
    traj = const_traj(5.0)
    track = AgentTrack(
        agent_id="dup",
        kind=AgentKind.VEHICLE,
        half_length=1.0,
        half_width=1.0,
        states=(
            AgentState(t=0.104, x=1.0, y=0.0, yaw=0.0, speed=0.0),
            AgentState(t=0.099, x=2.0, y=0.0, yaw=0.0, speed=0.0),
        ),
    )
    aligned = _align_states(traj, track)
    assert len(aligned) == 1
    assert aligned[0][0] == 1 and aligned[0][1].x == 2.0


def test_lead_track_prefers_most_forward_frames():
    traj = const_traj(8.0)
    mostly_ahead = _static_agent(60.0, 0.0, agent_id="ahead")
    briefly_ahead = _static_agent(
        60.0, 0.0, times=[0.0, 0.1], agent_id="brief"
    )
    walker = _static_agent(40.0, 0.0, agent_id="walker", kind=AgentKind.PEDESTRIAN)
    assert lead_track(traj, [briefly_ahead, walker, mostly_ahead]).agent_id == "ahead"
    assert lead_track(traj, [walker]) is None


def test_detect_maneuver_thresholds():
    assert detect_maneuver(0.3, TS, intersection=True) is Maneuver.STRAIGHT
    assert detect_maneuver(0.3, TS, intersection=False) is Maneuver.LEFT
    assert detect_maneuver(0.4, TS, intersection=True) is Maneuver.LEFT
    assert detect_maneuver(-0.4, TS, intersection=True) is Maneuver.RIGHT
    assert detect_maneuver(0.0, TS) is Maneuver.STRAIGHT


def test_extract_features_composition():
    traj = const_traj(10.0)
    lead = vehicle_ahead(traj, 8.0)
    feats = extract_features(traj, [lead], TS)
    assert feats.v_avg == pytest.approx(10.0)
    assert feats.trend is TrendClass.QUASI_CONSTANT
    assert feats.unsafe_ratio == 1.0
    assert feats.min_ttc == math.inf  # same-speed lead never closes
    assert feats.to_dict()["min_ttc"] is None
