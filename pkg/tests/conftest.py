"""Shared trajectory and agent builders for the test suite."""

import math

import pytest

from stylebench.models import (
    AgentKind,
    AgentState,
    AgentTrack,
    SceneContext,
    ScenarioType,
    Trajectory,
    TrajectorySample,
    wrap_angle,
)

DT = 0.1
N = 41


def build_traj(
    speeds,
    clip_id="t-000",
    dt=DT,
    yaw0=0.0,
    yaw_rate=0.0,
    a_lon=None,
    a_lat=None,
    x0=0.0,
    y0=0.0,
):
    """Straight or constant-turn trajectory integrated from a speed profile.

    ax/ay default to zero; pass profiles to exercise comfort limits.
    """
    n = len(speeds)
    samples = []
    x, y = x0, y0
    for i, v in enumerate(speeds):
        yaw = wrap_angle(yaw0 + yaw_rate * i * dt)
        if i > 0:
            prev_yaw = wrap_angle(yaw0 + yaw_rate * (i - 1) * dt)
            x += speeds[i - 1] * math.cos(prev_yaw) * dt
            y += speeds[i - 1] * math.sin(prev_yaw) * dt
        samples.append(
            TrajectorySample(
                t=i * dt,
                x=x,
                y=y,
                yaw=yaw,
                vx=float(v),
                vy=0.0,
                ax=float(a_lon[i]) if a_lon is not None else 0.0,
                ay=float(a_lat[i]) if a_lat is not None else 0.0,
            )
        )
    return Trajectory(clip_id=clip_id, samples=tuple(samples), dt_nominal=dt)


def const_traj(v, n=N, **kw):
    return build_traj([v] * n, **kw)


def vehicle_ahead(traj, gap, speed=None, agent_id="lead", half_length=2.3, half_width=1.0):
    """Vehicle placed `gap` metres along the ego heading at every frame."""
    states = []
    for s in traj.samples:
        states.append(
            AgentState(
                t=s.t,
                x=s.x + gap * math.cos(s.yaw),
                y=s.y + gap * math.sin(s.yaw),
                yaw=s.yaw,
                speed=s.speed if speed is None else speed,
            )
        )
    return AgentTrack(
        agent_id=agent_id,
        kind=AgentKind.VEHICLE,
        half_length=half_length,
        half_width=half_width,
        states=tuple(states),
    )


def box_around(traj, margin=20.0):
    """Axis-aligned corridor comfortably containing the whole path."""
    xs = [s.x for s in traj.samples]
    ys = [s.y for s in traj.samples]
    lo_x, hi_x = min(xs) - margin, max(xs) + margin
    lo_y, hi_y = min(ys) - margin, max(ys) + margin
    return ((lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y))


@pytest.fixture
def lane_ctx():
    return SceneContext(scenario=ScenarioType.LANE_FOLLOWING)
