"""Independent brute-force re-implementation of the clip scorer.

Everything here is deliberately written as plain per-frame loops with
shapely doing the geometry, sharing no code with the package internals,
so score equality is evidence of correctness rather than of calling the
same functions twice.
"""

import math

from shapely.geometry import Point, Polygon

CONE_HALF_WIDTH = 2.0


def _wrap(angle):
    while angle <= -math.pi:
        angle += 2.0 * math.pi
    while angle > math.pi:
        angle -= 2.0 * math.pi
    return angle


def _corners(cx, cy, yaw, hl, hw):
    c, s = math.cos(yaw), math.sin(yaw)
    pts = []
    for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)):
        pts.append((cx + dx * c - dy * s, cy + dx * s + dy * c))
    return pts


def _aligned(traj, track):
    """(ego_index, state) pairs by nearest timestamp, one per frame."""
    times = [s.t for s in traj.samples]
    half = traj.dt_nominal / 2.0
    best = {}
    for state in track.states:
        idx = 0
        gap = abs(times[0] - state.t)
        for i in range(1, len(times)):
            g = abs(times[i] - state.t)
            if g < gap:
                idx, gap = i, g
        if gap > half:
            continue
        if idx not in best or gap < best[idx][0]:
            best[idx] = (gap, state)
    return [(i, best[i][1]) for i in sorted(best)]


def oracle_progress(traj, horizon):
    t0 = traj.samples[0].t
    total = 0.0
    prev = traj.samples[0]
    for sample in traj.samples[1:]:
        if sample.t > t0 + horizon + 1e-9:
            break
        total += math.hypot(sample.x - prev.x, sample.y - prev.y)
        prev = sample
    return total


def oracle_ref(ep_target):
    if ep_target < 10:
        return 3.0
    if ep_target < 24:
        return 5.0
    if ep_target < 40:
        return 6.0
    return 7.0


def oracle_ep(ep_agent, ep_target, alpha):
    ref = oracle_ref(ep_target)
    value = 1.0 - alpha * (ep_agent - ep_target) ** 2 / (ref * ref)
    return value if value > 0.0 else 0.0


def oracle_min_ttc(traj, agents):
    best = math.inf
    for track in agents:
        for idx, state in _aligned(traj, track):
            ego = traj.samples[idx]
            dx = state.x - ego.x
            dy = state.y - ego.y
            c, s = math.cos(ego.yaw), math.sin(ego.yaw)
            lon = dx * c + dy * s
            lat = -dx * s + dy * c
            if lon <= 0 or abs(lat) >= CONE_HALF_WIDTH:
                continue
            gap = math.hypot(dx, dy)
            if gap <= 0:
                return 0.0
            evx = ego.vx * c - ego.vy * s
            evy = ego.vx * s + ego.vy * c
            avx = state.speed * math.cos(state.yaw)
            avy = state.speed * math.sin(state.yaw)
            closing = (evx - avx) * (dx / gap) + (evy - avy) * (dy / gap)
            if closing > 0:
                ttc = gap / closing
                if ttc < best:
                    best = ttc
    return best


def oracle_ttc_score(min_ttc, floor):
    return 1.0 if min_ttc >= floor else min_ttc / floor


def oracle_comfort(traj, scale, limits):
    lon_hi = limits.max_lon_accel * scale
    lon_lo = limits.max_lon_decel * scale
    lat_hi = limits.max_lat_accel * scale
    jerk_hi = limits.max_jerk * scale
    yaw_hi = limits.max_yaw_rate * scale
    good = 0
    prev = None
    for sample in traj.samples:
        ok = (-lon_lo <= sample.ax <= lon_hi) and abs(sample.ay) <= lat_hi
        if prev is not None:
            dt = sample.t - prev.t
            a1 = math.hypot(prev.ax, prev.ay)
            a2 = math.hypot(sample.ax, sample.ay)
            if abs((a2 - a1) / dt) > jerk_hi:
                ok = False
            if abs(_wrap(sample.yaw - prev.yaw) / dt) > yaw_hi:
                ok = False
        if ok:
            good += 1
        prev = sample
    return good / len(traj.samples)


def oracle_nc(traj, agents, hl, hw):
    for track in agents:
        for idx, state in _aligned(traj, track):
            ego = traj.samples[idx]
            ego_poly = Polygon(_corners(ego.x, ego.y, ego.yaw, hl, hw))
            agent_poly = Polygon(
                _corners(state.x, state.y, state.yaw, track.half_length, track.half_width)
            )
            if ego_poly.intersects(agent_poly):
                return 0
    return 1


def oracle_dac(traj, corridor, hl, hw, mode):
    if corridor is None:
        return 1
    poly = Polygon(list(corridor))
    for sample in traj.samples:
        if not poly.covers(Point(sample.x, sample.y)):
            return 0
        if mode == "footprint":
            for cx, cy in _corners(sample.x, sample.y, sample.yaw, hl, hw):
                if not poly.covers(Point(cx, cy)):
                    return 0
    return 1


def oracle_evaluate(agent_traj, human_traj, agents, corridor, style, config):
    """Full scoring pipeline as one independent pass; returns a dict."""
    params = config.style_params
    ep_agent = oracle_progress(agent_traj, config.horizon_s)
    ep_target = oracle_progress(human_traj, config.horizon_s)
    ep = oracle_ep(ep_agent, ep_target, params.alpha)
    min_ttc = oracle_min_ttc(agent_traj, agents)
    ttc = oracle_ttc_score(min_ttc, params.ttc_min[style])
    comfort = oracle_comfort(agent_traj, params.comfort_scale[style], config.comfort_limits)
    nc = oracle_nc(agent_traj, agents, config.ego_half_length, config.ego_half_width)
    dac = oracle_dac(
        agent_traj, corridor, config.ego_half_length, config.ego_half_width, config.dac_mode
    )
    w = config.weights
    graded = (w.ttc * ttc + w.comfort * comfort + w.ep * ep) / (w.ttc + w.comfort + w.ep)
    return {
        "nc": nc,
        "dac": dac,
        "ttc": ttc,
        "comfort": comfort,
        "ep": ep,
        "sm_pdms": nc * dac * graded,
        "min_ttc": min_ttc,
        "ep_agent": ep_agent,
        "ep_target": ep_target,
    }
